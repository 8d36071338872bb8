#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace zbias {

using BigInt = boost::multiprecision::cpp_int;

/// Arbitrary-precision rational scalar; carrier for every exact identity in
/// the library. All probability masses, moments and kernel entries are held
/// in this type until a floating value is explicitly requested.
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

inline BigInt factorial(int n) {
    if (n < 0) throw std::domain_error("factorial: negative argument");
    BigInt f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

inline BigInt binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    BigInt b = 1;
    for (int i = 1; i <= k; ++i) {
        b *= (n - k + i);
        b /= i;
    }
    return b;
}

/// Parses "P", "-P" or "P/Q" into an exact rational. Used by the CLI for
/// --alpha style flags.
inline Rational parse_rational(std::string_view text) {
    const auto slash = text.find('/');
    try {
        if (slash == std::string_view::npos) return Rational(BigInt(std::string(text)));
        const BigInt num{std::string(text.substr(0, slash))};
        const BigInt den{std::string(text.substr(slash + 1))};
        if (den == 0) throw std::invalid_argument("zero denominator");
        return Rational(num, den);
    } catch (const std::exception&) {
        throw std::invalid_argument("parse_rational: cannot parse '" + std::string(text) + "'");
    }
}

inline std::string rational_to_string(const Rational& q) {
    std::string s = numerator(q).str();
    if (denominator(q) != 1) s += "/" + denominator(q).str();
    return s;
}

/// Dense row-stochastic matrix over exact rationals. Sized for the desk-scale
/// lattice computations here (levels <= ~50), so no sparsity or pivoting.
struct RationalMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<Rational> data;  // row-major

    RationalMatrix() = default;
    RationalMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c) {}

    Rational& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    const Rational& operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    static RationalMatrix identity(std::size_t n) {
        RationalMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    friend RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b) {
        if (a.cols != b.rows) throw std::invalid_argument("RationalMatrix: shape mismatch");
        RationalMatrix out(a.rows, b.cols);
        for (std::size_t i = 0; i < a.rows; ++i)
            for (std::size_t k = 0; k < a.cols; ++k) {
                const Rational& aik = a(i, k);
                if (aik == 0) continue;
                for (std::size_t j = 0; j < b.cols; ++j) out(i, j) += aik * b(k, j);
            }
        return out;
    }

    friend bool operator==(const RationalMatrix& a, const RationalMatrix& b) {
        return a.rows == b.rows && a.cols == b.cols && a.data == b.data;
    }

    /// a*s + b*t, elementwise; shapes must agree.
    static RationalMatrix combine(const Rational& s, const RationalMatrix& a, const Rational& t,
                                  const RationalMatrix& b) {
        if (a.rows != b.rows || a.cols != b.cols)
            throw std::invalid_argument("RationalMatrix: shape mismatch");
        RationalMatrix out(a.rows, a.cols);
        for (std::size_t i = 0; i < a.data.size(); ++i) out.data[i] = s * a.data[i] + t * b.data[i];
        return out;
    }

    std::vector<Rational> apply(const std::vector<Rational>& v) const {
        if (v.size() != cols) throw std::invalid_argument("RationalMatrix: vector length mismatch");
        std::vector<Rational> out(rows);
        for (std::size_t i = 0; i < rows; ++i) {
            Rational s = 0;
            for (std::size_t j = 0; j < cols; ++j) s += (*this)(i, j) * v[j];
            out[i] = s;
        }
        return out;
    }
};

}  // namespace zbias
