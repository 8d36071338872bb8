#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <type_traits>
#include <utility>
#include <vector>

#include "zbias/metrics.hpp"
#include "zbias/rational.hpp"
#include "zbias/rng.hpp"

namespace zbias {

namespace detail {

inline double as_double(double x) { return x; }
inline double as_double(const Rational& x) { return to_double(x); }

template <typename T>
T abs_value(const T& x) {
    return x < 0 ? T(-x) : x;
}

}  // namespace detail

template <typename T>
struct JointAtom {
    T w;
    T wp;
    T p;
};

// Law of an exchangeable pair (W, W'), atom by atom. Scalar type is either
// Rational (exact checks) or double.
template <typename T>
struct ExchangeableJoint {
    std::vector<JointAtom<T>> atoms;
};

namespace detail {

template <typename T>
void validate_joint(const std::vector<JointAtom<T>>& atoms, const char* who) {
    if (atoms.empty()) throw std::invalid_argument(std::string(who) + ": joint has no atoms");
    T total(0);
    for (const auto& at : atoms) {
        if (at.p < 0) throw std::invalid_argument(std::string(who) + ": negative probability");
        total += at.p;
    }
    bool ok;
    if constexpr (std::is_same_v<T, Rational>) {
        ok = total == 1;
    } else {
        ok = std::abs(as_double(total) - 1.0) <= 1e-12;
    }
    if (!ok) throw std::invalid_argument(std::string(who) + ": probabilities must sum to 1");
}

template <typename T>
void validate_stein_constant(const T& a, const char* who) {
    if (!(a > 0) || a > 1) {
        throw std::invalid_argument(std::string(who) + ": a must lie in (0, 1]");
    }
}

}  // namespace detail

// Pair (W, W') with W' an independent copy of W; an a = 1 pair when E[W] = 0.
template <typename T>
ExchangeableJoint<T> independent_copy_joint(const std::vector<T>& values,
                                            const std::vector<T>& probs) {
    if (values.size() != probs.size() || values.empty()) {
        throw std::invalid_argument("independent_copy_joint: value/probability size mismatch");
    }
    ExchangeableJoint<T> joint;
    joint.atoms.reserve(values.size() * values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        for (std::size_t j = 0; j < values.size(); ++j) {
            T p(probs[i] * probs[j]);
            if (p == 0) continue;
            joint.atoms.push_back({values[i], values[j], p});
        }
    }
    detail::validate_joint(joint.atoms, "independent_copy_joint");
    return joint;
}

inline ExchangeableJoint<Rational> joint_from_matrix(const RationalMatrix& joint,
                                                     const std::vector<Rational>& values) {
    if (joint.rows != joint.cols || joint.rows != values.size()) {
        throw std::invalid_argument("joint_from_matrix: shape mismatch");
    }
    ExchangeableJoint<Rational> out;
    for (std::size_t i = 0; i < joint.rows; ++i) {
        for (std::size_t j = 0; j < joint.cols; ++j) {
            if (joint(i, j) == 0) continue;
            out.atoms.push_back({values[i], values[j], joint(i, j)});
        }
    }
    detail::validate_joint(out.atoms, "joint_from_matrix");
    return out;
}

// Marginal law of the first coordinate, grouped by exact value.
template <typename T>
std::pair<std::vector<T>, std::vector<T>> joint_marginal(const ExchangeableJoint<T>& joint) {
    std::map<T, T> mass;
    for (const auto& at : joint.atoms) {
        if (at.p != 0) mass[at.w] += at.p;
    }
    std::pair<std::vector<T>, std::vector<T>> out;
    for (const auto& [v, p] : mass) {
        out.first.push_back(v);
        out.second.push_back(p);
    }
    return out;
}

struct SteinPairReport {
    bool exchangeable = false;
    bool mean_zero = false;
    bool linear = false;
    bool moment_identity = false;
    double symmetry_gap = 0.0;
    double mean_gap = 0.0;
    double linearity_gap = 0.0;
    double moment_gap = 0.0;
    bool pass() const { return exchangeable && mean_zero && linear && moment_identity; }
};

// Checks the pair conditions: symmetry of the joint, E[W] = 0, the per-value
// regression E(W'|W=w) = (1-a)w, and E(W'-W)^2 = 2a Var(W). With tol = 0 every
// comparison is exact.
template <typename T>
SteinPairReport check_stein_pair(const ExchangeableJoint<T>& joint, const T& a, double tol) {
    detail::validate_joint(joint.atoms, "check_stein_pair");
    detail::validate_stein_constant(a, "check_stein_pair");
    if (tol < 0) throw std::invalid_argument("check_stein_pair: negative tolerance");

    auto within = [tol](const T& gap) {
        return gap == 0 || detail::as_double(gap) <= tol;
    };

    std::map<std::pair<T, T>, T> mass;
    for (const auto& at : joint.atoms) {
        if (at.p != 0) mass[{at.w, at.wp}] += at.p;
    }

    SteinPairReport report;

    T sym_gap(0);
    for (const auto& [key, p] : mass) {
        auto it = mass.find({key.second, key.first});
        T other = it == mass.end() ? T(0) : it->second;
        T gap = detail::abs_value(T(p - other));
        if (gap > sym_gap) sym_gap = gap;
    }
    report.symmetry_gap = detail::as_double(sym_gap);
    report.exchangeable = within(sym_gap);

    T mean(0), second(0), step_sq(0);
    std::map<T, std::pair<T, T>> slices;  // w -> (P(W=w), sum of w' mass)
    for (const auto& at : joint.atoms) {
        if (at.p == 0) continue;
        mean += at.p * at.w;
        second += at.p * at.w * at.w;
        step_sq += T(at.p * (at.wp - at.w) * (at.wp - at.w));
        auto& slice = slices[at.w];
        slice.first += at.p;
        slice.second += at.p * at.wp;
    }
    T mean_gap = detail::abs_value(mean);
    report.mean_gap = detail::as_double(mean_gap);
    report.mean_zero = within(mean_gap);

    T lin_gap(0);
    for (const auto& [w, slice] : slices) {
        T expected(T(1 - a) * w * slice.first);
        T gap(detail::abs_value(T(slice.second - expected)) / slice.first);
        if (gap > lin_gap) lin_gap = gap;
    }
    report.linearity_gap = detail::as_double(lin_gap);
    report.linear = within(lin_gap);

    T variance(second - mean * mean);
    T moment_gap = detail::abs_value(T(step_sq - T(2) * a * variance));
    report.moment_gap = detail::as_double(moment_gap);
    report.moment_identity = within(moment_gap);
    return report;
}

template <typename T>
struct SquareBiasJoint {
    std::vector<JointAtom<T>> atoms;  // (w-dagger, w-double-dagger, probability)
    T a;
};

// Reweights the pair law by (w'-w)^2 / (2a Var W). For a genuine a-Stein pair
// the weights sum to 1; anything else is rejected.
template <typename T>
SquareBiasJoint<T> square_bias(const ExchangeableJoint<T>& joint, const T& a) {
    detail::validate_joint(joint.atoms, "square_bias");
    detail::validate_stein_constant(a, "square_bias");

    T mean(0), second(0), step_sq(0);
    for (const auto& at : joint.atoms) {
        mean += at.p * at.w;
        second += at.p * at.w * at.w;
        step_sq += T(at.p * (at.wp - at.w) * (at.wp - at.w));
    }
    if (step_sq == 0) {
        throw std::invalid_argument("square_bias: W' equals W almost surely");
    }
    T denom(T(2) * a * T(second - mean * mean));

    SquareBiasJoint<T> out;
    out.a = a;
    T total(0);
    for (const auto& at : joint.atoms) {
        T weight(at.p * (at.wp - at.w) * (at.wp - at.w) / denom);
        if (weight == 0) continue;
        total += weight;
        out.atoms.push_back({at.w, at.wp, weight});
    }
    bool unit;
    if constexpr (std::is_same_v<T, Rational>) {
        unit = total == 1;
    } else {
        unit = std::abs(detail::as_double(total) - 1.0) <= 1e-9;
    }
    if (!unit) {
        throw std::logic_error("square_bias: weights do not sum to 1; not an a-Stein pair");
    }
    return out;
}

// One draw of U W-dagger + (1-U) W-double-dagger.
template <typename T>
double zero_bias_sample(const SquareBiasJoint<T>& sq, SplitMix64& rng) {
    if (sq.atoms.empty()) throw std::invalid_argument("zero_bias_sample: empty joint");
    double pick = rng.next_double();
    double cum = 0.0;
    std::size_t chosen = sq.atoms.size() - 1;
    for (std::size_t i = 0; i < sq.atoms.size(); ++i) {
        cum += detail::as_double(sq.atoms[i].p);
        if (pick < cum) {
            chosen = i;
            break;
        }
    }
    double u = rng.next_double();
    return u * detail::as_double(sq.atoms[chosen].w) +
           (1.0 - u) * detail::as_double(sq.atoms[chosen].wp);
}

// Piecewise-constant density between consecutive atoms of the base law.
class ZeroBiasDensity {
  public:
    ZeroBiasDensity(std::vector<double> breakpoints, std::vector<double> densities)
        : breaks_(std::move(breakpoints)), dens_(std::move(densities)) {
        if (breaks_.size() < 2 || dens_.size() != breaks_.size() - 1) {
            throw std::invalid_argument("ZeroBiasDensity: breakpoint/density size mismatch");
        }
        double integral = 0.0;
        for (std::size_t i = 0; i + 1 < breaks_.size(); ++i) {
            if (!(breaks_[i] < breaks_[i + 1])) {
                throw std::invalid_argument("ZeroBiasDensity: breakpoints must increase");
            }
            if (dens_[i] < -1e-12) {
                throw std::invalid_argument("ZeroBiasDensity: negative density");
            }
            dens_[i] = std::max(dens_[i], 0.0);
            integral += dens_[i] * (breaks_[i + 1] - breaks_[i]);
        }
        if (std::abs(integral - 1.0) > 1e-12) {
            throw std::logic_error("ZeroBiasDensity: density does not integrate to 1");
        }
    }

    const std::vector<double>& breakpoints() const { return breaks_; }
    const std::vector<double>& densities() const { return dens_; }

    double pdf(double x) const {
        auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
        if (it == breaks_.begin() || it == breaks_.end()) return 0.0;
        return dens_[static_cast<std::size_t>(it - breaks_.begin()) - 1];
    }

    double cdf(double x) const {
        if (x <= breaks_.front()) return 0.0;
        double cum = 0.0;
        for (std::size_t i = 0; i + 1 < breaks_.size(); ++i) {
            if (x >= breaks_[i + 1]) {
                cum += dens_[i] * (breaks_[i + 1] - breaks_[i]);
            } else {
                cum += dens_[i] * (x - breaks_[i]);
                break;
            }
        }
        return std::min(cum, 1.0);
    }

  private:
    std::vector<double> breaks_;
    std::vector<double> dens_;
};

// Density-level oracle: p*(x) = E[X 1{X > x}] / Var(X) for a mean-zero base.
inline ZeroBiasDensity zero_bias_density(const DiscreteDistribution& base) {
    if (std::abs(base.mean()) > 1e-12) {
        throw std::invalid_argument("zero_bias_density: base law must have mean 0");
    }
    double var = base.variance();
    if (!(var > 0)) throw std::invalid_argument("zero_bias_density: base law is degenerate");

    const auto& v = base.values();
    const auto& p = base.probs();
    std::vector<double> dens(v.size() - 1, 0.0);
    double upper_tail = 0.0;
    for (std::size_t i = v.size(); i-- > 1;) {
        upper_tail += v[i] * p[i];
        dens[i - 1] = upper_tail / var;
    }
    return ZeroBiasDensity(v, dens);
}

struct TCondVInputs {
    double e_abs_v_mu;  // E|(V at the enriched index - V) + mean shift|
    double e_abs_t;     // E|T - mu|
    double e_abs_t3;    // E|T - mu|^3
    double var_t;       // Var(T - mu)
};

inline double tcondv_bound(const TCondVInputs& in) {
    if (!(in.var_t > 0)) throw std::domain_error("tcondv_bound: var_t must be positive");
    if (in.e_abs_v_mu < 0 || in.e_abs_t < 0 || in.e_abs_t3 < 0) {
        throw std::invalid_argument("tcondv_bound: negative input");
    }
    return 2.0 * in.e_abs_v_mu + 2.0 * in.e_abs_t + in.e_abs_t3 / in.var_t;
}

inline double tcondv_bound_constant_sigma(double e_abs_t, double e_abs_t3, double var_t) {
    return tcondv_bound({0.0, e_abs_t, e_abs_t3, var_t});
}

struct Zb2Report {
    double value = 0.0;
    double stderr_estimate = 0.0;
    std::size_t sample_count = 0;
};

// 2 E|W* - W| from coupled samples.
inline Zb2Report zb2_bound(const std::vector<std::pair<double, double>>& paired_samples) {
    if (paired_samples.empty()) throw std::invalid_argument("zb2_bound: no samples");
    double sum = 0.0;
    for (const auto& [w, ws] : paired_samples) sum += std::abs(ws - w);
    double mean = sum / double(paired_samples.size());
    double ss = 0.0;
    for (const auto& [w, ws] : paired_samples) {
        double d = std::abs(ws - w) - mean;
        ss += d * d;
    }
    Zb2Report report;
    report.sample_count = paired_samples.size();
    report.value = 2.0 * mean;
    if (paired_samples.size() > 1) {
        double sd = std::sqrt(ss / double(paired_samples.size() - 1));
        report.stderr_estimate = 2.0 * sd / std::sqrt(double(paired_samples.size()));
    }
    return report;
}

}  // namespace zbias
