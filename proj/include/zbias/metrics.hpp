#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "zbias/rng.hpp"

namespace zbias {

inline double normal_pdf(double x) {
    static const double inv_sqrt_2pi = 0.3989422804014326779;
    return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x * 0.7071067811865475244);
}

// Acklam's rational approximation refined by one Halley step; accurate to
// well below 1e-12 over (0,1).
inline double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::domain_error("normal_quantile: p must lie in (0,1)");
    }
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;
    double x;
    if (p < p_low) {
        double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        double q = p - 0.5;
        double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    for (int i = 0; i < 2; ++i) {
        double e = normal_cdf(x) - p;
        double u = e / normal_pdf(x);
        x -= u / (1.0 + 0.5 * x * u);
    }
    return x;
}

// Finitely supported probability law on the reals. Atom values are kept
// strictly increasing; probabilities are nonnegative and sum to one.
class DiscreteDistribution {
public:
    DiscreteDistribution(std::vector<double> values, std::vector<double> probs)
        : values_(std::move(values)), probs_(std::move(probs)) {
        if (values_.empty() || values_.size() != probs_.size()) {
            throw std::invalid_argument("DiscreteDistribution: empty or mismatched atoms");
        }
        double total = 0.0;
        for (std::size_t i = 0; i < values_.size(); ++i) {
            if (!std::isfinite(values_[i])) {
                throw std::invalid_argument("DiscreteDistribution: non-finite value");
            }
            if (i + 1 < values_.size() && !(values_[i] < values_[i + 1])) {
                throw std::invalid_argument("DiscreteDistribution: values must increase strictly");
            }
            if (!(probs_[i] >= 0.0)) {
                throw std::invalid_argument("DiscreteDistribution: negative probability");
            }
            total += probs_[i];
        }
        if (std::abs(total - 1.0) > 1e-12) {
            throw std::invalid_argument("DiscreteDistribution: probabilities sum to " +
                                        std::to_string(total));
        }
    }

    // Builds from unsorted atoms, merging duplicates and dropping zero-mass ones.
    static DiscreteDistribution from_atoms(std::vector<std::pair<double, double>> atoms) {
        std::sort(atoms.begin(), atoms.end(),
                  [](const auto& l, const auto& r) { return l.first < r.first; });
        std::vector<double> values;
        std::vector<double> probs;
        for (const auto& [v, p] : atoms) {
            if (!values.empty() && values.back() == v) {
                probs.back() += p;
            } else {
                values.push_back(v);
                probs.push_back(p);
            }
        }
        std::vector<double> fv, fp;
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (probs[i] != 0.0) {
                fv.push_back(values[i]);
                fp.push_back(probs[i]);
            }
        }
        return DiscreteDistribution(std::move(fv), std::move(fp));
    }

    const std::vector<double>& values() const { return values_; }
    const std::vector<double>& probs() const { return probs_; }
    std::size_t size() const { return values_.size(); }

    double mean() const {
        double m = 0.0;
        for (std::size_t i = 0; i < size(); ++i) m += probs_[i] * values_[i];
        return m;
    }

    double variance() const {
        double m = mean();
        double v = 0.0;
        for (std::size_t i = 0; i < size(); ++i) {
            double d = values_[i] - m;
            v += probs_[i] * d * d;
        }
        return v;
    }

    double cdf(double x) const {
        double c = 0.0;
        for (std::size_t i = 0; i < size() && values_[i] <= x; ++i) c += probs_[i];
        return c;
    }

    double sample(SplitMix64& rng) const {
        double u = rng.next_double();
        double c = 0.0;
        for (std::size_t i = 0; i < size(); ++i) {
            c += probs_[i];
            if (u < c) return values_[i];
        }
        return values_.back();
    }

private:
    std::vector<double> values_;
    std::vector<double> probs_;
};

enum class W1Method { exact, empirical };

struct W1Report {
    double value = 0.0;
    W1Method method = W1Method::exact;
    std::optional<double> stderr_estimate;
    std::optional<std::size_t> sample_count;
};

namespace detail {

// Antiderivative of the standard normal CDF.
inline double normal_cdf_integral(double t) {
    return t * normal_cdf(t) + normal_pdf(t);
}

// Integral of |c - Phi(x)| over [lo, hi] for constant c in [0,1].
inline double abs_level_integral(double lo, double hi, double c) {
    const double g_lo = normal_cdf_integral(lo);
    const double g_hi = normal_cdf_integral(hi);
    if (normal_cdf(lo) >= c) return (g_hi - g_lo) - c * (hi - lo);
    if (normal_cdf(hi) <= c) return c * (hi - lo) - (g_hi - g_lo);
    double split = normal_quantile(c);
    split = std::clamp(split, lo, hi);
    const double g_split = normal_cdf_integral(split);
    return (c * (split - lo) - (g_split - g_lo)) + ((g_hi - g_split) - c * (hi - split));
}

}  // namespace detail

// L1 distance between the CDF of a finitely supported law and the standard
// normal CDF, evaluated in closed form piece by piece.
inline W1Report w1_exact(const DiscreteDistribution& law) {
    const auto& v = law.values();
    const auto& p = law.probs();
    double total = detail::normal_cdf_integral(v.front());
    double cum = 0.0;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
        cum += p[i];
        total += detail::abs_level_integral(v[i], v[i + 1], std::min(cum, 1.0));
    }
    total += detail::normal_cdf_integral(v.back()) - v.back();
    W1Report report;
    report.value = total;
    report.method = W1Method::exact;
    return report;
}

// Mean absolute deviation of the order statistics from the matching normal
// quantiles, with a bootstrap standard error over fixed resample count.
inline W1Report w1_empirical(const std::vector<double>& samples, SplitMix64& rng,
                             std::size_t bootstrap_rounds = 200) {
    const std::size_t n = samples.size();
    if (n < 100) {
        throw std::invalid_argument("w1_empirical: need at least 100 samples");
    }
    std::vector<double> quantiles(n);
    for (std::size_t i = 0; i < n; ++i) {
        quantiles[i] = normal_quantile((static_cast<double>(i) + 0.5) / static_cast<double>(n));
    }
    auto estimate = [&](const std::vector<double>& sorted) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += std::abs(sorted[i] - quantiles[i]);
        return s / static_cast<double>(n);
    };
    std::vector<double> sorted(samples);
    std::sort(sorted.begin(), sorted.end());
    const double value = estimate(sorted);

    std::vector<double> resample(n);
    std::vector<double> boot(bootstrap_rounds);
    for (std::size_t b = 0; b < bootstrap_rounds; ++b) {
        for (std::size_t i = 0; i < n; ++i) {
            resample[i] = samples[rng.next_index(n)];
        }
        std::sort(resample.begin(), resample.end());
        boot[b] = estimate(resample);
    }
    double bm = 0.0;
    for (double x : boot) bm += x;
    bm /= static_cast<double>(bootstrap_rounds);
    double bv = 0.0;
    for (double x : boot) bv += (x - bm) * (x - bm);
    bv /= static_cast<double>(bootstrap_rounds - 1);

    W1Report report;
    report.value = value;
    report.method = W1Method::empirical;
    report.stderr_estimate = std::sqrt(bv);
    report.sample_count = n;
    return report;
}

// Kolmogorov-Smirnov statistic of a sample against a reference CDF.
inline double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) throw std::invalid_argument("ks_statistic: empty sample");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        double f = cdf(samples[i]);
        d = std::max(d, (static_cast<double>(i) + 1.0) / n - f);
        d = std::max(d, f - static_cast<double>(i) / n);
    }
    return d;
}

}  // namespace zbias
