#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "zbias/metrics.hpp"
#include "zbias/rational.hpp"
#include "zbias/rng.hpp"

namespace zbias {

// Urn with A white and B black balls; each draw is returned with m more
// balls of the drawn color.
struct UrnConfig {
    long long A;
    long long B;
    long long m;

    UrnConfig(long long a, long long b, long long m_) : A(a), B(b), m(m_) {
        if (A < 1 || B < 1 || m < 1) {
            throw std::invalid_argument("UrnConfig: A, B, m must all be >= 1");
        }
    }
};

inline Rational rising_factorial(const Rational& x, int r) {
    if (r < 0) throw std::domain_error("rising_factorial: negative length");
    Rational out(1);
    Rational term = x;
    for (int i = 0; i < r; ++i) {
        out *= term;
        term += 1;
    }
    return out;
}

// Exact law of the white-draw count after n draws.
struct UrnLaw {
    int n;
    UrnConfig cfg;
    std::vector<Rational> probs;  // index k = 0..n
};

inline UrnLaw urn_law(int n, const UrnConfig& cfg) {
    if (n < 0) throw std::domain_error("urn_law: n must be nonnegative");
    Rational a(cfg.A, cfg.m);
    Rational b(cfg.B, cfg.m);
    Rational denom = rising_factorial(a + b, n);
    UrnLaw law{n, cfg, {}};
    law.probs.reserve(n + 1);
    for (int k = 0; k <= n; ++k) {
        Rational p = Rational(binomial(n, k)) * rising_factorial(a, k) *
                     rising_factorial(b, n - k) / denom;
        law.probs.push_back(std::move(p));
    }
    return law;
}

// White-draw counts S_0..S_n along one simulated path.
inline std::vector<int> simulate_urn(int n, const UrnConfig& cfg, SplitMix64& rng) {
    if (n < 0) throw std::domain_error("simulate_urn: n must be nonnegative");
    std::vector<int> path(n + 1, 0);
    for (int j = 0; j < n; ++j) {
        double p_white = double(cfg.A + cfg.m * path[j]) / double(cfg.A + cfg.B + cfg.m * j);
        path[j + 1] = path[j] + (rng.next_bernoulli(p_white) ? 1 : 0);
    }
    return path;
}

// Squared normalization of the standardized count; rational, so the unit
// variance identity can be checked exactly.
inline Rational w_n_scale_sq(int n, const UrnConfig& cfg) {
    return Rational((cfg.A + cfg.B + cfg.m) * n, cfg.A * cfg.B) /
           Rational(cfg.A + cfg.B + static_cast<long long>(n) * cfg.m);
}

inline double w_n(int k, int n, const UrnConfig& cfg) {
    if (n < 1) throw std::domain_error("w_n: n must be >= 1");
    if (k < 0 || k > n) throw std::out_of_range("w_n: k outside 0..n");
    double scale = std::sqrt(to_double(w_n_scale_sq(n, cfg)));
    return scale * (cfg.A - double(cfg.A + cfg.B) * k / n);
}

inline Rational urn_mean(int n, const UrnConfig& cfg) {
    return Rational(static_cast<long long>(n) * cfg.A, cfg.A + cfg.B);
}

inline Rational urn_second_moment(int n, const UrnConfig& cfg) {
    Rational first = urn_mean(n, cfg);
    Rational pair_term = Rational(cfg.A * (cfg.A + cfg.m), (cfg.A + cfg.B) * (cfg.A + cfg.B + cfg.m));
    return first + 2 * Rational(binomial(n, 2)) * pair_term;
}

inline Rational urn_variance(int n, const UrnConfig& cfg) {
    long long nm = static_cast<long long>(n) * cfg.m;
    return Rational(cfg.A * cfg.B * n, (cfg.A + cfg.B + cfg.m)) *
           Rational(cfg.A + cfg.B + nm, (cfg.A + cfg.B) * (cfg.A + cfg.B));
}

// Exact law of W_n as a finite distribution on the reals.
inline DiscreteDistribution urn_w_law(int n, const UrnConfig& cfg) {
    if (n < 1) throw std::domain_error("urn_w_law: n must be >= 1");
    UrnLaw law = urn_law(n, cfg);
    std::vector<std::pair<double, double>> atoms;
    atoms.reserve(n + 1);
    for (int k = n; k >= 0; --k) {
        atoms.emplace_back(w_n(k, n, cfg), to_double(law.probs[k]));
    }
    return DiscreteDistribution::from_atoms(std::move(atoms));
}

enum class PascalDirection { up, down };

// Row-stochastic transition matrix between adjacent levels of the lattice of
// (draw count, white count) states.
struct PascalKernel {
    int level;
    PascalDirection direction;
    RationalMatrix matrix;
};

// Level n -> n+1: add one draw.
inline PascalKernel pascal_up(int n, const UrnConfig& cfg) {
    if (n < 0) throw std::domain_error("pascal_up: n must be >= 0");
    RationalMatrix mat(n + 1, n + 2);
    long long denom = cfg.A + cfg.B + static_cast<long long>(n) * cfg.m;
    for (int k = 0; k <= n; ++k) {
        Rational up(cfg.A + cfg.m * k, denom);
        mat(k, k + 1) = up;
        mat(k, k) = 1 - up;
    }
    return {n, PascalDirection::up, std::move(mat)};
}

// Level n -> n-1: delete one draw chosen uniformly.
inline PascalKernel pascal_down(int n, const UrnConfig&) {
    if (n < 1) throw std::domain_error("pascal_down: n must be >= 1");
    RationalMatrix mat(n + 1, n);
    for (int k = 0; k <= n; ++k) {
        if (k > 0) mat(k, k - 1) = Rational(k, n);
        if (k < n) mat(k, k) = Rational(n - k, n);
    }
    return {n, PascalDirection::down, std::move(mat)};
}

inline Rational pascal_c(int n, const UrnConfig& cfg) {
    if (n < 1) throw std::domain_error("pascal_c: n must be >= 1");
    long long nm = static_cast<long long>(n) * cfg.m;
    return Rational(static_cast<long long>(n) * (cfg.A + cfg.B + nm - cfg.m),
                    static_cast<long long>(n + 1) * (cfg.A + cfg.B + nm));
}

struct PascalKernels {
    PascalKernel up;    // U_n
    PascalKernel down;  // D_n
    Rational c;         // the mixing weight in the commutation identity
};

inline PascalKernels pascal_kernels(int n, const UrnConfig& cfg) {
    return {pascal_up(n, cfg), pascal_down(n, cfg), pascal_c(n, cfg)};
}

inline Rational urn_a(int n, const UrnConfig& cfg) {
    if (n < 1) throw std::domain_error("urn_a: n must be >= 1");
    long long nm = static_cast<long long>(n) * cfg.m;
    return Rational(cfg.A + cfg.B, static_cast<long long>(n) * (cfg.A + cfg.B + nm - cfg.m));
}

// Exchangeable pair at level n: delete a draw, then redraw. The joint matrix
// weights the down-then-up kernel by the stationary law.
struct UrnSteinPair {
    int n;
    UrnConfig cfg;
    Rational a;
    RationalMatrix kernel;  // (n+1)x(n+1): down then up
    RationalMatrix joint;   // joint[k][k'] = M_n(k) * kernel[k][k']
    UrnLaw marginal;

    std::pair<int, int> sample(SplitMix64& rng) const {
        double u = rng.next_double();
        int k = n;
        double cum = 0.0;
        for (int i = 0; i <= n; ++i) {
            cum += to_double(marginal.probs[i]);
            if (u < cum) {
                k = i;
                break;
            }
        }
        int j = rng.next_double() * n < k ? k - 1 : k;
        double p_up =
            double(cfg.A + cfg.m * j) / double(cfg.A + cfg.B + cfg.m * (n - 1));
        int k_prime = j + (rng.next_bernoulli(p_up) ? 1 : 0);
        return {k, k_prime};
    }
};

inline UrnSteinPair urn_stein_pair(int n, const UrnConfig& cfg) {
    if (n < 2) throw std::domain_error("urn_stein_pair: n must be >= 2");
    RationalMatrix kernel = pascal_down(n, cfg).matrix * pascal_up(n - 1, cfg).matrix;
    UrnLaw marginal = urn_law(n, cfg);
    RationalMatrix joint(n + 1, n + 1);
    for (int k = 0; k <= n; ++k) {
        for (int kp = 0; kp <= n; ++kp) {
            joint(k, kp) = marginal.probs[k] * kernel(k, kp);
        }
    }
    return {n, cfg, urn_a(n, cfg), std::move(kernel), std::move(joint), std::move(marginal)};
}

// Conditional moments of the final-draw summand of W_{n+1} given the count
// after n draws, together with the uniform deviation bounds used by the
// normal-approximation pipeline.
struct UrnStepMoments {
    double mu;             // conditional mean, strictly negative
    Rational sigma_sq;     // conditional variance, exact
    Rational var_t;        // variance of the centered summand, exact
    double abs_bound;      // uniform bound on E|T - mu|
    double third_bound;    // uniform bound on E|T - mu|^3 / Var(T - mu)
};

inline UrnStepMoments urn_step_moments(int k, int n, const UrnConfig& cfg) {
    if (n < 0) throw std::domain_error("urn_step_moments: n must be >= 0");
    if (k < 0 || k > n) throw std::out_of_range("urn_step_moments: k outside 0..n");
    const long long A = cfg.A, B = cfg.B, m = cfg.m;
    const long long nm = static_cast<long long>(n) * m;
    Rational radical_sq(A + B + m, A * B * (A + B + nm + m) * (n + 1));
    double radical = std::sqrt(to_double(radical_sq));

    UrnStepMoments out{0.0, Rational(0), Rational(0), 0.0, 0.0};
    out.mu = -radical * to_double(Rational((A + B) * (A + m * k), A + B + nm));
    Rational ratio(A + m * k, 1);
    ratio *= Rational(B + m * (static_cast<long long>(n) - k), (A + B + nm) * (A + B + nm));
    out.sigma_sq = radical_sq * (A + B) * (A + B) * ratio;
    out.var_t = Rational(A + B, static_cast<long long>(n + 1) * (A + B + nm));
    out.abs_bound = radical * double(A + B);
    Rational third_sq(A + B + m, A * B * (A + B + nm + m) * (n + 1));
    third_sq *= Rational((A + B + m) * (A + B + m), 1);
    out.third_bound = std::sqrt(to_double(third_sq)) * to_double(Rational((A + B) * (A + B), A * B));
    return out;
}

// Law reweighted by the normalized conditional variance; coincides with the
// urn that starts with m extra balls of each color.
inline UrnLaw urn_box_law(int n, const UrnConfig& cfg) {
    if (n < 0) throw std::domain_error("urn_box_law: n must be nonnegative");
    UrnLaw base = urn_law(n, cfg);
    Rational a_next(cfg.A + cfg.B,
                    static_cast<long long>(n + 1) * (cfg.A + cfg.B + static_cast<long long>(n) * cfg.m));
    UrnLaw out{n, cfg, {}};
    out.probs.reserve(n + 1);
    Rational total(0);
    for (int k = 0; k <= n; ++k) {
        Rational p = urn_step_moments(k, n, cfg).sigma_sq / a_next * base.probs[k];
        total += p;
        out.probs.push_back(std::move(p));
    }
    if (total != 1) throw std::logic_error("urn_box_law: weights do not average to 1");
    UrnLaw shifted = urn_law(n, UrnConfig(cfg.A + cfg.m, cfg.B + cfg.m, cfg.m));
    if (out.probs != shifted.probs) {
        throw std::logic_error("urn_box_law: reweighted law differs from the shifted urn");
    }
    return out;
}

enum class DivergedSign { none, box_ahead, base_ahead };

// Joint state of the base urn and the urn enriched by m balls of each color,
// evolved under the minimal-disagreement coupling.
struct CoupledUrnState {
    int n = 0;
    int S = 0;
    int S_box = 0;
    DivergedSign diverged = DivergedSign::none;
};

inline CoupledUrnState coupled_step(const CoupledUrnState& state, const UrnConfig& cfg,
                                    SplitMix64& rng) {
    if (state.n < 0 || state.S < 0 || state.S > state.n || state.S_box < 0 ||
        state.S_box > state.n) {
        throw std::invalid_argument("coupled_step: invalid state");
    }
    if (state.diverged == DivergedSign::none && state.S != state.S_box) {
        throw std::invalid_argument("coupled_step: divergence flag out of sync");
    }
    if (state.diverged == DivergedSign::box_ahead && state.S_box < state.S) {
        throw std::invalid_argument("coupled_step: box lead lost before step");
    }
    if (state.diverged == DivergedSign::base_ahead && state.S < state.S_box) {
        throw std::invalid_argument("coupled_step: base lead lost before step");
    }

    const long long A = cfg.A, B = cfg.B, m = cfg.m;
    const double denom = double(A + B + m * static_cast<long long>(state.n));
    const double s = double(A + m * state.S) / denom;
    const double s_box = double(A + m + m * static_cast<long long>(state.S_box)) /
                         double(A + B + 2 * m + m * static_cast<long long>(state.n));

    CoupledUrnState next = state;
    next.n = state.n + 1;
    const double u = rng.next_double();
    const double both = std::min(s, s_box);
    const double box_only = std::max(s_box - s, 0.0);
    const double base_only = std::max(s - s_box, 0.0);
    if (u < both) {
        next.S += 1;
        next.S_box += 1;
    } else if (u < both + box_only) {
        next.S_box += 1;
    } else if (u < both + box_only + base_only) {
        next.S += 1;
    }

    if (next.diverged == DivergedSign::none && next.S != next.S_box) {
        if (std::abs(next.S - next.S_box) != 1) {
            throw std::logic_error("coupled_step: first divergence jumped by more than 1");
        }
        next.diverged = next.S_box > next.S ? DivergedSign::box_ahead : DivergedSign::base_ahead;
    }
    if (next.diverged == DivergedSign::box_ahead && next.S_box < next.S) {
        throw std::logic_error("coupled_step: box chain fell behind after leading");
    }
    if (next.diverged == DivergedSign::base_ahead && next.S < next.S_box) {
        throw std::logic_error("coupled_step: base chain fell behind after leading");
    }
    return next;
}

struct CoupledDiffReport {
    double estimate;
    double stderr_estimate;
    double bound;
};

inline double coupled_abs_diff_bound(int n, const UrnConfig& cfg) {
    // Large-time regime when n >= (A+B+m)/(2m), i.e. 2mn >= A+B+m.
    if (2 * cfg.m * static_cast<long long>(n) >= cfg.A + cfg.B + cfg.m) {
        return 2.0 * cfg.m * n / double(cfg.A + cfg.B + cfg.m);
    }
    return 1.0;
}

inline CoupledDiffReport coupled_abs_diff(int n, const UrnConfig& cfg, int samples,
                                          SplitMix64& rng) {
    if (n < 0) throw std::domain_error("coupled_abs_diff: n must be nonnegative");
    if (samples < 1) throw std::domain_error("coupled_abs_diff: need at least one sample");
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int i = 0; i < samples; ++i) {
        CoupledUrnState state;
        for (int t = 0; t < n; ++t) state = coupled_step(state, cfg, rng);
        double d = std::abs(state.S_box - state.S);
        sum += d;
        sum_sq += d * d;
    }
    double mean = sum / samples;
    double var = samples > 1 ? (sum_sq - samples * mean * mean) / (samples - 1) : 0.0;
    return {mean, std::sqrt(std::max(var, 0.0) / samples), coupled_abs_diff_bound(n, cfg)};
}

// Closed-form normal-approximation bound for W at time n_plus_1, with its
// regime and factor breakdown.
struct UrnBoundReport {
    double value;
    std::string regime;  // "large-n" or "small-n"
    double coefficient;
    double radical;
};

inline UrnBoundReport urn_l1_bound(int n_plus_1, const UrnConfig& cfg) {
    if (n_plus_1 < 1) throw std::domain_error("urn_l1_bound: n_plus_1 must be >= 1");
    const long long A = cfg.A, B = cfg.B, m = cfg.m;
    const int n = n_plus_1 - 1;
    const long long nm = static_cast<long long>(n) * m;
    Rational radical_sq((A + B + m) * (A + B + m) * (A + B + m),
                        A * B * (A + B + nm + m) * (n + 1));
    double radical = std::sqrt(to_double(radical_sq));
    UrnBoundReport report{0.0, "", 0.0, radical};
    if (2 * m * static_cast<long long>(n) >= A + B + m) {
        report.regime = "large-n";
        report.coefficient =
            4.0 * m * n / double(A + B + m) + to_double(Rational(A * A + 6 * A * B + B * B, A * B));
    } else {
        report.regime = "small-n";
        report.coefficient = to_double(Rational(A * A + 8 * A * B + B * B, A * B));
    }
    report.value = report.coefficient * radical;
    return report;
}

inline Rational urn_scaled_variance(int n, const UrnConfig& cfg) {
    if (n < 1) throw std::domain_error("urn_scaled_variance: n must be >= 1");
    return urn_variance(n, cfg) / (Rational(n) * n);
}

// Variance of the Beta law that S_n/n converges to.
inline Rational beta_limit_variance(const UrnConfig& cfg) {
    return Rational(cfg.A * cfg.B * cfg.m,
                    (cfg.A + cfg.B) * (cfg.A + cfg.B) * (cfg.A + cfg.B + cfg.m));
}

}  // namespace zbias
