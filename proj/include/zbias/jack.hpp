#pragma once

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "zbias/metrics.hpp"
#include "zbias/partition.hpp"
#include "zbias/rational.hpp"
#include "zbias/rng.hpp"

namespace zbias {

// Positive rational parameter carried in both exact and floating form.
struct AlphaParam {
    Rational exact;
    double approx;

    explicit AlphaParam(Rational value) : exact(std::move(value)), approx(to_double(exact)) {
        if (exact <= 0) throw std::domain_error("AlphaParam: alpha must be positive");
    }

    static AlphaParam parse(const std::string& text) { return AlphaParam(parse_rational(text)); }
};

// c(lambda) = prod (alpha*arm + leg + 1), c'(lambda) = prod (alpha*arm + leg + alpha).
inline std::pair<Rational, Rational> c_products(const Partition& lam, const AlphaParam& alpha) {
    Rational c(1), c_prime(1);
    for (const Box& x : lam.boxes()) {
        ArmLeg al = arm_leg(lam, x);
        Rational base = alpha.exact * al.arm + al.leg;
        c *= base + 1;
        c_prime *= base + alpha.exact;
    }
    return {c, c_prime};
}

inline Rational jack_measure(const Partition& lam, const AlphaParam& alpha) {
    const int n = lam.size();
    Rational numer = factorial(n);
    for (int i = 0; i < n; ++i) numer *= alpha.exact;
    auto [c, c_prime] = c_products(lam, alpha);
    return numer / (c * c_prime);
}

// Product over the boxes above the added corner in its column; 1 when that
// set is empty.
inline Rational psi_prime(const Partition& lam, const Partition& tau, const AlphaParam& alpha) {
    if (lam.size() != tau.size() + 1) {
        throw std::invalid_argument("psi_prime: lam must be tau plus one box");
    }
    Box added{0, 0};
    int found = 0;
    for (int r = 1; r <= lam.rows(); ++r) {
        int lr = lam.row_length(r);
        int tr = r <= tau.rows() ? tau.row_length(r) : 0;
        if (lr != tr) {
            if (lr != tr + 1) throw std::invalid_argument("psi_prime: skew is not a single box");
            added = Box{r, lr};
            ++found;
        }
    }
    if (found != 1) throw std::invalid_argument("psi_prime: skew is not a single box");

    Rational result(1);
    for (int i = 1; i < added.row; ++i) {
        Box x{i, added.col};
        ArmLeg in_lam = arm_leg(lam, x);
        ArmLeg in_tau = arm_leg(tau, x);
        Rational lam_base = alpha.exact * in_lam.arm + in_lam.leg;
        Rational tau_base = alpha.exact * in_tau.arm + in_tau.leg;
        result *= ((lam_base + 1) * (tau_base + alpha.exact)) /
                  ((lam_base + alpha.exact) * (tau_base + 1));
    }
    return result;
}

// One-step growth probability tau -> lam (lam = tau plus one corner).
inline Rational kerov_transition_prob(const Partition& tau, const Partition& lam,
                                      const AlphaParam& alpha) {
    auto [c_tau, c_tau_prime] = c_products(tau, alpha);
    auto [c_lam, c_lam_prime] = c_products(lam, alpha);
    (void)c_tau_prime;
    (void)c_lam_prime;
    return (c_tau / c_lam) * psi_prime(lam, tau, alpha);
}

struct GrowthKernel {
    Partition tau;
    AlphaParam alpha;
    std::vector<std::pair<Partition, Rational>> probs;
};

inline GrowthKernel kerov_transition(const Partition& tau, const AlphaParam& alpha) {
    GrowthKernel kernel{tau, alpha, {}};
    Rational total(0);
    for (const Box& corner : addable_boxes(tau)) {
        Partition lam = with_added_box(tau, corner);
        Rational p = kerov_transition_prob(tau, lam, alpha);
        if (p <= 0) throw std::logic_error("kerov_transition: nonpositive probability");
        total += p;
        kernel.probs.emplace_back(std::move(lam), std::move(p));
    }
    if (total != 1) throw std::logic_error("kerov_transition: probabilities do not sum to 1");
    return kernel;
}

struct JackLaw {
    int n;
    AlphaParam alpha;
    std::vector<std::pair<Partition, Rational>> probs;  // enumeration order
};

// Exact law tables are cached per (n, alpha); the cache only ever grows and
// entries are immutable once inserted.
inline const JackLaw& jack_law(int n, const AlphaParam& alpha) {
    if (n < 0) throw std::domain_error("jack_law: n must be nonnegative");
    static std::map<std::pair<int, Rational>, JackLaw> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto key = std::make_pair(n, alpha.exact);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    JackLaw law{n, alpha, {}};
    Rational total(0);
    for (const Partition& lam : enumerate_partitions(n)) {
        Rational p = jack_measure(lam, alpha);
        total += p;
        law.probs.emplace_back(lam, std::move(p));
    }
    if (total != 1) throw std::logic_error("jack_law: measure does not sum to 1");
    return cache.emplace(std::move(key), std::move(law)).first->second;
}

// Normalized content-sum statistic; the exact unnormalized sum is
// content_sum() from the partition header.
inline double w_alpha(const Partition& lam, const AlphaParam& alpha) {
    const int n = lam.size();
    if (n < 2) throw std::domain_error("w_alpha: need at least two boxes");
    double scale = std::sqrt(alpha.approx * n * (n - 1) / 2.0);
    return to_double(content_sum(lam, alpha.exact)) / scale;
}

// Exact law of the normalized content sum under the size-n measure. Atom
// masses are grouped by the exact rational content sum before any floating
// conversion.
inline DiscreteDistribution jack_w_law(int n, const AlphaParam& alpha) {
    if (n < 2) throw std::domain_error("jack_w_law: need n >= 2");
    const JackLaw& law = jack_law(n, alpha);
    std::map<Rational, Rational> grouped;
    for (const auto& [lam, p] : law.probs) {
        grouped[content_sum(lam, alpha.exact)] += p;
    }
    double scale = std::sqrt(alpha.approx * n * (n - 1) / 2.0);
    std::vector<std::pair<double, double>> atoms;
    atoms.reserve(grouped.size());
    for (const auto& [c, p] : grouped) {
        atoms.emplace_back(to_double(c) / scale, to_double(p));
    }
    return DiscreteDistribution::from_atoms(std::move(atoms));
}

// Growth-path sampler in floating point. Keeps row lengths and column
// lengths; each step costs one short product per addable corner. The corner
// probabilities use the same arm/leg ratios as kerov_transition, reduced to
// the factors that change when one box is added.
class JackPathSampler {
public:
    explicit JackPathSampler(const AlphaParam& alpha) : alpha_(alpha.approx) {}

    JackPathSampler(const AlphaParam& alpha, const Partition& start) : alpha_(alpha.approx) {
        for (int r = 1; r <= start.rows(); ++r) parts_.push_back(start.row_length(r));
        Partition t = transpose(start);
        for (int c = 1; c <= t.rows(); ++c) conj_.push_back(t.row_length(c));
        for (const Box& x : start.boxes()) {
            content_ += alpha_ * (x.col - 1) - (x.row - 1);
        }
        size_ = start.size();
    }

    int size() const { return size_; }
    double content() const { return content_; }
    const std::vector<int>& parts() const { return parts_; }

    Partition partition() const { return Partition(parts_); }

    // Probability of adding a box at the end of each addable row; the last
    // entry is the new-row corner. Row indices are 1-based.
    std::vector<std::pair<int, double>> corner_probs() const {
        std::vector<std::pair<int, double>> probs;
        const int rows = static_cast<int>(parts_.size());
        for (int r = 1; r <= rows + 1; ++r) {
            if (r > 1 && r <= rows && parts_[r - 1] >= parts_[r - 2]) continue;
            const int row_len = r <= rows ? parts_[r - 1] : 0;
            const int new_col = row_len + 1;
            double p = 1.0;
            for (int c = 1; c <= row_len; ++c) {
                double base = alpha_ * (row_len - c) + (conj_[c - 1] - r + 1);
                p *= base / (base + alpha_);
            }
            for (int i = 1; i < r; ++i) {
                double base = alpha_ * (parts_[i - 1] - new_col) + (r - 1 - i) + alpha_;
                p *= base / (base + 1.0);
            }
            probs.emplace_back(r, p);
        }
        return probs;
    }

    void step(SplitMix64& rng) {
        auto probs = corner_probs();
        double total = 0.0;
        for (const auto& [r, p] : probs) total += p;
        if (std::abs(total - 1.0) > 1e-12) {
            throw std::runtime_error("JackPathSampler: corner probabilities drifted");
        }
        double u = rng.next_double() * total;
        int row = probs.back().first;
        double cum = 0.0;
        for (const auto& [r, p] : probs) {
            cum += p;
            if (u < cum) {
                row = r;
                break;
            }
        }
        add_box(row);
    }

    void grow_to(int n, SplitMix64& rng) {
        while (size_ < n) step(rng);
    }

    // Alpha-content of the box a step at `row` would add.
    double added_content(int row) const {
        const int rows = static_cast<int>(parts_.size());
        const int col = row <= rows ? parts_[row - 1] + 1 : 1;
        return alpha_ * (col - 1) - (row - 1);
    }

private:
    void add_box(int row) {
        const int rows = static_cast<int>(parts_.size());
        const int col = row <= rows ? parts_[row - 1] + 1 : 1;
        if (row <= rows) {
            parts_[row - 1] += 1;
        } else {
            parts_.push_back(1);
        }
        if (col > static_cast<int>(conj_.size())) conj_.push_back(0);
        conj_[col - 1] += 1;
        content_ += alpha_ * (col - 1) - (row - 1);
        ++size_;
    }

    double alpha_;
    std::vector<int> parts_;
    std::vector<int> conj_;
    double content_ = 0.0;
    int size_ = 0;
};

inline Partition sample_jack(int n, const AlphaParam& alpha, SplitMix64& rng) {
    JackPathSampler sampler(alpha);
    sampler.grow_to(n, rng);
    return sampler.partition();
}

inline double sample_w_alpha(int n, const AlphaParam& alpha, SplitMix64& rng) {
    if (n < 2) throw std::domain_error("sample_w_alpha: need n >= 2");
    JackPathSampler sampler(alpha);
    sampler.grow_to(n, rng);
    double scale = std::sqrt(alpha.approx * n * (n - 1) / 2.0);
    return sampler.content() / scale;
}

// Grow to size n-1, then take two conditionally independent single-step
// growths from the common partition.
inline std::pair<double, double> jack_stein_pair_sample(int n, const AlphaParam& alpha,
                                                        SplitMix64& rng) {
    if (n < 2) throw std::domain_error("jack_stein_pair_sample: need n >= 2");
    JackPathSampler sampler(alpha);
    sampler.grow_to(n - 1, rng);
    auto probs = sampler.corner_probs();
    double total = 0.0;
    for (const auto& [r, p] : probs) total += p;
    auto draw = [&]() {
        double u = rng.next_double() * total;
        int row = probs.back().first;
        double cum = 0.0;
        for (const auto& [r, p] : probs) {
            cum += p;
            if (u < cum) {
                row = r;
                break;
            }
        }
        return sampler.added_content(row);
    };
    double scale = std::sqrt(alpha.approx * n * (n - 1) / 2.0);
    double base = sampler.content();
    double w = (base + draw()) / scale;
    double w_prime = (base + draw()) / scale;
    return {w, w_prime};
}

// Exact conditional moments of the added-box content under one growth step.
struct JackStepMoments {
    Rational mean;
    Rational second;
    Rational fourth;
};

inline JackStepMoments jack_conditional_moments(const Partition& tau, const AlphaParam& alpha) {
    JackStepMoments m{Rational(0), Rational(0), Rational(0)};
    for (const Box& corner : addable_boxes(tau)) {
        Partition lam = with_added_box(tau, corner);
        Rational p = kerov_transition_prob(tau, lam, alpha);
        Rational c = alpha_content(corner, alpha.exact);
        Rational c2 = c * c;
        m.mean += p * c;
        m.second += p * c2;
        m.fourth += p * c2 * c2;
    }
    return m;
}

// Closed form for the fourth moment of the normalized one-step increment
// under the stationary size-n law.
inline Rational jack_step_fourth_moment(int n, const AlphaParam& alpha) {
    if (n < 2) throw std::domain_error("jack_step_fourth_moment: need n >= 2");
    const Rational& a = alpha.exact;
    Rational choose_n = binomial(n, 2);
    Rational choose_n1 = binomial(n - 1, 2);
    Rational numer = a * a * choose_n + a * (a - 1) * (a - 1) * (n - 1) + 3 * a * a * choose_n1;
    Rational denom = a * a * choose_n * choose_n;
    return numer / denom;
}

inline double jack_l1_bound(int n, const AlphaParam& alpha) {
    if (n < 2) throw std::domain_error("jack_l1_bound: need n >= 2");
    Rational inv = 1 / alpha.exact;
    double amax = to_double(alpha.exact > inv ? alpha.exact : inv);
    return std::sqrt(2.0 / n) * (2.0 + std::sqrt(2.0 + amax / (n - 1.0)));
}

}  // namespace zbias
