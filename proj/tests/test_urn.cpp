#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <vector>

#include "zbias/rational.hpp"
#include "zbias/rng.hpp"
#include "zbias/urn.hpp"

using zbias::CoupledUrnState;
using zbias::DivergedSign;
using zbias::Rational;
using zbias::RationalMatrix;
using zbias::SplitMix64;
using zbias::UrnConfig;
using zbias::UrnLaw;

namespace {

const std::vector<UrnConfig>& cfg_grid() {
    static const std::vector<UrnConfig> grid = {UrnConfig(1, 1, 1), UrnConfig(2, 3, 1),
                                                UrnConfig(5, 5, 2), UrnConfig(1, 4, 3)};
    return grid;
}

// Brute-force law by summing the probability of every white/black sequence.
std::vector<Rational> path_enumeration_law(int n, const UrnConfig& cfg) {
    std::vector<Rational> out(n + 1, Rational(0));
    for (int mask = 0; mask < (1 << n); ++mask) {
        Rational p(1);
        int k = 0;
        for (int j = 0; j < n; ++j) {
            Rational white(cfg.A + cfg.m * k, cfg.A + cfg.B + cfg.m * j);
            if ((mask >> j) & 1) {
                p *= white;
                ++k;
            } else {
                p *= 1 - white;
            }
        }
        out[k] += p;
    }
    return out;
}

std::vector<Rational> push_measure(const std::vector<Rational>& mu, const RationalMatrix& kernel) {
    REQUIRE(mu.size() == kernel.rows);
    std::vector<Rational> out(kernel.cols, Rational(0));
    for (std::size_t i = 0; i < kernel.rows; ++i) {
        for (std::size_t j = 0; j < kernel.cols; ++j) out[j] += mu[i] * kernel(i, j);
    }
    return out;
}

double tv_distance(const std::vector<double>& emp, const std::vector<Rational>& exact) {
    REQUIRE(emp.size() == exact.size());
    double tv = 0.0;
    for (std::size_t i = 0; i < emp.size(); ++i) {
        tv += std::abs(emp[i] - zbias::to_double(exact[i]));
    }
    return 0.5 * tv;
}

}  // namespace

TEST_CASE("rising factorial") {
    REQUIRE(zbias::rising_factorial(Rational(7, 3), 0) == 1);
    REQUIRE(zbias::rising_factorial(Rational(1), 3) == 6);
    REQUIRE(zbias::rising_factorial(Rational(1, 2), 2) == Rational(3, 4));
    REQUIRE_THROWS_AS(zbias::rising_factorial(Rational(1), -1), std::domain_error);
}

TEST_CASE("config validation") {
    REQUIRE_THROWS_AS(UrnConfig(0, 1, 1), std::invalid_argument);
    REQUIRE_THROWS_AS(UrnConfig(1, 0, 1), std::invalid_argument);
    REQUIRE_THROWS_AS(UrnConfig(1, 1, 0), std::invalid_argument);
}

TEST_CASE("law base cases and uniformity") {
    UrnConfig unit(1, 1, 1);
    REQUIRE(zbias::urn_law(0, unit).probs == std::vector<Rational>{Rational(1)});
    for (int n = 1; n <= 10; ++n) {
        UrnLaw law = zbias::urn_law(n, unit);
        for (int k = 0; k <= n; ++k) REQUIRE(law.probs[k] == Rational(1, n + 1));
    }
}

TEST_CASE("law matches exhaustive path enumeration") {
    for (const UrnConfig& cfg : cfg_grid()) {
        REQUIRE(zbias::urn_law(6, cfg).probs == path_enumeration_law(6, cfg));
    }
    UrnConfig cfg(2, 3, 1);
    REQUIRE(zbias::urn_law(10, cfg).probs == path_enumeration_law(10, cfg));
}

TEST_CASE("law normalization over the grid") {
    for (const UrnConfig& cfg : cfg_grid()) {
        for (int n = 0; n <= 50; ++n) {
            Rational total(0);
            for (const Rational& p : zbias::urn_law(n, cfg).probs) {
                REQUIRE(p >= 0);
                total += p;
            }
            REQUIRE(total == 1);
        }
    }
}

TEST_CASE("pairwise white-draw correlation is constant") {
    for (const UrnConfig& cfg : cfg_grid()) {
        const int n = 6;
        Rational expected(cfg.A * (cfg.A + cfg.m), (cfg.A + cfg.B) * (cfg.A + cfg.B + cfg.m));
        std::vector<std::vector<Rational>> pair_mass(n, std::vector<Rational>(n, Rational(0)));
        for (int mask = 0; mask < (1 << n); ++mask) {
            Rational p(1);
            int k = 0;
            for (int j = 0; j < n; ++j) {
                Rational white(cfg.A + cfg.m * k, cfg.A + cfg.B + cfg.m * j);
                if ((mask >> j) & 1) {
                    p *= white;
                    ++k;
                } else {
                    p *= 1 - white;
                }
            }
            for (int h = 0; h < n; ++h) {
                if (!((mask >> h) & 1)) continue;
                for (int j = h + 1; j < n; ++j) {
                    if ((mask >> j) & 1) pair_mass[h][j] += p;
                }
            }
        }
        for (int h = 0; h < n; ++h) {
            for (int j = h + 1; j < n; ++j) REQUIRE(pair_mass[h][j] == expected);
        }
    }
}

TEST_CASE("simulated paths are deterministic and match the law") {
    UrnConfig unit(1, 1, 1);
    SplitMix64 r1(404), r2(404);
    REQUIRE(zbias::simulate_urn(25, unit, r1) == zbias::simulate_urn(25, unit, r2));

    SplitMix64 rng(2025);
    int white_first = 0;
    const int trials = 100000;
    for (int i = 0; i < trials; ++i) {
        white_first += zbias::simulate_urn(1, unit, rng)[1];
    }
    REQUIRE(std::abs(white_first / double(trials) - 0.5) < 0.005);

    const int n = 20;
    std::vector<double> freq(n + 1, 0.0);
    for (int i = 0; i < trials; ++i) {
        freq[zbias::simulate_urn(n, unit, rng)[n]] += 1.0 / trials;
    }
    REQUIRE(tv_distance(freq, zbias::urn_law(n, unit).probs) <= 0.01);
}

TEST_CASE("standardized count values") {
    UrnConfig unit(1, 1, 1);
    REQUIRE(zbias::w_n(0, 1, unit) == Catch::Approx(1.0).margin(1e-14).epsilon(0));
    REQUIRE(zbias::w_n(1, 1, unit) == Catch::Approx(-1.0).margin(1e-14).epsilon(0));
    REQUIRE_THROWS_AS(zbias::w_n(-1, 5, unit), std::out_of_range);
    REQUIRE_THROWS_AS(zbias::w_n(6, 5, unit), std::out_of_range);
    REQUIRE_THROWS_AS(zbias::w_n(0, 0, unit), std::domain_error);
}

TEST_CASE("exact moments over the grid") {
    for (const UrnConfig& cfg : cfg_grid()) {
        for (int n = 1; n <= 50; ++n) {
            UrnLaw law = zbias::urn_law(n, cfg);
            Rational mean(0), second(0);
            for (int k = 0; k <= n; ++k) {
                mean += law.probs[k] * k;
                second += law.probs[k] * k * k;
            }
            REQUIRE(mean == zbias::urn_mean(n, cfg));
            REQUIRE(second == zbias::urn_second_moment(n, cfg));
            Rational variance = second - mean * mean;
            REQUIRE(variance == zbias::urn_variance(n, cfg));

            // Unit variance of the standardized count, exactly.
            Rational ab = Rational(cfg.A + cfg.B) * (cfg.A + cfg.B);
            REQUIRE(zbias::w_n_scale_sq(n, cfg) * ab / (Rational(n) * n) * variance == 1);
            // Zero mean: A - (A+B) E[S_n]/n vanishes.
            REQUIRE(Rational(cfg.A) - Rational(cfg.A + cfg.B) * zbias::urn_mean(n, cfg) / n == 0);
        }
    }
}

TEST_CASE("exact law of the standardized count") {
    auto law = zbias::urn_w_law(30, UrnConfig(2, 3, 1));
    REQUIRE(law.size() == 31);
    REQUIRE(law.mean() == Catch::Approx(0.0).margin(1e-12).epsilon(0));
    REQUIRE(law.variance() == Catch::Approx(1.0).margin(1e-12).epsilon(0));
}

TEST_CASE("lattice kernel basics") {
    UrnConfig unit(1, 1, 1);
    REQUIRE(zbias::pascal_c(1, unit) == Rational(1, 3));
    auto down = zbias::pascal_down(4, unit);
    REQUIRE(down.matrix(0, 0) == 1);
    auto up = zbias::pascal_up(0, UrnConfig(2, 3, 1));
    REQUIRE(up.matrix(0, 1) == Rational(2, 5));
    REQUIRE(up.matrix(0, 0) == Rational(3, 5));
    for (const UrnConfig& cfg : cfg_grid()) {
        for (int n = 1; n <= 20; ++n) {
            auto kernels = zbias::pascal_kernels(n, cfg);
            for (std::size_t r = 0; r < kernels.up.matrix.rows; ++r) {
                Rational sum(0);
                for (std::size_t c = 0; c < kernels.up.matrix.cols; ++c)
                    sum += kernels.up.matrix(r, c);
                REQUIRE(sum == 1);
            }
            for (std::size_t r = 0; r < kernels.down.matrix.rows; ++r) {
                Rational sum(0);
                for (std::size_t c = 0; c < kernels.down.matrix.cols; ++c)
                    sum += kernels.down.matrix(r, c);
                REQUIRE(sum == 1);
            }
        }
    }
}

TEST_CASE("up-then-down equals the mixed identity") {
    for (const UrnConfig& cfg : cfg_grid()) {
        for (int n = 1; n <= 20; ++n) {
            RationalMatrix lhs =
                zbias::pascal_up(n, cfg).matrix * zbias::pascal_down(n + 1, cfg).matrix;
            RationalMatrix du =
                zbias::pascal_down(n, cfg).matrix * zbias::pascal_up(n - 1, cfg).matrix;
            Rational c = zbias::pascal_c(n, cfg);
            RationalMatrix rhs = RationalMatrix::combine(c, du, Rational(1 - c),
                                                         RationalMatrix::identity(n + 1));
            REQUIRE(lhs == rhs);
        }
    }
}

TEST_CASE("up and down preserve the laws") {
    for (const UrnConfig& cfg : cfg_grid()) {
        for (int n = 1; n <= 20; ++n) {
            auto m_prev = zbias::urn_law(n - 1, cfg).probs;
            auto m_curr = zbias::urn_law(n, cfg).probs;
            REQUIRE(push_measure(m_prev, zbias::pascal_up(n - 1, cfg).matrix) == m_curr);
            REQUIRE(push_measure(m_curr, zbias::pascal_down(n, cfg).matrix) == m_prev);
        }
    }
}

TEST_CASE("delete-and-redraw pair") {
    UrnConfig unit(1, 1, 1);
    REQUIRE(zbias::urn_a(2, unit) == Rational(1, 3));
    REQUIRE(zbias::urn_stein_pair(5, unit).a == Rational(2, 30));

    for (const UrnConfig& cfg : cfg_grid()) {
        for (int n = 2; n <= 20; ++n) {
            auto pair = zbias::urn_stein_pair(n, cfg);
            // Right eigenvector with eigenvalue 1 - a_n.
            std::vector<Rational> w(n + 1);
            for (int k = 0; k <= n; ++k) {
                w[k] = Rational(cfg.A) - Rational((cfg.A + cfg.B) * k, n);
            }
            auto kw = pair.kernel.apply(w);
            Rational lam = 1 - pair.a;
            for (int k = 0; k <= n; ++k) REQUIRE(kw[k] == Rational(lam * w[k]));

            // Reversibility: the stationary-weighted kernel is symmetric.
            for (int k = 0; k <= n; ++k) {
                for (int kp = 0; kp < k; ++kp) REQUIRE(pair.joint(k, kp) == pair.joint(kp, k));
            }

            // Down-then-up preserves the law.
            REQUIRE(push_measure(pair.marginal.probs, pair.kernel) == pair.marginal.probs);
        }
    }
}

TEST_CASE("pair sampler tracks the exact joint") {
    UrnConfig unit(1, 1, 1);
    const int n = 5;
    auto pair = zbias::urn_stein_pair(n, unit);
    SplitMix64 rng(31337);
    const int trials = 100000;
    std::vector<std::vector<int>> counts(n + 1, std::vector<int>(n + 1, 0));
    for (int i = 0; i < trials; ++i) {
        auto [k, kp] = pair.sample(rng);
        counts[k][kp] += 1;
    }
    double tv = 0.0;
    for (int k = 0; k <= n; ++k) {
        for (int kp = 0; kp <= n; ++kp) {
            tv += std::abs(counts[k][kp] / double(trials) - zbias::to_double(pair.joint(k, kp)));
        }
    }
    REQUIRE(0.5 * tv <= 0.01);
}

TEST_CASE("final-draw conditional moments") {
    UrnConfig unit(1, 1, 1);
    auto m0 = zbias::urn_step_moments(0, 1, unit);
    REQUIRE(m0.mu == Catch::Approx(-1.0 / std::sqrt(6.0)).margin(1e-14).epsilon(0));
    REQUIRE(m0.sigma_sq == Rational(1, 3));
    REQUIRE(zbias::urn_step_moments(1, 1, unit).sigma_sq == Rational(1, 3));
    REQUIRE(m0.var_t == Rational(1, 3));
    REQUIRE_THROWS_AS(zbias::urn_step_moments(3, 2, unit), std::out_of_range);

    for (const UrnConfig& cfg : cfg_grid()) {
        for (int n = 0; n <= 30; ++n) {
            UrnLaw law = zbias::urn_law(n, cfg);
            Rational averaged(0);
            for (int k = 0; k <= n; ++k) {
                averaged += law.probs[k] * zbias::urn_step_moments(k, n, cfg).sigma_sq;
            }
            REQUIRE(averaged == zbias::urn_step_moments(0, n, cfg).var_t);
        }
    }
}

TEST_CASE("deviation bounds dominate the exact conditional deviations") {
    for (const UrnConfig& cfg : cfg_grid()) {
        for (int n : {1, 4, 9, 25}) {
            for (int k = 0; k <= n; ++k) {
                auto m = zbias::urn_step_moments(k, n, cfg);
                double p = double(cfg.A + cfg.m * k) / double(cfg.A + cfg.B + cfg.m * n);
                double amp = m.abs_bound;  // |T - mu| = amp * |1_n - p|
                double e_abs = amp * 2.0 * p * (1.0 - p);
                double e_abs3 =
                    amp * amp * amp * (p * std::pow(1.0 - p, 3) + (1.0 - p) * std::pow(p, 3));
                REQUIRE(e_abs <= m.abs_bound + 1e-15);
                REQUIRE(e_abs3 / zbias::to_double(m.var_t) <= m.third_bound + 1e-12);
            }
        }
    }
}

TEST_CASE("variance-reweighted law is the enriched urn") {
    for (const UrnConfig& cfg : cfg_grid()) {
        for (int n = 0; n <= 50; n += (n < 10 ? 1 : 10)) {
            UrnLaw box = zbias::urn_box_law(n, cfg);
            UrnLaw shifted = zbias::urn_law(n, UrnConfig(cfg.A + cfg.m, cfg.B + cfg.m, cfg.m));
            REQUIRE(box.probs == shifted.probs);
        }
    }
    UrnLaw small = zbias::urn_box_law(1, UrnConfig(1, 1, 1));
    REQUIRE(small.probs == std::vector<Rational>{Rational(1, 2), Rational(1, 2)});
}

TEST_CASE("coupled chain stays synchronized at the unit first step") {
    UrnConfig unit(1, 1, 1);
    SplitMix64 rng(8);
    int advanced = 0;
    const int trials = 20000;
    for (int i = 0; i < trials; ++i) {
        CoupledUrnState state;
        state = zbias::coupled_step(state, unit, rng);
        REQUIRE(state.S == state.S_box);
        REQUIRE(state.diverged == DivergedSign::none);
        advanced += state.S;
    }
    REQUIRE(std::abs(advanced / double(trials) - 0.5) < 0.02);
}

TEST_CASE("coupled chain marginals and divergence structure") {
    UrnConfig unit(1, 1, 1);
    const int n = 20;
    const int trials = 100000;
    SplitMix64 rng(616);
    std::vector<double> base_freq(n + 1, 0.0), box_freq(n + 1, 0.0);
    for (int i = 0; i < trials; ++i) {
        CoupledUrnState state;
        for (int t = 0; t < n; ++t) {
            bool was_together = state.diverged == DivergedSign::none;
            state = zbias::coupled_step(state, unit, rng);
            if (was_together && state.diverged != DivergedSign::none) {
                REQUIRE(std::abs(state.S - state.S_box) == 1);
            }
        }
        base_freq[state.S] += 1.0 / trials;
        box_freq[state.S_box] += 1.0 / trials;
    }
    REQUIRE(tv_distance(base_freq, zbias::urn_law(n, unit).probs) <= 0.01);
    REQUIRE(tv_distance(box_freq, zbias::urn_law(n, UrnConfig(2, 2, 1)).probs) <= 0.01);
}

TEST_CASE("coupled step rejects inconsistent states") {
    UrnConfig unit(1, 1, 1);
    SplitMix64 rng(1);
    CoupledUrnState bad;
    bad.S = 2;
    bad.n = 1;
    REQUIRE_THROWS_AS(zbias::coupled_step(bad, unit, rng), std::invalid_argument);
    CoupledUrnState out_of_sync;
    out_of_sync.n = 3;
    out_of_sync.S = 1;
    out_of_sync.S_box = 2;
    REQUIRE_THROWS_AS(zbias::coupled_step(out_of_sync, unit, rng), std::invalid_argument);
    CoupledUrnState lead_lost;
    lead_lost.n = 3;
    lead_lost.S = 2;
    lead_lost.S_box = 1;
    lead_lost.diverged = DivergedSign::box_ahead;
    REQUIRE_THROWS_AS(zbias::coupled_step(lead_lost, unit, rng), std::invalid_argument);
}

TEST_CASE("mean absolute gap stays under the regime bound") {
    UrnConfig unit(1, 1, 1);
    REQUIRE(zbias::coupled_abs_diff_bound(1, unit) == 1.0);
    REQUIRE(zbias::coupled_abs_diff_bound(10, unit) == Catch::Approx(20.0 / 3.0).margin(1e-15).epsilon(0));

    SplitMix64 rng(90210);
    for (const UrnConfig& cfg : {UrnConfig(1, 1, 1), UrnConfig(2, 3, 1), UrnConfig(5, 5, 2)}) {
        for (int n : {5, 20, 50}) {
            auto report = zbias::coupled_abs_diff(n, cfg, 20000, rng);
            REQUIRE(report.estimate <= report.bound + 3.0 * report.stderr_estimate);
        }
    }
}

TEST_CASE("normal approximation bound for the urn") {
    UrnConfig unit(1, 1, 1);
    auto report = zbias::urn_l1_bound(10, unit);
    REQUIRE(report.value == Catch::Approx(9.4868329805051381).margin(1e-9).epsilon(0));
    REQUIRE(std::abs(report.value - 9.4868) < 1e-3);
    REQUIRE(report.regime == "large-n");
    REQUIRE(report.coefficient == Catch::Approx(20.0).margin(1e-12).epsilon(0));

    // Regime boundary: threshold at (A+B+m)/(2m) in the time index n.
    for (const UrnConfig& cfg : cfg_grid()) {
        long long threshold_num = cfg.A + cfg.B + cfg.m;
        int at = static_cast<int>((threshold_num + 2 * cfg.m - 1) / (2 * cfg.m));
        REQUIRE(zbias::urn_l1_bound(at + 1, cfg).regime == "large-n");
        if (at >= 1) {
            REQUIRE(zbias::urn_l1_bound(at, cfg).regime == "small-n");
        }
    }

    // Large-n limit.
    for (const UrnConfig& cfg : cfg_grid()) {
        double limit = 4.0 * std::sqrt(double(cfg.m) * (cfg.A + cfg.B + cfg.m) /
                                       double(cfg.A * cfg.B));
        double value = zbias::urn_l1_bound(10001, cfg).value;
        REQUIRE(std::abs(value / limit - 1.0) < 0.01);
    }
    UrnConfig sym(3, 3, 2);
    double lim_sym = 4.0 * std::sqrt(double(sym.m) * (2 * sym.A + sym.m)) / sym.A;
    REQUIRE(lim_sym == Catch::Approx(4.0 * std::sqrt(double(sym.m) * (sym.A + sym.B + sym.m) /
                                                     double(sym.A * sym.B)))
                           .margin(1e-12));
}

TEST_CASE("scaled count converges to the fixed-ratio moments") {
    for (const UrnConfig& cfg : cfg_grid()) {
        Rational scaled_mean = zbias::urn_mean(10000, cfg) / 10000;
        REQUIRE(scaled_mean == Rational(cfg.A, cfg.A + cfg.B));
        Rational ratio = zbias::urn_scaled_variance(10000, cfg) / zbias::beta_limit_variance(cfg);
        double r = zbias::to_double(ratio);
        REQUIRE(std::abs(r - 1.0) < 0.01);
    }
}
