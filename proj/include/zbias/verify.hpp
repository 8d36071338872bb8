#pragma once

#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "zbias/jack.hpp"
#include "zbias/metrics.hpp"
#include "zbias/partition.hpp"
#include "zbias/rational.hpp"
#include "zbias/stein.hpp"
#include "zbias/urn.hpp"

namespace zbias {

struct VerifyConfig {
    int jack_max_n = 8;
    int urn_max_n = 50;
    // Test hook: replaces the partition weight inside the normalization
    // family, so the harness can be shown to fail on a wrong formula.
    std::function<Rational(const Partition&, const AlphaParam&)> jack_measure_hook;
};

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct VerifyReport {
    int jack_max_n = 0;
    int urn_max_n = 0;
    std::vector<CheckResult> checks;

    bool all_pass() const {
        for (const CheckResult& c : checks) {
            if (!c.pass) return false;
        }
        return true;
    }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json out;
        out["schema"] = "zbias-verify-report/1";
        out["jack_max_n"] = jack_max_n;
        out["urn_max_n"] = urn_max_n;
        out["all_pass"] = all_pass();
        out["checks"] = nlohmann::ordered_json::array();
        for (const CheckResult& c : checks) {
            out["checks"].push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
        }
        return out;
    }
};

namespace detail {

// Accumulates one identity family; remembers the first failure.
struct Family {
    std::string name;
    long long count = 0;
    bool pass = true;
    std::string failure;

    explicit Family(std::string family_name) : name(std::move(family_name)) {}

    void require(bool ok, const std::string& what) {
        ++count;
        if (!ok && pass) {
            pass = false;
            failure = what;
        }
    }

    CheckResult finish() const {
        if (pass) return {name, true, std::to_string(count) + " identities hold"};
        return {name, false, failure};
    }
};

inline std::string fmt_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline const std::vector<AlphaParam>& verify_alpha_grid() {
    static const std::vector<AlphaParam> grid = {AlphaParam(Rational(1, 2)), AlphaParam(Rational(1)),
                                                 AlphaParam(Rational(2)), AlphaParam(Rational(3))};
    return grid;
}

inline const std::vector<UrnConfig>& verify_cfg_grid() {
    static const std::vector<UrnConfig> grid = {UrnConfig(1, 1, 1), UrnConfig(2, 3, 1),
                                                UrnConfig(5, 5, 2), UrnConfig(1, 4, 3)};
    return grid;
}

inline ExchangeableJoint<Rational> verify_jack_joint(int n, const AlphaParam& alpha) {
    std::map<std::pair<Rational, Rational>, Rational> cells;
    for (const auto& [tau, p_tau] : jack_law(n - 1, alpha).probs) {
        if (p_tau == 0) continue;
        GrowthKernel kernel = kerov_transition(tau, alpha);
        for (const auto& [lam, p1] : kernel.probs) {
            Rational c1 = content_sum(lam, alpha.exact);
            for (const auto& [lam2, p2] : kernel.probs) {
                cells[{c1, content_sum(lam2, alpha.exact)}] += Rational(p_tau * p1 * p2);
            }
        }
    }
    ExchangeableJoint<Rational> joint;
    for (const auto& [key, p] : cells) joint.atoms.push_back({key.first, key.second, p});
    return joint;
}

inline ExchangeableJoint<Rational> verify_urn_joint(int n, const UrnConfig& cfg) {
    auto pair = urn_stein_pair(n, cfg);
    std::vector<Rational> w(n + 1);
    for (int k = 0; k <= n; ++k) {
        w[k] = Rational(Rational(cfg.A) - Rational((cfg.A + cfg.B) * k, n));
    }
    return joint_from_matrix(pair.joint, w);
}

struct ThreePointLawSpec {
    std::vector<Rational> values;
    std::vector<Rational> probs;
};

inline std::vector<ThreePointLawSpec> verify_three_point_laws() {
    auto make = [](Rational a, Rational b, Rational c, Rational pb) {
        Rational pc((Rational(-b * pb) - Rational(a * (1 - pb))) / Rational(c - a));
        Rational pa(1 - pb - pc);
        return ThreePointLawSpec{{a, b, c}, {pa, pb, pc}};
    };
    return {make(-1, 0, 1, Rational(1, 3)), make(-2, 1, 3, Rational(1, 4)),
            make(-3, -1, 4, Rational(2, 5)),
            make(Rational(-1, 2), Rational(1, 4), 2, Rational(1, 6)),
            make(-5, 2, 7, Rational(3, 10))};
}

}  // namespace detail

inline VerifyReport run_verify(const VerifyConfig& config) {
    if (config.jack_max_n < 2 || config.jack_max_n > 8) {
        throw std::invalid_argument("run_verify: jack_max_n must be in [2, 8]");
    }
    if (config.urn_max_n < 2 || config.urn_max_n > 50) {
        throw std::invalid_argument("run_verify: urn_max_n must be in [2, 50]");
    }
    auto measure = config.jack_measure_hook
                       ? config.jack_measure_hook
                       : [](const Partition& lam, const AlphaParam& alpha) {
                             return jack_measure(lam, alpha);
                         };

    VerifyReport report;
    report.jack_max_n = config.jack_max_n;
    report.urn_max_n = config.urn_max_n;

    {
        detail::Family f{"normal-primitives"};
        const std::vector<std::pair<double, double>> table = {
            {0.0, 0.5},
            {1.0, 0.8413447460685429},
            {-2.0, 0.022750131948179195},
            {3.0, 0.99865010196837},
            {0.5, 0.6914624612740131},
            {-5.0, 2.8665157187919391e-07},
            {6.0, 0.9999999990134123},
            {1.959963985, 0.9750000000268816},
        };
        for (const auto& [x, phi] : table) {
            f.require(std::abs(normal_cdf(x) - phi) <= 1e-12,
                      "normal_cdf(" + detail::fmt_double(x) + ") = " +
                          detail::fmt_double(normal_cdf(x)) + ", expected " +
                          detail::fmt_double(phi));
        }
        for (double x = -6.0; x <= 6.0; x += 0.25) {
            double p = normal_cdf(x);
            // Storing p as a double already moves the exact quantile by up to
            // ulp(p) / pdf(x); the solver must stay within 1e-9 beyond that.
            double limit = 1e-9 + (std::nextafter(p, 2.0) - p) / normal_pdf(x);
            f.require(std::abs(normal_quantile(p) - x) <= limit,
                      "quantile roundtrip drift at x = " + detail::fmt_double(x));
        }
        report.checks.push_back(f.finish());
    }

    {
        detail::Family f{"jack-normalization"};
        for (const AlphaParam& alpha : detail::verify_alpha_grid()) {
            for (int n = 0; n <= config.jack_max_n; ++n) {
                Rational total(0);
                for (const Partition& lam : enumerate_partitions(n)) {
                    total += measure(lam, alpha);
                }
                f.require(total == 1, "partition weights at n = " + std::to_string(n) +
                                          ", alpha = " + rational_to_string(alpha.exact) +
                                          " sum to " + rational_to_string(total));
            }
        }
        report.checks.push_back(f.finish());
    }

    {
        detail::Family f{"jack-worked-example"};
        Partition shape({3, 2});
        for (const Rational& a :
             {Rational(1, 2), Rational(1), Rational(2), Rational(3), Rational(5, 2),
              Rational(7, 3)}) {
            Rational denom((2 * a + 2) * (3 * a + 1) * (a + 2) * (2 * a + 1) * (a + 1));
            Rational expected(60 * a * a / denom);
            f.require(jack_measure(shape, AlphaParam(a)) == expected,
                      "closed form fails at alpha = " + rational_to_string(a));
        }
        f.require(jack_measure(shape, AlphaParam(Rational(1))) == Rational(5, 24),
                  "alpha = 1 value is not 5/24");
        report.checks.push_back(f.finish());
    }

    {
        detail::Family f{"jack-pushforward"};
        for (const AlphaParam& alpha : detail::verify_alpha_grid()) {
            for (int n = 1; n <= config.jack_max_n; ++n) {
                std::map<Partition, Rational> pushed;
                for (const auto& [tau, p] : jack_law(n - 1, alpha).probs) {
                    for (const auto& [lam, q] : kerov_transition(tau, alpha).probs) {
                        pushed[lam] += Rational(p * q);
                    }
                }
                for (const auto& [lam, p] : jack_law(n, alpha).probs) {
                    f.require(pushed[lam] == p,
                              "growth step disagrees with the measure at n = " +
                                  std::to_string(n) + ", alpha = " +
                                  rational_to_string(alpha.exact) + ", shape " + lam.to_string());
                }
            }
        }
        report.checks.push_back(f.finish());
    }

    {
        detail::Family f{"jack-transpose-duality"};
        for (const Rational& a : {Rational(1, 2), Rational(2), Rational(3)}) {
            AlphaParam alpha(a);
            AlphaParam dual(Rational(1 / a));
            for (int n = 1; n <= config.jack_max_n; ++n) {
                for (const Partition& lam : enumerate_partitions(n)) {
                    f.require(jack_measure(lam, alpha) == jack_measure(transpose(lam), dual),
                              "measure duality fails for " + lam.to_string() + " at alpha = " +
                                  rational_to_string(a));
                }
            }
        }
        report.checks.push_back(f.finish());
    }

    {
        detail::Family f{"jack-conditional-moments"};
        for (const AlphaParam& alpha : detail::verify_alpha_grid()) {
            for (int size = 0; size <= 7; ++size) {
                for (const Partition& tau : enumerate_partitions(size)) {
                    JackStepMoments m = jack_conditional_moments(tau, alpha);
                    f.require(m.mean == 0, "conditional mean nonzero at " + tau.to_string());
                    f.require(m.second == Rational(alpha.exact * size),
                              "conditional second moment off at " + tau.to_string() +
                                  ", alpha = " + rational_to_string(alpha.exact));
                }
            }
        }
        report.checks.push_back(f.finish());
    }

    {
        detail::Family f{"jack-fourth-moment"};
        for (const AlphaParam& alpha : detail::verify_alpha_grid()) {
            for (int n = 2; n <= 7; ++n) {
                Rational fourth(0);
                for (const auto& [tau, p] : jack_law(n - 1, alpha).probs) {
                    fourth += p * jack_conditional_moments(tau, alpha).fourth;
                }
                Rational scale2(alpha.exact * n * (n - 1) / 2);
                f.require(Rational(fourth / (scale2 * scale2)) ==
                              jack_step_fourth_moment(n, alpha),
                          "stationary fourth moment off at n = " + std::to_string(n) +
                              ", alpha = " + rational_to_string(alpha.exact));
            }
        }
        report.checks.push_back(f.finish());
    }

    {
        detail::Family f{"jack-unit-variance"};
        for (const AlphaParam& alpha : detail::verify_alpha_grid()) {
            for (int n = 2; n <= config.jack_max_n; ++n) {
                Rational second(0);
                for (const auto& [lam, p] : jack_law(n, alpha).probs) {
                    Rational c = content_sum(lam, alpha.exact);
                    second += p * c * c;
                }
                f.require(second == Rational(alpha.exact * n * (n - 1) / 2),
                          "content-sum variance misses the scale at n = " + std::to_string(n) +
                              ", alpha = " + rational_to_string(alpha.exact));
            }
        }
        report.checks.push_back(f.finish());
    }

    {
        detail::Family f{"jack-stein-pair"};
        for (const Rational& a : {Rational(1, 2), Rational(1), Rational(2)}) {
            for (int n = 3; n <= 7; ++n) {
                auto joint = detail::verify_jack_joint(n, AlphaParam(a));
                f.require(check_stein_pair(joint, Rational(2, n), 0.0).pass(),
                          "pair conditions fail at n = " + std::to_string(n) + ", alpha = " +
                              rational_to_string(a));
            }
        }
        report.checks.push_back(f.finish());
    }

    {
        detail::Family f{"urn-normalization"};
        for (const UrnConfig& cfg : detail::verify_cfg_grid()) {
            for (int n = 0; n <= config.urn_max_n; ++n) {
                Rational total(0);
                bool nonneg = true;
                for (const Rational& p : urn_law(n, cfg).probs) {
                    nonneg = nonneg && p >= 0;
                    total += p;
                }
                f.require(nonneg && total == 1,
                          "law at n = " + std::to_string(n) + " is not a probability vector");
            }
        }
        report.checks.push_back(f.finish());
    }

    {
        detail::Family f{"urn-moments"};
        for (const UrnConfig& cfg : detail::verify_cfg_grid()) {
            for (int n = 1; n <= config.urn_max_n; ++n) {
                UrnLaw law = urn_law(n, cfg);
                Rational mean(0), second(0);
                for (int k = 0; k <= n; ++k) {
                    mean += law.probs[k] * k;
                    second += law.probs[k] * k * k;
                }
                std::string where =
                    " at n = " + std::to_string(n) + ", A = " + std::to_string(cfg.A) + ", B = " +
                    std::to_string(cfg.B) + ", m = " + std::to_string(cfg.m);
                f.require(mean == urn_mean(n, cfg), "first moment off" + where);
                f.require(second == urn_second_moment(n, cfg), "second moment off" + where);
                Rational variance(second - mean * mean);
                f.require(variance == urn_variance(n, cfg), "variance off" + where);
                Rational ab(Rational(cfg.A + cfg.B) * (cfg.A + cfg.B));
                f.require(Rational(w_n_scale_sq(n, cfg) * ab / (Rational(n) * n) * variance) == 1,
                          "standardized count variance is not 1" + where);
            }
        }
        report.checks.push_back(f.finish());
    }

    {
        detail::Family f{"urn-lattice-commutation"};
        for (const UrnConfig& cfg : detail::verify_cfg_grid()) {
            for (int n = 1; n <= 20; ++n) {
                RationalMatrix lhs = pascal_up(n, cfg).matrix * pascal_down(n + 1, cfg).matrix;
                RationalMatrix du = pascal_down(n, cfg).matrix * pascal_up(n - 1, cfg).matrix;
                Rational c = pascal_c(n, cfg);
                f.require(lhs == RationalMatrix::combine(c, du, Rational(1 - c),
                                                         RationalMatrix::identity(n + 1)),
                          "commutation identity fails at n = " + std::to_string(n));
            }
        }
        report.checks.push_back(f.finish());
    }

    {
        detail::Family f{"urn-stein-pair"};
        for (const UrnConfig& cfg : detail::verify_cfg_grid()) {
            for (int n = 2; n <= 20; ++n) {
                auto pair = urn_stein_pair(n, cfg);
                std::string where = " at n = " + std::to_string(n);
                std::vector<Rational> w(n + 1);
                for (int k = 0; k <= n; ++k) {
                    w[k] = Rational(Rational(cfg.A) - Rational((cfg.A + cfg.B) * k, n));
                }
                auto kw = pair.kernel.apply(w);
                bool eigen = true;
                for (int k = 0; k <= n; ++k) {
                    eigen = eigen && kw[k] == Rational((1 - pair.a) * w[k]);
                }
                f.require(eigen, "eigenvector identity fails" + where);
                bool symmetric = true;
                for (int k = 0; k <= n; ++k) {
                    for (int kp = 0; kp < k; ++kp) {
                        symmetric = symmetric && pair.joint(k, kp) == pair.joint(kp, k);
                    }
                }
                f.require(symmetric, "joint law is not exchangeable" + where);
                f.require(check_stein_pair(detail::verify_urn_joint(n, cfg), pair.a, 0.0).pass(),
                          "pair conditions fail" + where);
            }
        }
        report.checks.push_back(f.finish());
    }

    {
        detail::Family f{"urn-step-moments"};
        for (const UrnConfig& cfg : detail::verify_cfg_grid()) {
            for (int n = 0; n <= 30; ++n) {
                UrnLaw law = urn_law(n, cfg);
                Rational averaged(0);
                for (int k = 0; k <= n; ++k) {
                    averaged += law.probs[k] * urn_step_moments(k, n, cfg).sigma_sq;
                }
                f.require(averaged == urn_step_moments(0, n, cfg).var_t,
                          "averaged conditional variance misses the total at n = " +
                              std::to_string(n));
            }
        }
        report.checks.push_back(f.finish());
    }

    {
        detail::Family f{"urn-box-law"};
        for (const UrnConfig& cfg : detail::verify_cfg_grid()) {
            for (int n = 0; n <= config.urn_max_n; ++n) {
                UrnLaw box = urn_box_law(n, cfg);
                UrnLaw shifted = urn_law(n, UrnConfig(cfg.A + cfg.m, cfg.B + cfg.m, cfg.m));
                f.require(box.probs == shifted.probs,
                          "variance-reweighted law is not the enriched urn at n = " +
                              std::to_string(n));
            }
        }
        report.checks.push_back(f.finish());
    }

    {
        detail::Family f{"stein-square-bias"};
        for (const UrnConfig& cfg : detail::verify_cfg_grid()) {
            for (int n = 2; n <= 12; ++n) {
                auto sq = square_bias(detail::verify_urn_joint(n, cfg), urn_a(n, cfg));
                Rational total(0);
                bool off_diagonal = true;
                for (const auto& at : sq.atoms) {
                    off_diagonal = off_diagonal && at.w != at.wp;
                    total += at.p;
                }
                f.require(off_diagonal && total == 1,
                          "square-bias law malformed at n = " + std::to_string(n));
            }
        }
        report.checks.push_back(f.finish());
    }

    {
        detail::Family f{"stein-characterization"};
        for (const auto& law : detail::verify_three_point_laws()) {
            std::vector<std::pair<double, double>> atoms;
            for (std::size_t i = 0; i < law.values.size(); ++i) {
                atoms.emplace_back(to_double(law.values[i]), to_double(law.probs[i]));
            }
            DiscreteDistribution base = DiscreteDistribution::from_atoms(atoms);
            ZeroBiasDensity density = zero_bias_density(base);
            double var = base.variance();
            const auto& v = density.breakpoints();
            const auto& d = density.densities();
            for (int k = 1; k <= 6; ++k) {
                double lhs = 0.0;
                for (std::size_t i = 0; i < d.size(); ++i) {
                    lhs += d[i] * (std::pow(v[i + 1], k) - std::pow(v[i], k));
                }
                double rhs = 0.0;
                for (std::size_t i = 0; i < base.size(); ++i) {
                    rhs += base.probs()[i] * std::pow(base.values()[i], k + 1);
                }
                f.require(std::abs(var * lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(rhs)),
                          "characterization identity fails at degree " + std::to_string(k));
            }
        }
        report.checks.push_back(f.finish());
    }

    return report;
}

}  // namespace zbias
