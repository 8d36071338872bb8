#pragma once

#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "zbias/jack.hpp"
#include "zbias/metrics.hpp"
#include "zbias/rational.hpp"
#include "zbias/rng.hpp"
#include "zbias/urn.hpp"

namespace zbias {

namespace detail {

inline std::string csv_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

}  // namespace detail

struct JackExperimentConfig {
    std::vector<int> n_grid;
    std::vector<AlphaParam> alphas;
    long long samples = 100000;
    std::uint64_t seed = 0;
    int exact_max_n = 8;  // laws up to here are enumerated instead of sampled
};

struct JackExperimentRow {
    int n = 0;
    Rational alpha;
    long long sample_count = 0;  // 0 on exact rows
    double w1_estimate = 0.0;
    double w1_stderr = 0.0;
    double bound = 0.0;
    bool exact = false;
    bool pass = false;
};

struct JackRunReport {
    long long samples = 0;
    std::uint64_t seed = 0;
    int exact_max_n = 0;
    std::vector<JackExperimentRow> rows;

    bool all_pass() const {
        for (const auto& row : rows) {
            if (!row.pass) return false;
        }
        return true;
    }
};

inline JackRunReport run_jack_experiment(const JackExperimentConfig& config) {
    if (config.n_grid.empty()) throw std::invalid_argument("jack experiment: empty n grid");
    if (config.alphas.empty()) throw std::invalid_argument("jack experiment: empty alpha grid");
    for (int n : config.n_grid) {
        if (n < 2) throw std::invalid_argument("jack experiment: n must be >= 2");
    }
    if (config.exact_max_n < 2 || config.exact_max_n > 8) {
        throw std::invalid_argument("jack experiment: exact-max-n must be in [2, 8]");
    }
    if (config.samples < 100) throw std::invalid_argument("jack experiment: need >= 100 samples");

    JackRunReport report;
    report.samples = config.samples;
    report.seed = config.seed;
    report.exact_max_n = config.exact_max_n;

    std::uint64_t row_index = 0;
    for (int n : config.n_grid) {
        for (const AlphaParam& alpha : config.alphas) {
            JackExperimentRow row;
            row.n = n;
            row.alpha = alpha.exact;
            row.bound = jack_l1_bound(n, alpha);
            if (n <= config.exact_max_n) {
                row.exact = true;
                row.w1_estimate = w1_exact(jack_w_law(n, alpha)).value;
            } else {
                SplitMix64 rng = SplitMix64::stream(config.seed, row_index);
                std::vector<double> draws(static_cast<std::size_t>(config.samples));
                for (double& d : draws) d = sample_w_alpha(n, alpha, rng);
                W1Report w1 = w1_empirical(draws, rng);
                row.sample_count = config.samples;
                row.w1_estimate = w1.value;
                row.w1_stderr = w1.stderr_estimate.value_or(0.0);
            }
            row.pass = row.w1_estimate <= row.bound;
            report.rows.push_back(row);
            ++row_index;
        }
    }
    return report;
}

inline void write_jack_csv(const JackRunReport& report, std::ostream& out) {
    out << "# zbias-jack-csv/1\n";
    out << "n,alpha,sample_count,w1_estimate,w1_stderr,bound\n";
    for (const auto& row : report.rows) {
        out << row.n << ',' << rational_to_string(row.alpha) << ',' << row.sample_count << ','
            << detail::csv_double(row.w1_estimate) << ',' << detail::csv_double(row.w1_stderr)
            << ',' << detail::csv_double(row.bound) << '\n';
    }
}

inline nlohmann::ordered_json jack_report_json(const JackRunReport& report) {
    nlohmann::ordered_json out;
    out["schema"] = "zbias-jack-report/1";
    out["samples"] = report.samples;
    out["seed"] = report.seed;
    out["exact_max_n"] = report.exact_max_n;
    out["all_pass"] = report.all_pass();
    out["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : report.rows) {
        out["rows"].push_back({{"n", row.n},
                               {"alpha", rational_to_string(row.alpha)},
                               {"mode", row.exact ? "exact" : "empirical"},
                               {"sample_count", row.sample_count},
                               {"w1_estimate", row.w1_estimate},
                               {"w1_stderr", row.w1_stderr},
                               {"bound", row.bound},
                               {"pass", row.pass}});
    }
    return out;
}

struct UrnExperimentConfig {
    std::vector<int> n_grid;  // index of the standardized count, >= 1
    UrnConfig cfg{1, 1, 1};
    long long samples = 100000;
    std::uint64_t seed = 0;
    int exact_max_n = 50;
};

struct UrnExperimentRow {
    UrnConfig cfg{1, 1, 1};
    int n = 0;
    long long sample_count = 0;
    double w1_estimate = 0.0;
    double w1_stderr = 0.0;
    double bound = 0.0;
    std::string regime;
    bool exact = false;
    bool pass = false;
};

struct UrnRunReport {
    long long samples = 0;
    std::uint64_t seed = 0;
    int exact_max_n = 0;
    std::vector<UrnExperimentRow> rows;

    bool all_pass() const {
        for (const auto& row : rows) {
            if (!row.pass) return false;
        }
        return true;
    }
};

inline UrnRunReport run_urn_experiment(const UrnExperimentConfig& config) {
    if (config.n_grid.empty()) throw std::invalid_argument("urn experiment: empty n grid");
    for (int n : config.n_grid) {
        if (n < 1) throw std::invalid_argument("urn experiment: n must be >= 1");
    }
    if (config.exact_max_n < 1 || config.exact_max_n > 50) {
        throw std::invalid_argument("urn experiment: exact-max-n must be in [1, 50]");
    }
    if (config.samples < 100) throw std::invalid_argument("urn experiment: need >= 100 samples");

    UrnRunReport report;
    report.samples = config.samples;
    report.seed = config.seed;
    report.exact_max_n = config.exact_max_n;

    std::uint64_t row_index = 0;
    for (int n : config.n_grid) {
        UrnExperimentRow row;
        row.cfg = config.cfg;
        row.n = n;
        UrnBoundReport bound = urn_l1_bound(n, config.cfg);
        row.bound = bound.value;
        row.regime = bound.regime;
        if (n <= config.exact_max_n) {
            row.exact = true;
            row.w1_estimate = w1_exact(urn_w_law(n, config.cfg)).value;
        } else {
            SplitMix64 rng = SplitMix64::stream(config.seed, row_index);
            std::vector<double> draws(static_cast<std::size_t>(config.samples));
            for (double& d : draws) {
                std::vector<int> path = simulate_urn(n, config.cfg, rng);
                d = w_n(path[static_cast<std::size_t>(n)], n, config.cfg);
            }
            W1Report w1 = w1_empirical(draws, rng);
            row.sample_count = config.samples;
            row.w1_estimate = w1.value;
            row.w1_stderr = w1.stderr_estimate.value_or(0.0);
        }
        row.pass = row.w1_estimate <= row.bound;
        report.rows.push_back(row);
        ++row_index;
    }
    return report;
}

inline void write_urn_csv(const UrnRunReport& report, std::ostream& out) {
    out << "# zbias-urn-csv/1\n";
    out << "A,B,m,n,samples,w1_estimate,w1_stderr,bound,regime\n";
    for (const auto& row : report.rows) {
        out << row.cfg.A << ',' << row.cfg.B << ',' << row.cfg.m << ',' << row.n << ','
            << row.sample_count << ',' << detail::csv_double(row.w1_estimate) << ','
            << detail::csv_double(row.w1_stderr) << ',' << detail::csv_double(row.bound) << ','
            << row.regime << '\n';
    }
}

inline nlohmann::ordered_json urn_report_json(const UrnRunReport& report) {
    nlohmann::ordered_json out;
    out["schema"] = "zbias-urn-report/1";
    out["samples"] = report.samples;
    out["seed"] = report.seed;
    out["exact_max_n"] = report.exact_max_n;
    out["all_pass"] = report.all_pass();
    out["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : report.rows) {
        out["rows"].push_back({{"A", row.cfg.A},
                               {"B", row.cfg.B},
                               {"m", row.cfg.m},
                               {"n", row.n},
                               {"mode", row.exact ? "exact" : "empirical"},
                               {"sample_count", row.sample_count},
                               {"w1_estimate", row.w1_estimate},
                               {"w1_stderr", row.w1_stderr},
                               {"bound", row.bound},
                               {"regime", row.regime},
                               {"pass", row.pass}});
    }
    return out;
}

}  // namespace zbias
