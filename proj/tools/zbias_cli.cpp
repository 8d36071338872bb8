#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "zbias/experiment.hpp"
#include "zbias/verify.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitUsage = 2;

using nlohmann::json;

json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    json config;
    in >> config;
    if (!config.is_object()) throw std::runtime_error("config file must hold a JSON object");
    return config;
}

void reject_unknown_keys(const json& config, const std::vector<std::string>& known) {
    for (const auto& [key, value] : config.items()) {
        (void)value;
        bool ok = false;
        for (const std::string& k : known) ok = ok || k == key;
        if (!ok) throw std::runtime_error("unknown config key '" + key + "'");
    }
}

// Config-file values apply only where the command line stayed silent.
bool flag_unset(const CLI::App* cmd, const std::string& flag) {
    return cmd->get_option(flag)->count() == 0;
}

std::vector<int> int_list(const json& value, const std::string& key) {
    std::vector<int> out;
    if (value.is_array()) {
        for (const auto& v : value) out.push_back(v.get<int>());
    } else {
        out.push_back(value.get<int>());
    }
    if (out.empty()) throw std::runtime_error("config key '" + key + "' is an empty list");
    return out;
}

std::vector<std::string> string_list(const json& value, const std::string& key) {
    std::vector<std::string> out;
    auto one = [&](const json& v) {
        if (v.is_string()) {
            out.push_back(v.get<std::string>());
        } else if (v.is_number_integer()) {
            out.push_back(std::to_string(v.get<long long>()));
        } else {
            throw std::runtime_error("config key '" + key + "' must hold strings");
        }
    };
    if (value.is_array()) {
        for (const auto& v : value) one(v);
    } else {
        one(value);
    }
    if (out.empty()) throw std::runtime_error("config key '" + key + "' is an empty list");
    return out;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
    out << text;
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

struct VerifyArgs {
    int jack_max_n = 8;
    int urn_max_n = 50;
    bool negative_control = false;
    std::string report_path;
    std::string config_path;
};

int run_verify_command(const VerifyArgs& args) {
    zbias::VerifyConfig config;
    config.jack_max_n = args.jack_max_n;
    config.urn_max_n = args.urn_max_n;
    if (args.negative_control) {
        // Corrupt one partition weight so the harness demonstrably fails.
        config.jack_measure_hook = [](const zbias::Partition& lam,
                                      const zbias::AlphaParam& alpha) {
            zbias::Rational p = zbias::jack_measure(lam, alpha);
            if (lam.to_string() == "2,1") p += zbias::Rational(1, 1000000);
            return p;
        };
    }

    zbias::VerifyReport report = zbias::run_verify(config);
    for (const zbias::CheckResult& check : report.checks) {
        if (check.pass) {
            std::cout << "ok " << check.name << " (" << check.detail << ")\n";
        } else {
            std::cout << "FAIL " << check.name << ": " << check.detail << "\n";
        }
    }
    long long failures = 0;
    for (const zbias::CheckResult& check : report.checks) failures += check.pass ? 0 : 1;
    std::cout << "verify: " << report.checks.size() << " families, " << failures << " failing\n";

    if (!args.report_path.empty()) {
        write_text_file(args.report_path, report.to_json().dump(2) + "\n");
    }
    return report.all_pass() ? kExitPass : kExitCheckFailure;
}

struct JackArgs {
    std::vector<int> n_grid;
    std::vector<std::string> alphas;
    long long samples = 100000;
    std::uint64_t seed = 0;
    int exact_max_n = 8;
    std::string out_path;
    std::string report_path;
    std::string config_path;
};

int run_jack_command(const JackArgs& args) {
    zbias::JackExperimentConfig config;
    config.n_grid = args.n_grid;
    for (const std::string& text : args.alphas) {
        config.alphas.push_back(zbias::AlphaParam::parse(text));
    }
    config.samples = args.samples;
    config.seed = args.seed;
    config.exact_max_n = args.exact_max_n;

    zbias::JackRunReport report = zbias::run_jack_experiment(config);
    std::ostringstream csv;
    zbias::write_jack_csv(report, csv);
    if (args.out_path.empty()) {
        std::cout << csv.str();
    } else {
        write_text_file(args.out_path, csv.str());
        for (const auto& row : report.rows) {
            std::cout << (row.pass ? "ok" : "FAIL") << " n=" << row.n
                      << " alpha=" << zbias::rational_to_string(row.alpha)
                      << (row.exact ? " exact" : " empirical") << "\n";
        }
    }
    if (!args.report_path.empty()) {
        write_text_file(args.report_path, zbias::jack_report_json(report).dump(2) + "\n");
    }
    return report.all_pass() ? kExitPass : kExitCheckFailure;
}

struct UrnArgs {
    std::vector<int> n_grid;
    long long A = 1;
    long long B = 1;
    long long m = 1;
    long long samples = 100000;
    std::uint64_t seed = 0;
    int exact_max_n = 50;
    std::string out_path;
    std::string report_path;
    std::string config_path;
};

int run_urn_command(const UrnArgs& args) {
    zbias::UrnExperimentConfig config;
    config.n_grid = args.n_grid;
    config.cfg = zbias::UrnConfig(args.A, args.B, args.m);
    config.samples = args.samples;
    config.seed = args.seed;
    config.exact_max_n = args.exact_max_n;

    zbias::UrnRunReport report = zbias::run_urn_experiment(config);
    std::ostringstream csv;
    zbias::write_urn_csv(report, csv);
    if (args.out_path.empty()) {
        std::cout << csv.str();
    } else {
        write_text_file(args.out_path, csv.str());
        for (const auto& row : report.rows) {
            std::cout << (row.pass ? "ok" : "FAIL") << " n=" << row.n << " regime=" << row.regime
                      << (row.exact ? " exact" : " empirical") << "\n";
        }
    }
    if (!args.report_path.empty()) {
        write_text_file(args.report_path, zbias::urn_report_json(report).dump(2) + "\n");
    }
    return report.all_pass() ? kExitPass : kExitCheckFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact identities and normal-approximation bounds for two growth processes"};
    app.require_subcommand(1);

    VerifyArgs verify_args;
    CLI::App* verify = app.add_subcommand("verify", "Run the exact-identity suite");
    verify->add_option("--jack-max-n", verify_args.jack_max_n,
                       "Largest partition size for exact partition checks (2..8)");
    verify->add_option("--urn-max-n", verify_args.urn_max_n,
                       "Largest urn length for exact urn checks (2..50)");
    verify->add_flag("--negative-control", verify_args.negative_control,
                     "Corrupt one partition weight to prove the suite can fail");
    verify->add_option("--report", verify_args.report_path, "Write a JSON report here");
    verify->add_option("--config", verify_args.config_path, "JSON config file");

    JackArgs jack_args;
    CLI::App* jack = app.add_subcommand("jack", "Partition-growth bound experiment");
    jack->add_option("--n", jack_args.n_grid, "Statistic index (repeatable), n >= 2");
    jack->add_option("--alpha", jack_args.alphas, "Deformation parameter P/Q (repeatable)");
    jack->add_option("--samples", jack_args.samples, "Monte Carlo sample count (>= 100)");
    jack->add_option("--seed", jack_args.seed, "Root seed for all streams");
    jack->add_option("--exact-max-n", jack_args.exact_max_n,
                     "Use the enumerated law up to this n (2..8)");
    jack->add_option("--out", jack_args.out_path, "Write CSV here instead of stdout");
    jack->add_option("--report", jack_args.report_path, "Write a JSON report here");
    jack->add_option("--config", jack_args.config_path, "JSON config file");

    UrnArgs urn_args;
    CLI::App* urn = app.add_subcommand("urn", "Urn bound experiment");
    urn->add_option("--n", urn_args.n_grid, "Standardized-count index (repeatable), n >= 1");
    urn->add_option("--A", urn_args.A, "Initial white weight (>= 1)");
    urn->add_option("--B", urn_args.B, "Initial black weight (>= 1)");
    urn->add_option("--m", urn_args.m, "Reinforcement per draw (>= 1)");
    urn->add_option("--samples", urn_args.samples, "Monte Carlo sample count (>= 100)");
    urn->add_option("--seed", urn_args.seed, "Root seed for all streams");
    urn->add_option("--exact-max-n", urn_args.exact_max_n,
                    "Use the enumerated law up to this n (1..50)");
    urn->add_option("--out", urn_args.out_path, "Write CSV here instead of stdout");
    urn->add_option("--report", urn_args.report_path, "Write a JSON report here");
    urn->add_option("--config", urn_args.config_path, "JSON config file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (verify->parsed()) {
            if (!verify_args.config_path.empty()) {
                json config = load_config_file(verify_args.config_path);
                reject_unknown_keys(config,
                                    {"jack_max_n", "urn_max_n", "negative_control", "report"});
                if (config.contains("jack_max_n") && flag_unset(verify, "--jack-max-n")) {
                    verify_args.jack_max_n = config["jack_max_n"].get<int>();
                }
                if (config.contains("urn_max_n") && flag_unset(verify, "--urn-max-n")) {
                    verify_args.urn_max_n = config["urn_max_n"].get<int>();
                }
                if (config.contains("negative_control") &&
                    flag_unset(verify, "--negative-control")) {
                    verify_args.negative_control = config["negative_control"].get<bool>();
                }
                if (config.contains("report") && flag_unset(verify, "--report")) {
                    verify_args.report_path = config["report"].get<std::string>();
                }
            }
            return run_verify_command(verify_args);
        }
        if (jack->parsed()) {
            if (!jack_args.config_path.empty()) {
                json config = load_config_file(jack_args.config_path);
                reject_unknown_keys(
                    config, {"n", "alpha", "samples", "seed", "exact_max_n", "out", "report"});
                if (config.contains("n") && flag_unset(jack, "--n")) {
                    jack_args.n_grid = int_list(config["n"], "n");
                }
                if (config.contains("alpha") && flag_unset(jack, "--alpha")) {
                    jack_args.alphas = string_list(config["alpha"], "alpha");
                }
                if (config.contains("samples") && flag_unset(jack, "--samples")) {
                    jack_args.samples = config["samples"].get<long long>();
                }
                if (config.contains("seed") && flag_unset(jack, "--seed")) {
                    jack_args.seed = config["seed"].get<std::uint64_t>();
                }
                if (config.contains("exact_max_n") && flag_unset(jack, "--exact-max-n")) {
                    jack_args.exact_max_n = config["exact_max_n"].get<int>();
                }
                if (config.contains("out") && flag_unset(jack, "--out")) {
                    jack_args.out_path = config["out"].get<std::string>();
                }
                if (config.contains("report") && flag_unset(jack, "--report")) {
                    jack_args.report_path = config["report"].get<std::string>();
                }
            }
            if (jack_args.n_grid.empty()) {
                std::cerr << "zbias jack: --n is required (flag or config file)\n";
                return kExitUsage;
            }
            if (jack_args.alphas.empty()) jack_args.alphas = {"1"};
            return run_jack_command(jack_args);
        }
        if (urn->parsed()) {
            if (!urn_args.config_path.empty()) {
                json config = load_config_file(urn_args.config_path);
                reject_unknown_keys(
                    config,
                    {"n", "A", "B", "m", "samples", "seed", "exact_max_n", "out", "report"});
                if (config.contains("n") && flag_unset(urn, "--n")) {
                    urn_args.n_grid = int_list(config["n"], "n");
                }
                if (config.contains("A") && flag_unset(urn, "--A")) {
                    urn_args.A = config["A"].get<long long>();
                }
                if (config.contains("B") && flag_unset(urn, "--B")) {
                    urn_args.B = config["B"].get<long long>();
                }
                if (config.contains("m") && flag_unset(urn, "--m")) {
                    urn_args.m = config["m"].get<long long>();
                }
                if (config.contains("samples") && flag_unset(urn, "--samples")) {
                    urn_args.samples = config["samples"].get<long long>();
                }
                if (config.contains("seed") && flag_unset(urn, "--seed")) {
                    urn_args.seed = config["seed"].get<std::uint64_t>();
                }
                if (config.contains("exact_max_n") && flag_unset(urn, "--exact-max-n")) {
                    urn_args.exact_max_n = config["exact_max_n"].get<int>();
                }
                if (config.contains("out") && flag_unset(urn, "--out")) {
                    urn_args.out_path = config["out"].get<std::string>();
                }
                if (config.contains("report") && flag_unset(urn, "--report")) {
                    urn_args.report_path = config["report"].get<std::string>();
                }
            }
            if (urn_args.n_grid.empty()) {
                std::cerr << "zbias urn: --n is required (flag or config file)\n";
                return kExitUsage;
            }
            return run_urn_command(urn_args);
        }
    } catch (const std::exception& e) {
        std::cerr << "zbias: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
