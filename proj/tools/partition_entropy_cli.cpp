// Command-line front end: reproducible experiments over the partition-entropy
// library. Every subcommand requires an explicit --seed, honors the
// PARTITION_ENTROPY_THREADS worker cap, and emits byte-identical output for
// identical (config, seed) regardless of the worker count.

#include <cmath>
#include <cstdint>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "partition_entropy/partition.hpp"
#include "partition_entropy/pdp.hpp"
#include "partition_entropy/random.hpp"
#include "partition_entropy/verify.hpp"

namespace {

using pentropy::format_double;

struct Config {
    double alpha = 0.0;
    double theta = 1.0;
    std::uint64_t seed = 0;
    double tail_eps = 1e-12;
    std::int64_t trials = 1000;
    std::int64_t n = 1000;
    std::int64_t max_n = 200;
    double gap_tol = 0.05;
    double tolerance = 1e-9;
    double step_tolerance = 1e-12;
    double z_threshold = 4.0;
    std::string output;
    std::string format = "csv";
    std::string config_path;
    std::string masses_file;
    std::vector<std::int64_t> checkpoints{100, 1000, 10000};
    std::vector<std::int64_t> counts;
};

// One config-file key: the option that can override it and a typed setter.
struct ConfigKey {
    CLI::Option* option;
    std::function<bool(const std::string&)> apply;
};

using ConfigKeys = std::map<std::string, ConfigKey>;

bool parse_double_text(const std::string& text, double& out) {
    try {
        std::size_t used = 0;
        out = std::stod(text, &used);
        return used == text.size();
    } catch (const std::exception&) {
        return false;
    }
}

bool parse_i64_text(const std::string& text, std::int64_t& out) {
    try {
        std::size_t used = 0;
        out = std::stoll(text, &used);
        return used == text.size();
    } catch (const std::exception&) {
        return false;
    }
}

bool parse_u64_text(const std::string& text, std::uint64_t& out) {
    try {
        std::size_t used = 0;
        out = std::stoull(text, &used);
        return used == text.size();
    } catch (const std::exception&) {
        return false;
    }
}

bool parse_i64_list_text(const std::string& text, std::vector<std::int64_t>& out) {
    std::vector<std::int64_t> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::int64_t v = 0;
        if (!parse_i64_text(item, v)) return false;
        values.push_back(v);
    }
    if (values.empty()) return false;
    out = std::move(values);
    return true;
}

ConfigKey key_double(CLI::Option* opt, double& slot) {
    return {opt, [&slot](const std::string& t) { return parse_double_text(t, slot); }};
}
ConfigKey key_i64(CLI::Option* opt, std::int64_t& slot) {
    return {opt, [&slot](const std::string& t) { return parse_i64_text(t, slot); }};
}
ConfigKey key_u64(CLI::Option* opt, std::uint64_t& slot) {
    return {opt, [&slot](const std::string& t) { return parse_u64_text(t, slot); }};
}
ConfigKey key_string(CLI::Option* opt, std::string& slot) {
    return {opt, [&slot](const std::string& t) { slot = t; return true; }};
}
ConfigKey key_i64_list(CLI::Option* opt, std::vector<std::int64_t>& slot) {
    return {opt, [&slot](const std::string& t) { return parse_i64_list_text(t, slot); }};
}

class ConfigError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flat key=value file; '#' starts a comment. Flags given on the command line
// keep precedence over file values.
void apply_config_file(const std::string& path, const ConfigKeys& keys,
                       bool& seed_from_config) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r");
        line = line.substr(first, last - first + 1);
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": expected key=value");
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        const auto key_end = key.find_last_not_of(" \t");
        key = key.substr(0, key_end == std::string::npos ? 0 : key_end + 1);
        const auto value_begin = value.find_first_not_of(" \t");
        value = value_begin == std::string::npos ? "" : value.substr(value_begin);
        const auto it = keys.find(key);
        if (it == keys.end())
            throw ConfigError("config key '" + key + "' is not valid for this command");
        if (it->second.option != nullptr && it->second.option->count() > 0)
            continue;  // flag wins
        if (!it->second.apply(value))
            throw ConfigError("config key '" + key + "': malformed value '" + value + "'");
        if (key == "seed") seed_from_config = true;
    }
}

void write_output(const Config& cfg, const std::string& payload) {
    if (cfg.output.empty()) {
        std::cout << payload;
        return;
    }
    std::ofstream out(cfg.output, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file: " + cfg.output);
    out << payload;
}

std::optional<pentropy::RankedMasses> load_masses(const Config& cfg) {
    if (cfg.masses_file.empty()) return std::nullopt;
    std::ifstream in(cfg.masses_file);
    if (!in) throw ConfigError("cannot open masses file: " + cfg.masses_file);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return pentropy::RankedMasses::from_json(buffer.str());
}

int run_simulate(const Config& cfg) {
    if (cfg.n < 1) throw ConfigError("simulate: n must be >= 1");
    if (cfg.trials < 1) throw ConfigError("simulate: trials must be >= 1");
    const auto masses = load_masses(cfg);
    std::optional<pentropy::PdpParams> params;
    if (!masses) params.emplace(cfg.alpha, cfg.theta);

    struct Row {
        pentropy::PartitionCounts pi;
        double plugin;
        double reference;  // posterior entropy (PDP) or true entropy (masses)
    };
    std::vector<Row> rows(static_cast<std::size_t>(cfg.trials));
    std::exception_ptr failure;
    std::mutex failure_mutex;
    pentropy::parallel_trials(cfg.trials, 0, [&](std::int64_t i) {
        try {
            pentropy::RandomStream rng(cfg.seed, static_cast<std::uint64_t>(i));
            Row row{};
            if (masses) {
                row.pi = pentropy::simulate_partition(*masses, cfg.n, rng,
                                                      std::max(cfg.tail_eps, 1e-9));
                row.reference = pentropy::entropy_of_masses(*masses);
            } else {
                row.pi = pentropy::crp_sample(*params, cfg.n, rng);
                row.reference = pentropy::posterior_entropy(*params, row.pi).value;
            }
            row.plugin = pentropy::plugin_entropy(row.pi);
            rows[static_cast<std::size_t>(i)] = std::move(row);
        } catch (...) {
            const std::scoped_lock lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    });
    if (failure) std::rethrow_exception(failure);

    const char* ref_name = masses ? "truth" : "posterior";
    std::string payload;
    if (cfg.format == "csv") {
        std::ostringstream out;
        out << "trial,n,k,plugin," << ref_name << "\n";
        for (std::size_t i = 0; i < rows.size(); ++i) {
            out << i << ',' << cfg.n << ',' << rows[i].pi.num_classes() << ','
                << format_double(rows[i].plugin) << ','
                << format_double(rows[i].reference) << '\n';
        }
        payload = out.str();
    } else {
        nlohmann::ordered_json j;
        j["command"] = "simulate";
        j["n"] = cfg.n;
        j["seed"] = cfg.seed;
        auto& list = j["partitions"];
        for (std::size_t i = 0; i < rows.size(); ++i) {
            nlohmann::ordered_json row;
            row["trial"] = i;
            row["counts"] = std::vector<std::int64_t>(rows[i].pi.counts().begin(),
                                                      rows[i].pi.counts().end());
            row["plugin"] = rows[i].plugin;
            row[ref_name] = rows[i].reference;
            list.push_back(std::move(row));
        }
        payload = j.dump(2) + "\n";
    }
    write_output(cfg, payload);
    double mean_plugin = 0.0;
    for (const auto& row : rows) mean_plugin += row.plugin;
    mean_plugin /= static_cast<double>(rows.size());
    std::cout << "simulate: " << cfg.trials << " partitions of size " << cfg.n
              << ", mean plug-in entropy " << format_double(mean_plugin) << " nats\n";
    return 0;
}

int run_converge(const Config& cfg) {
    const auto masses = load_masses(cfg);
    pentropy::ConvergenceResult result =
        masses ? pentropy::convergence_experiment(*masses, cfg.checkpoints, cfg.trials,
                                                  cfg.seed)
               : pentropy::convergence_experiment(pentropy::PdpParams(cfg.alpha, cfg.theta),
                                                  cfg.checkpoints, cfg.trials, cfg.seed,
                                                  0, cfg.tail_eps);
    std::string payload;
    if (cfg.format == "csv") {
        std::ostringstream out;
        pentropy::write_trace_csv(out, result);
        payload = out.str();
    } else {
        payload = pentropy::summary_to_json(result) + "\n";
    }
    write_output(cfg, payload);

    bool decreasing_plugin = true, decreasing_posterior = true, decreasing_gap = true;
    for (std::size_t c = 1; c < result.summary.size(); ++c) {
        decreasing_plugin &=
            result.summary[c].mean_err_plugin < result.summary[c - 1].mean_err_plugin;
        decreasing_posterior &= result.summary[c].mean_err_posterior <
                                result.summary[c - 1].mean_err_posterior;
        decreasing_gap &= result.summary[c].mean_gap < result.summary[c - 1].mean_gap;
    }
    const double final_gap = result.summary.back().mean_gap;
    const bool pass = masses
                          ? decreasing_plugin
                          : decreasing_plugin && decreasing_posterior && decreasing_gap &&
                                final_gap < cfg.gap_tol;
    std::cout << "converge: mean plug-in error "
              << format_double(result.summary.back().mean_err_plugin) << " at n="
              << result.summary.back().n;
    if (!masses)
        std::cout << ", mean gap " << format_double(final_gap) << " (tolerance "
                  << format_double(cfg.gap_tol) << ")";
    std::cout << (pass ? " -> PASS" : " -> FAIL") << "\n";
    return pass ? 0 : 1;
}

int run_martingale_check(const Config& cfg) {
    if (cfg.trials < 1) throw ConfigError("martingale-check: trials must be >= 1");
    if (cfg.max_n < 1) throw ConfigError("martingale-check: max-n must be >= 1");
    const pentropy::PdpParams params(cfg.alpha, cfg.theta);

    struct Row {
        std::int64_t n;
        std::int64_t k;
        double residual;
        double step;
    };
    std::vector<Row> rows(static_cast<std::size_t>(cfg.trials));
    std::exception_ptr failure;
    std::mutex failure_mutex;
    pentropy::parallel_trials(cfg.trials, 0, [&](std::int64_t i) {
        try {
            pentropy::RandomStream rng(cfg.seed, static_cast<std::uint64_t>(i));
            const std::int64_t n =
                1 + static_cast<std::int64_t>(rng.next_uniform() *
                                              static_cast<double>(cfg.max_n));
            const pentropy::PartitionCounts pi = pentropy::crp_sample(params, n, rng);
            rows[static_cast<std::size_t>(i)] = {
                n, pi.num_classes(), pentropy::martingale_residual(params, pi),
                pentropy::increasing_process_step(params, pi)};
        } catch (...) {
            const std::scoped_lock lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    });
    if (failure) std::rethrow_exception(failure);

    double max_abs_residual = 0.0;
    double min_step = std::numeric_limits<double>::infinity();
    for (const auto& row : rows) {
        max_abs_residual = std::max(max_abs_residual, std::fabs(row.residual));
        min_step = std::min(min_step, row.step);
    }
    const bool pass =
        max_abs_residual < cfg.tolerance && min_step > -cfg.step_tolerance;

    std::string payload;
    if (cfg.format == "csv") {
        std::ostringstream out;
        out << "trial,n,k,residual,step\n";
        for (std::size_t i = 0; i < rows.size(); ++i) {
            out << i << ',' << rows[i].n << ',' << rows[i].k << ','
                << format_double(rows[i].residual) << ',' << format_double(rows[i].step)
                << '\n';
        }
        payload = out.str();
    } else {
        nlohmann::ordered_json j;
        j["command"] = "martingale-check";
        j["trials"] = cfg.trials;
        j["max_abs_residual"] = max_abs_residual;
        j["min_step"] = min_step;
        j["tolerance"] = cfg.tolerance;
        j["step_tolerance"] = cfg.step_tolerance;
        j["pass"] = pass;
        payload = j.dump(2) + "\n";
    }
    write_output(cfg, payload);
    std::cout << "martingale-check: max |residual| " << format_double(max_abs_residual)
              << " (tolerance " << format_double(cfg.tolerance) << "), min step "
              << format_double(min_step) << (pass ? " -> PASS" : " -> FAIL") << "\n";
    return pass ? 0 : 1;
}

int emit_mc_check(const Config& cfg, const char* command,
                  const pentropy::MonteCarloCheck& check) {
    const bool pass = check.z() < cfg.z_threshold;
    std::string payload;
    if (cfg.format == "csv") {
        std::ostringstream out;
        out << "mc_mean,std_err,closed_form,z\n"
            << format_double(check.mc_mean) << ',' << format_double(check.std_err) << ','
            << format_double(check.closed_form) << ',' << format_double(check.z())
            << '\n';
        payload = out.str();
    } else {
        nlohmann::ordered_json j;
        j["command"] = command;
        j["mc_mean"] = check.mc_mean;
        j["std_err"] = check.std_err;
        j["closed_form"] = check.closed_form;
        j["z"] = check.z();
        j["z_threshold"] = cfg.z_threshold;
        j["pass"] = pass;
        payload = j.dump(2) + "\n";
    }
    write_output(cfg, payload);
    std::cout << command << ": monte carlo " << format_double(check.mc_mean)
              << " +/- " << format_double(check.std_err) << " vs closed form "
              << format_double(check.closed_form) << " (|z| "
              << format_double(check.z()) << " < " << format_double(cfg.z_threshold)
              << ")" << (pass ? " -> PASS" : " -> FAIL") << "\n";
    return pass ? 0 : 1;
}

int run_prior_check(const Config& cfg) {
    const pentropy::PdpParams params(cfg.alpha, cfg.theta);
    if (cfg.trials < 100) throw ConfigError("prior-check: trials must be >= 100");
    return emit_mc_check(cfg, "prior-check",
                         pentropy::prior_mean_check(params, cfg.trials, cfg.seed, 0,
                                                    cfg.tail_eps));
}

int run_posterior_check(const Config& cfg) {
    const pentropy::PdpParams params(cfg.alpha, cfg.theta);
    if (cfg.trials < 100) throw ConfigError("posterior-check: trials must be >= 100");
    if (cfg.counts.empty()) throw ConfigError("posterior-check: --counts is required");
    const pentropy::PartitionCounts pi(cfg.counts);
    return emit_mc_check(cfg, "posterior-check",
                         pentropy::posterior_agreement_check(params, pi, cfg.trials,
                                                             cfg.seed, 0, cfg.tail_eps));
}

}  // namespace

int main(int argc, char** argv) {
    Config cfg;
    CLI::App app{
        "partition-entropy: exchangeable-partition sampling, plug-in and posterior "
        "entropy estimators, and their verification harness"};
    app.require_subcommand(1);

    std::map<std::string, ConfigKeys> keys_by_command;
    std::map<std::string, CLI::Option*> seed_by_command;

    auto add_common = [&](CLI::App* cmd, bool with_params) {
        ConfigKeys& keys = keys_by_command[cmd->get_name()];
        if (with_params) {
            keys.emplace("alpha", key_double(
                cmd->add_option("--alpha", cfg.alpha, "discount in [0,1)"), cfg.alpha));
            keys.emplace("theta", key_double(
                cmd->add_option("--theta", cfg.theta, "concentration > -alpha"),
                cfg.theta));
        }
        CLI::Option* seed =
            cmd->add_option("--seed", cfg.seed, "random seed (required; no silent nondeterminism)");
        seed_by_command[cmd->get_name()] = seed;
        keys.emplace("seed", key_u64(seed, cfg.seed));
        keys.emplace("tail_eps", key_double(
            cmd->add_option("--tail-eps", cfg.tail_eps,
                            "stick-breaking truncation target (default 1e-12; for "
                            "alpha > 0 the stick count grows like "
                            "tail_eps^(-alpha/(1-alpha)), so raise it accordingly)"),
            cfg.tail_eps));
        keys.emplace("trials", key_i64(
            cmd->add_option("--trials", cfg.trials, "number of Monte Carlo trials"),
            cfg.trials));
        keys.emplace("output", key_string(
            cmd->add_option("--output", cfg.output, "output file (default: stdout)"),
            cfg.output));
        keys.emplace("format", key_string(
            cmd->add_option("--format", cfg.format, "csv or json")
                ->check(CLI::IsMember({"csv", "json"})),
            cfg.format));
        cmd->add_option("--config", cfg.config_path,
                        "flat key=value config file; command-line flags take precedence");
    };

    CLI::App* simulate = app.add_subcommand(
        "simulate",
        "draw partitions of size n (seating rule for --alpha/--theta, interval "
        "sampling for --masses-file) and report plug-in and posterior entropies");
    add_common(simulate, true);
    keys_by_command["simulate"].emplace(
        "n", key_i64(simulate->add_option("-n,--n", cfg.n, "sample size"), cfg.n));
    keys_by_command["simulate"].emplace(
        "masses_file",
        key_string(simulate->add_option("--masses-file", cfg.masses_file,
                                        "JSON ranked masses {\"weights\": [...], \"tail\": t}"),
                   cfg.masses_file));

    CLI::App* converge = app.add_subcommand(
        "converge",
        "grow one sample path per trial and track estimator errors at the "
        "checkpoints; passes when the mean plug-in error, mean posterior error and "
        "mean gap all decrease strictly and the final mean gap is below --gap-tol "
        "(default 0.05 nats)");
    add_common(converge, true);
    keys_by_command["converge"].emplace(
        "checkpoints",
        key_i64_list(converge->add_option("--checkpoints", cfg.checkpoints,
                                          "increasing sample sizes to record at")
                         ->delimiter(','),
                     cfg.checkpoints));
    keys_by_command["converge"].emplace(
        "masses_file",
        key_string(converge->add_option("--masses-file", cfg.masses_file,
                                        "JSON ranked masses; checks the plug-in "
                                        "estimator only"),
                   cfg.masses_file));
    keys_by_command["converge"].emplace(
        "gap_tol", key_double(converge->add_option("--gap-tol", cfg.gap_tol,
                                                   "bound on the final mean "
                                                   "|posterior - plugin| (default 0.05)"),
                              cfg.gap_tol));

    CLI::App* martingale = app.add_subcommand(
        "martingale-check",
        "exact one-step checks on seating-rule states at random sizes in [1, max-n]: "
        "passes when max |martingale residual| < tolerance (default 1e-9) and the "
        "compensator step stays above -step-tolerance (default 1e-12)");
    add_common(martingale, true);
    keys_by_command["martingale-check"].emplace(
        "max_n", key_i64(martingale->add_option("--max-n", cfg.max_n,
                                                "largest state size sampled"),
                         cfg.max_n));
    keys_by_command["martingale-check"].emplace(
        "tolerance", key_double(martingale->add_option("--tolerance", cfg.tolerance,
                                                       "bound on |residual| (default 1e-9)"),
                                cfg.tolerance));
    keys_by_command["martingale-check"].emplace(
        "step_tolerance",
        key_double(martingale->add_option("--step-tolerance", cfg.step_tolerance,
                                          "slack below zero for the compensator step "
                                          "(default 1e-12)"),
                   cfg.step_tolerance));

    CLI::App* posterior = app.add_subcommand(
        "posterior-check",
        "Monte Carlo mean entropy of posterior draws for --counts against the "
        "closed form; passes when |z| < --z (default 4 standard errors)");
    add_common(posterior, true);
    keys_by_command["posterior-check"].emplace(
        "counts", key_i64_list(posterior->add_option("--counts", cfg.counts,
                                                     "observed class sizes, e.g. 3,1")
                                   ->delimiter(','),
                               cfg.counts));
    keys_by_command["posterior-check"].emplace(
        "z", key_double(posterior->add_option("--z", cfg.z_threshold,
                                              "z-score threshold (default 4)"),
                        cfg.z_threshold));

    CLI::App* prior = app.add_subcommand(
        "prior-check",
        "Monte Carlo mean entropy of stick-breaking draws against the closed form; "
        "passes when |z| < --z (default 4 standard errors)");
    add_common(prior, true);
    keys_by_command["prior-check"].emplace(
        "z", key_double(prior->add_option("--z", cfg.z_threshold,
                                          "z-score threshold (default 4)"),
                        cfg.z_threshold));

    try {
        app.parse(argc, argv);

        CLI::App* active = app.get_subcommands().front();
        const std::string name = active->get_name();
        bool seed_from_config = false;
        if (!cfg.config_path.empty())
            apply_config_file(cfg.config_path, keys_by_command[name], seed_from_config);
        if (seed_by_command[name]->count() == 0 && !seed_from_config)
            throw ConfigError(name + ": --seed is required");

        if (name == "simulate") return run_simulate(cfg);
        if (name == "converge") return run_converge(cfg);
        if (name == "martingale-check") return run_martingale_check(cfg);
        if (name == "posterior-check") return run_posterior_check(cfg);
        return run_prior_check(cfg);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
