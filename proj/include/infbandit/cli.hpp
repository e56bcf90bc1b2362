#pragma once

// Command-line front end: `run`, `table`, `bounds`, `verify`.
// Exit codes: 0 success, 1 invalid usage or input, 2 runtime failure.

#include "bounds.hpp"
#include "errors.hpp"
#include "harness.hpp"
#include "parse.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <ostream>
#include <string>

namespace infbandit {

namespace detail {

inline std::string bounds_csv(const BoundsReport& r) {
    std::string out = "field,value\n";
    auto row = [&](const std::string& k, const std::string& v) { out += k + ',' + v + '\n'; };
    auto opt = [](const std::optional<double>& x) { return x ? format_real(*x) : std::string{}; };
    row("alpha", format_real(r.alpha));
    row("epsilon", format_real(r.epsilon));
    row("delta", format_real(r.delta));
    row("n", std::to_string(r.n));
    row("m", std::to_string(r.m));
    row("lower", opt(r.lower));
    row("lower_relaxed", opt(r.lower_relaxed));
    row("q", r.q ? std::to_string(*r.q) : std::string{});
    row("H_bar", format_real(r.h_bar));
    row("C0", format_real(r.c0));
    row("t_star", format_real(r.t_star));
    row("lower_shape_sum", opt(r.lower_shape_sum));
    row("upper_shape_sum", format_real(r.upper_shape_sum));
    row("log_inv_delta", format_real(r.log_inv_delta));
    return out;
}

inline std::string events_csv(const EventReport& r) {
    std::string out = "event,trials,failures,estimate,target,slack,oracle,skipped,pass\n";
    for (const auto& e : r.events) {
        out += e.name + ',' + std::to_string(e.trials) + ',' + std::to_string(e.failures) + ',' +
               format_real(e.estimate) + ',' + format_real(e.target) + ',' + format_real(e.slack) +
               ',' + (e.oracle ? format_real(*e.oracle) : std::string{}) + ',' +
               (e.skipped ? "1" : "0") + ',' + (e.pass() ? "1" : "0") + '\n';
    }
    return out;
}

inline nlohmann::json config_json(const ExperimentConfig& c) {
    return {{"reservoir", c.reservoir_spec}, {"family", c.family_spec}, {"alpha", c.alpha},
            {"epsilon", c.epsilon},          {"delta", c.delta},        {"gamma", c.gamma},
            {"k1", c.k1},                    {"runs", c.runs},          {"seed", c.master_seed},
            {"max_samples", c.max_samples}};
}

} // namespace detail

inline int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Near-optimal arm identification in infinitely-armed bandits"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "key=value file with default flag values (flags win)");
    // Reservoir specs contain commas; keep config values whole.
    app.get_config_formatter_base()->arrayDelimiter('\x1f');

    ExperimentConfig cfg;
    std::string format = "auto";
    std::string out_path;
    std::optional<std::string> filter;
    std::size_t trials = 10000;

    app.add_option("--reservoir", cfg.reservoir_spec, "beta:a,b[,cap] | discrete:x;y;... | dirac:lo,hi,w | uniform:lo,hi")
        ->capture_default_str();
    app.add_option("--family", cfg.family_spec, "bernoulli | gaussian[:var] | poisson | exponential")
        ->capture_default_str();
    app.add_option("--alpha", cfg.alpha)->capture_default_str();
    app.add_option("--epsilon", cfg.epsilon)->capture_default_str();
    app.add_option("--delta", cfg.delta)->capture_default_str();
    app.add_option("--gamma", cfg.gamma)->capture_default_str();
    app.add_option("--k1", cfg.k1)->capture_default_str();
    app.add_option("--runs", cfg.runs)->capture_default_str();
    app.add_option("--seed", cfg.master_seed)->capture_default_str();
    app.add_option("--max-samples", cfg.max_samples)->capture_default_str();
    app.add_option("--out", out_path, "write output to this file instead of stdout");
    app.add_option("--format", format)->check(CLI::IsMember({"auto", "csv", "json"}))->capture_default_str();
    app.add_option("--jobs", cfg.parallelism, "worker threads")->capture_default_str();

    auto* run_cmd = app.add_subcommand("run", "replicate (alpha,epsilon)-KL-LUCB runs");
    auto* table_cmd = app.add_subcommand("table", "reproduce the benchmark table");
    table_cmd->add_option("--filter", filter, "keep rows whose reservoir label contains this text");
    auto* bounds_cmd = app.add_subcommand("bounds", "evaluate lower and upper sample-complexity bounds");
    auto* verify_cmd = app.add_subcommand("verify", "Monte Carlo checks of the correctness events");
    verify_cmd->add_option("--trials", trials, "initializations for the A/C event estimates")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n" << app.help();
        return 1;
    }

    const bool json = format == "json";
    std::string payload;
    try {
        if (*run_cmd) {
            const auto result = run_experiment(cfg);
            if (json) {
                nlohmann::json runs = nlohmann::json::array();
                for (const auto& r : result.runs) runs.push_back(to_json(r));
                payload = nlohmann::json{{"config", detail::config_json(cfg)},
                                         {"summary", to_json(result.summary)},
                                         {"runs", runs}}
                              .dump(2) +
                          "\n";
            } else {
                payload = runs_csv(result.runs);
                const auto& s = result.summary;
                err << "effective_alpha=" << format_real(s.effective_alpha)
                    << " errors=" << format_real(s.error_rate)
                    << " simple_regret=" << format_real(s.mean_regret)
                    << " T=" << format_real(s.mean_T) << "\n";
            }
        } else if (*table_cmd) {
            TableOptions opt;
            opt.filter = filter;
            opt.runs = cfg.runs;
            opt.master_seed = cfg.master_seed;
            opt.max_samples = cfg.max_samples;
            opt.gamma = cfg.gamma;
            opt.k1 = cfg.k1;
            opt.parallelism = cfg.parallelism;
            const auto rows = reproduce_table(opt);
            if (json) {
                nlohmann::json j = nlohmann::json::array();
                for (const auto& r : rows) j.push_back(to_json(r));
                payload = j.dump(2) + "\n";
            } else {
                payload = table_csv(rows);
            }
        } else if (*bounds_cmd) {
            const auto report = compare_report(parse_reservoir(cfg.reservoir_spec),
                                               parse_family(cfg.family_spec), cfg.algo());
            payload = format == "csv" ? detail::bounds_csv(report) : to_json(report).dump(2) + "\n";
        } else if (*verify_cmd) {
            const auto report = verify_events(cfg, trials);
            payload = json ? to_json(report).dump(2) + "\n" : detail::events_csv(report);
        }
    } catch (const InvalidInput& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const UnsupportedPartition& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "runtime error: " << e.what() << "\n";
        return 2;
    }

    if (out_path.empty()) {
        out << payload;
    } else {
        std::ofstream file(out_path, std::ios::binary);
        if (!file) {
            err << "runtime error: cannot open " << out_path << "\n";
            return 2;
        }
        file << payload;
    }
    return 0;
}

} // namespace infbandit
