#pragma once

// Seeded Monte Carlo harness around (alpha, epsilon)-KL-LUCB.
//
// Replicate i of an experiment draws from the stream derive_seed(master_seed, i),
// so results are identical whatever the number of worker threads. Records are
// stored by replicate index and aggregated after all workers join.

#include "algorithm.hpp"
#include "bounds.hpp"
#include "errors.hpp"
#include "exp_family.hpp"
#include "parse.hpp"
#include "random.hpp"
#include "reservoir.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <mutex>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace infbandit {

enum class OutputFormat { Csv, Json };

struct ExperimentConfig {
    std::string reservoir_spec{"beta:1,1,0.95"};
    std::string family_spec{"bernoulli"};
    double alpha{0.05};
    double epsilon{0.05};
    double delta{0.05};
    double gamma{1.2};
    double k1{12.5};
    std::size_t runs{100};
    std::uint64_t master_seed{0};
    std::uint64_t max_samples{10'000'000};
    OutputFormat output{OutputFormat::Csv};
    std::size_t parallelism{1};

    AlgoConfig algo() const {
        AlgoConfig a;
        a.alpha = alpha;
        a.epsilon = epsilon;
        a.delta = delta;
        a.gamma = gamma;
        a.k1 = k1;
        a.max_samples = max_samples;
        return a;
    }

    void validate() const {
        if (runs == 0) throw InvalidInput("runs must be at least 1");
        if (parallelism == 0) throw InvalidInput("parallelism must be at least 1");
        algo().validate();
        (void)parse_reservoir(reservoir_spec);
        (void)parse_family(family_spec);
    }
};

struct RunRecord {
    std::uint64_t seed{0};
    std::uint64_t tau{0};
    std::size_t n{0};
    double recommended_mean{0.0};
    double pool_best_mean{0.0};
    double threshold{0.0};
    bool success{false};
    double simple_regret{0.0};
    bool event_a{false};
    bool event_b{false};
    bool budget_exhausted{false};
};

struct SummaryRow {
    std::string reservoir;
    std::string family;
    double alpha{0.0};
    double epsilon{0.0};
    double delta{0.0};
    std::size_t runs{0};
    std::size_t n{0};
    double effective_alpha{0.0};
    double error_rate{0.0};
    double mean_regret{0.0};
    double mean_T{0.0};
    std::size_t budget_exhausted{0};
    double event_a_rate{0.0};
    double event_b_rate{0.0};
};

struct ExperimentResult {
    SummaryRow summary;
    std::vector<RunRecord> runs;
};

// Runs fn(i) for i in [0, count) on `jobs` threads; the first exception wins.
template <class Fn>
void parallel_for(std::size_t count, std::size_t jobs, Fn&& fn) {
    jobs = std::max<std::size_t>(1, std::min(jobs, count));
    if (jobs == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> workers;
    workers.reserve(jobs);
    for (std::size_t w = 0; w < jobs; ++w) {
        workers.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                    next = count;
                }
            }
        });
    }
    for (auto& t : workers) t.join();
    if (error) std::rethrow_exception(error);
}

inline RunRecord make_record(const RunResult& r, const Reservoir& res, const AlgoConfig& cfg,
                             std::uint64_t seed) {
    RunRecord rec;
    rec.seed = seed;
    rec.tau = r.tau;
    rec.n = r.n;
    rec.recommended_mean = r.recommended_mean;
    rec.pool_best_mean = r.pool_best_mean;
    rec.threshold = good_threshold(res, cfg.alpha, cfg.epsilon);
    rec.success = rec.recommended_mean >= rec.threshold;
    rec.simple_regret = res.top() - rec.recommended_mean;
    const double top_quantile = res.quantile(1.0 - cfg.alpha);
    rec.event_a = rec.pool_best_mean > top_quantile;
    rec.event_b = rec.recommended_mean >= rec.pool_best_mean - cfg.epsilon;
    rec.budget_exhausted = r.budget_exhausted;
    // On A and B the recommendation is good by construction.
    if (rec.event_a && rec.event_b && !rec.success)
        throw std::logic_error("correctness decomposition violated: A and B hold but the arm is not good");
    return rec;
}

inline RunRecord run_replicate(const AlgoConfig& cfg, const Reservoir& res, const ArmFamily& fam,
                               std::uint64_t master_seed, std::size_t index) {
    const std::uint64_t seed = derive_seed(master_seed, index);
    Rng rng(seed);
    return make_record(run(cfg, res, fam, rng), res, cfg, seed);
}

inline SummaryRow summarize(const ExperimentConfig& cfg, const Reservoir& res,
                            const std::vector<RunRecord>& runs) {
    SummaryRow row;
    row.reservoir = res.name();
    row.family = parse_family(cfg.family_spec).name();
    row.alpha = cfg.alpha;
    row.epsilon = cfg.epsilon;
    row.delta = cfg.delta;
    row.runs = runs.size();
    row.n = initial_pool_size(cfg.alpha, cfg.delta);
    row.effective_alpha = effective_alpha(res, cfg.alpha, cfg.epsilon);
    std::size_t errors = 0;
    std::size_t a_count = 0;
    std::size_t b_count = 0;
    double regret = 0.0;
    double budget = 0.0;
    for (const auto& r : runs) {
        // Budget-exhausted runs always count as errors.
        if (!r.success || r.budget_exhausted) ++errors;
        if (r.budget_exhausted) ++row.budget_exhausted;
        if (r.event_a) ++a_count;
        if (r.event_b) ++b_count;
        regret += r.simple_regret;
        budget += static_cast<double>(r.tau);
    }
    const double count = static_cast<double>(std::max<std::size_t>(1, runs.size()));
    row.error_rate = static_cast<double>(errors) / count;
    row.mean_regret = regret / count;
    row.mean_T = budget / count;
    row.event_a_rate = static_cast<double>(a_count) / count;
    row.event_b_rate = static_cast<double>(b_count) / count;
    return row;
}

inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const Reservoir res = parse_reservoir(cfg.reservoir_spec);
    const ArmFamily fam = parse_family(cfg.family_spec);
    const AlgoConfig algo = cfg.algo();

    ExperimentResult out;
    out.runs.resize(cfg.runs);
    parallel_for(cfg.runs, cfg.parallelism, [&](std::size_t i) {
        out.runs[i] = run_replicate(algo, res, fam, cfg.master_seed, i);
    });
    out.summary = summarize(cfg, res, out.runs);
    return out;
}

// 6 significant digits, '.' decimal point.
inline std::string format_real(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

inline std::string runs_csv(const std::vector<RunRecord>& runs) {
    std::string out = "seed,tau,recommended_mean,simple_regret,success,event_A,event_B,budget_exhausted\n";
    for (const auto& r : runs) {
        out += std::to_string(r.seed);
        out += ',' + std::to_string(r.tau);
        out += ',' + format_real(r.recommended_mean);
        out += ',' + format_real(r.simple_regret);
        out += ',' + std::string(r.success ? "1" : "0");
        out += ',' + std::string(r.event_a ? "1" : "0");
        out += ',' + std::string(r.event_b ? "1" : "0");
        out += ',' + std::string(r.budget_exhausted ? "1" : "0");
        out += '\n';
    }
    return out;
}

inline nlohmann::json to_json(const RunRecord& r) {
    return {{"seed", r.seed},
            {"tau", r.tau},
            {"n", r.n},
            {"recommended_mean", r.recommended_mean},
            {"pool_best_mean", r.pool_best_mean},
            {"threshold", r.threshold},
            {"success", r.success},
            {"simple_regret", r.simple_regret},
            {"event_A", r.event_a},
            {"event_B", r.event_b},
            {"budget_exhausted", r.budget_exhausted}};
}

inline nlohmann::json to_json(const SummaryRow& s) {
    return {{"reservoir", s.reservoir},
            {"family", s.family},
            {"alpha", s.alpha},
            {"epsilon", s.epsilon},
            {"delta", s.delta},
            {"runs", s.runs},
            {"n", s.n},
            {"effective_alpha", s.effective_alpha},
            {"error_rate", s.error_rate},
            {"mean_regret", s.mean_regret},
            {"mean_T", s.mean_T},
            {"budget_exhausted", s.budget_exhausted},
            {"event_A_rate", s.event_a_rate},
            {"event_B_rate", s.event_b_rate}};
}

inline nlohmann::json to_json(const BoundsReport& r) {
    nlohmann::json j = {{"alpha", r.alpha},
                        {"epsilon", r.epsilon},
                        {"delta", r.delta},
                        {"gamma", r.gamma},
                        {"k1", r.k1},
                        {"n", r.n},
                        {"m", r.m},
                        {"bucket_boundaries", r.bucket_boundaries},
                        {"per_bucket_terms", r.per_bucket_terms},
                        {"H_bar", r.h_bar},
                        {"C0", r.c0},
                        {"t_star", r.t_star},
                        {"upper_shape_sum", r.upper_shape_sum},
                        {"log_inv_delta", r.log_inv_delta},
                        {"relaxed_empty_sum", r.relaxed_empty_sum},
                        {"notes", r.notes}};
    j["lower"] = r.lower ? nlohmann::json(*r.lower) : nlohmann::json(nullptr);
    j["lower_relaxed"] = r.lower_relaxed ? nlohmann::json(*r.lower_relaxed) : nlohmann::json(nullptr);
    j["q"] = r.q ? nlohmann::json(*r.q) : nlohmann::json(nullptr);
    j["lower_shape_sum"] =
        r.lower_shape_sum ? nlohmann::json(*r.lower_shape_sum) : nlohmann::json(nullptr);
    return j;
}

// Binomial k-sigma slack around a target probability.
inline double binomial_slack(double p, std::size_t trials, double k_sigma = 3.0) {
    return k_sigma * std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

// ---------------------------------------------------------------------------
// Benchmark table: Bernoulli arms, Beta(1, b) reservoirs truncated to (0, 0.95].

struct TableEntry {
    double beta_b{1.0};
    double alpha{0.0};
    double epsilon{0.0};
    double delta{0.0};
    // Published reference values for the row.
    double ref_effective_alpha{0.0};
    double ref_errors{0.0};
    double ref_regret{0.0};
    double ref_T{0.0};

    std::string label() const {
        std::ostringstream os;
        os << "Beta(1," << beta_b << ")";
        return os.str();
    }
    std::string reservoir_spec() const {
        std::ostringstream os;
        os << "beta:1," << beta_b << ",0.95";
        return os.str();
    }
};

inline const std::vector<TableEntry>& table_entries() {
    static const std::vector<TableEntry> entries = {
        {1, 0.025, 0.024, 0.05, 0.049, 0.00, 0.008, 51e3},
        {1, 0.025, 0.024, 0.10, 0.049, 0.01, 0.011, 46e3},
        {1, 0.050, 0.010, 0.05, 0.060, 0.02, 0.015, 113e3},
        {1, 0.050, 0.010, 0.10, 0.060, 0.06, 0.020, 90e3},
        {1, 0.050, 0.048, 0.05, 0.098, 0.00, 0.014, 12e3},
        {1, 0.050, 0.048, 0.10, 0.098, 0.00, 0.017, 10e3},
        {1, 0.050, 0.050, 0.05, 0.100, 0.01, 0.014, 11e3},
        {1, 0.050, 0.050, 0.10, 0.100, 0.00, 0.022, 10e3},
        {1, 0.100, 0.010, 0.05, 0.110, 0.02, 0.030, 71e3},
        {1, 0.100, 0.010, 0.10, 0.110, 0.06, 0.044, 69e3},
        {1, 0.100, 0.050, 0.05, 0.150, 0.00, 0.037, 10e3},
        {1, 0.100, 0.050, 0.10, 0.150, 0.00, 0.033, 7e3},
        {2, 0.025, 0.063, 0.05, 0.221, 0.00, 0.044, 10e3},
        {2, 0.025, 0.063, 0.10, 0.221, 0.01, 0.061, 10e3},
        {2, 0.050, 0.010, 0.05, 0.234, 0.03, 0.075, 79e3},
        {2, 0.050, 0.010, 0.10, 0.234, 0.10, 0.093, 65e3},
        {2, 0.050, 0.050, 0.05, 0.274, 0.01, 0.069, 10e3},
        {2, 0.050, 0.050, 0.10, 0.274, 0.03, 0.094, 11e3},
        {2, 0.050, 0.091, 0.05, 0.314, 0.01, 0.077, 5e3},
        {2, 0.050, 0.091, 0.10, 0.314, 0.00, 0.091, 5e3},
        {2, 0.100, 0.010, 0.05, 0.326, 0.04, 0.123, 63e3},
        {2, 0.100, 0.010, 0.10, 0.326, 0.06, 0.136, 60e3},
        {2, 0.100, 0.050, 0.05, 0.366, 0.00, 0.113, 10e3},
        {2, 0.100, 0.050, 0.10, 0.366, 0.05, 0.139, 10e3},
        {3, 0.025, 0.076, 0.05, 0.368, 0.00, 0.132, 12e3},
        {3, 0.025, 0.076, 0.10, 0.368, 0.00, 0.142, 10e3},
        {3, 0.050, 0.010, 0.05, 0.378, 0.01, 0.176, 87e3},
        {3, 0.050, 0.010, 0.10, 0.378, 0.10, 0.195, 82e3},
        {3, 0.050, 0.050, 0.05, 0.418, 0.00, 0.166, 13e3},
        {3, 0.050, 0.050, 0.10, 0.418, 0.06, 0.216, 14e3},
        {3, 0.050, 0.096, 0.05, 0.464, 0.00, 0.183, 7e3},
        {3, 0.050, 0.096, 0.10, 0.464, 0.00, 0.196, 6e3},
        {3, 0.100, 0.010, 0.05, 0.474, 0.06, 0.233, 69e3},
        {3, 0.100, 0.010, 0.10, 0.474, 0.06, 0.251, 53e3},
        {3, 0.100, 0.050, 0.05, 0.514, 0.01, 0.220, 10e3},
        {3, 0.100, 0.050, 0.10, 0.514, 0.03, 0.241, 10e3},
    };
    return entries;
}

struct TableRow {
    TableEntry entry;
    SummaryRow summary;
};

struct TableOptions {
    std::optional<std::string> filter; // substring of the row label, e.g. "Beta(1,1)"
    std::size_t runs{100};
    std::uint64_t master_seed{0};
    std::uint64_t max_samples{10'000'000};
    double gamma{1.2};
    double k1{12.5};
    std::size_t parallelism{1};
};

inline std::vector<TableEntry> select_entries(const std::optional<std::string>& filter) {
    std::vector<TableEntry> out;
    const std::string needle = filter ? detail::lowercase(*filter) : std::string{};
    for (const auto& e : table_entries())
        if (needle.empty() || detail::lowercase(e.label()).find(needle) != std::string::npos)
            out.push_back(e);
    return out;
}

inline ExperimentConfig entry_config(const TableEntry& e, const TableOptions& opt) {
    ExperimentConfig cfg;
    cfg.reservoir_spec = e.reservoir_spec();
    cfg.family_spec = "bernoulli";
    cfg.alpha = e.alpha;
    cfg.epsilon = e.epsilon;
    cfg.delta = e.delta;
    cfg.gamma = opt.gamma;
    cfg.k1 = opt.k1;
    cfg.runs = opt.runs;
    cfg.master_seed = opt.master_seed;
    cfg.max_samples = opt.max_samples;
    cfg.parallelism = opt.parallelism;
    return cfg;
}

inline std::vector<TableRow> reproduce_table(const TableOptions& opt) {
    std::vector<TableRow> rows;
    for (const auto& e : select_entries(opt.filter))
        rows.push_back({e, run_experiment(entry_config(e, opt)).summary});
    return rows;
}

inline std::string table_csv(const std::vector<TableRow>& rows) {
    std::string out =
        "reservoir,alpha,epsilon,delta,effective_alpha,errors,simple_regret,T,budget_exhausted,runs,"
        "ref_effective_alpha,ref_errors,ref_simple_regret,ref_T\n";
    for (const auto& r : rows) {
        const auto& s = r.summary;
        out += r.entry.label();
        for (double x : {r.entry.alpha, r.entry.epsilon, r.entry.delta, s.effective_alpha,
                         s.error_rate, s.mean_regret, s.mean_T})
            out += ',' + format_real(x);
        out += ',' + std::to_string(s.budget_exhausted) + ',' + std::to_string(s.runs);
        for (double x : {r.entry.ref_effective_alpha, r.entry.ref_errors, r.entry.ref_regret,
                         r.entry.ref_T})
            out += ',' + format_real(x);
        out += '\n';
    }
    return out;
}

inline nlohmann::json to_json(const TableRow& r) {
    nlohmann::json j = to_json(r.summary);
    j["label"] = r.entry.label();
    j["reference"] = {{"effective_alpha", r.entry.ref_effective_alpha},
                      {"errors", r.entry.ref_errors},
                      {"simple_regret", r.entry.ref_regret},
                      {"T", r.entry.ref_T}};
    return j;
}

// Spearman rank correlation (average ranks for ties).
inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw InvalidInput("spearman needs two equal-length samples");
    auto ranks = [](const std::vector<double>& v) {
        std::vector<std::size_t> idx(v.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
        std::vector<double> r(v.size());
        for (std::size_t i = 0; i < idx.size();) {
            std::size_t j = i;
            while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
            const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
            for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
            i = j + 1;
        }
        return r;
    };
    const auto rx = ranks(x);
    const auto ry = ranks(y);
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

// ---------------------------------------------------------------------------
// Event-probability checks.

struct EventEstimate {
    std::string name;
    std::size_t trials{0};
    std::size_t failures{0};
    double estimate{0.0};
    double target{0.0};
    double slack{0.0};
    std::optional<double> oracle; // exact failure probability when known
    bool skipped{false};
    std::string notice;
    bool pass() const { return skipped || estimate <= target + slack; }
};

struct EventReport {
    std::size_t n{0};
    std::vector<EventEstimate> events;
    bool pass() const {
        return std::all_of(events.begin(), events.end(), [](const auto& e) { return e.pass(); });
    }
};

// Monte Carlo estimates of
//   P(A^c): no pooled arm above G^{-1}(1 - alpha)          (target delta/2)
//   P(C^c): some bucket holds more than 6 log(1/delta) arms (target delta)
// over `trials` initializations, and P(B^c) over cfg.runs full runs
// (target delta/2). The bucket check requires delta <= alpha <= 1/3.
inline EventReport verify_events(const ExperimentConfig& cfg, std::size_t trials,
                                 double k_sigma = 3.0) {
    cfg.validate();
    if (trials == 0) throw InvalidInput("trials must be at least 1");
    const Reservoir res = parse_reservoir(cfg.reservoir_spec);
    const AlgoConfig algo = cfg.algo();
    EventReport report;
    report.n = initial_pool_size(cfg.alpha, cfg.delta);

    const double top_quantile = res.quantile(1.0 - cfg.alpha);
    const bool check_c = cfg.delta <= cfg.alpha && cfg.alpha <= 1.0 / 3.0 && !res.is_atomic();
    std::optional<BucketPartition> part;
    if (check_c) part = buckets(res, cfg.alpha);
    const double occupancy_cap = 6.0 * std::log(1.0 / cfg.delta);

    std::vector<char> fail_a(trials, 0);
    std::vector<char> fail_c(trials, 0);
    // Offset the stream index so initializations never reuse a run's stream.
    constexpr std::uint64_t kInitStreams = 0x100000000ULL;
    parallel_for(trials, cfg.parallelism, [&](std::size_t i) {
        Rng rng(derive_seed(cfg.master_seed, kInitStreams + i));
        std::vector<std::size_t> occupancy(part ? part->m + 1 : 0, 0);
        bool any_top = false;
        for (std::size_t a = 0; a < report.n; ++a) {
            const double mean = res.draw_mean(rng);
            if (mean > top_quantile) any_top = true;
            if (part) ++occupancy[part->bucket_of(mean)];
        }
        fail_a[i] = !any_top;
        if (part)
            fail_c[i] = std::any_of(occupancy.begin(), occupancy.end(),
                                    [&](std::size_t c) { return static_cast<double>(c) > occupancy_cap; });
    });

    auto tally = [](const std::vector<char>& v) {
        return static_cast<std::size_t>(std::count(v.begin(), v.end(), 1));
    };

    EventEstimate a;
    a.name = "A_complement";
    a.trials = trials;
    a.failures = tally(fail_a);
    a.estimate = static_cast<double>(a.failures) / static_cast<double>(trials);
    a.target = cfg.delta / 2.0;
    a.slack = binomial_slack(a.target, trials, k_sigma);
    a.oracle = std::pow(res.cdf(top_quantile), static_cast<double>(report.n));
    report.events.push_back(a);

    EventEstimate c;
    c.name = "C_complement";
    c.trials = trials;
    c.target = cfg.delta;
    c.slack = binomial_slack(c.target, trials, k_sigma);
    if (check_c) {
        c.failures = tally(fail_c);
        c.estimate = static_cast<double>(c.failures) / static_cast<double>(trials);
    } else {
        c.skipped = true;
        c.notice = res.is_atomic() ? "bucket occupancy needs a continuous reservoir"
                                   : "bucket occupancy check needs delta <= alpha <= 1/3";
    }
    report.events.push_back(c);

    const ArmFamily fam = parse_family(cfg.family_spec);
    std::vector<char> fail_b(cfg.runs, 0);
    parallel_for(cfg.runs, cfg.parallelism, [&](std::size_t i) {
        fail_b[i] = !run_replicate(algo, res, fam, cfg.master_seed, i).event_b;
    });
    EventEstimate b;
    b.name = "B_complement";
    b.trials = cfg.runs;
    b.failures = tally(fail_b);
    b.estimate = static_cast<double>(b.failures) / static_cast<double>(cfg.runs);
    b.target = cfg.delta / 2.0;
    b.slack = binomial_slack(b.target, cfg.runs, k_sigma);
    report.events.push_back(b);
    return report;
}

inline nlohmann::json to_json(const EventReport& r) {
    nlohmann::json events = nlohmann::json::array();
    for (const auto& e : r.events) {
        nlohmann::json j = {{"event", e.name},     {"trials", e.trials}, {"failures", e.failures},
                            {"estimate", e.estimate}, {"target", e.target}, {"slack", e.slack},
                            {"skipped", e.skipped}, {"pass", e.pass()}};
        j["oracle"] = e.oracle ? nlohmann::json(*e.oracle) : nlohmann::json(nullptr);
        if (!e.notice.empty()) j["notice"] = e.notice;
        events.push_back(j);
    }
    return {{"n", r.n}, {"events", events}, {"pass", r.pass()}};
}

} // namespace infbandit
