#pragma once

// Sample-complexity calculators: the bucket lower bound and its epsilon-relaxed
// variant, the complexity term H_bar used by the upper bound, and the explicit
// T* bound for (alpha, epsilon)-KL-LUCB.

#include "algorithm.hpp"
#include "errors.hpp"
#include "exp_family.hpp"
#include "reservoir.hpp"

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace infbandit {

struct LowerBound {
    double value{0.0};
    double log_factor{0.0};      // log(1/(2.4 delta)), or log(1/(4 delta)) when relaxed
    std::vector<double> terms;   // reciprocal-divergence terms summed in the bracket
    double term_sum() const {
        double s = 0.0;
        for (double x : terms) s += x;
        return s;
    }
};

namespace detail {

inline void check_delta(double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidInput("delta must lie in (0, 1)");
}

inline double reciprocal_kl(const ArmFamily& fam, double x, double y) {
    const double d = kl(fam, x, y);
    return 1.0 / d;
}

// The log factor can go negative for large delta; the bound is then vacuous.
inline double finish(LowerBound& lb) {
    lb.value = lb.term_sum() * std::max(0.0, lb.log_factor);
    return lb.value;
}

inline bool is_reciprocal_size(double alpha, std::size_t k) {
    return std::abs(alpha * static_cast<double>(k) - 1.0) <= 1e-9;
}

} // namespace detail

// Finite best-arm bound [1/d(theta_1, theta_2) + sum_{i>=2} 1/d(theta_i, theta_1)]
// * log(1/(2.4 delta)) for means sorted decreasingly.
inline LowerBound finite_lower_bound(const ArmFamily& fam, std::span<const double> means_desc,
                                     double delta) {
    detail::check_delta(delta);
    if (means_desc.size() < 2) throw InvalidInput("finite lower bound needs at least two arms");
    for (std::size_t i = 1; i < means_desc.size(); ++i)
        if (means_desc[i] > means_desc[i - 1])
            throw InvalidInput("finite lower bound expects means in decreasing order");
    if (!(means_desc[0] > means_desc[1]))
        throw InvalidInput("finite lower bound needs a unique best arm");
    LowerBound lb;
    lb.log_factor = std::log(1.0 / (2.4 * delta));
    lb.terms.push_back(detail::reciprocal_kl(fam, means_desc[0], means_desc[1]));
    for (std::size_t i = 1; i < means_desc.size(); ++i)
        lb.terms.push_back(detail::reciprocal_kl(fam, means_desc[i], means_desc[0]));
    detail::finish(lb);
    return lb;
}

// Bucket lower bound on the expected sample complexity of any (alpha, delta)-
// correct algorithm:
//   (1/d(mu*, b_2) + sum_{i=2}^{m-1} 1/d(b_i, mu*)) log(1/(2.4 delta)).
// The bottom bucket is left out since its mass may fall short of alpha.
//
// A uniform discrete reservoir over K means with alpha = 1/K is a finite model:
// every bucket is one atom of mass exactly alpha, all K of them enter, and the
// result coincides with finite_lower_bound.
inline LowerBound lower_bound_terms(const Reservoir& res, const ArmFamily& fam, double alpha,
                                    double delta) {
    detail::check_delta(delta);
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("alpha must lie in (0, 1)");

    if (const auto* d = std::get_if<DiscreteUniform>(&res.kind())) {
        if (!detail::is_reciprocal_size(alpha, d->means.size()))
            throw UnsupportedPartition(
                "lower bound on a discrete reservoir needs alpha = 1/K (one arm per bucket)");
        std::vector<double> desc(d->means.rbegin(), d->means.rend());
        return finite_lower_bound(fam, desc, delta);
    }

    const BucketPartition part = buckets(res, alpha);
    if (part.m < 3)
        throw InvalidInput("lower bound needs at least three buckets (alpha < 1/2)");
    const double mu_star = part.boundary(0);
    if (!(mu_star < fam.upper_limit()) || !fam.contains(mu_star))
        throw DomainError("lower bound needs mu* inside the open mean domain");

    LowerBound lb;
    lb.log_factor = std::log(1.0 / (2.4 * delta));
    lb.terms.push_back(detail::reciprocal_kl(fam, mu_star, part.boundary(2)));
    for (std::size_t i = 2; i <= part.m - 1; ++i)
        lb.terms.push_back(detail::reciprocal_kl(fam, part.boundary(i), mu_star));
    detail::finish(lb);
    return lb;
}

inline double lower_bound(const Reservoir& res, const ArmFamily& fam, double alpha, double delta) {
    return lower_bound_terms(res, fam, alpha, delta).value;
}

// Number of buckets holding (alpha, epsilon)-good means: buckets whose upper
// end b_{i-1} lies strictly above the good threshold.
inline std::size_t good_bucket_count(const BucketPartition& part, double threshold) {
    std::size_t q = 0;
    for (std::size_t i = 1; i <= part.m; ++i)
        if (part.boundary(i - 1) > threshold) ++q;
    return q;
}

struct RelaxedLowerBound {
    LowerBound bound;
    std::size_t q{0};
    bool empty_sum{false}; // q >= m - 1: no bucket left below the good ones
};

// epsilon-relaxed bound
//   ((q-1)/d(b_1 - eps, mu* + eps) + sum_{i=q+1}^{m-1} 1/d(b_i, mu* + eps)) log(1/(4 delta)).
inline RelaxedLowerBound lower_bound_relaxed(const Reservoir& res, const ArmFamily& fam,
                                             double alpha, double epsilon, double delta,
                                             std::optional<std::size_t> q_override = {}) {
    detail::check_delta(delta);
    if (!(epsilon >= 0.0)) throw InvalidInput("epsilon must be nonnegative");
    const BucketPartition part = buckets(res, alpha);
    const double mu_star = part.boundary(0);
    const double shifted = mu_star + epsilon;
    if (!fam.contains(shifted)) throw DomainError("mu* + epsilon lies outside the mean domain");

    RelaxedLowerBound out;
    out.q = q_override ? *q_override : good_bucket_count(part, good_threshold(res, alpha, epsilon));
    if (out.q == 0) throw InvalidInput("q must be at least 1");
    out.bound.log_factor = std::log(1.0 / (4.0 * delta));

    if (out.q > 1) {
        const double low = part.boundary(1) - epsilon;
        if (!fam.admits_estimate(low)) throw DomainError("b_1 - epsilon lies outside the mean domain");
        out.bound.terms.push_back(static_cast<double>(out.q - 1) *
                                  detail::reciprocal_kl(fam, low, shifted));
    }
    for (std::size_t i = out.q + 1; i + 1 <= part.m; ++i)
        out.bound.terms.push_back(detail::reciprocal_kl(fam, part.boundary(i), shifted));
    out.empty_sum = out.q + 1 > part.m - 1;
    detail::finish(out.bound);
    return out;
}

// H_bar = 2/eps^2 + sum_{i=2}^m 1 / max(eps^2/2, d*(b_{i-1}, b_1)).
inline double complexity_term(const BucketPartition& part, const ArmFamily& fam, double epsilon) {
    if (!(epsilon > 0.0)) throw InvalidInput("complexity term is infinite for epsilon = 0");
    const double floor = 0.5 * epsilon * epsilon;
    const double b1 = part.boundary(1);
    double h = 2.0 / (epsilon * epsilon);
    for (std::size_t i = 2; i <= part.m; ++i) {
        const double ci = chernoff_information(fam, part.boundary(i - 1), b1).value;
        h += 1.0 / std::max(floor, ci);
    }
    return h;
}

inline double complexity_term(const Reservoir& res, const ArmFamily& fam, double alpha,
                              double epsilon) {
    if (!(epsilon > 0.0)) throw InvalidInput("complexity term is infinite for epsilon = 0");
    return complexity_term(buckets(res, alpha), fam, epsilon);
}

// Pool version H(mu, c, eps) = sum_{a : d*(mu_a, c) < eps^2/2} 2/eps^2
//                            + sum_{other a} 1/d*(mu_a, c).
inline double complexity_term(std::span<const double> pool, const ArmFamily& fam, double c,
                              double epsilon) {
    if (!(epsilon > 0.0)) throw InvalidInput("complexity term is infinite for epsilon = 0");
    const double floor = 0.5 * epsilon * epsilon;
    double h = 0.0;
    for (double mu : pool) {
        const double ci = chernoff_information(fam, mu, c).value;
        h += ci < floor ? 2.0 / (epsilon * epsilon) : 1.0 / ci;
    }
    return h;
}

// Largest root of C = gamma log C + 1 + gamma/e, reached by fixed-point
// iteration from 1 + gamma/e (the map is a contraction above gamma).
inline double c0(double gamma) {
    if (!(gamma >= 1.0)) throw InvalidInput("gamma must be at least 1");
    const double shift = 1.0 + gamma / std::exp(1.0);
    double c = shift;
    for (int it = 0; it < 100000; ++it) {
        const double next = gamma * std::log(c) + shift;
        if (std::abs(next - c) <= 1e-12 * std::max(1.0, c)) return next;
        c = next;
    }
    return c;
}

// T* <= 12 C0 H log(1/delta) log(12 k1 n log(1/delta)^gamma H^gamma / delta) + n.
inline double t_star(const AlgoConfig& cfg, std::size_t n, double h_bar) {
    cfg.validate();
    if (!(h_bar > 0.0)) throw InvalidInput("complexity term must be positive");
    const double l = std::log(1.0 / cfg.delta);
    const double inner = std::log(12.0 * cfg.k1 * static_cast<double>(n)) + cfg.gamma * std::log(l) +
                         cfg.gamma * std::log(h_bar) - std::log(cfg.delta);
    return 12.0 * c0(cfg.gamma) * h_bar * l * inner + static_cast<double>(n);
}

inline double t_star(const AlgoConfig& cfg, double h_bar) {
    return t_star(cfg, initial_pool_size(cfg.alpha, cfg.delta), h_bar);
}

struct BoundsReport {
    double alpha{0.0};
    double epsilon{0.0};
    double delta{0.0};
    double gamma{0.0};
    double k1{0.0};
    std::size_t n{0};
    std::size_t m{0};
    std::vector<double> bucket_boundaries;
    std::optional<double> lower;
    std::vector<double> per_bucket_terms;
    std::optional<double> lower_relaxed;
    std::optional<std::size_t> q;
    bool relaxed_empty_sum{false};
    double h_bar{0.0};
    double c0{0.0};
    double t_star{0.0};
    // Bracketed sums of the simplified comparison forms (constants omitted).
    std::optional<double> lower_shape_sum;
    double upper_shape_sum{0.0};
    double log_inv_delta{0.0};
    std::vector<std::string> notes;
};

// Bundles every calculator. Parts that are undefined for the instance (e.g.
// mu* at the top of a Bernoulli domain) are left empty with a note; H_bar and
// T* are always required.
inline BoundsReport compare_report(const Reservoir& res, const ArmFamily& fam,
                                   const AlgoConfig& cfg) {
    cfg.validate();
    BoundsReport r;
    r.alpha = cfg.alpha;
    r.epsilon = cfg.epsilon;
    r.delta = cfg.delta;
    r.gamma = cfg.gamma;
    r.k1 = cfg.k1;
    r.n = initial_pool_size(cfg.alpha, cfg.delta);

    const BucketPartition part = buckets(res, cfg.alpha);
    r.m = part.m;
    r.bucket_boundaries = part.boundaries;

    try {
        auto lb = lower_bound_terms(res, fam, cfg.alpha, cfg.delta);
        r.lower = lb.value;
        r.per_bucket_terms = lb.terms;
    } catch (const std::exception& e) {
        r.notes.push_back(std::string("lower bound unavailable: ") + e.what());
    }
    try {
        auto rl = lower_bound_relaxed(res, fam, cfg.alpha, cfg.epsilon, cfg.delta);
        r.lower_relaxed = rl.bound.value;
        r.q = rl.q;
        r.relaxed_empty_sum = rl.empty_sum;
        if (rl.empty_sum) r.notes.push_back("relaxed lower bound: no bucket below the good ones");
    } catch (const std::exception& e) {
        r.notes.push_back(std::string("relaxed lower bound unavailable: ") + e.what());
    }

    r.h_bar = complexity_term(part, fam, cfg.epsilon);
    r.c0 = c0(cfg.gamma);
    r.t_star = t_star(cfg, r.n, r.h_bar);
    r.log_inv_delta = std::log(1.0 / cfg.delta);

    const double b0 = part.boundary(0);
    const double b1 = part.boundary(1);
    try {
        if (!fam.contains(b0 + cfg.epsilon)) throw DomainError("b_0 + epsilon outside the domain");
        double s = 1.0 / kl(fam, b1 - cfg.epsilon, b0 + cfg.epsilon);
        for (std::size_t i = 3; i + 1 <= part.m; ++i) s += 1.0 / kl(fam, part.boundary(i), b0 + cfg.epsilon);
        r.lower_shape_sum = s;
    } catch (const std::exception& e) {
        r.notes.push_back(std::string("lower shape sum unavailable: ") + e.what());
    }
    double u = 4.0 / (cfg.epsilon * cfg.epsilon);
    for (std::size_t i = 2; i + 1 <= part.m; ++i)
        u += 1.0 / chernoff_information(fam, part.boundary(i), b1).value;
    r.upper_shape_sum = u;
    return r;
}

} // namespace infbandit
