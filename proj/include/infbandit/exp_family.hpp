#pragma once

// One-parameter exponential families parameterized by their mean.
//
// All divergences are KL(p_{theta1}, p_{theta2}) in closed form. Confidence
// bounds invert N * d(p_hat, theta) <= beta by plain bisection; families with
// an unbounded mean domain first expand the bracket by doubling.

#include "errors.hpp"
#include "random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <sstream>
#include <string>

namespace infbandit {

enum class FamilyKind { Bernoulli, Gaussian, Poisson, Exponential };

class ArmFamily {
public:
    static ArmFamily bernoulli() { return ArmFamily(FamilyKind::Bernoulli, 0.0); }
    static ArmFamily poisson() { return ArmFamily(FamilyKind::Poisson, 0.0); }
    static ArmFamily exponential() { return ArmFamily(FamilyKind::Exponential, 0.0); }
    static ArmFamily gaussian(double variance) {
        if (!(variance > 0.0) || !std::isfinite(variance)) {
            std::ostringstream os;
            os << "gaussian family needs a positive finite variance, got " << variance;
            throw InvalidInput(os.str());
        }
        return ArmFamily(FamilyKind::Gaussian, variance);
    }

    FamilyKind kind() const { return kind_; }
    double variance() const { return variance_; }

    // Infimum / supremum of the mean domain Theta.
    double lower_limit() const {
        return kind_ == FamilyKind::Gaussian ? -std::numeric_limits<double>::infinity() : 0.0;
    }
    double upper_limit() const {
        return kind_ == FamilyKind::Bernoulli ? 1.0 : std::numeric_limits<double>::infinity();
    }
    bool bounded_above() const { return kind_ == FamilyKind::Bernoulli; }

    // Means accepted as a first KL argument or an empirical mean: the closure
    // of Theta, except that an exponential empirical mean is always positive.
    bool admits_estimate(double x) const {
        switch (kind_) {
        case FamilyKind::Bernoulli: return x >= 0.0 && x <= 1.0;
        case FamilyKind::Gaussian: return std::isfinite(x);
        case FamilyKind::Poisson: return x >= 0.0 && std::isfinite(x);
        case FamilyKind::Exponential: return x > 0.0 && std::isfinite(x);
        }
        return false;
    }

    // Means accepted as the reference (second) KL argument. Bernoulli keeps the
    // closed interval so bisection can probe the endpoints (where d is +inf).
    bool admits_reference(double x) const {
        switch (kind_) {
        case FamilyKind::Bernoulli: return x >= 0.0 && x <= 1.0;
        case FamilyKind::Gaussian: return std::isfinite(x);
        case FamilyKind::Poisson:
        case FamilyKind::Exponential: return x > 0.0 && std::isfinite(x);
        }
        return false;
    }

    // Open-interval membership, theta in Theta.
    bool contains(double x) const {
        switch (kind_) {
        case FamilyKind::Bernoulli: return x > 0.0 && x < 1.0;
        case FamilyKind::Gaussian: return std::isfinite(x);
        case FamilyKind::Poisson:
        case FamilyKind::Exponential: return x > 0.0 && std::isfinite(x);
        }
        return false;
    }

    std::string name() const {
        switch (kind_) {
        case FamilyKind::Bernoulli: return "bernoulli";
        case FamilyKind::Poisson: return "poisson";
        case FamilyKind::Exponential: return "exponential";
        case FamilyKind::Gaussian: {
            std::ostringstream os;
            os << "gaussian:" << variance_;
            return os.str();
        }
        }
        return "unknown";
    }

private:
    ArmFamily(FamilyKind kind, double variance) : kind_(kind), variance_(variance) {}

    FamilyKind kind_;
    double variance_;
};

namespace detail {

[[noreturn]] inline void mean_out_of_domain(const char* op, const char* which, double x,
                                            const ArmFamily& fam) {
    std::ostringstream os;
    os << op << ": " << which << " mean " << x << " is outside the domain of the " << fam.name()
       << " family";
    throw InvalidInput(os.str());
}

// x log(x / y) with the 0 log 0 = 0 convention.
inline double xlogxy(double x, double y) {
    if (x == 0.0) return 0.0;
    if (y == 0.0) return std::numeric_limits<double>::infinity();
    return x * std::log(x / y);
}

inline constexpr double kMeanTolerance = 1e-9;
inline constexpr double kChernoffTolerance = 1e-10;
inline constexpr double kLevelTolerance = 1e-9;
inline constexpr int kMaxBisection = 200;

} // namespace detail

// KL divergence between the members of `fam` with means theta1 and theta2.
// Bernoulli boundary conventions: d(0, x) = -ln(1 - x), d(1, x) = -ln(x).
inline double kl(const ArmFamily& fam, double theta1, double theta2) {
    if (!fam.admits_estimate(theta1)) detail::mean_out_of_domain("kl", "first", theta1, fam);
    if (!fam.admits_reference(theta2)) detail::mean_out_of_domain("kl", "second", theta2, fam);
    if (theta1 == theta2) return 0.0;
    switch (fam.kind()) {
    case FamilyKind::Bernoulli:
        return detail::xlogxy(theta1, theta2) + detail::xlogxy(1.0 - theta1, 1.0 - theta2);
    case FamilyKind::Gaussian: {
        const double diff = theta1 - theta2;
        return diff * diff / (2.0 * fam.variance());
    }
    case FamilyKind::Poisson:
        return theta2 - theta1 + detail::xlogxy(theta1, theta2);
    case FamilyKind::Exponential: {
        const double r = theta1 / theta2;
        return r - 1.0 - std::log(r);
    }
    }
    return 0.0;
}

// Chernoff information d*(p, q) = d(z*, p) where d(z*, p) = d(z*, q).
struct ChernoffInformation {
    double value{0.0};
    double z{0.0};
    bool degenerate{false}; // p == q
};

inline ChernoffInformation chernoff_information(const ArmFamily& fam, double p, double q) {
    if (!fam.contains(p)) detail::mean_out_of_domain("chernoff_information", "first", p, fam);
    if (!fam.contains(q))
        detail::mean_out_of_domain("chernoff_information", "second", q, fam);
    if (p == q) return {0.0, p, true};

    double lo = std::min(p, q);
    double hi = std::max(p, q);
    const double near = lo;
    const double far = hi;
    // g(z) = d(z, near) - d(z, far) is increasing on [near, far]: negative at
    // near, positive at far.
    for (int it = 0; it < detail::kMaxBisection && hi - lo > detail::kChernoffTolerance; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (kl(fam, mid, near) < kl(fam, mid, far))
            lo = mid;
        else
            hi = mid;
    }
    const double z = 0.5 * (lo + hi);
    return {kl(fam, z, p), z, false};
}

namespace detail {

inline void check_conf_args(const char* op, const ArmFamily& fam, double p_hat,
                            std::uint64_t count, double beta) {
    if (!fam.admits_estimate(p_hat)) mean_out_of_domain(op, "empirical", p_hat, fam);
    if (count == 0) throw InvalidInput(std::string(op) + ": sample count must be positive");
    if (!(beta >= 0.0) || std::isnan(beta))
        throw InvalidInput(std::string(op) + ": exploration level must be nonnegative");
}

// Bisection for the crossing of N d(p_hat, x) = beta between `inside` (where the
// constraint holds) and `outside` (where it fails). Returns the feasible end once
// the bracket is narrower than kMeanTolerance and N d at that end is within
// kLevelTolerance of beta; the second test matters where d is steep.
inline double bisect_crossing(const ArmFamily& fam, double p_hat, double count, double beta,
                              double inside, double outside) {
    double level_inside = inside == p_hat ? 0.0 : count * kl(fam, p_hat, inside);
    for (int it = 0; it < kMaxBisection; ++it) {
        if (std::abs(outside - inside) <= kMeanTolerance && beta - level_inside <= kLevelTolerance)
            break;
        const double mid = 0.5 * (inside + outside);
        if (mid == inside || mid == outside) break;
        const double level = count * kl(fam, p_hat, mid);
        if (level <= beta) {
            inside = mid;
            level_inside = level;
        } else {
            outside = mid;
        }
    }
    return inside;
}

} // namespace detail

// U = max { theta in Theta : N d(p_hat, theta) <= beta }.
inline double upper_conf(const ArmFamily& fam, double p_hat, std::uint64_t count, double beta) {
    detail::check_conf_args("upper_conf", fam, p_hat, count, beta);
    if (beta == 0.0) return p_hat;
    const double n = static_cast<double>(count);

    if (fam.bounded_above()) {
        const double top = fam.upper_limit();
        if (p_hat >= top || n * kl(fam, p_hat, top) <= beta) return top;
        return detail::bisect_crossing(fam, p_hat, n, beta, p_hat, top);
    }

    double step = std::max(std::abs(p_hat), 1.0);
    double inside = p_hat;
    double outside = p_hat + step;
    for (int it = 0; it < detail::kMaxBisection && n * kl(fam, p_hat, outside) <= beta; ++it) {
        inside = outside;
        step *= 2.0;
        outside = p_hat + step;
    }
    if (!std::isfinite(outside)) return std::numeric_limits<double>::max();
    return detail::bisect_crossing(fam, p_hat, n, beta, inside, outside);
}

// L = min { theta in Theta : N d(p_hat, theta) <= beta }.
inline double lower_conf(const ArmFamily& fam, double p_hat, std::uint64_t count, double beta) {
    detail::check_conf_args("lower_conf", fam, p_hat, count, beta);
    if (beta == 0.0) return p_hat;
    const double n = static_cast<double>(count);

    if (fam.kind() != FamilyKind::Gaussian) {
        const double bottom = fam.lower_limit();
        if (p_hat <= bottom) return bottom;
        // Bernoulli admits the endpoint as a reference; Poisson/Exponential
        // divergences blow up as the reference mean goes to 0.
        if (fam.admits_reference(bottom) && n * kl(fam, p_hat, bottom) <= beta) return bottom;
        return detail::bisect_crossing(fam, p_hat, n, beta, p_hat, bottom);
    }

    double step = std::max(std::abs(p_hat), 1.0);
    double inside = p_hat;
    double outside = p_hat - step;
    for (int it = 0; it < detail::kMaxBisection && n * kl(fam, p_hat, outside) <= beta; ++it) {
        inside = outside;
        step *= 2.0;
        outside = p_hat - step;
    }
    if (!std::isfinite(outside)) return std::numeric_limits<double>::lowest();
    return detail::bisect_crossing(fam, p_hat, n, beta, inside, outside);
}

// One reward drawn from the family member with mean theta.
inline double sample(const ArmFamily& fam, double theta, Rng& rng) {
    const bool ok = fam.kind() == FamilyKind::Bernoulli ? fam.admits_estimate(theta)
                                                         : fam.contains(theta);
    if (!ok) detail::mean_out_of_domain("sample", "arm", theta, fam);
    switch (fam.kind()) {
    case FamilyKind::Bernoulli: return uniform_open01(rng) < theta ? 1.0 : 0.0;
    case FamilyKind::Gaussian:
        return std::normal_distribution<double>(theta, std::sqrt(fam.variance()))(rng);
    case FamilyKind::Poisson:
        return static_cast<double>(std::poisson_distribution<long long>(theta)(rng));
    case FamilyKind::Exponential: return -theta * std::log(uniform_open01(rng));
    }
    return theta;
}

} // namespace infbandit
