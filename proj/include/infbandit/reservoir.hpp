#pragma once

// Reservoir distributions: the law G of the mean of a freshly drawn arm.

#include "errors.hpp"
#include "incomplete_beta.hpp"
#include "random.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

namespace infbandit {

// Beta(a, b) conditioned on (0, cap]: G(x) = F(min(x, cap)) / F(cap).
struct BetaTruncated {
    double a{1.0};
    double b{1.0};
    double cap{1.0};
};

// Uniform law on the finite set of listed means (kept sorted ascending).
struct DiscreteUniform {
    std::vector<double> means;
};

// Two atoms: `low` with mass 1 - weight_top and `high` with mass weight_top.
struct DiracMixture {
    double low{0.0};
    double high{1.0};
    double weight_top{0.5};
};

// Continuous uniform law on [lo, hi].
struct UniformInterval {
    double lo{0.0};
    double hi{1.0};
};

// Bucket boundaries b_0 = mu* > b_1 > ... > b_m. Bucket i (1-based) holds the
// means in (b_i, b_{i-1}]; the bottom bucket also holds b_m itself.
struct BucketPartition {
    double alpha{0.0};
    std::size_t m{0};
    std::vector<double> boundaries;

    double boundary(std::size_t i) const { return boundaries.at(i); }

    std::size_t bucket_of(double mean) const {
        for (std::size_t i = 1; i < m; ++i)
            if (mean > boundaries[i]) return i;
        return m;
    }
};

// Tail constants (beta, C') of the smoothness assumption, supplied by the caller.
struct TailConstants {
    double exponent{1.0};
    double scale{1.0};
};

class Reservoir {
public:
    using Kind = std::variant<BetaTruncated, DiscreteUniform, DiracMixture, UniformInterval>;

    static Reservoir beta(double a, double b, double cap = 1.0) {
        if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
            throw InvalidInput("beta reservoir needs positive shape parameters");
        if (!(cap > 0.0 && cap <= 1.0))
            throw InvalidInput("beta reservoir cap must lie in (0, 1]");
        return Reservoir(BetaTruncated{a, b, cap});
    }

    static Reservoir discrete(std::vector<double> means) {
        if (means.empty()) throw InvalidInput("discrete reservoir needs at least one mean");
        for (double x : means)
            if (!std::isfinite(x)) throw InvalidInput("discrete reservoir means must be finite");
        std::sort(means.begin(), means.end());
        return Reservoir(DiscreteUniform{std::move(means)});
    }

    static Reservoir dirac(double low, double high, double weight_top) {
        if (!std::isfinite(low) || !std::isfinite(high) || !(low < high))
            throw InvalidInput("dirac reservoir needs finite atoms with low < high");
        if (!(weight_top > 0.0 && weight_top < 1.0))
            throw InvalidInput("dirac reservoir weight must lie in (0, 1)");
        return Reservoir(DiracMixture{low, high, weight_top});
    }

    static Reservoir uniform(double lo, double hi) {
        if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi))
            throw InvalidInput("uniform reservoir needs finite lo < hi");
        return Reservoir(UniformInterval{lo, hi});
    }

    const Kind& kind() const { return kind_; }

    bool is_atomic() const {
        return std::holds_alternative<DiscreteUniform>(kind_) ||
               std::holds_alternative<DiracMixture>(kind_);
    }

    // mu* = G^{-1}(1).
    double top() const {
        return std::visit(
            [](const auto& r) -> double {
                using T = std::decay_t<decltype(r)>;
                if constexpr (std::is_same_v<T, BetaTruncated>) return r.cap;
                else if constexpr (std::is_same_v<T, DiscreteUniform>) return r.means.back();
                else if constexpr (std::is_same_v<T, DiracMixture>) return r.high;
                else return r.hi;
            },
            kind_);
    }

    // Lower end of the support; also the value returned for G^{-1}(0).
    double bottom() const {
        return std::visit(
            [](const auto& r) -> double {
                using T = std::decay_t<decltype(r)>;
                if constexpr (std::is_same_v<T, BetaTruncated>) return 0.0;
                else if constexpr (std::is_same_v<T, DiscreteUniform>) return r.means.front();
                else if constexpr (std::is_same_v<T, DiracMixture>) return r.low;
                else return r.lo;
            },
            kind_);
    }

    // G(x) = P(mean <= x).
    double cdf(double x) const {
        return std::visit(
            [&](const auto& r) -> double {
                using T = std::decay_t<decltype(r)>;
                if constexpr (std::is_same_v<T, BetaTruncated>) {
                    if (x <= 0.0) return 0.0;
                    if (x >= r.cap) return 1.0;
                    return std::min(1.0, beta_cdf(r, x) / cap_mass_);
                } else if constexpr (std::is_same_v<T, DiscreteUniform>) {
                    const auto k = std::upper_bound(r.means.begin(), r.means.end(), x) -
                                   r.means.begin();
                    return static_cast<double>(k) / static_cast<double>(r.means.size());
                } else if constexpr (std::is_same_v<T, DiracMixture>) {
                    if (x < r.low) return 0.0;
                    if (x < r.high) return 1.0 - r.weight_top;
                    return 1.0;
                } else {
                    if (x <= r.lo) return 0.0;
                    if (x >= r.hi) return 1.0;
                    return (x - r.lo) / (r.hi - r.lo);
                }
            },
            kind_);
    }

    // G(x-) = P(mean < x).
    double cdf_left(double x) const {
        return std::visit(
            [&](const auto& r) -> double {
                using T = std::decay_t<decltype(r)>;
                if constexpr (std::is_same_v<T, DiscreteUniform>) {
                    const auto k = std::lower_bound(r.means.begin(), r.means.end(), x) -
                                   r.means.begin();
                    return static_cast<double>(k) / static_cast<double>(r.means.size());
                } else if constexpr (std::is_same_v<T, DiracMixture>) {
                    if (x <= r.low) return 0.0;
                    if (x <= r.high) return 1.0 - r.weight_top;
                    return 1.0;
                } else {
                    return cdf(x);
                }
            },
            kind_);
    }

    // Generalized inverse G^{-1}(p) = inf { x : G(x) >= p }, with G^{-1}(0) taken
    // as the bottom of the support.
    double quantile(double p) const {
        if (!(p >= 0.0 && p <= 1.0)) {
            std::ostringstream os;
            os << "quantile level " << p << " is outside [0, 1]";
            throw InvalidInput(os.str());
        }
        return std::visit(
            [&](const auto& r) -> double {
                using T = std::decay_t<decltype(r)>;
                if constexpr (std::is_same_v<T, BetaTruncated>) {
                    if (p <= 0.0) return 0.0;
                    if (p >= 1.0) return r.cap;
                    return beta_quantile(r, p);
                } else if constexpr (std::is_same_v<T, DiscreteUniform>) {
                    if (p <= 0.0) return r.means.front();
                    const double k = static_cast<double>(r.means.size());
                    auto idx = static_cast<std::size_t>(std::ceil(p * k - 1e-12));
                    idx = std::clamp<std::size_t>(idx, 1, r.means.size());
                    return r.means[idx - 1];
                } else if constexpr (std::is_same_v<T, DiracMixture>) {
                    return p <= 1.0 - r.weight_top ? r.low : r.high;
                } else {
                    return r.lo + p * (r.hi - r.lo);
                }
            },
            kind_);
    }

    // Inverse-transform draw of one arm mean.
    double draw_mean(Rng& rng) const { return quantile(uniform_open01(rng)); }

    std::string name() const {
        std::ostringstream os;
        std::visit(
            [&](const auto& r) {
                using T = std::decay_t<decltype(r)>;
                if constexpr (std::is_same_v<T, BetaTruncated>) {
                    os << "beta:" << r.a << ',' << r.b << ',' << r.cap;
                } else if constexpr (std::is_same_v<T, DiscreteUniform>) {
                    os << "discrete:";
                    for (std::size_t i = 0; i < r.means.size(); ++i)
                        os << (i ? ";" : "") << r.means[i];
                } else if constexpr (std::is_same_v<T, DiracMixture>) {
                    os << "dirac:" << r.low << ',' << r.high << ',' << r.weight_top;
                } else {
                    os << "uniform:" << r.lo << ',' << r.hi;
                }
            },
            kind_);
        return os.str();
    }

private:
    explicit Reservoir(Kind kind) : kind_(std::move(kind)) {
        if (const auto* r = std::get_if<BetaTruncated>(&kind_)) cap_mass_ = beta_cdf(*r, r->cap);
    }

    // Untruncated Beta CDF, with exact forms when one shape parameter is 1.
    static double beta_cdf(const BetaTruncated& r, double x) {
        if (x <= 0.0) return 0.0;
        if (x >= 1.0) return 1.0;
        if (r.a == 1.0) return -std::expm1(r.b * std::log1p(-x));
        if (r.b == 1.0) return std::pow(x, r.a);
        return regularized_incomplete_beta(r.a, r.b, x);
    }

    double beta_quantile(const BetaTruncated& r, double p) const {
        const double target = p * cap_mass_;
        if (r.a == 1.0) return std::min(r.cap, -std::expm1(std::log1p(-target) / r.b));
        if (r.b == 1.0) return std::min(r.cap, std::pow(target, 1.0 / r.a));
        double lo = 0.0;
        double hi = r.cap;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            if (beta_cdf(r, mid) >= target)
                hi = mid;
            else
                lo = mid;
        }
        return hi;
    }

    Kind kind_;
    double cap_mass_{1.0};
};

// G^{-1}(1 - alpha) - epsilon: the lowest mean an (alpha, epsilon)-good arm may have.
inline double good_threshold(const Reservoir& res, double alpha, double epsilon) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("alpha must lie in (0, 1)");
    if (!(epsilon >= 0.0)) throw InvalidInput("epsilon must be nonnegative");
    return res.quantile(1.0 - alpha) - epsilon;
}

// Reservoir mass of the (alpha, epsilon)-good set { mean >= threshold }.
inline double effective_alpha(const Reservoir& res, double alpha, double epsilon) {
    return 1.0 - res.cdf_left(good_threshold(res, alpha, epsilon));
}

// M({ mean >= mu* - rho }), the left side of the tail assumption.
inline double top_mass(const Reservoir& res, double rho) {
    return 1.0 - res.cdf_left(res.top() - rho);
}

// Partition into m = ceil(1/alpha) buckets of mass alpha each (the bottom one
// takes the remainder), via b_i = G^{-1}(G(b_{i-1}) - alpha).
inline BucketPartition buckets(const Reservoir& res, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("alpha must lie in (0, 1)");
    if (res.is_atomic())
        throw UnsupportedPartition("bucket partition is undefined for atomic reservoir " +
                                   res.name());
    BucketPartition part;
    part.alpha = alpha;
    part.m = static_cast<std::size_t>(std::ceil(1.0 / alpha - 1e-9));
    part.boundaries.reserve(part.m + 1);
    part.boundaries.push_back(res.top());
    // G is continuous here, so G(b_{i-1}) = 1 - (i-1) alpha exactly; using the
    // level directly avoids compounding quantile round-off.
    for (std::size_t i = 1; i <= part.m; ++i) {
        const double level = 1.0 - static_cast<double>(i) * alpha;
        if (i == part.m || level <= 1e-12) {
            part.boundaries.push_back(res.quantile(0.0));
            break;
        }
        part.boundaries.push_back(res.quantile(level));
    }
    part.m = part.boundaries.size() - 1;
    return part;
}

// C' alpha^{1/beta} + epsilon.
inline double simple_regret_bound(const TailConstants& tail, double alpha, double epsilon) {
    if (!(tail.exponent > 0.0) || !(tail.scale > 0.0))
        throw InvalidInput("tail constants must be positive");
    return tail.scale * std::pow(alpha, 1.0 / tail.exponent) + epsilon;
}

} // namespace infbandit
