#include <infbandit/bounds.hpp>

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

using namespace infbandit;

namespace {

const auto kBern = ArmFamily::bernoulli();

double grid_ci(double p, double q) {
    if (p == q) return 0.0;
    return oracle::grid_chernoff(oracle::bernoulli_kl, p, q).value;
}

// Finite bound written from scratch for means sorted decreasingly.
double finite_oracle(const std::vector<double>& desc, double delta) {
    double s = 1.0 / oracle::bernoulli_kl(desc[0], desc[1]);
    for (std::size_t i = 1; i < desc.size(); ++i) s += 1.0 / oracle::bernoulli_kl(desc[i], desc[0]);
    return s * std::log(1.0 / (2.4 * delta));
}

} // namespace

TEST(LowerBound, UniformInstance) {
    const auto res = Reservoir::uniform(0.1, 0.9);
    const auto lb = lower_bound_terms(res, kBern, 0.25, 0.05);
    ASSERT_EQ(lb.terms.size(), 3u);
    EXPECT_NEAR(lb.terms[0], 2.716917, 1e-6);
    EXPECT_NEAR(lb.terms[1], 1.957615, 1e-6);
    EXPECT_NEAR(lb.terms[2], 0.968473, 1e-6);
    EXPECT_NEAR(lb.term_sum(), 5.643005, 1e-6);
    EXPECT_NEAR(lb.value, 11.97, 1e-2);
    EXPECT_NEAR(lb.value, 5.643005 * std::log(1.0 / 0.12), 1e-5);
}

TEST(LowerBound, VanishesAtLargeDelta) {
    const auto res = Reservoir::uniform(0.1, 0.9);
    EXPECT_EQ(lower_bound(res, kBern, 0.25, 1.0 / 2.4), 0.0);
    EXPECT_EQ(lower_bound(res, kBern, 0.25, 0.9), 0.0);
}

TEST(LowerBound, DecreasesInDelta) {
    const auto res = Reservoir::beta(1, 2, 0.95);
    double prev = lower_bound(res, kBern, 0.05, 0.001);
    for (double d : {0.01, 0.05, 0.1, 0.2, 0.4}) {
        const double v = lower_bound(res, kBern, 0.05, d);
        EXPECT_LT(v, prev);
        prev = v;
    }
}

TEST(LowerBound, FiniteExample) {
    const std::vector<double> means{0.9, 0.7, 0.5, 0.3};
    EXPECT_NEAR(finite_lower_bound(kBern, means, 0.05).value, 38.2297398, 1e-6);
    EXPECT_NEAR(finite_lower_bound(kBern, means, 0.05).value, finite_oracle(means, 0.05), 1e-9);
}

TEST(LowerBound, DiscreteEmbeddingMatchesFiniteFormula) {
    std::mt19937_64 gen(13);
    std::uniform_real_distribution<double> u(0.02, 0.98);
    for (int inst = 0; inst < 20; ++inst) {
        const int k = 2 + inst % 7;
        std::vector<double> means(k);
        for (auto& x : means) x = u(gen);
        std::sort(means.begin(), means.end());
        const double delta = 0.01 + 0.02 * inst;
        const auto res = Reservoir::discrete(means);
        std::vector<double> desc(means.rbegin(), means.rend());
        const double embedded = lower_bound(res, kBern, 1.0 / k, delta);
        EXPECT_NEAR(embedded, finite_oracle(desc, delta), 1e-9);
    }
}

TEST(LowerBound, ErrorPaths) {
    EXPECT_THROW(lower_bound(Reservoir::uniform(0.1, 0.9), kBern, 0.5, 0.05), InvalidInput);
    EXPECT_THROW(lower_bound(Reservoir::dirac(0.4, 0.6, 0.2), kBern, 0.1, 0.05), UnsupportedPartition);
    EXPECT_THROW(lower_bound(Reservoir::discrete({0.2, 0.5, 0.8}), kBern, 0.25, 0.05),
                 UnsupportedPartition);
    EXPECT_THROW(lower_bound(Reservoir::beta(1, 2), kBern, 0.05, 0.05), DomainError);
    EXPECT_THROW(lower_bound(Reservoir::uniform(0.1, 0.9), kBern, 0.25, 0.0), InvalidInput);
}

TEST(RelaxedLowerBound, ZeroEpsilonHasOneGoodBucket) {
    const auto r = lower_bound_relaxed(Reservoir::uniform(0.1, 0.9), kBern, 0.25, 0.0, 0.05);
    EXPECT_EQ(r.q, 1u);
    // With q = 1 only the lower buckets i = 2..m-1 remain.
    const double expect = (1.0 / oracle::bernoulli_kl(0.5, 0.9) + 1.0 / oracle::bernoulli_kl(0.3, 0.9)) *
                          std::log(1.0 / 0.2);
    EXPECT_NEAR(r.bound.value, expect, 1e-9);
}

TEST(RelaxedLowerBound, TermByTerm) {
    const auto res = Reservoir::uniform(0.1, 0.9);
    const double alpha = 0.1, eps = 0.05, delta = 0.05;
    const auto r = lower_bound_relaxed(res, kBern, alpha, eps, delta);

    const auto part = buckets(res, alpha);
    const double thr = part.boundary(1) - eps;
    std::size_t q = 0;
    for (std::size_t i = 1; i <= part.m; ++i) q += part.boundary(i - 1) > thr;
    EXPECT_EQ(r.q, q);
    EXPECT_EQ(q, 2u);
    const double top = part.boundary(0) + eps;
    double s = (q - 1) / oracle::bernoulli_kl(part.boundary(1) - eps, top);
    for (std::size_t i = q + 1; i <= part.m - 1; ++i) s += 1.0 / oracle::bernoulli_kl(part.boundary(i), top);
    EXPECT_NEAR(r.bound.value, s * std::log(1.0 / (4.0 * delta)), 1e-9);
    EXPECT_FALSE(r.empty_sum);
}

TEST(RelaxedLowerBound, VanishesAtQuarterDelta) {
    const auto r = lower_bound_relaxed(Reservoir::uniform(0.1, 0.9), kBern, 0.1, 0.05, 0.25);
    EXPECT_EQ(r.bound.value, 0.0);
}

TEST(RelaxedLowerBound, QOverrideAndEmptySum) {
    const auto res = Reservoir::uniform(0.1, 0.9);
    const auto r = lower_bound_relaxed(res, kBern, 0.25, 0.05, 0.05, 3);
    EXPECT_EQ(r.q, 3u);
    EXPECT_TRUE(r.empty_sum);
    EXPECT_NEAR(r.bound.value, 2.0 / oracle::bernoulli_kl(0.65, 0.95) * std::log(5.0), 1e-9);
    EXPECT_THROW(lower_bound_relaxed(res, kBern, 0.25, 0.05, 0.05, 0), InvalidInput);
    EXPECT_THROW(lower_bound_relaxed(Reservoir::beta(1, 1), kBern, 0.05, 0.05, 0.05), DomainError);
}

TEST(ComplexityTerm, MatchesGridOracle) {
    for (const auto& res : {Reservoir::uniform(0.1, 0.9), Reservoir::beta(1, 2, 0.95),
                            Reservoir::beta(1, 3, 0.95)}) {
        for (double alpha : {0.05, 0.1, 0.25}) {
            for (double eps : {0.01, 0.05, 0.2}) {
                const auto part = buckets(res, alpha);
                double h = 2.0 / (eps * eps);
                for (std::size_t i = 2; i <= part.m; ++i)
                    h += 1.0 / std::max(eps * eps / 2.0, grid_ci(part.boundary(i - 1), part.boundary(1)));
                EXPECT_NEAR(complexity_term(res, kBern, alpha, eps), h, 1e-6 * h) << res.name();
            }
        }
    }
}

TEST(ComplexityTerm, FloorEverywhereForWideEpsilon) {
    const auto res = Reservoir::uniform(0.1, 0.9);
    const auto part = buckets(res, 0.25);
    for (std::size_t i = 2; i <= part.m; ++i)
        ASSERT_LT(chernoff_information(kBern, part.boundary(i - 1), part.boundary(1)).value, 0.5);
    EXPECT_NEAR(complexity_term(part, kBern, 1.0), 2.0 * part.m, 1e-12);
}

TEST(ComplexityTerm, SmallEpsilonUsesChernoffForLowerBuckets) {
    const auto res = Reservoir::uniform(0.1, 0.9);
    const double eps = 0.001;
    // i = 2 compares b_1 with itself and takes the floor; the rest are resolved.
    double h = 4.0 / (eps * eps);
    h += 1.0 / grid_ci(0.5, 0.7) + 1.0 / grid_ci(0.3, 0.7);
    EXPECT_NEAR(complexity_term(res, kBern, 0.25, eps), h, 1e-6 * h);
    EXPECT_THROW(complexity_term(res, kBern, 0.25, 0.0), InvalidInput);
}

TEST(ComplexityTerm, PoolVersion) {
    const std::vector<double> pool{0.9, 0.85, 0.5, 0.2};
    const double eps = 0.1;
    double h = 0.0;
    for (double mu : pool) {
        const double ci = grid_ci(mu, 0.85);
        h += ci < eps * eps / 2 ? 2 / (eps * eps) : 1 / ci;
    }
    EXPECT_NEAR(complexity_term(pool, kBern, 0.85, eps), h, 1e-6 * h);
}

TEST(C0, SolvesFixedPoint) {
    for (double g : {1.0, 1.2, 1.5, 2.0, 3.0}) {
        const double c = c0(g);
        EXPECT_LE(std::abs(c - g * std::log(c) - 1.0 - g / std::exp(1.0)), 1e-8) << g;
        EXPECT_GT(c, g); // the largest root sits where the map contracts
    }
    EXPECT_THROW(c0(0.5), InvalidInput);
}

TEST(TStar, ExplicitFormula) {
    AlgoConfig cfg;
    const double h = complexity_term(Reservoir::uniform(0.1, 0.9), kBern, 0.05, 0.05);
    const std::size_t n = 74;
    const double l = std::log(20.0);
    const double expect =
        12 * c0(1.2) * h * l * std::log(12 * 12.5 * n * std::pow(l, 1.2) * std::pow(h, 1.2) / 0.05) + n;
    EXPECT_NEAR(t_star(cfg, h), expect, 1e-9 * expect);
}

TEST(TStar, Monotone) {
    AlgoConfig cfg;
    const double hs[] = {10, 100, 1e3, 1e4, 1e5};
    const double ds[] = {0.2, 0.1, 0.05, 0.01, 0.001};
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) {
            cfg.delta = ds[j];
            const double t = t_star(cfg, hs[i]);
            if (i > 0) EXPECT_GT(t, t_star(cfg, hs[i - 1]));
            if (j > 0) {
                AlgoConfig prev = cfg;
                prev.delta = ds[j - 1];
                EXPECT_GT(t, t_star(prev, hs[i]));
            }
        }
    }
    EXPECT_THROW(t_star(cfg, 0.0), InvalidInput);
}

TEST(Comparison, LowerTermsBelowUpperTerms) {
    for (const auto& res : {Reservoir::uniform(0.1, 0.9), Reservoir::beta(1, 2, 0.95)}) {
        const auto part = buckets(res, 0.05);
        const double mu = part.boundary(0);
        const double b1 = part.boundary(1);
        for (std::size_t i = 2; i < part.m; ++i) {
            const double b = part.boundary(i);
            const double ci = chernoff_information(kBern, b, b1).value;
            EXPECT_LE(ci, kl(kBern, b, b1));
            EXPECT_LE(ci, kl(kBern, b1, b));
            EXPECT_LE(1.0 / kl(kBern, b, mu), 1.0 / ci);
        }
    }
}

TEST(CompareReport, ConsistentWithCalculators) {
    for (const auto& res : {Reservoir::uniform(0.1, 0.9), Reservoir::beta(1, 1, 0.95),
                            Reservoir::beta(1, 3, 0.95)}) {
        AlgoConfig cfg;
        cfg.alpha = 0.1;
        cfg.epsilon = 0.03;
        cfg.delta = 0.05;
        const auto r = compare_report(res, kBern, cfg);
        ASSERT_TRUE(r.lower.has_value()) << res.name();
        EXPECT_DOUBLE_EQ(*r.lower, lower_bound(res, kBern, cfg.alpha, cfg.delta));
        ASSERT_TRUE(r.lower_relaxed.has_value());
        EXPECT_DOUBLE_EQ(*r.lower_relaxed,
                         lower_bound_relaxed(res, kBern, cfg.alpha, cfg.epsilon, cfg.delta).bound.value);
        EXPECT_DOUBLE_EQ(r.h_bar, complexity_term(res, kBern, cfg.alpha, cfg.epsilon));
        EXPECT_DOUBLE_EQ(r.t_star, t_star(cfg, r.h_bar));
        EXPECT_EQ(r.n, initial_pool_size(cfg.alpha, cfg.delta));
        EXPECT_EQ(r.m, buckets(res, cfg.alpha).m);
        EXPECT_GT(r.t_star, *r.lower);
        ASSERT_TRUE(r.lower_shape_sum.has_value());
        EXPECT_LT(*r.lower_shape_sum, r.upper_shape_sum);
        EXPECT_TRUE(r.notes.empty());
    }
}

TEST(CompareReport, TopOfDomainLeavesLowerBoundEmpty) {
    AlgoConfig cfg;
    const auto r = compare_report(Reservoir::beta(1, 2), kBern, cfg);
    EXPECT_FALSE(r.lower.has_value());
    EXPECT_FALSE(r.lower_relaxed.has_value());
    EXPECT_FALSE(r.notes.empty());
    EXPECT_GT(r.h_bar, 0.0);
    EXPECT_GT(r.t_star, 0.0);
}
