#include "oracles.hpp"

#include <infbandit/exp_family.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace infbandit;

namespace {

std::vector<ArmFamily> all_families() {
    return {ArmFamily::bernoulli(), ArmFamily::gaussian(1.0), ArmFamily::gaussian(0.25),
            ArmFamily::poisson(), ArmFamily::exponential()};
}

// Random interior mean for a family.
double random_mean(const ArmFamily& fam, std::mt19937_64& gen) {
    switch (fam.kind()) {
    case FamilyKind::Bernoulli: return std::uniform_real_distribution<double>(0.01, 0.99)(gen);
    case FamilyKind::Gaussian: return std::uniform_real_distribution<double>(-5.0, 5.0)(gen);
    default: return std::uniform_real_distribution<double>(0.05, 10.0)(gen);
    }
}

} // namespace

TEST(Kl, ClosedFormExamples) {
    const auto bern = ArmFamily::bernoulli();
    EXPECT_EQ(kl(bern, 0.5, 0.5), 0.0);
    EXPECT_NEAR(kl(bern, 0.1, 0.9), 1.757780, 1e-6);
    EXPECT_NEAR(kl(bern, 0.1, 0.9), 0.8 * std::log(9.0), 1e-12);
    EXPECT_DOUBLE_EQ(kl(ArmFamily::gaussian(1.0), 0.0, 1.0), 0.5);
}

TEST(Kl, BernoulliBoundaryConventions) {
    const auto bern = ArmFamily::bernoulli();
    EXPECT_NEAR(kl(bern, 0.0, 0.3), -std::log(0.7), 1e-15);
    EXPECT_NEAR(kl(bern, 1.0, 0.3), -std::log(0.3), 1e-15);
    EXPECT_TRUE(std::isinf(kl(bern, 0.5, 1.0)));
    EXPECT_TRUE(std::isinf(kl(bern, 0.5, 0.0)));
    EXPECT_EQ(kl(bern, 1.0, 1.0), 0.0);
}

TEST(Kl, MatchesPmfOracles) {
    std::mt19937_64 gen(11);
    for (int i = 0; i < 50; ++i) {
        const double p = std::uniform_real_distribution<double>(0.01, 0.99)(gen);
        const double q = std::uniform_real_distribution<double>(0.01, 0.99)(gen);
        EXPECT_NEAR(kl(ArmFamily::bernoulli(), p, q), oracle::bernoulli_kl(p, q), 1e-12);
    }
    for (int i = 0; i < 10; ++i) {
        const double a = std::uniform_real_distribution<double>(0.2, 8.0)(gen);
        const double b = std::uniform_real_distribution<double>(0.2, 8.0)(gen);
        EXPECT_NEAR(kl(ArmFamily::poisson(), a, b), oracle::poisson_kl(a, b), 1e-9);
        EXPECT_NEAR(kl(ArmFamily::exponential(), a, b), oracle::exponential_kl(a, b), 1e-7);
    }
}

TEST(Kl, DomainViolationsNameTheMean) {
    const auto bern = ArmFamily::bernoulli();
    try {
        kl(bern, 1.5, 0.5);
        FAIL() << "expected InvalidInput";
    } catch (const InvalidInput& e) {
        EXPECT_NE(std::string(e.what()).find("1.5"), std::string::npos);
    }
    EXPECT_THROW(kl(ArmFamily::poisson(), -1.0, 1.0), InvalidInput);
    EXPECT_THROW(kl(ArmFamily::exponential(), 1.0, 0.0), InvalidInput);
    EXPECT_THROW(kl(ArmFamily::gaussian(1.0), NAN, 0.0), InvalidInput);
    EXPECT_THROW(ArmFamily::gaussian(0.0), InvalidInput);
    EXPECT_THROW(ArmFamily::gaussian(-2.0), InvalidInput);
}

TEST(Kl, PositiveExactlyOffTheDiagonal) {
    std::mt19937_64 gen(3);
    for (const auto& fam : all_families()) {
        for (int i = 0; i < 1000; ++i) {
            const double a = random_mean(fam, gen);
            const double b = i % 10 == 0 ? a : random_mean(fam, gen);
            const double d = kl(fam, a, b);
            if (a == b)
                EXPECT_EQ(d, 0.0);
            else
                EXPECT_GT(d, 0.0) << fam.name() << " " << a << " " << b;
        }
    }
}

TEST(Kl, MonotoneInBothArguments) {
    std::mt19937_64 gen(5);
    for (const auto& fam : all_families()) {
        for (int i = 0; i < 500; ++i) {
            double v[3] = {random_mean(fam, gen), random_mean(fam, gen), random_mean(fam, gen)};
            std::sort(v, v + 3);
            if (v[0] == v[1] || v[1] == v[2]) continue;
            EXPECT_GT(kl(fam, v[0], v[2]), kl(fam, v[1], v[2])) << fam.name();
            EXPECT_LT(kl(fam, v[0], v[1]), kl(fam, v[0], v[2])) << fam.name();
        }
    }
}

TEST(Chernoff, SymmetricBernoulliPair) {
    const auto c = chernoff_information(ArmFamily::bernoulli(), 0.25, 0.75);
    EXPECT_NEAR(c.z, 0.5, 1e-9);
    EXPECT_NEAR(c.value, 0.143841, 1e-6);
    EXPECT_NEAR(c.value, 0.5 * std::log(4.0 / 3.0), 1e-9);
    EXPECT_FALSE(c.degenerate);
}

TEST(Chernoff, DegenerateLimit) {
    for (const auto& fam : all_families()) {
        const double p = fam.kind() == FamilyKind::Bernoulli ? 0.4 : 1.3;
        const auto c = chernoff_information(fam, p, p);
        EXPECT_EQ(c.value, 0.0);
        EXPECT_EQ(c.z, p);
        EXPECT_TRUE(c.degenerate);
    }
}

TEST(Chernoff, MatchesGridOracle) {
    const auto bern = ArmFamily::bernoulli();
    const auto c = chernoff_information(bern, 0.3, 0.5);
    const auto g = oracle::grid_chernoff(oracle::bernoulli_kl, 0.3, 0.5);
    EXPECT_NEAR(c.value, g.value, 1e-6);
    EXPECT_NEAR(c.value, 0.0213238432721934, 1e-9);
    // The raw grid minimax is an upper estimate within one cell of slope.
    EXPECT_GE(g.grid_minimax + 1e-12, c.value);
    EXPECT_LE(g.grid_minimax - c.value, 1e-4);
}

TEST(Chernoff, EqualizesDivergences) {
    std::mt19937_64 gen(17);
    for (const auto& fam : all_families()) {
        for (int i = 0; i < 300; ++i) {
            const double p = random_mean(fam, gen);
            const double q = random_mean(fam, gen);
            if (p == q) continue;
            const auto c = chernoff_information(fam, p, q);
            EXPECT_LE(std::abs(kl(fam, c.z, p) - kl(fam, c.z, q)), 1e-8) << fam.name();
            EXPECT_GE(c.z, std::min(p, q));
            EXPECT_LE(c.z, std::max(p, q));
        }
    }
}

TEST(Chernoff, GaussianMidpoint) {
    const auto fam = ArmFamily::gaussian(2.0);
    const auto c = chernoff_information(fam, -1.0, 3.0);
    EXPECT_NEAR(c.z, 1.0, 1e-9);
    EXPECT_NEAR(c.value, 4.0 / 4.0, 1e-8); // (2)^2 / (2 * 2)
}

TEST(Chernoff, BernoulliSandwich) {
    const auto bern = ArmFamily::bernoulli();
    std::mt19937_64 gen(23);
    std::uniform_real_distribution<double> u(0.001, 0.999);
    for (int i = 0; i < 1000; ++i) {
        double x = u(gen), mu = u(gen);
        if (x == mu) continue;
        if (x > mu) std::swap(x, mu);
        const double quad = (mu - x) * (mu - x);
        const double ci = chernoff_information(bern, x, mu).value;
        const double d = kl(bern, x, mu);
        EXPECT_LT(quad / 2.0, ci);
        EXPECT_LT(ci, d);
        EXPECT_LT(d, quad / (mu * (1.0 - mu)));
    }
}

TEST(ConfidenceBounds, ZeroLevelCollapses) {
    for (const auto& fam : all_families()) {
        const double p = fam.kind() == FamilyKind::Bernoulli ? 0.37 : 2.5;
        EXPECT_EQ(upper_conf(fam, p, 7, 0.0), p);
        EXPECT_EQ(lower_conf(fam, p, 7, 0.0), p);
    }
}

TEST(ConfidenceBounds, BernoulliExamples) {
    const auto bern = ArmFamily::bernoulli();
    EXPECT_NEAR(upper_conf(bern, 0.5, 10, 1.0), 0.712877, 1e-5);
    EXPECT_NEAR(lower_conf(bern, 0.5, 10, 1.0), 0.287123, 1e-5);
    // Closed form u (1 - u) = 0.25 e^{-0.2}.
    const double u = 0.5 + 0.5 * std::sqrt(1.0 - std::exp(-0.2));
    EXPECT_NEAR(upper_conf(bern, 0.5, 10, 1.0), u, 1e-9);
    EXPECT_EQ(upper_conf(bern, 1.0, 5, 0.5), 1.0);
    EXPECT_EQ(lower_conf(bern, 0.0, 5, 0.5), 0.0);
    // d(0, theta) = -ln(1 - theta): U solves 5 (-ln(1 - U)) = 0.5.
    EXPECT_NEAR(upper_conf(bern, 0.0, 5, 0.5), 1.0 - std::exp(-0.1), 1e-9);
    EXPECT_NEAR(lower_conf(bern, 1.0, 5, 0.5), std::exp(-0.1), 1e-9);
}

TEST(ConfidenceBounds, GaussianClosedForm) {
    const auto fam = ArmFamily::gaussian(0.5);
    const double w = std::sqrt(2.0 * 0.5 * 3.0 / 12.0);
    EXPECT_NEAR(upper_conf(fam, -0.4, 12, 3.0), -0.4 + w, 1e-8);
    EXPECT_NEAR(lower_conf(fam, -0.4, 12, 3.0), -0.4 - w, 1e-8);
}

TEST(ConfidenceBounds, PoissonFromZero) {
    const auto fam = ArmFamily::poisson();
    // d(0, theta) = theta.
    EXPECT_NEAR(upper_conf(fam, 0.0, 4, 2.0), 0.5, 1e-8);
    EXPECT_EQ(lower_conf(fam, 0.0, 4, 2.0), 0.0);
}

TEST(ConfidenceBounds, InversionProperty) {
    std::mt19937_64 gen(29);
    std::uniform_int_distribution<int> count(1, 1000);
    std::uniform_real_distribution<double> level(0.01, 20.0);
    for (const auto& fam : all_families()) {
        for (int i = 0; i < 400; ++i) {
            const double p = random_mean(fam, gen);
            const auto n = static_cast<std::uint64_t>(count(gen));
            const double beta = level(gen);
            const double up = upper_conf(fam, p, n, beta);
            const double lo = lower_conf(fam, p, n, beta);
            EXPECT_LE(lo, p);
            EXPECT_GE(up, p);
            // A crossing closer to an endpoint than one ulp is not representable;
            // then the returned bound must be the last feasible double.
            if (up < fam.upper_limit()) {
                const double next = std::nextafter(up, fam.upper_limit());
                if (next < fam.upper_limit() || n * kl(fam, p, next) <= beta)
                    EXPECT_NEAR(n * kl(fam, p, up), beta, 1e-6) << fam.name();
                else
                    EXPECT_LE(n * kl(fam, p, up), beta);
            }
            if (lo > fam.lower_limit()) EXPECT_NEAR(n * kl(fam, p, lo), beta, 1e-6) << fam.name();
        }
    }
}

TEST(ConfidenceBounds, RejectsBadArguments) {
    const auto bern = ArmFamily::bernoulli();
    EXPECT_THROW(upper_conf(bern, 0.5, 0, 1.0), InvalidInput);
    EXPECT_THROW(lower_conf(bern, 0.5, 3, -1.0), InvalidInput);
    EXPECT_THROW(upper_conf(bern, 1.2, 3, 1.0), InvalidInput);
}

TEST(Sampling, BernoulliEndpointsAreDeterministic) {
    Rng rng(1);
    const auto bern = ArmFamily::bernoulli();
    for (int i = 0; i < 1000; ++i) {
        EXPECT_EQ(sample(bern, 0.0, rng), 0.0);
        EXPECT_EQ(sample(bern, 1.0, rng), 1.0);
    }
}

TEST(Sampling, EmpiricalMeans) {
    Rng rng(2);
    const int draws = 100000;
    auto mean_of = [&](const ArmFamily& fam, double theta) {
        double s = 0.0;
        for (int i = 0; i < draws; ++i) s += sample(fam, theta, rng);
        return s / draws;
    };
    EXPECT_NEAR(mean_of(ArmFamily::bernoulli(), 0.3), 0.3, 0.005);
    // 3-sigma windows for the other families.
    EXPECT_NEAR(mean_of(ArmFamily::gaussian(4.0), -1.0), -1.0, 3.0 * 2.0 / std::sqrt(draws));
    EXPECT_NEAR(mean_of(ArmFamily::poisson(), 2.5), 2.5, 3.0 * std::sqrt(2.5 / draws));
    EXPECT_NEAR(mean_of(ArmFamily::exponential(), 1.7), 1.7, 3.0 * 1.7 / std::sqrt(draws));
}

TEST(Sampling, RejectsOutOfDomainMeans) {
    Rng rng(3);
    EXPECT_THROW(sample(ArmFamily::bernoulli(), 1.01, rng), InvalidInput);
    EXPECT_THROW(sample(ArmFamily::poisson(), 0.0, rng), InvalidInput);
}

TEST(BinaryEntropy, LowerBoundInequalityGrid) {
    // kl((1+b) a, a) >= ((1+b) log(1+b) - b) a for a <= 1/(1+b).
    const auto bern = ArmFamily::bernoulli();
    for (int i = 0; i < 100; ++i) {
        const double b = 0.1 + (5.0 - 0.1) * i / 99.0;
        const double a_max = 1.0 / (1.0 + b);
        for (int j = 1; j <= 100; ++j) {
            const double a = a_max * j / 100.0;
            const double lhs = kl(bern, std::min(1.0, (1.0 + b) * a), a);
            const double rhs = ((1.0 + b) * std::log(1.0 + b) - b) * a;
            EXPECT_GE(lhs, rhs - 1e-12) << "b=" << b << " a=" << a;
        }
    }
}
