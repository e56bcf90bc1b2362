// Draws a pool from a truncated uniform reservoir, runs (alpha,epsilon)-KL-LUCB
// once and prints what it found next to the bound calculators.
#include <infbandit/infbandit.hpp>

#include <iostream>

int main() {
    using namespace infbandit;

    const Reservoir res = Reservoir::beta(1.0, 1.0, 0.95);
    const ArmFamily fam = ArmFamily::bernoulli();

    AlgoConfig cfg;
    cfg.alpha = 0.05;
    cfg.epsilon = 0.05;
    cfg.delta = 0.05;

    Rng rng(derive_seed(42, 0));
    const RunResult r = run(cfg, res, fam, rng);

    std::cout << "pool size n      " << r.n << "\n"
              << "samples used     " << r.tau << "\n"
              << "recommended mean " << r.recommended_mean << "\n"
              << "good threshold   " << good_threshold(res, cfg.alpha, cfg.epsilon) << "\n"
              << "simple regret    " << res.top() - r.recommended_mean << "\n";

    const BoundsReport b = compare_report(res, fam, cfg);
    std::cout << "H_bar            " << b.h_bar << "\n"
              << "T* bound         " << b.t_star << "\n";
    if (b.lower) std::cout << "lower bound      " << *b.lower << "\n";
}
