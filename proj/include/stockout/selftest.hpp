#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stockout/demand_model.hpp"

namespace stockout {

/// A demand model and the largest initial stock to pair it with.
struct GridEntry {
    std::string family;  // deterministic, poisson, binomial, negative_binomial
    DemandModel model;
    int max_stock = 20;
};

/// Parametric models checked against the recursion: h in {1,2,3},
/// lambda in {0.3,1,3}, integer and non-integer C, several r. Non-integer
/// C is paired with m <= C only, where the closed forms are exact.
std::vector<GridEntry> equivalence_grid();

/// Ten (model, m) pairs for simulation checks.
struct MonteCarloCase {
    std::string name;
    DemandModel model;
    int initial_stock = 1;
};
std::vector<MonteCarloCase> monte_carlo_cases();

struct SelftestOptions {
    std::uint64_t seed = 20210301;
    std::uint64_t mc_trials = 1000000;
    int horizon = 40;
    unsigned threads = 0;
    /// Added to every closed-form P(0,k) before comparison. Nonzero values
    /// exist only to prove the checks can fail.
    double closed_form_perturbation = 0.0;
};

struct CheckResult {
    std::string name;
    bool passed = false;
    double worst = 0.0;      // largest observed deviation (or band ratio)
    double tolerance = 0.0;
    std::string detail;
};

std::vector<CheckResult> run_selftest(const SelftestOptions& options);

}  // namespace stockout
