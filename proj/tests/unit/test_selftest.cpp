#include <gtest/gtest.h>

#include <algorithm>

#include "stockout/selftest.hpp"

using namespace stockout;

namespace {

SelftestOptions quick() {
    SelftestOptions opt;
    opt.horizon = 15;
    opt.mc_trials = 1000000;
    opt.threads = 2;
    return opt;
}

}  // namespace

TEST(Selftest, FreshBuildPasses) {
    const auto results = run_selftest(quick());
    EXPECT_FALSE(results.empty());
    for (const auto& r : results) EXPECT_TRUE(r.passed) << r.name << " worst " << r.worst << " at " << r.detail;
}

TEST(Selftest, PerturbedClosedFormFailsByName) {
    auto opt = quick();
    opt.closed_form_perturbation = 1e-6;
    const auto results = run_selftest(opt);
    for (const auto& r : results) {
        if (r.name.rfind("closed_form_vs_recursion/", 0) == 0) {
            EXPECT_FALSE(r.passed) << r.name;
        } else {
            EXPECT_TRUE(r.passed) << r.name;
        }
    }
}

TEST(Selftest, DeterministicForFixedSeed) {
    const auto a = run_selftest(quick());
    auto opt = quick();
    opt.threads = 1;
    const auto b = run_selftest(opt);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].name, b[i].name);
        EXPECT_EQ(a[i].worst, b[i].worst) << a[i].name;
    }
}
