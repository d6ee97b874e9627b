#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "stockout/errors.hpp"
#include "stockout/stock_engine.hpp"
#include "test_support.hpp"

using namespace stockout;

namespace {

// Exact Markov chain on S_k = max(0, S_{k-1} - D_k), iterated day by day over
// the full state vector. Independent of the recursion's column structure.
struct ChainResult {
    std::vector<std::vector<double>> dist;  // dist[k][n]
    std::vector<double> pf;
};

ChainResult brute_chain(const DemandModel& model, int m, int horizon) {
    ChainResult out;
    out.dist.assign(horizon + 1, std::vector<double>(m + 1, 0.0));
    out.pf.assign(horizon + 1, 0.0);
    out.dist[0][m] = 1.0;
    for (int k = 1; k <= horizon; ++k) {
        auto& next = out.dist[k];
        for (int s = 0; s <= m; ++s) {
            const double p = out.dist[k - 1][s];
            if (p == 0.0) continue;
            if (s == 0) {
                next[0] += p;
                continue;
            }
            double head = 0.0;
            for (int l = 0; l < s; ++l) {
                const double a = model.alpha(l);
                next[s - l] += p * a;
                head += a;
            }
            next[0] += p * (1.0 - head);
            out.pf[k] += p * (1.0 - head - model.alpha(s));
        }
    }
    return out;
}

std::vector<DemandModel> grid_models() {
    return {
        DemandModel::frequentist({17.0 / 28, 7.0 / 28, 4.0 / 28}),
        DemandModel::frequentist({0.1, 0.0, 0.3, 0.0, 0.0, 0.6}),
        DemandModel::deterministic(1),
        DemandModel::deterministic(3),
        DemandModel::poisson(0.3),
        DemandModel::poisson(2.2),
        DemandModel::binomial(3.0, 0.35),
        DemandModel::binomial(7.5, 0.25),
        DemandModel::negative_binomial(0.7, 0.4),
        DemandModel::negative_binomial(3.0, 0.6),
    };
}

}  // namespace

TEST(SolveRecursive, MatchesBruteChain) {
    for (const auto& model : grid_models()) {
        for (int m : {1, 2, 5, 9}) {
            SCOPED_TRACE(testing::Message() << model.describe() << " m=" << m);
            const int horizon = 20;
            const auto chain = brute_chain(model, m, horizon);
            const auto lattice = solve_lattice(model, m, horizon);
            const auto curve = solve_recursive(model, m, horizon);
            for (int k = 0; k <= horizon; ++k) {
                for (int n = 0; n <= m; ++n) EXPECT_NEAR(lattice.at(n, k), chain.dist[k][n], 1e-13);
                EXPECT_NEAR(curve.p0[k], chain.dist[k][0], 1e-13);
                EXPECT_NEAR(curve.pf[k], chain.pf[k], 1e-13);
            }
        }
    }
}

TEST(SolveRecursive, Sku538100Reference) {
    // Exact rational chain evaluated independently.
    const auto model = fit_frequentist(testdata::sku538100_february());
    const auto curve = solve_recursive(model, 5, 31);
    const double p0[] = {0, 0, 0.018221574344023325, 0.064165972511453562, 0.13697853526432438,
                         0.22943637189263721, 0.33215507256368693};
    const double pf[] = {0, 0, 0.0029154518950437317, 0.0091368179925031233, 0.016299244734336884,
                         0.022324458306594193, 0.026155998654119304};
    for (int k = 1; k <= 7; ++k) {
        EXPECT_NEAR(curve.p0[k], p0[k - 1], 1e-15) << k;
        EXPECT_NEAR(curve.pf[k], pf[k - 1], 1e-15) << k;
    }
    EXPECT_NEAR(curve.p0[31], 0.99962248001650578, 1e-14);
}

TEST(SolveRecursive, PoissonReference) {
    const auto curve = solve_recursive(DemandModel::poisson(1.0), 3, 5);
    const double p0[] = {0.080301397071394196, 0.32332358381693654, 0.57680991887315648, 0.76189669444645566,
                         0.87534798051691886};
    const double pf[] = {0.018988156876153809, 0.085131022969494204, 0.095827285224650791,
                         0.072140335759438393, 0.044948824913094287};
    for (int k = 1; k <= 5; ++k) {
        EXPECT_NEAR(curve.p0[k], p0[k - 1], 1e-14);
        EXPECT_NEAR(curve.pf[k], pf[k - 1], 1e-14);
    }
    const auto m2 = solve_recursive(DemandModel::poisson(1.0), 2, 1);
    EXPECT_NEAR(m2.pf[1], 1.0 - 2.5 / std::exp(1.0), 1e-15);
}

TEST(SolveRecursive, DeterministicSteps) {
    const auto c = solve_recursive(DemandModel::deterministic(1), 2, 4);
    EXPECT_EQ(c.p0, (std::vector<double>{0, 0, 1, 1, 1}));
    const auto h2 = solve_recursive(DemandModel::deterministic(2), 3, 4);
    EXPECT_EQ(h2.p0, (std::vector<double>{0, 0, 1, 1, 1}));
    EXPECT_EQ(h2.pf, (std::vector<double>{0, 0, 1, 0, 0}));
    const auto exact = solve_recursive(DemandModel::deterministic(3), 6, 5);
    for (double v : exact.pf) EXPECT_EQ(v, 0.0);
}

TEST(StockLattice, Invariants) {
    for (const auto& model : grid_models()) {
        for (int m : {1, 4, 12}) {
            SCOPED_TRACE(testing::Message() << model.describe() << " m=" << m);
            const int horizon = 30;
            const auto lattice = solve_lattice(model, m, horizon);
            const double a0 = model.alpha(0);
            for (int k = 0; k <= horizon; ++k) {
                double total = 0.0;
                for (double v : lattice.column(k)) {
                    EXPECT_GE(v, 0.0);
                    total += v;
                }
                EXPECT_NEAR(total, 1.0, 1e-10);
                EXPECT_NEAR(lattice.at(m, k), std::pow(a0, k), 1e-10);
                if (k > 0) {
                    EXPECT_GE(lattice.at(0, k), lattice.at(0, k - 1));
                }
                // Stock only decreases, so P(n,k) vanishes above m and P(0,0) = 0.
            }
            EXPECT_EQ(lattice.at(0, 0), 0.0);
            EXPECT_EQ(lattice.at(m, 0), 1.0);
        }
    }
}

TEST(StockLattice, FrustratedSalesRoutesAgree) {
    for (const auto& model : grid_models()) {
        for (int m : {1, 3, 8}) {
            const auto lattice = solve_lattice(model, m, 25);
            const auto pfk = frustrated_sales_via_pfk(lattice, model);
            for (int k = 1; k <= 25; ++k) {
                EXPECT_NEAR(pfk[k], lattice.curve().pf[k], 1e-10) << model.describe() << " m=" << m << " k=" << k;
            }
        }
    }
}

TEST(SolveRecursive, RejectsBadArguments) {
    const auto model = DemandModel::poisson(1.0);
    EXPECT_THROW(solve_recursive(model, 0, 10), DomainError);
    EXPECT_THROW(solve_recursive(model, 3, 0), DomainError);
}

TEST(MonteCarlo, IndependentOfThreadCount) {
    const auto model = DemandModel::negative_binomial(0.7, 0.4);
    const auto one = monte_carlo_oracle(model, 4, 10, 100000, 42, 1);
    const auto four = monte_carlo_oracle(model, 4, 10, 100000, 42, 4);
    EXPECT_EQ(one.stockouts, four.stockouts);
    EXPECT_EQ(one.frustrated, four.frustrated);
    const auto other = monte_carlo_oracle(model, 4, 10, 100000, 43, 1);
    EXPECT_NE(one.stockouts, other.stockouts);
}

TEST(MonteCarlo, AgreesWithRecursionLoosely) {
    const auto model = DemandModel::poisson(1.0);
    const std::uint64_t n = 200000;
    const auto mc = monte_carlo_oracle(model, 3, 6, n, 7, 1);
    const auto curve = solve_recursive(model, 3, 6);
    for (int k = 1; k <= 6; ++k) {
        const double p = curve.p0[k];
        const double sd = std::sqrt(p * (1 - p) / n);
        EXPECT_NEAR(mc.p0(k), p, 5 * sd + 1e-12) << k;
        const double f = curve.pf[k];
        EXPECT_NEAR(mc.pf(k), f, 5 * std::sqrt(f * (1 - f) / n) + 1e-12) << k;
    }
}
