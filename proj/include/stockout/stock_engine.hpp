#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "stockout/demand_model.hpp"

namespace stockout {

/// P(0,k) and P_F(k) for k = 0..horizon.
struct StockoutCurve {
    int initial_stock = 0;  // m
    int horizon = 0;        // N
    std::vector<double> p0;  // stockout probability by day k
    std::vector<double> pf;  // frustrated-sales probability on day k
};

/// Full stock lattice P(n,k), 0 <= n <= m, 0 <= k <= N, with its curve.
class StockDistribution {
public:
    StockDistribution(int initial_stock, int horizon);

    [[nodiscard]] int initial_stock() const noexcept { return curve_.initial_stock; }
    [[nodiscard]] int horizon() const noexcept { return curve_.horizon; }

    [[nodiscard]] double at(int stock, int day) const { return cells_[index(stock, day)]; }
    double& at(int stock, int day) { return cells_[index(stock, day)]; }

    /// Column k: P(0..m, k).
    [[nodiscard]] std::span<const double> column(int day) const;

    [[nodiscard]] const StockoutCurve& curve() const noexcept { return curve_; }
    StockoutCurve& curve() noexcept { return curve_; }

private:
    [[nodiscard]] std::size_t index(int stock, int day) const {
        return static_cast<std::size_t>(day) * static_cast<std::size_t>(curve_.initial_stock + 1) +
               static_cast<std::size_t>(stock);
    }

    StockoutCurve curve_;
    std::vector<double> cells_;
};

/// Stockout curve by the stock recursion, keeping two columns (O(m) memory).
/// Throws DomainError unless m >= 1 and horizon >= 1.
StockoutCurve solve_recursive(const DemandModel& model, int initial_stock, int horizon);

/// Same recursion, retaining every column of P(n,k).
StockDistribution solve_lattice(const DemandModel& model, int initial_stock, int horizon);

/// P_F(k) = P(0,k) - P(0,k-1) - sum_n alpha_n P(n,k-1), from a full lattice.
/// Independent of the beta-weighted sum used by the recursion; small
/// negative round-off is clamped to zero.
std::vector<double> frustrated_sales_via_pfk(const StockDistribution& lattice, const DemandModel& model);

struct EmpiricalCurve {
    int initial_stock = 0;
    int horizon = 0;
    std::uint64_t trials = 0;
    std::vector<std::uint64_t> stockouts;   // trials with S_k == 0
    std::vector<std::uint64_t> frustrated;  // trials with S_{k-1} >= 1 and D_k > S_{k-1}

    [[nodiscard]] double p0(int day) const { return static_cast<double>(stockouts[day]) / trials; }
    [[nodiscard]] double pf(int day) const { return static_cast<double>(frustrated[day]) / trials; }
};

/// Direct simulation of the stock process S_k = max(0, S_{k-1} - D_k),
/// S_0 = m, with D_k drawn from the model.
///
/// Trials are split into fixed-size blocks, each with its own seed derived
/// from (seed, block index), so the result depends only on (model, m,
/// horizon, trials, seed) and not on `threads` (0 = hardware concurrency).
EmpiricalCurve monte_carlo_oracle(const DemandModel& model, int initial_stock, int horizon,
                                  std::uint64_t trials, std::uint64_t seed, unsigned threads = 0);

}  // namespace stockout
