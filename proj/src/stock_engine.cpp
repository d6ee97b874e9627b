#include "stockout/stock_engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <random>
#include <string>
#include <thread>

#include "stockout/errors.hpp"

namespace stockout {

namespace {

constexpr double kFlushBelow = 1e-300;

void require_stock_args(int initial_stock, int horizon) {
    if (initial_stock < 1) throw DomainError("initial stock m must be >= 1, got " + std::to_string(initial_stock));
    if (horizon < 1) throw DomainError("horizon N must be >= 1, got " + std::to_string(horizon));
}

double flush(double v) { return std::fabs(v) < kFlushBelow ? 0.0 : v; }

// The recursion over days. `lattice` receives every column when non-null.
StockoutCurve run_recursion(const DemandModel& model, int m, int horizon, StockDistribution* lattice) {
    require_stock_args(m, horizon);
    const std::vector<double> alpha = model.alpha_table(m);
    const std::vector<double> beta = model.beta_table(m + 1);

    // Convolution reach: alpha_j == 0 beyond `reach`.
    int reach = m;
    while (reach > 0 && alpha[reach] == 0.0) --reach;

    StockoutCurve curve;
    curve.initial_stock = m;
    curve.horizon = horizon;
    curve.p0.assign(horizon + 1, 0.0);
    curve.pf.assign(horizon + 1, 0.0);

    // stock[n] holds P(n,k) for 1 <= n <= m; stock[0] is unused.
    std::vector<double> stock(m + 1, 0.0);
    std::vector<double> previous(m + 1, 0.0);

    if (lattice) lattice->at(m, 0) = 1.0;

    for (int k = 1; k <= horizon; ++k) {
        if (k == 1) {
            curve.p0[1] = beta[m];
            for (int n = 1; n <= m; ++n) stock[n] = alpha[m - n];
            curve.pf[1] = beta[m + 1];
        } else {
            previous.swap(stock);
            double y = beta[0] * curve.p0[k - 1];
            double frustrated = 0.0;
            for (int n = 1; n <= m; ++n) {
                y += beta[n] * previous[n];
                frustrated += beta[n + 1] * previous[n];
                const int last = std::min(m, n + reach);
                double acc = 0.0;
                for (int l = n; l <= last; ++l) acc += alpha[l - n] * previous[l];
                stock[n] = flush(acc);
            }
            curve.p0[k] = flush(y);
            curve.pf[k] = flush(frustrated);
        }
        if (lattice) {
            lattice->at(0, k) = curve.p0[k];
            for (int n = 1; n <= m; ++n) lattice->at(n, k) = stock[n];
        }
    }
    return curve;
}

}  // namespace

StockDistribution::StockDistribution(int initial_stock, int horizon)
    : cells_(static_cast<std::size_t>(initial_stock + 1) * static_cast<std::size_t>(horizon + 1), 0.0) {
    curve_.initial_stock = initial_stock;
    curve_.horizon = horizon;
}

std::span<const double> StockDistribution::column(int day) const {
    return std::span<const double>(cells_).subspan(index(0, day), static_cast<std::size_t>(initial_stock() + 1));
}

StockoutCurve solve_recursive(const DemandModel& model, int initial_stock, int horizon) {
    return run_recursion(model, initial_stock, horizon, nullptr);
}

StockDistribution solve_lattice(const DemandModel& model, int initial_stock, int horizon) {
    require_stock_args(initial_stock, horizon);
    StockDistribution out(initial_stock, horizon);
    out.curve() = run_recursion(model, initial_stock, horizon, &out);
    return out;
}

std::vector<double> frustrated_sales_via_pfk(const StockDistribution& lattice, const DemandModel& model) {
    const int m = lattice.initial_stock();
    const int horizon = lattice.horizon();
    const std::vector<double> alpha = model.alpha_table(m);
    std::vector<double> pf(horizon + 1, 0.0);
    for (int k = 1; k <= horizon; ++k) {
        double sold_out_today = lattice.at(0, k) - lattice.at(0, k - 1);
        for (int n = 1; n <= m; ++n) sold_out_today -= alpha[n] * lattice.at(n, k - 1);
        pf[k] = sold_out_today < 0.0 ? 0.0 : sold_out_today;
    }
    return pf;
}

EmpiricalCurve monte_carlo_oracle(const DemandModel& model, int initial_stock, int horizon,
                                  std::uint64_t trials, std::uint64_t seed, unsigned threads) {
    require_stock_args(initial_stock, horizon);
    if (trials == 0) throw DomainError("monte carlo oracle needs at least one trial");
    const int m = initial_stock;

    // Demand above m empties any stock, so draws are capped at m+1.
    std::vector<double> cumulative(m + 1);
    double acc = 0.0;
    for (int l = 0; l <= m; ++l) {
        acc += model.alpha(l);
        cumulative[l] = acc;
    }

    constexpr std::uint64_t kBlock = 1u << 15;
    const std::uint64_t blocks = (trials + kBlock - 1) / kBlock;

    EmpiricalCurve out;
    out.initial_stock = m;
    out.horizon = horizon;
    out.trials = trials;
    out.stockouts.assign(horizon + 1, 0);
    out.frustrated.assign(horizon + 1, 0);

    std::atomic<std::uint64_t> next_block{0};
    std::mutex merge;

    auto worker = [&] {
        std::vector<std::uint64_t> stockouts(horizon + 1, 0);
        std::vector<std::uint64_t> frustrated(horizon + 1, 0);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (std::uint64_t b = next_block++; b < blocks; b = next_block++) {
            std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                              static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
            std::mt19937_64 rng(seq);
            const std::uint64_t count = std::min(kBlock, trials - b * kBlock);
            for (std::uint64_t t = 0; t < count; ++t) {
                int stock = m;
                for (int k = 1; k <= horizon; ++k) {
                    const double u = unit(rng);
                    const auto demand = static_cast<int>(
                        std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
                    if (demand > stock) ++frustrated[k];
                    stock = std::max(0, stock - demand);
                    if (stock == 0) {
                        for (int j = k; j <= horizon; ++j) ++stockouts[j];
                        break;
                    }
                }
            }
        }
        std::lock_guard lock(merge);
        for (int k = 0; k <= horizon; ++k) {
            out.stockouts[k] += stockouts[k];
            out.frustrated[k] += frustrated[k];
        }
    };

    unsigned n_threads = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
    n_threads = static_cast<unsigned>(std::min<std::uint64_t>(n_threads, blocks));
    std::vector<std::jthread> pool;
    for (unsigned i = 1; i < n_threads; ++i) pool.emplace_back(worker);
    worker();
    pool.clear();
    return out;
}

}  // namespace stockout
