#include "stockout/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <limits>
#include <sstream>
#include <tuple>

#include "stockout/closed_form.hpp"
#include "stockout/metrics.hpp"
#include "stockout/stock_engine.hpp"

namespace stockout {

namespace {

std::string where(const DemandModel& model, int m, int n, int k) {
    std::ostringstream os;
    os << model.describe() << " m=" << m;
    if (n >= 0) os << " n=" << n;
    os << " k=" << k;
    return os.str();
}

struct Worst {
    double value = 0.0;
    std::string at;

    void update(double v, const std::string& location) {
        if (v > value || std::isnan(v)) {
            value = std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
            at = location;
        }
    }
};

CheckResult finish(std::string name, const Worst& w, double tolerance) {
    return CheckResult{std::move(name), w.value <= tolerance, w.value, tolerance, w.at};
}

}  // namespace

std::vector<GridEntry> equivalence_grid() {
    std::vector<GridEntry> g;
    for (int h : {1, 2, 3}) g.push_back({"deterministic", DemandModel::deterministic(h), 20});
    for (double lambda : {0.3, 1.0, 3.0}) g.push_back({"poisson", DemandModel::poisson(lambda), 20});
    for (double c : {1.0, 4.0, 9.0, 25.0})
        for (double p : {0.2, 0.7}) g.push_back({"binomial", DemandModel::binomial(c, p), 20});
    for (double c : {2.5, 7.3, 12.5, 20.5})
        for (double p : {0.2, 0.7})
            g.push_back({"binomial", DemandModel::binomial(c, p), std::min(20, static_cast<int>(std::floor(c)))});
    for (double r : {0.5, 1.0, 2.5, 6.0})
        for (double p : {0.3, 0.75}) g.push_back({"negative_binomial", DemandModel::negative_binomial(r, p), 20});
    return g;
}

std::vector<MonteCarloCase> monte_carlo_cases() {
    return {
        {"nfq_sku538100_m5", DemandModel::frequentist({17.0 / 28, 7.0 / 28, 4.0 / 28}), 5},
        {"nfq_gapped_m9", DemandModel::frequentist({0.1, 0.0, 0.3, 0.0, 0.0, 0.6}), 9},
        {"deterministic_h2_m7", DemandModel::deterministic(2), 7},
        {"poisson_0.3_m2", DemandModel::poisson(0.3), 2},
        {"poisson_1_m3", DemandModel::poisson(1.0), 3},
        {"poisson_3_m20", DemandModel::poisson(3.0), 20},
        {"binomial_4_0.3_m5", DemandModel::binomial(4.0, 0.3), 5},
        {"binomial_7.5_0.25_m6", DemandModel::binomial(7.5, 0.25), 6},
        {"negbin_0.7_0.4_m4", DemandModel::negative_binomial(0.7, 0.4), 4},
        {"negbin_2.5_0.3_m15", DemandModel::negative_binomial(2.5, 0.3), 15},
    };
}

std::vector<CheckResult> run_selftest(const SelftestOptions& options) {
    std::vector<CheckResult> results;
    const int horizon = options.horizon;

    std::map<std::string, Worst> equiv, norm, mono, dual, pm;
    for (const auto& entry : equivalence_grid()) {
        auto& e = equiv[entry.family];
        auto& s = norm[entry.family];
        auto& mo = mono[entry.family];
        auto& du = dual[entry.family];
        auto& top = pm[entry.family];
        const double a0 = entry.model.alpha(0);
        for (int m = 1; m <= entry.max_stock; ++m) {
            const auto lattice = solve_lattice(entry.model, m, horizon);
            const auto pfk = frustrated_sales_via_pfk(lattice, entry.model);
            for (int k = 0; k <= horizon; ++k) {
                const double p0 = cf_p0k(entry.model, m, k) + options.closed_form_perturbation;
                e.update(std::fabs(p0 - lattice.at(0, k)), where(entry.model, m, 0, k));
                e.update(std::fabs(cf_pf(entry.model, m, k) - lattice.curve().pf[k]), where(entry.model, m, -1, k));
                double total = lattice.at(0, k);
                for (int n = 1; n <= m; ++n) {
                    e.update(std::fabs(cf_pnk(entry.model, m, n, k) - lattice.at(n, k)), where(entry.model, m, n, k));
                    total += lattice.at(n, k);
                }
                s.update(std::fabs(total - 1.0), where(entry.model, m, -1, k));
                if (k > 0) mo.update(lattice.at(0, k - 1) - lattice.at(0, k), where(entry.model, m, 0, k));
                top.update(std::fabs(lattice.at(m, k) - std::pow(a0, k)), where(entry.model, m, m, k));
                du.update(std::fabs(pfk[k] - lattice.curve().pf[k]), where(entry.model, m, -1, k));
            }
        }
    }
    for (const auto& [family, w] : equiv) results.push_back(finish("closed_form_vs_recursion/" + family, w, 1e-9));
    for (const auto& [family, w] : norm) results.push_back(finish("normalization/" + family, w, 1e-10));
    for (const auto& [family, w] : mono) results.push_back(finish("monotone_stockout/" + family, w, 0.0));
    for (const auto& [family, w] : pm) results.push_back(finish("top_level_alpha0_power/" + family, w, 1e-10));
    for (const auto& [family, w] : dual) results.push_back(finish("frustrated_sales_dual/" + family, w, 1e-10));

    {
        Worst w;
        for (int h : {1, 2, 3}) {
            const auto model = DemandModel::deterministic(h);
            for (int mult = 1; mult <= 6; ++mult) {
                const auto curve = solve_recursive(model, mult * h, horizon);
                for (int k = 1; k <= horizon; ++k) {
                    w.update(curve.pf[k], where(model, mult * h, -1, k));
                    w.update(cf_pf(model, mult * h, k), where(model, mult * h, -1, k));
                }
            }
        }
        results.push_back(finish("deterministic_no_frustrated_sales", w, 0.0));
    }

    // Monte Carlo: deviation expressed in binomial standard errors.
    for (const auto& c : monte_carlo_cases()) {
        const int d = 31;
        const auto mc = monte_carlo_oracle(c.model, c.initial_stock, d, options.mc_trials, options.seed, options.threads);
        const auto curve = has_closed_form(c.model.kind()) ? cf_curve(c.model, c.initial_stock, d)
                                                             : solve_recursive(c.model, c.initial_stock, d);
        Worst w;
        const double n = static_cast<double>(options.mc_trials);
        for (int k = 1; k <= d; ++k) {
            for (const auto& [emp, exact, label] :
                 {std::tuple{mc.p0(k), curve.p0[k], "P0"}, std::tuple{mc.pf(k), curve.pf[k], "PF"}}) {
                const double se = std::sqrt(std::max(exact * (1.0 - exact), 0.0) / n);
                const double dev = std::fabs(emp - exact);
                const double ratio = se > 0.0 ? dev / se : (dev == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
                w.update(ratio, std::string(label) + " k=" + std::to_string(k));
            }
        }
        results.push_back(finish("monte_carlo/" + c.name, w, 3.0));
    }

    {
        Worst w;
        const int d = 31;
        for (int u = 1; u <= d; ++u)
            for (int u0 = 1; u0 <= d; ++u0)
                w.update(std::fabs(rps_discrete(make_outcome(d, u), point_forecast(d, u0)) - std::abs(u - u0)),
                         "u=" + std::to_string(u) + " u0=" + std::to_string(u0));
        results.push_back(finish("metric_point_forecast", w, 1e-12));
    }
    return results;
}

}  // namespace stockout
