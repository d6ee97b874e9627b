#include "stockout/closed_form.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "stockout/errors.hpp"
#include "stockout/special_functions.hpp"

namespace stockout {

namespace {

void require_parametric(const DemandModel& model) {
    if (!has_closed_form(model.kind())) {
        throw DomainError("no closed form for " + std::string(to_string(model.kind())) +
                          " demand; use the recursive engine");
    }
}

void require_stock(int initial_stock, int day) {
    if (initial_stock < 1) throw DomainError("initial stock m must be >= 1");
    if (day < 0) throw DomainError("day k must be >= 0");
}

// I_x(a, b) with the b <= 0 edge mapped to 0.
double beta_or_zero(double x, double a, double b) {
    if (b <= 1e-12 * std::max(1.0, std::fabs(a))) return 0.0;
    return reg_inc_beta(x, a, b);
}

// C(top, r) p^r-style mass in log space; zero where the coefficient vanishes
// or, for non-integer top, where top - r + 1 <= 0 (same truncation as I_x).
double binomial_term(double top, int r, double log_rest) {
    if (top - r + 1.0 <= 0.0) return 0.0;
    const double lc = log_gen_binomial(top, r);
    if (lc == -std::numeric_limits<double>::infinity()) return 0.0;
    return std::exp(lc + log_rest);
}

double clamp_frustrated(double v, const DemandModel& model, int m, int day) {
    if (v >= 0.0) return v;
    if (v >= -1e-10) return 0.0;
    throw ComputationError("closed-form P_F(" + std::to_string(day) + ") = " + std::to_string(v) + " for " +
                           model.describe() + ", m=" + std::to_string(m));
}

}  // namespace

bool has_closed_form(DemandKind kind) noexcept { return kind != DemandKind::Frequentist; }

double cf_pnk(const DemandModel& model, int initial_stock, int stock, int day) {
    require_parametric(model);
    require_stock(initial_stock, day);
    if (stock < 1 || stock > initial_stock) throw DomainError("stock level n must be in [1, m]");
    const int m = initial_stock;
    if (day == 0) return stock == m ? 1.0 : 0.0;
    const int sold = m - stock;
    const double k = day;

    switch (model.kind()) {
        case DemandKind::Deterministic: {
            const auto& d = std::get<DeterministicParams>(model.params());
            return static_cast<long long>(stock) == m - static_cast<long long>(day) * d.units_per_day ? 1.0 : 0.0;
        }
        case DemandKind::Poisson: {
            const double mu = k * std::get<PoissonParams>(model.params()).rate;
            return std::exp(-mu + xlogy(sold, mu) - log_gamma(sold + 1.0));
        }
        case DemandKind::Binomial: {
            const auto& b = std::get<BinomialParams>(model.params());
            const double trials = k * b.customers;
            if (is_integral(trials) && std::round(trials) < sold) return 0.0;
            return binomial_term(trials, sold, xlogy(sold, b.p) + xlogy(trials - sold, 1.0 - b.p));
        }
        case DemandKind::NegativeBinomial: {
            const auto& nb = std::get<NegativeBinomialParams>(model.params());
            const double shape = k * nb.r;
            return binomial_term(shape - 1.0 + sold, sold, shape * std::log(nb.p) + xlogy(sold, 1.0 - nb.p));
        }
        case DemandKind::Frequentist: break;
    }
    throw DomainError("unsupported demand kind");
}

double cf_p0k(const DemandModel& model, int initial_stock, int day) {
    require_parametric(model);
    require_stock(initial_stock, day);
    const int m = initial_stock;
    if (day == 0) return 0.0;
    const double k = day;

    switch (model.kind()) {
        case DemandKind::Deterministic: {
            const auto& d = std::get<DeterministicParams>(model.params());
            return static_cast<long long>(day) * d.units_per_day >= m ? 1.0 : 0.0;
        }
        case DemandKind::Poisson:
            return reg_lower_gamma(m, k * std::get<PoissonParams>(model.params()).rate);
        case DemandKind::Binomial: {
            const auto& b = std::get<BinomialParams>(model.params());
            return beta_or_zero(b.p, m, k * b.customers - m + 1.0);
        }
        case DemandKind::NegativeBinomial: {
            const auto& nb = std::get<NegativeBinomialParams>(model.params());
            return reg_inc_beta(1.0 - nb.p, m, k * nb.r);
        }
        case DemandKind::Frequentist: break;
    }
    throw DomainError("unsupported demand kind");
}

double cf_pf(const DemandModel& model, int initial_stock, int day) {
    require_parametric(model);
    require_stock(initial_stock, day);
    const int m = initial_stock;
    if (day == 0) return 0.0;
    const double k = day;

    switch (model.kind()) {
        case DemandKind::Deterministic: {
            const auto& d = std::get<DeterministicParams>(model.params());
            const long long kh = static_cast<long long>(day) * d.units_per_day;
            return (kh >= m + 1 && kh <= m + d.units_per_day - 1) ? 1.0 : 0.0;
        }
        case DemandKind::Poisson: {
            const double rate = std::get<PoissonParams>(model.params()).rate;
            const double now = k * rate;
            const double before = (k - 1.0) * rate;
            const double boundary =
                day == 1 ? 0.0 : std::exp(-now + m * std::log(before) - log_gamma(m + 1.0));
            // Q(m, before) - Q(m+1, now), taken from whichever tail is small.
            const double lower_now = reg_lower_gamma(m + 1.0, now);
            const double middle = lower_now <= 0.5
                                      ? lower_now - reg_lower_gamma(m, before)
                                      : reg_upper_gamma(m, before) - reg_upper_gamma(m + 1.0, now);
            return clamp_frustrated(boundary + middle, model, m, day);
        }
        case DemandKind::Binomial: {
            const auto& b = std::get<BinomialParams>(model.params());
            const double now = k * b.customers;
            const double before = (k - 1.0) * b.customers;
            double boundary = 0.0;
            // Below m-1 (non-integer) the coefficient is truncated like P(0,k).
            if (is_integral(before) || before - m + 1.0 > 0.0) {
                boundary = binomial_term(before, m, xlogy(m, b.p) + xlogy(now - m, 1.0 - b.p));
            }
            const double v = beta_or_zero(b.p, m + 1.0, now - m) - beta_or_zero(b.p, m, before - m + 1.0) + boundary;
            return clamp_frustrated(v, model, m, day);
        }
        case DemandKind::NegativeBinomial: {
            const auto& nb = std::get<NegativeBinomialParams>(model.params());
            const double q = 1.0 - nb.p;
            const double now = k * nb.r;
            const double before = (k - 1.0) * nb.r;
            const double earlier = day == 1 ? 0.0 : reg_inc_beta(q, m, before).value();
            const double boundary = binomial_term(before - 1.0 + m, m, now * std::log(nb.p) + m * std::log(q));
            return clamp_frustrated(reg_inc_beta(q, m + 1.0, now) - earlier + boundary, model, m, day);
        }
        case DemandKind::Frequentist: break;
    }
    throw DomainError("unsupported demand kind");
}

StockoutCurve cf_curve(const DemandModel& model, int initial_stock, int horizon) {
    require_parametric(model);
    if (horizon < 1) throw DomainError("horizon N must be >= 1");
    StockoutCurve curve;
    curve.initial_stock = initial_stock;
    curve.horizon = horizon;
    curve.p0.assign(horizon + 1, 0.0);
    curve.pf.assign(horizon + 1, 0.0);
    for (int k = 0; k <= horizon; ++k) {
        curve.p0[k] = cf_p0k(model, initial_stock, k);
        curve.pf[k] = cf_pf(model, initial_stock, k);
    }
    return curve;
}

}  // namespace stockout
