#pragma once

#include "stockout/demand_model.hpp"
#include "stockout/stock_engine.hpp"

namespace stockout {

// Analytic stock distributions for the parametric demand models. Every
// function throws DomainError for a Frequentist model (use the recursion).
//
// Conventions at the edge of the incomplete-beta domain: I_x(a, b) with
// b <= 0 is taken as 0, which gives P(0,0) = 0 for Negative Binomial and
// P(0,k) = 0 for Binomial whenever kC - m + 1 <= 0.

/// P(n,k) for 1 <= n <= m, k >= 0.
double cf_pnk(const DemandModel& model, int initial_stock, int stock, int day);

/// P(0,k) for m >= 1, k >= 0.
double cf_p0k(const DemandModel& model, int initial_stock, int day);

/// P_F(k) for k >= 1 (0 at k = 0). Round-off down to -1e-10 is clamped to 0;
/// anything more negative raises ComputationError.
double cf_pf(const DemandModel& model, int initial_stock, int day);

/// cf_p0k and cf_pf for k = 0..horizon.
StockoutCurve cf_curve(const DemandModel& model, int initial_stock, int horizon);

/// True for the kinds that have closed forms.
bool has_closed_form(DemandKind kind) noexcept;

}  // namespace stockout
