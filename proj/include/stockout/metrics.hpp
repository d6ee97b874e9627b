#pragma once

#include <span>
#include <vector>

#include "stockout/stock_engine.hpp"

namespace stockout {

/// Forecast CDF of the stockout day, G(k) for k = 1..d.
class ForecastCdf {
public:
    /// Throws DomainError if values leave [0,1] or decrease by more than
    /// 1e-12 from one day to the next.
    explicit ForecastCdf(std::vector<double> g);

    [[nodiscard]] int horizon() const noexcept { return static_cast<int>(g_.size()); }
    /// G(k), 1-based.
    [[nodiscard]] double operator()(int day) const { return g_[static_cast<std::size_t>(day - 1)]; }
    [[nodiscard]] const std::vector<double>& values() const noexcept { return g_; }

private:
    std::vector<double> g_;
};

/// The realized stockout day u within a d-day window.
struct OutcomeStep {
    int horizon = 0;  // d
    int day = 0;      // u, 1 <= u <= d

    /// F_u(k) = 1 for k >= u, else 0.
    [[nodiscard]] double operator()(int k) const noexcept { return k >= day ? 1.0 : 0.0; }
};

OutcomeStep make_outcome(int horizon, int day);

/// sum_{k=1}^{d} (F_u(k) - G(k))^2. Throws DomainError on a horizon mismatch.
double rps_discrete(const OutcomeStep& outcome, const ForecastCdf& forecast);

struct MeanVariance {
    double mean = 0.0;
    double variance = 0.0;
};

/// Expected RPS (d/6) and its variance (d^2/180) of a uniform forecast when
/// the stockout time is uniform on [0, d], in continuous time.
MeanVariance baseline_uniform(int horizon);

/// The same baseline for the discrete score: u uniform on 1..d, G(k) = k/d.
MeanVariance baseline_uniform_discrete(int horizon);

/// Continuous-time RPS of the uniform forecast G(t) = t/d against a stockout
/// at time u: d/3 - u + u^2/d.
double rps_uniform_continuous(double horizon, double stockout_time);

/// Expected RPS of a point forecast u0 under uniform u: (u0^2 + (d-u0)^2)/(2d).
double point_forecast_expected_rps(double horizon, double forecast_day);

/// G(k) = k/d.
ForecastCdf uniform_forecast(int horizon);
/// Unit step at day u0.
ForecastCdf point_forecast(int horizon, int forecast_day);

/// G(k) = P(0,k) / P(0,d) from P(0,1..d). Throws DomainError when P(0,d) is
/// not positive.
ForecastCdf normalize_curve(std::span<const double> p0_by_day);
/// Uses p0[1..d] of a curve; d defaults to the curve horizon.
ForecastCdf normalize_curve(const StockoutCurve& curve, int horizon);

}  // namespace stockout
