#include "stockout/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "stockout/errors.hpp"

namespace stockout {

ForecastCdf::ForecastCdf(std::vector<double> g) : g_(std::move(g)) {
    if (g_.empty()) throw DomainError("forecast CDF needs at least one day");
    double previous = 0.0;
    for (std::size_t i = 0; i < g_.size(); ++i) {
        const double v = g_[i];
        if (!(v >= 0.0 && v <= 1.0)) {
            throw DomainError("forecast CDF value " + std::to_string(v) + " outside [0,1] on day " +
                              std::to_string(i + 1));
        }
        if (v < previous - 1e-12) {
            throw DomainError("forecast CDF decreases on day " + std::to_string(i + 1));
        }
        previous = std::max(previous, v);
    }
}

OutcomeStep make_outcome(int horizon, int day) {
    if (horizon < 1) throw DomainError("horizon d must be >= 1");
    if (day < 1 || day > horizon) {
        throw DomainError("stockout day u=" + std::to_string(day) + " outside [1, " + std::to_string(horizon) + "]");
    }
    return OutcomeStep{horizon, day};
}

double rps_discrete(const OutcomeStep& outcome, const ForecastCdf& forecast) {
    if (outcome.horizon != forecast.horizon()) {
        throw DomainError("horizon mismatch: outcome d=" + std::to_string(outcome.horizon) +
                          ", forecast d=" + std::to_string(forecast.horizon()));
    }
    double score = 0.0;
    for (int k = 1; k <= outcome.horizon; ++k) {
        const double diff = outcome(k) - forecast(k);
        score += diff * diff;
    }
    return score;
}

MeanVariance baseline_uniform(int horizon) {
    const double d = horizon;
    return {d / 6.0, d * d / 180.0};
}

MeanVariance baseline_uniform_discrete(int horizon) {
    const ForecastCdf g = uniform_forecast(horizon);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int u = 1; u <= horizon; ++u) {
        const double s = rps_discrete(make_outcome(horizon, u), g);
        sum += s;
        sum_sq += s * s;
    }
    const double mean = sum / horizon;
    return {mean, sum_sq / horizon - mean * mean};
}

double rps_uniform_continuous(double horizon, double stockout_time) {
    const double d = horizon;
    const double u = stockout_time;
    return d / 3.0 * (1.0 + 3.0 / d * (u * u / d - u));
}

double point_forecast_expected_rps(double horizon, double forecast_day) {
    if (forecast_day < 0.0 || forecast_day > horizon) throw DomainError("point forecast day outside [0, d]");
    const double rest = horizon - forecast_day;
    return (forecast_day * forecast_day + rest * rest) / (2.0 * horizon);
}

ForecastCdf uniform_forecast(int horizon) {
    if (horizon < 1) throw DomainError("horizon d must be >= 1");
    std::vector<double> g(static_cast<std::size_t>(horizon));
    for (int k = 1; k <= horizon; ++k) g[k - 1] = static_cast<double>(k) / horizon;
    return ForecastCdf(std::move(g));
}

ForecastCdf point_forecast(int horizon, int forecast_day) {
    if (horizon < 1) throw DomainError("horizon d must be >= 1");
    std::vector<double> g(static_cast<std::size_t>(horizon));
    for (int k = 1; k <= horizon; ++k) g[k - 1] = k >= forecast_day ? 1.0 : 0.0;
    return ForecastCdf(std::move(g));
}

ForecastCdf normalize_curve(std::span<const double> p0_by_day) {
    if (p0_by_day.empty()) throw DomainError("cannot normalize an empty stockout curve");
    const double last = p0_by_day.back();
    if (!(last > 0.0)) throw DomainError("normalization undefined: P(0,d) = 0");
    std::vector<double> g(p0_by_day.size());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = std::min(1.0, p0_by_day[i] / last);
    g.back() = 1.0;
    return ForecastCdf(std::move(g));
}

ForecastCdf normalize_curve(const StockoutCurve& curve, int horizon) {
    if (horizon < 1 || horizon > curve.horizon) throw DomainError("normalization horizon outside the curve");
    return normalize_curve(std::span<const double>(curve.p0).subspan(1, static_cast<std::size_t>(horizon)));
}

}  // namespace stockout
