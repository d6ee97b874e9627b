#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "stockout/sales_series.hpp"

namespace stockout {

enum class DemandKind { Frequentist, Deterministic, Poisson, Binomial, NegativeBinomial };

std::string_view to_string(DemandKind kind) noexcept;

struct FrequentistParams {
    std::vector<double> mass;  // alpha_0 .. alpha_L
};
struct DeterministicParams {
    int units_per_day = 1;  // h
};
struct PoissonParams {
    double rate = 1.0;  // lambda
};
struct BinomialParams {
    double customers = 1.0;  // C, real-valued
    double p = 0.5;
};
struct NegativeBinomialParams {
    double r = 1.0;  // real-valued
    double p = 0.5;
};

/// Distribution of the number of units demanded in one day.
///
/// alpha(l) is the probability of exactly l units, beta(n) the probability of
/// at least n units; beta(0) == 1 exactly. Values are immutable after
/// construction.
///
/// A Binomial with non-integer C uses the generalized coefficients
/// C(C,l) p^l q^(C-l) for l <= floor(C) and puts the remaining mass,
/// I_p(floor(C)+1, C-floor(C)), on l = floor(C)+1. This keeps
/// beta(n) = I_p(n, C-n+1) for every n <= C+1 and makes the closed forms
/// exact for stock levels m <= C.
class DemandModel {
public:
    using Params = std::variant<FrequentistParams, DeterministicParams, PoissonParams,
                                BinomialParams, NegativeBinomialParams>;

    /// Throws DomainError if the mass has negative entries or does not sum
    /// to 1 within 1e-12.
    static DemandModel frequentist(std::vector<double> mass);
    static DemandModel deterministic(int units_per_day);
    static DemandModel poisson(double rate);
    /// p in (0,1], C > 0.
    static DemandModel binomial(double customers, double p);
    /// p in (0,1), r > 0.
    static DemandModel negative_binomial(double r, double p);

    [[nodiscard]] DemandKind kind() const noexcept;
    [[nodiscard]] const Params& params() const noexcept { return params_; }

    [[nodiscard]] double alpha(int units) const;
    [[nodiscard]] double beta(int units) const;

    /// alpha(0..last) / beta(0..last) as dense tables.
    [[nodiscard]] std::vector<double> alpha_table(int last) const;
    [[nodiscard]] std::vector<double> beta_table(int last) const;

    /// Largest l with alpha(l) > 0, when the support is finite.
    [[nodiscard]] std::optional<int> support_max() const;

    /// Moments of the parametric family (C p, r q / p, ...); for the
    /// frequentist model the moments of the stored mass.
    [[nodiscard]] double mean() const;
    [[nodiscard]] double variance() const;

    [[nodiscard]] std::string describe() const;

private:
    explicit DemandModel(Params params);

    Params params_;
    std::vector<double> tail_;  // frequentist upper tails, tail_[n] = beta(n)
};

enum class VarianceDivisor { N, NMinusOne };

struct MomentEstimates {
    double mean = 0.0;
    double variance = 0.0;
    int n_days = 0;
};

/// Empirical daily-demand frequencies over the recorded days of `train`.
/// Absent days do not enter the denominator. Throws InputError when empty.
DemandModel fit_frequentist(const SalesSeries& train);

/// Sample mean and variance of the recorded days; variance divisor n by
/// default. Throws InputError when empty (or n == 1 with divisor n-1).
MomentEstimates estimate_moments(const SalesSeries& train,
                                 VarianceDivisor divisor = VarianceDivisor::N);

/// Method-of-moments choice between Binomial (mean > var), Negative Binomial
/// (var > mean) and Poisson (var == mean within `poisson_tolerance`,
/// relative). A zero variance maps to Deterministic with h = round(mean).
/// Throws DomainError when the mean is not positive.
DemandModel select_bnbp(const MomentEstimates& moments, double poisson_tolerance = 1e-9);

}  // namespace stockout
