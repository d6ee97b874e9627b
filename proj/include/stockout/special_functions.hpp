#pragma once

// Scalar special functions used by the closed-form stock distributions:
// regularized incomplete gamma and beta functions and generalized binomial
// coefficients. All functions are pure and thread-safe.

namespace stockout {

/// A probability produced by a regularized special function.
///
/// Values that overshoot [0,1] by less than 1e-12 are clamped; anything
/// further out is rejected with ComputationError.
class RegularizedValue {
public:
    explicit RegularizedValue(double v);

    [[nodiscard]] double value() const noexcept { return value_; }
    operator double() const noexcept { return value_; }  // NOLINT(google-explicit-constructor)

private:
    double value_;
};

/// Q(a,x) = Gamma(a,x) / Gamma(a), the regularized upper incomplete gamma.
/// Series for x < a+1, Lentz continued fraction otherwise.
/// Throws DomainError unless a > 0, x >= 0 and both are finite.
RegularizedValue reg_upper_gamma(double a, double x);

/// P(a,x) = 1 - Q(a,x), evaluated directly so that small values keep their
/// relative accuracy.
RegularizedValue reg_lower_gamma(double a, double x);

/// I_x(a,b), the regularized incomplete beta function.
/// Throws DomainError unless 0 <= x <= 1 and a, b > 0.
RegularizedValue reg_inc_beta(double x, double a, double b);

/// ln C(top, r) = ln Gamma(top+1) - ln Gamma(r+1) - ln Gamma(top-r+1).
///
/// Defined when top > -1 and top - r + 1 > 0 (top in (-1,0) arises as r-1
/// for a Negative Binomial with r < 1). When top is a non-negative integer below r
/// the coefficient is exactly zero and -infinity is returned. Any other
/// combination hits a pole of the generalized coefficient and throws
/// DomainError.
double log_gen_binomial(double top, int r);

/// ln|Gamma(x)|; reentrant (does not touch the global signgam).
double log_gamma(double x);

/// x * ln(y) with the convention 0 * ln(0) = 0.
double xlogy(double x, double y);

/// True when v is within a relative 1e-12 of an integer.
bool is_integral(double v) noexcept;

}  // namespace stockout
