#include "stockout/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "stockout/errors.hpp"

namespace stockout {

namespace {

constexpr double kLentzTiny = 1e-300;
constexpr int kMaxFractionIterations = 500;
constexpr double kEps = 1e-15;
constexpr double kClampSlack = 1e-12;

std::string describe(const char* fn, double a, double b) {
    std::ostringstream os;
    os.precision(17);
    os << fn << "(" << a << ", " << b << ")";
    return os.str();
}

void require_gamma_domain(const char* fn, double a, double x) {
    if (!std::isfinite(a) || !std::isfinite(x) || a <= 0.0 || x < 0.0) {
        throw DomainError(describe(fn, a, x) + ": requires finite a > 0 and x >= 0");
    }
}

// ln of x^a e^-x / Gamma(a), the common prefactor of both gamma expansions.
double log_gamma_prefactor(double a, double x) {
    return a * std::log(x) - x - log_gamma(a);
}

// P(a,x) by its power series; valid (and fast) for x < a + 1.
double lower_gamma_series(double a, double x) {
    // Terms shrink like exp(-n^2 / 2a) near x ~ a, hence the sqrt(a) budget.
    const int max_terms = 1000 + static_cast<int>(50.0 * std::sqrt(a));
    double denom = a;
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n <= max_terms; ++n) {
        denom += 1.0;
        term *= x / denom;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * kEps) {
            return sum * std::exp(log_gamma_prefactor(a, x));
        }
    }
    throw ConvergenceError(describe("lower_gamma_series", a, x) + ": series did not converge");
}

// Q(a,x) by the Legendre continued fraction (modified Lentz); x >= a + 1.
double upper_gamma_fraction(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / kLentzTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxFractionIterations; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < kLentzTiny) d = kLentzTiny;
        c = b + an / c;
        if (std::fabs(c) < kLentzTiny) c = kLentzTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) {
            return std::exp(log_gamma_prefactor(a, x)) * h;
        }
    }
    throw ConvergenceError(describe("upper_gamma_fraction", a, x) +
                           ": continued fraction did not converge");
}

// Continued fraction for I_x(a,b); converges quickly for x < (a+1)/(a+b+2).
double beta_fraction(double a, double b, double x) {
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kLentzTiny) d = kLentzTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxFractionIterations; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kLentzTiny) d = kLentzTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kLentzTiny) c = kLentzTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kLentzTiny) d = kLentzTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kLentzTiny) c = kLentzTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) return h;
    }
    throw ConvergenceError(describe("beta_fraction", a, b) + ": continued fraction did not converge");
}

}  // namespace

RegularizedValue::RegularizedValue(double v) : value_(v) {
    if (std::isnan(v)) throw ComputationError("regularized value is NaN");
    if (v < 0.0) {
        if (v < -kClampSlack) throw ComputationError("regularized value below 0: " + std::to_string(v));
        value_ = 0.0;
    } else if (v > 1.0) {
        if (v > 1.0 + kClampSlack) throw ComputationError("regularized value above 1: " + std::to_string(v));
        value_ = 1.0;
    }
}

RegularizedValue reg_upper_gamma(double a, double x) {
    require_gamma_domain("reg_upper_gamma", a, x);
    if (x == 0.0) return RegularizedValue(1.0);
    if (x < a + 1.0) return RegularizedValue(1.0 - lower_gamma_series(a, x));
    return RegularizedValue(upper_gamma_fraction(a, x));
}

RegularizedValue reg_lower_gamma(double a, double x) {
    require_gamma_domain("reg_lower_gamma", a, x);
    if (x == 0.0) return RegularizedValue(0.0);
    if (x < a + 1.0) return RegularizedValue(lower_gamma_series(a, x));
    return RegularizedValue(1.0 - upper_gamma_fraction(a, x));
}

RegularizedValue reg_inc_beta(double x, double a, double b) {
    if (!std::isfinite(x) || !std::isfinite(a) || !std::isfinite(b) || x < 0.0 || x > 1.0 ||
        a <= 0.0 || b <= 0.0) {
        std::ostringstream os;
        os.precision(17);
        os << "reg_inc_beta(x=" << x << ", a=" << a << ", b=" << b
           << "): requires 0 <= x <= 1 and a, b > 0";
        throw DomainError(os.str());
    }
    if (x == 0.0) return RegularizedValue(0.0);
    if (x == 1.0) return RegularizedValue(1.0);
    const double log_front = a * std::log(x) + b * std::log1p(-x) + log_gamma(a + b) -
                             log_gamma(a) - log_gamma(b);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return RegularizedValue(front * beta_fraction(a, b, x) / a);
    }
    return RegularizedValue(1.0 - front * beta_fraction(b, a, 1.0 - x) / b);
}

// glibc's lgamma writes the global signgam; the reentrant form does not.
double log_gamma(double x) {
#if defined(__GLIBC__)
    int sign = 0;
    return ::lgamma_r(x, &sign);
#else
    return std::lgamma(x);
#endif
}

bool is_integral(double v) noexcept {
    if (!std::isfinite(v)) return false;
    return std::fabs(v - std::round(v)) <= 1e-12 * std::max(1.0, std::fabs(v));
}

double log_gen_binomial(double top, int r) {
    if (r < 0 || !(top > -1.0) || !std::isfinite(top)) {
        throw DomainError(describe("log_gen_binomial", top, r) + ": requires finite top > -1 and r >= 0");
    }
    if (r == 0) return 0.0;
    if (is_integral(top) && top > -0.5) {
        const double n = std::round(top);
        if (n < r) return -std::numeric_limits<double>::infinity();
        return log_gamma(n + 1.0) - log_gamma(r + 1.0) - log_gamma(n - r + 1.0);
    }
    if (top - r + 1.0 > 0.0) {
        return log_gamma(top + 1.0) - log_gamma(r + 1.0) - log_gamma(top - r + 1.0);
    }
    throw DomainError(describe("log_gen_binomial", top, r) +
                      ": generalized coefficient undefined for top - r + 1 <= 0");
}

double xlogy(double x, double y) {
    if (x == 0.0) return 0.0;
    return x * std::log(y);
}

}  // namespace stockout
