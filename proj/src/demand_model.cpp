#include "stockout/demand_model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "stockout/errors.hpp"
#include "stockout/special_functions.hpp"

namespace stockout {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// floor(C) for the Binomial support, treating near-integers as integers.
int binomial_floor(double customers) {
    return static_cast<int>(is_integral(customers) ? std::round(customers) : std::floor(customers));
}

double binomial_alpha(const BinomialParams& b, int units) {
    const double c = b.customers;
    const double q = 1.0 - b.p;
    const int whole = binomial_floor(c);
    if (units <= whole) {
        return std::exp(log_gen_binomial(c, units) + xlogy(units, b.p) + xlogy(c - units, q));
    }
    if (!is_integral(c) && units == whole + 1) {
        return reg_inc_beta(b.p, whole + 1.0, c - whole);
    }
    return 0.0;
}

double binomial_beta(const BinomialParams& b, int units) {
    if (units == 0) return 1.0;
    const double c = b.customers;
    if (is_integral(c)) {
        const int whole = binomial_floor(c);
        if (units > whole) return 0.0;
        return reg_inc_beta(b.p, units, whole - units + 1.0);
    }
    const double shape = c - units + 1.0;
    return shape > 0.0 ? reg_inc_beta(b.p, units, shape).value() : 0.0;
}

}  // namespace

std::string_view to_string(DemandKind kind) noexcept {
    switch (kind) {
        case DemandKind::Frequentist: return "frequentist";
        case DemandKind::Deterministic: return "deterministic";
        case DemandKind::Poisson: return "poisson";
        case DemandKind::Binomial: return "binomial";
        case DemandKind::NegativeBinomial: return "negative_binomial";
    }
    return "unknown";
}

DemandModel::DemandModel(Params params) : params_(std::move(params)) {
    if (const auto* f = std::get_if<FrequentistParams>(&params_)) {
        tail_.assign(f->mass.size() + 1, 0.0);
        for (std::size_t i = f->mass.size(); i-- > 0;) tail_[i] = tail_[i + 1] + f->mass[i];
        tail_[0] = 1.0;
    }
}

DemandModel DemandModel::frequentist(std::vector<double> mass) {
    if (mass.empty()) throw DomainError("frequentist model needs at least one mass point");
    double sum = 0.0;
    for (double a : mass) {
        if (!(a >= 0.0) || !std::isfinite(a)) throw DomainError("frequentist mass must be non-negative");
        sum += a;
    }
    if (std::fabs(sum - 1.0) > 1e-12) {
        throw DomainError("frequentist mass sums to " + std::to_string(sum) + ", not 1");
    }
    while (mass.size() > 1 && mass.back() == 0.0) mass.pop_back();
    return DemandModel(FrequentistParams{std::move(mass)});
}

DemandModel DemandModel::deterministic(int units_per_day) {
    if (units_per_day < 1) throw DomainError("deterministic demand needs h >= 1");
    return DemandModel(DeterministicParams{units_per_day});
}

DemandModel DemandModel::poisson(double rate) {
    if (!(rate > 0.0) || !std::isfinite(rate)) throw DomainError("poisson demand needs lambda > 0");
    return DemandModel(PoissonParams{rate});
}

DemandModel DemandModel::binomial(double customers, double p) {
    if (!(customers > 0.0) || !std::isfinite(customers)) throw DomainError("binomial demand needs C > 0");
    if (!(p > 0.0 && p <= 1.0)) throw DomainError("binomial demand needs p in (0,1]");
    return DemandModel(BinomialParams{customers, p});
}

DemandModel DemandModel::negative_binomial(double r, double p) {
    if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("negative binomial demand needs r > 0");
    if (!(p > 0.0 && p < 1.0)) throw DomainError("negative binomial demand needs p in (0,1)");
    return DemandModel(NegativeBinomialParams{r, p});
}

DemandKind DemandModel::kind() const noexcept {
    return static_cast<DemandKind>(params_.index());
}

double DemandModel::alpha(int units) const {
    if (units < 0) return 0.0;
    return std::visit(
        overloaded{
            [&](const FrequentistParams& f) {
                return static_cast<std::size_t>(units) < f.mass.size() ? f.mass[units] : 0.0;
            },
            [&](const DeterministicParams& d) { return units == d.units_per_day ? 1.0 : 0.0; },
            [&](const PoissonParams& p) {
                return std::exp(xlogy(units, p.rate) - p.rate - log_gamma(units + 1.0));
            },
            [&](const BinomialParams& b) { return binomial_alpha(b, units); },
            [&](const NegativeBinomialParams& nb) {
                return std::exp(log_gen_binomial(nb.r - 1.0 + units, units) + nb.r * std::log(nb.p) +
                                xlogy(units, 1.0 - nb.p));
            },
        },
        params_);
}

double DemandModel::beta(int units) const {
    if (units <= 0) return 1.0;
    return std::visit(
        overloaded{
            [&](const FrequentistParams&) {
                return static_cast<std::size_t>(units) < tail_.size() ? tail_[units] : 0.0;
            },
            [&](const DeterministicParams& d) { return units <= d.units_per_day ? 1.0 : 0.0; },
            [&](const PoissonParams& p) { return reg_lower_gamma(units, p.rate).value(); },
            [&](const BinomialParams& b) { return binomial_beta(b, units); },
            [&](const NegativeBinomialParams& nb) {
                return reg_inc_beta(1.0 - nb.p, units, nb.r).value();
            },
        },
        params_);
}

std::vector<double> DemandModel::alpha_table(int last) const {
    std::vector<double> out(static_cast<std::size_t>(std::max(last + 1, 0)));
    for (int l = 0; l <= last; ++l) out[l] = alpha(l);
    return out;
}

std::vector<double> DemandModel::beta_table(int last) const {
    std::vector<double> out(static_cast<std::size_t>(std::max(last + 1, 0)));
    for (int n = 0; n <= last; ++n) out[n] = beta(n);
    return out;
}

std::optional<int> DemandModel::support_max() const {
    return std::visit(
        overloaded{
            [](const FrequentistParams& f) -> std::optional<int> {
                return static_cast<int>(f.mass.size()) - 1;
            },
            [](const DeterministicParams& d) -> std::optional<int> { return d.units_per_day; },
            [](const PoissonParams&) -> std::optional<int> { return std::nullopt; },
            [](const BinomialParams& b) -> std::optional<int> {
                const int whole = binomial_floor(b.customers);
                return is_integral(b.customers) ? whole : whole + 1;
            },
            [](const NegativeBinomialParams&) -> std::optional<int> { return std::nullopt; },
        },
        params_);
}

double DemandModel::mean() const {
    return std::visit(
        overloaded{
            [](const FrequentistParams& f) {
                double m = 0.0;
                for (std::size_t l = 0; l < f.mass.size(); ++l) m += static_cast<double>(l) * f.mass[l];
                return m;
            },
            [](const DeterministicParams& d) { return static_cast<double>(d.units_per_day); },
            [](const PoissonParams& p) { return p.rate; },
            [](const BinomialParams& b) { return b.customers * b.p; },
            [](const NegativeBinomialParams& nb) { return nb.r * (1.0 - nb.p) / nb.p; },
        },
        params_);
}

double DemandModel::variance() const {
    return std::visit(
        overloaded{
            [this](const FrequentistParams& f) {
                const double mu = mean();
                double v = 0.0;
                for (std::size_t l = 0; l < f.mass.size(); ++l) {
                    const double dev = static_cast<double>(l) - mu;
                    v += dev * dev * f.mass[l];
                }
                return v;
            },
            [](const DeterministicParams&) { return 0.0; },
            [](const PoissonParams& p) { return p.rate; },
            [](const BinomialParams& b) { return b.customers * b.p * (1.0 - b.p); },
            [](const NegativeBinomialParams& nb) { return nb.r * (1.0 - nb.p) / (nb.p * nb.p); },
        },
        params_);
}

std::string DemandModel::describe() const {
    std::ostringstream os;
    os.precision(10);
    std::visit(overloaded{
                   [&](const FrequentistParams& f) {
                       os << "frequentist(";
                       for (std::size_t l = 0; l < f.mass.size(); ++l) os << (l ? ", " : "") << f.mass[l];
                       os << ")";
                   },
                   [&](const DeterministicParams& d) { os << "deterministic(h=" << d.units_per_day << ")"; },
                   [&](const PoissonParams& p) { os << "poisson(lambda=" << p.rate << ")"; },
                   [&](const BinomialParams& b) { os << "binomial(C=" << b.customers << ", p=" << b.p << ")"; },
                   [&](const NegativeBinomialParams& nb) {
                       os << "negative_binomial(r=" << nb.r << ", p=" << nb.p << ")";
                   },
               },
               params_);
    return os.str();
}

DemandModel fit_frequentist(const SalesSeries& train) {
    if (train.empty()) {
        throw InputError("sku " + std::to_string(train.sku()) + ": no recorded days to fit frequencies");
    }
    std::map<std::int64_t, std::int64_t> counts;
    for (const auto& d : train.days()) ++counts[d.quantity];
    const auto top = counts.rbegin()->first;
    std::vector<double> mass(static_cast<std::size_t>(top) + 1, 0.0);
    const auto n = static_cast<double>(train.recorded_days());
    for (const auto& [units, count] : counts) mass[static_cast<std::size_t>(units)] = static_cast<double>(count) / n;
    return DemandModel::frequentist(std::move(mass));
}

MomentEstimates estimate_moments(const SalesSeries& train, VarianceDivisor divisor) {
    const int n = train.recorded_days();
    if (n == 0) throw InputError("sku " + std::to_string(train.sku()) + ": no recorded days for moments");
    if (divisor == VarianceDivisor::NMinusOne && n < 2) {
        throw InputError("sku " + std::to_string(train.sku()) + ": n-1 variance needs two recorded days");
    }
    // Integer sums are exact in the 64-bit mantissa of long double.
    long double sum = 0;
    long double sum_sq = 0;
    for (const auto& d : train.days()) {
        const auto x = static_cast<long double>(d.quantity);
        sum += x;
        sum_sq += x * x;
    }
    // n * sum((x - mean)^2) = n * sum(x^2) - sum(x)^2.
    const long double scaled_ss = static_cast<long double>(n) * sum_sq - sum * sum;
    const double denom = divisor == VarianceDivisor::N ? static_cast<double>(n) * n
                                                        : static_cast<double>(n) * (n - 1);
    return MomentEstimates{static_cast<double>(sum) / n, static_cast<double>(scaled_ss) / denom, n};
}

DemandModel select_bnbp(const MomentEstimates& moments, double poisson_tolerance) {
    const double mean = moments.mean;
    const double var = moments.variance;
    if (!(mean > 0.0)) throw DomainError("method of moments needs a positive mean (no training sales)");
    if (!(var >= 0.0)) throw DomainError("method of moments needs a non-negative variance");
    if (var == 0.0) {
        return DemandModel::deterministic(std::max(1, static_cast<int>(std::lround(mean))));
    }
    if (std::fabs(var - mean) <= poisson_tolerance * mean) return DemandModel::poisson(mean);
    if (mean > var) return DemandModel::binomial(mean * mean / (mean - var), 1.0 - var / mean);
    return DemandModel::negative_binomial(mean * mean / (var - mean), mean / var);
}

}  // namespace stockout
