// stockout: stock-depletion forecasts and RPS evaluation from the command line.
//
// Exit codes: 0 success, 1 input/usage error, 2 computation error,
// 3 selftest failure.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "stockout/closed_form.hpp"
#include "stockout/demand_model.hpp"
#include "stockout/errors.hpp"
#include "stockout/eval_harness.hpp"
#include "stockout/metrics.hpp"
#include "stockout/sales_series.hpp"
#include "stockout/selftest.hpp"
#include "stockout/stock_engine.hpp"

using namespace stockout;
using nlohmann::ordered_json;

namespace {

constexpr int kExitInput = 1;
constexpr int kExitComputation = 2;
constexpr int kExitSelftest = 3;

struct SeriesSource {
    std::string counts;  // comma-separated daily quantities
    std::string input;
    std::string input_format = "auto";
    std::string window = "2021-02-01:2021-02-28";
    long long sku = -1;
};

struct ModelChoice {
    std::string model = "nfq";
    std::optional<int> h;
    std::optional<double> lambda;
    std::optional<double> customers;
    std::optional<double> p;
    std::optional<double> r;
    std::string divisor = "n";
};

std::optional<InputFormat> parse_input_format(const std::string& text) {
    if (text == "auto") return std::nullopt;
    if (text == "jsonl") return InputFormat::Jsonl;
    if (text == "csv") return InputFormat::Csv;
    throw InputError("unknown input format '" + text + "'");
}

VarianceDivisor parse_divisor(const std::string& text) {
    if (text == "n") return VarianceDivisor::N;
    if (text == "n-1") return VarianceDivisor::NMinusOne;
    throw InputError("variance divisor must be n or n-1");
}

std::optional<SalesSeries> load_series(const SeriesSource& src) {
    if (!src.counts.empty() && !src.input.empty()) throw InputError("give either --counts or --input, not both");
    const auto window = DateWindow::parse(src.window);
    if (!src.counts.empty()) {
        std::vector<std::int64_t> counts;
        std::stringstream ss(src.counts);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                const long long v = std::stoll(cell, &used);
                if (used != cell.size() || v < 0) throw std::invalid_argument(cell);
                counts.push_back(v);
            } catch (const std::exception&) {
                throw InputError("--counts entry '" + cell + "' is not a non-negative integer");
            }
        }
        if (counts.empty()) throw InputError("--counts is empty");
        return SalesSeries::from_counts(src.sku < 0 ? 0 : src.sku, window.first, counts);
    }
    if (!src.input.empty()) {
        if (src.sku < 0) throw InputError("--input needs --sku");
        const auto data = ingest(src.input, parse_input_format(src.input_format), window, window);
        for (const auto& h : data.skus) {
            if (h.sku == src.sku && h.train) return *h.train;
        }
        throw InputError("sku " + std::to_string(src.sku) + " has no rows in " + window.to_string());
    }
    return std::nullopt;
}

DemandModel build_model(const ModelChoice& choice, const std::optional<SalesSeries>& series) {
    auto need_series = [&]() -> const SalesSeries& {
        if (!series) throw InputError("model '" + choice.model + "' is fitted from data; give --counts or --input");
        return *series;
    };
    auto need = [&](const auto& opt, const char* flag) {
        if (!opt) throw InputError("model '" + choice.model + "' needs " + flag);
        return *opt;
    };
    if (choice.model == "nfq") return fit_frequentist(need_series());
    if (choice.model == "bnbp") {
        const auto moments = estimate_moments(need_series(), parse_divisor(choice.divisor));
        return select_bnbp(moments);
    }
    if (choice.model == "poisson") {
        if (choice.lambda) return DemandModel::poisson(*choice.lambda);
        return DemandModel::poisson(estimate_moments(need_series(), parse_divisor(choice.divisor)).mean);
    }
    if (choice.model == "deterministic") return DemandModel::deterministic(need(choice.h, "--units-per-day"));
    if (choice.model == "binomial") return DemandModel::binomial(need(choice.customers, "--customers"), need(choice.p, "--p"));
    if (choice.model == "negative_binomial") return DemandModel::negative_binomial(need(choice.r, "--r"), need(choice.p, "--p"));
    throw InputError("unknown model '" + choice.model + "'");
}

void add_model_options(CLI::App* cmd, ModelChoice& choice) {
    cmd->add_option("--model", choice.model,
                    "nfq, poisson, bnbp (fitted from data) or deterministic, binomial, negative_binomial")
        ->capture_default_str();
    cmd->add_option("--units-per-day", choice.h, "h, units sold every day (deterministic)");
    cmd->add_option("--lambda", choice.lambda, "Poisson rate; fitted from data when omitted");
    cmd->add_option("--customers", choice.customers, "Binomial C");
    cmd->add_option("--p", choice.p, "Binomial / Negative Binomial p");
    cmd->add_option("--r", choice.r, "Negative Binomial r");
    cmd->add_option("--variance-divisor", choice.divisor, "n or n-1 for method of moments")->capture_default_str();
}

void add_series_options(CLI::App* cmd, SeriesSource& src) {
    cmd->add_option("--counts", src.counts, "comma-separated daily sales, first day = window start");
    cmd->add_option("--input", src.input, "sales file (jsonl or csv)");
    cmd->add_option("--input-format", src.input_format, "jsonl, csv or auto")->capture_default_str();
    cmd->add_option("--window", src.window, "training window FIRST:LAST")->capture_default_str();
    cmd->add_option("--sku", src.sku, "SKU to read from --input");
}

std::string fixed(double v, int digits) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << v;
    return os.str();
}

ordered_json stats_json(const SampleStats& s) {
    return {{"n_evals", s.count}, {"mean", s.mean}, {"sd", s.sd},  {"min", s.min},
            {"q1", s.q1},         {"median", s.median}, {"q3", s.q3}, {"max", s.max}};
}

ordered_json report_json(const SummaryReport& r) {
    ordered_json j;
    j["horizon"] = r.horizon;
    j["quantile_convention"] = r.quantile_convention;
    j["exclusion_threshold"] = r.exclusion_threshold ? ordered_json(*r.exclusion_threshold) : ordered_json(nullptr);
    j["baseline"] = r.baseline;
    j["benchmark"] = r.benchmark;
    j["models"] = ordered_json::array();
    for (const auto& m : r.models) {
        ordered_json mj;
        mj["model"] = std::string(to_string(m.model));
        mj["n_skus"] = m.n_skus;
        mj["stats"] = stats_json(m.stats);
        mj["excluded"] = m.excluded;
        mj["skipped"] = m.skipped;
        mj["skip_reasons"] = ordered_json::object();
        for (const auto& [reason, n] : m.skip_counts) mj["skip_reasons"][std::string(to_string(reason))] = n;
        mj["branches"] = ordered_json::object();
        for (const auto& [b, s] : m.branches) mj["branches"][b] = {{"n_skus", s.n_skus}, {"stats", stats_json(s.stats)}};
        mj["strata"] = ordered_json::array();
        for (const auto& s : m.strata) {
            mj["strata"].push_back({{"train_days", s.train_days_with_sales}, {"n_skus", s.n_skus}, {"stats", stats_json(s.stats)}});
        }
        j["models"].push_back(std::move(mj));
    }
    return j;
}

void check_format(const std::string& format) {
    if (format != "text" && format != "json") throw InputError("--format must be text or json");
}

// ------------------------------------------------------------------ forecast

struct ForecastArgs {
    SeriesSource src;
    ModelChoice choice;
    int m = 0;
    int horizon = 31;
    std::string method = "auto";
    std::string format = "text";
};

int cmd_forecast(const ForecastArgs& a) {
    check_format(a.format);
    if (a.m < 1) throw InputError("--m must be >= 1");
    if (a.horizon < 1) throw InputError("--horizon must be >= 1");
    const auto series = load_series(a.src);
    const auto model = build_model(a.choice, series);

    bool closed = has_closed_form(model.kind());
    if (a.method == "recursive") closed = false;
    else if (a.method == "closed" && !closed) throw InputError("no closed form for " + model.describe());
    else if (a.method != "auto" && a.method != "closed") throw InputError("--method must be auto, closed or recursive");

    const auto curve = closed ? cf_curve(model, a.m, a.horizon) : solve_recursive(model, a.m, a.horizon);
    std::optional<ForecastCdf> g;
    if (curve.p0[a.horizon] > 0.0) g = normalize_curve(curve, a.horizon);

    if (a.format == "json") {
        ordered_json j;
        j["model"] = model.describe();
        j["method"] = closed ? "closed_form" : "recursive";
        j["m"] = a.m;
        j["horizon"] = a.horizon;
        j["rows"] = ordered_json::array();
        for (int k = 1; k <= a.horizon; ++k) {
            j["rows"].push_back({{"k", k},
                                 {"p0", curve.p0[k]},
                                 {"pf", curve.pf[k]},
                                 {"g", g ? ordered_json((*g)(k)) : ordered_json(nullptr)}});
        }
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "# " << model.describe() << ", m=" << a.m << ", " << (closed ? "closed form" : "recursion") << "\n";
        std::cout << std::setw(4) << "k" << std::setw(14) << "P(0,k)" << std::setw(14) << "P_F(k)" << std::setw(14)
                  << "G(k)" << "\n";
        for (int k = 1; k <= a.horizon; ++k) {
            std::cout << std::setw(4) << k << std::setw(14) << fixed(curve.p0[k], 8) << std::setw(14)
                      << fixed(curve.pf[k], 8) << std::setw(14) << (g ? fixed((*g)(k), 8) : std::string("undefined"))
                      << "\n";
        }
    }
    if (!g) std::cerr << "note: P(0," << a.horizon << ") = 0, so G(k) is undefined\n";
    return 0;
}

// ------------------------------------------------------------------ estimate

struct EstimateArgs {
    SeriesSource src;
    std::string divisor = "n";
    std::string format = "text";
};

int cmd_estimate(const EstimateArgs& a) {
    check_format(a.format);
    const auto series = load_series(a.src);
    if (!series) throw InputError("estimate needs --counts or --input");
    const auto nfq = fit_frequentist(*series);
    const auto moments = estimate_moments(*series, parse_divisor(a.divisor));
    std::optional<DemandModel> bnbp;
    std::string bnbp_note;
    try {
        bnbp = select_bnbp(moments);
    } catch (const DomainError& e) {
        bnbp_note = e.what();
    }
    const auto alpha = nfq.alpha_table(*nfq.support_max());
    if (a.format == "json") {
        ordered_json j;
        j["sku"] = series->sku();
        j["recorded_days"] = series->recorded_days();
        j["days_with_sales"] = series->days_with_sales();
        j["total"] = series->total();
        j["alpha"] = alpha;
        j["mean"] = moments.mean;
        j["variance"] = moments.variance;
        j["variance_divisor"] = a.divisor;
        j["bnbp"] = bnbp ? ordered_json(bnbp->describe()) : ordered_json(nullptr);
        if (!bnbp) j["bnbp_error"] = bnbp_note;
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    std::cout << "sku " << series->sku() << ": " << series->recorded_days() << " recorded days, "
              << series->days_with_sales() << " with sales, total " << series->total() << "\n";
    std::cout << "frequentist alpha:";
    for (std::size_t l = 0; l < alpha.size(); ++l) std::cout << "  a" << l << "=" << fixed(alpha[l], 6);
    std::cout << "\nmean " << fixed(moments.mean, 6) << ", variance (" << a.divisor << ") " << fixed(moments.variance, 6)
              << "\n";
    std::cout << "bnbp: " << (bnbp ? bnbp->describe() : "undefined (" + bnbp_note + ")") << "\n";
    return 0;
}

// ------------------------------------------------------------------ evaluate / report

std::vector<ModelTag> parse_models(const std::vector<std::string>& names) {
    std::vector<ModelTag> out;
    for (const auto& n : names) {
        if (n == "all") {
            for (auto t : {ModelTag::Nfq, ModelTag::Poisson, ModelTag::Bnbp}) out.push_back(t);
        } else {
            out.push_back(parse_model_tag(n));
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    if (out.empty()) throw InputError("no models selected");
    return out;
}

void emit_report(const SummaryReport& report, const std::vector<EvaluationRecord>& records,
                 const std::string& out_dir, const std::string& format, const ordered_json& extra) {
    if (!out_dir.empty()) {
        for (const auto& p : export_report(report, records, out_dir)) std::cerr << "wrote " << p.string() << "\n";
    }
    if (format == "json") {
        auto j = report_json(report);
        for (const auto& [k, v] : extra.items()) j[k] = v;
        std::cout << j.dump(2) << "\n";
    } else {
        write_summary_text(std::cout, report);
    }
}

struct EvaluateArgs {
    std::string input;
    std::string input_format = "auto";
    std::string train_window = "2021-02-01:2021-02-28";
    std::string test_window = "2021-03-01:2021-03-31";
    std::vector<std::string> models{"all"};
    bool filter = false;
    std::optional<double> threshold;
    int horizon = 31;
    unsigned jobs = 1;
    std::uint64_t seed = 0;
    std::string divisor = "n";
    std::string out;
    std::string format = "text";
};

std::optional<double> effective_threshold(bool filter, const std::optional<double>& threshold) {
    if (threshold && (*threshold < 0.0 || *threshold > 1.0)) throw InputError("--exclusion-threshold must lie in [0,1]");
    if (threshold) return threshold;
    if (filter) return 0.5;
    return std::nullopt;
}

int cmd_evaluate(const EvaluateArgs& a) {
    check_format(a.format);
    if (a.horizon < 1) throw InputError("--horizon must be >= 1");
    const auto models = parse_models(a.models);
    const auto train = DateWindow::parse(a.train_window);
    const auto test = DateWindow::parse(a.test_window);
    const auto data = ingest(a.input, parse_input_format(a.input_format), train, test);

    EvalOptions opt;
    opt.horizon = a.horizon;
    opt.exclusion_threshold = effective_threshold(a.filter, a.threshold);
    opt.variance_divisor = parse_divisor(a.divisor);
    opt.jobs = a.jobs;
    const auto records = evaluate(data, models, opt);
    if (records.empty()) throw InputError("no (m, u) pairs to evaluate: no SKU has sales in both windows");
    const auto report = summarize(records, a.horizon, opt.exclusion_threshold);

    const auto train_only = data.train_only().size();
    const auto test_only = data.test_only().size();
    if (a.format != "json") {
        std::cout << "input: " << data.rows << " rows, " << data.skus.size() << " skus, " << data.evaluable_count()
                  << " with data in both windows (" << train_only << " train only, " << test_only
                  << " test only), " << data.rows_outside_windows << " rows outside the windows\n";
    }
    ordered_json extra;
    extra["input"] = {{"rows", data.rows},
                      {"skus", data.skus.size()},
                      {"evaluable_skus", data.evaluable_count()},
                      {"train_only_skus", train_only},
                      {"test_only_skus", test_only},
                      {"rows_outside_windows", data.rows_outside_windows}};
    emit_report(report, records, a.out, a.format, extra);
    return 0;
}

struct ReportArgs {
    std::string records;
    int horizon = 31;
    bool filter = false;
    std::optional<double> threshold;
    std::string out;
    std::string format = "text";
};

int cmd_report(const ReportArgs& a) {
    check_format(a.format);
    std::ifstream in(a.records, std::ios::binary);
    if (!in) throw InputError("cannot open " + a.records);
    auto records = read_records_csv(in, a.records);
    if (records.empty()) throw InputError(a.records + ": no records");
    auto threshold = effective_threshold(a.filter, a.threshold);
    if (threshold) {
        // Re-apply the filter from the stored P(0,d).
        for (auto& r : records) {
            if (r.status == RecordStatus::Skipped) continue;
            r.status = r.p0_at_d < *threshold ? RecordStatus::Excluded : RecordStatus::Scored;
        }
    } else {
        bool any_excluded = false;
        for (const auto& r : records) any_excluded |= r.status == RecordStatus::Excluded;
        if (any_excluded) std::cerr << "note: records carry exclusions from an earlier filter; pass --filter to set one\n";
    }
    const auto report = summarize(records, a.horizon, threshold);
    emit_report(report, records, a.out, a.format, ordered_json::object());
    return 0;
}

// ------------------------------------------------------------------ selftest

struct SelftestArgs {
    std::uint64_t seed = 20210301;
    std::uint64_t trials = 1000000;
    unsigned threads = 0;
    double perturb = 0.0;
    std::string format = "text";
};

int cmd_selftest(const SelftestArgs& a) {
    check_format(a.format);
    SelftestOptions opt;
    opt.seed = a.seed;
    opt.mc_trials = a.trials;
    opt.threads = a.threads;
    opt.closed_form_perturbation = a.perturb;
    const auto results = run_selftest(opt);
    bool ok = true;
    for (const auto& r : results) ok &= r.passed;
    if (a.format == "json") {
        ordered_json j = ordered_json::array();
        for (const auto& r : results) {
            j.push_back({{"check", r.name}, {"passed", r.passed}, {"worst", r.worst}, {"tolerance", r.tolerance},
                         {"at", r.detail}});
        }
        std::cout << ordered_json{{"passed", ok}, {"checks", j}}.dump(2) << "\n";
    } else {
        std::size_t width = 0;
        for (const auto& r : results) width = std::max(width, r.name.size());
        for (const auto& r : results) {
            std::ostringstream worst;
            worst << std::setprecision(3) << std::scientific << r.worst;
            std::cout << std::left << std::setw(static_cast<int>(width) + 2) << r.name << (r.passed ? "PASS" : "FAIL")
                      << "  worst " << worst.str() << " (tol " << r.tolerance << ")";
            if (!r.passed) std::cout << "  at " << r.detail;
            std::cout << "\n";
        }
        std::cout << (ok ? "all checks passed" : "SELFTEST FAILED") << "\n";
    }
    return ok ? 0 : kExitSelftest;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stockout forecasts from daily sales: stock recursion, closed forms and RPS evaluation"};
    app.require_subcommand(1);

    ForecastArgs fa;
    auto* forecast = app.add_subcommand("forecast", "print P(0,k), P_F(k) and G(k) for one initial stock");
    add_series_options(forecast, fa.src);
    add_model_options(forecast, fa.choice);
    forecast->add_option("--m", fa.m, "initial stock")->required();
    forecast->add_option("--horizon", fa.horizon, "days")->capture_default_str();
    forecast->add_option("--method", fa.method, "auto, closed or recursive")->capture_default_str();
    forecast->add_option("--format", fa.format, "text or json")->capture_default_str();

    EstimateArgs ea;
    auto* estimate = app.add_subcommand("estimate", "fit the frequentist and method-of-moments models");
    add_series_options(estimate, ea.src);
    estimate->add_option("--variance-divisor", ea.divisor, "n or n-1")->capture_default_str();
    estimate->add_option("--format", ea.format, "text or json")->capture_default_str();

    EvaluateArgs va;
    auto* evaluate_cmd = app.add_subcommand("evaluate", "score models on every (SKU, m, u) of a dataset");
    evaluate_cmd->add_option("--input", va.input, "sales file (jsonl or csv)")->required();
    evaluate_cmd->add_option("--input-format", va.input_format, "jsonl, csv or auto")->capture_default_str();
    evaluate_cmd->add_option("--train-window", va.train_window, "FIRST:LAST")->capture_default_str();
    evaluate_cmd->add_option("--test-window", va.test_window, "FIRST:LAST")->capture_default_str();
    evaluate_cmd->add_option("--model", va.models, "nfq, poisson, bnbp, uniform or all (repeatable)")
        ->capture_default_str();
    evaluate_cmd->add_flag("--filter", va.filter, "exclude records with P(0,d) below the threshold (default 0.5)");
    evaluate_cmd->add_option("--exclusion-threshold", va.threshold, "threshold in [0,1]; implies --filter");
    evaluate_cmd->add_option("--horizon", va.horizon, "d")->capture_default_str();
    evaluate_cmd->add_option("--jobs", va.jobs, "worker threads (0 = all cores)")->capture_default_str();
    evaluate_cmd->add_option("--seed", va.seed, "recorded for reproducibility; evaluation draws no random numbers");
    evaluate_cmd->add_option("--variance-divisor", va.divisor, "n or n-1")->capture_default_str();
    evaluate_cmd->add_option("--out", va.out, "directory for summary, records, histogram and strata files");
    evaluate_cmd->add_option("--format", va.format, "text or json")->capture_default_str();

    ReportArgs ra;
    auto* report = app.add_subcommand("report", "summarize a records.csv written by evaluate");
    report->add_option("--records", ra.records, "records.csv")->required();
    report->add_option("--horizon", ra.horizon, "d")->capture_default_str();
    report->add_flag("--filter", ra.filter, "re-apply the P(0,d) filter (default threshold 0.5)");
    report->add_option("--exclusion-threshold", ra.threshold, "threshold in [0,1]; implies --filter");
    report->add_option("--out", ra.out, "directory for exported files");
    report->add_option("--format", ra.format, "text or json")->capture_default_str();

    SelftestArgs sa;
    auto* selftest = app.add_subcommand("selftest", "closed form vs recursion, normalization and Monte Carlo checks");
    selftest->add_option("--seed", sa.seed)->capture_default_str();
    selftest->add_option("--trials", sa.trials, "Monte Carlo trials per case")->capture_default_str();
    selftest->add_option("--threads", sa.threads, "0 = all cores")->capture_default_str();
    selftest->add_option("--perturb", sa.perturb, "offset added to closed-form P(0,k) (negative control)");
    selftest->add_option("--format", sa.format, "text or json")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInput;
    }

    try {
        if (*forecast) return cmd_forecast(fa);
        if (*estimate) return cmd_estimate(ea);
        if (*evaluate_cmd) return cmd_evaluate(va);
        if (*report) return cmd_report(ra);
        if (*selftest) return cmd_selftest(sa);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "computation error: " << e.what() << "\n";
        return kExitComputation;
    }
    return kExitInput;
}
