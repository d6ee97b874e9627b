#include "stockout/eval_harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "stockout/closed_form.hpp"
#include "stockout/errors.hpp"
#include "stockout/metrics.hpp"
#include "stockout/stock_engine.hpp"

namespace stockout {

namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------- parsing helpers

struct RawRow {
    Date date;
    std::int64_t quantity = 0;
    std::size_t line = 0;
};

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return s;
}

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

[[noreturn]] void bad_row(std::string_view source, std::size_t line, const std::string& what) {
    throw InputError(std::string(source) + ":" + std::to_string(line) + ": " + what);
}

std::int64_t parse_int(std::string_view text, std::string_view field, std::string_view source, std::size_t line) {
    std::int64_t v = 0;
    std::size_t pos = 0;
    bool negative = false;
    if (!text.empty() && (text[0] == '-' || text[0] == '+')) {
        negative = text[0] == '-';
        pos = 1;
    }
    if (pos == text.size()) bad_row(source, line, std::string(field) + " is empty");
    // Accept a trailing ".0" written by tools that export integers as floats.
    auto end = text.size();
    if (const auto dot = text.find('.'); dot != std::string_view::npos) {
        if (text.find_first_not_of('0', dot + 1) != std::string_view::npos) {
            bad_row(source, line, std::string(field) + " '" + std::string(text) + "' is not an integer");
        }
        end = dot;
    }
    for (; pos < end; ++pos) {
        const char c = text[pos];
        if (c < '0' || c > '9') bad_row(source, line, std::string(field) + " '" + std::string(text) + "' is not an integer");
        if (v > (std::numeric_limits<std::int64_t>::max() - (c - '0')) / 10) {
            bad_row(source, line, std::string(field) + " '" + std::string(text) + "' overflows");
        }
        v = v * 10 + (c - '0');
    }
    return negative ? -v : v;
}

std::int64_t json_int(const nlohmann::json& obj, const char* field, std::string_view source, std::size_t line) {
    const auto it = obj.find(field);
    if (it == obj.end()) bad_row(source, line, std::string("missing field '") + field + "'");
    if (it->is_number_integer()) return it->get<std::int64_t>();
    if (it->is_number_float()) {
        const double d = it->get<double>();
        if (std::isfinite(d) && d == std::floor(d) && std::fabs(d) < 9e15) return static_cast<std::int64_t>(d);
    }
    bad_row(source, line, std::string("field '") + field + "' must be an integer");
}

Date parse_date_at(std::string_view text, std::string_view source, std::size_t line) {
    try {
        return parse_iso_date(text);
    } catch (const InputError& e) {
        bad_row(source, line, e.what());
    }
}

void add_row(std::map<SkuId, std::vector<RawRow>>& rows, SkuId sku, Date date, std::int64_t quantity,
             std::string_view source, std::size_t line) {
    if (quantity < 0) bad_row(source, line, "sold_quantity must be non-negative, got " + std::to_string(quantity));
    rows[sku].push_back(RawRow{date, quantity, line});
}

std::optional<SalesSeries> build_series(SkuId sku, const DateWindow& window, const std::vector<RawRow>& rows) {
    std::vector<DailySale> days;
    for (const auto& r : rows) {
        if (window.contains(r.date)) days.push_back(DailySale{r.date, r.quantity});
    }
    if (days.empty()) return std::nullopt;
    return SalesSeries(sku, window, std::move(days));
}

// ---------------------------------------------------------------- evaluation helpers

std::string branch_tag(DemandKind kind) {
    switch (kind) {
        case DemandKind::Poisson: return "P";
        case DemandKind::NegativeBinomial: return "NB";
        case DemandKind::Binomial: return "B";
        case DemandKind::Deterministic: return "D";
        case DemandKind::Frequentist: break;
    }
    return "";
}

// A fitted model for one SKU, or the reason it could not be fitted.
struct Fitted {
    std::optional<DemandModel> model;
    std::string branch;
    SkipReason failure = SkipReason::None;
};

Fitted fit(ModelTag tag, const SalesSeries& train, const EvalOptions& options) {
    Fitted out;
    try {
        switch (tag) {
            case ModelTag::Nfq: out.model = fit_frequentist(train); break;
            case ModelTag::Poisson: {
                const auto moments = estimate_moments(train, options.variance_divisor);
                out.model = DemandModel::poisson(moments.mean);
                break;
            }
            case ModelTag::Bnbp: {
                const auto moments = estimate_moments(train, options.variance_divisor);
                out.model = select_bnbp(moments, options.poisson_tolerance);
                out.branch = branch_tag(out.model->kind());
                break;
            }
            case ModelTag::Uniform: break;
        }
    } catch (const InputError&) {
        out.failure = SkipReason::EstimationDegenerate;
    } catch (const DomainError&) {
        out.failure = SkipReason::EstimationDegenerate;
    }
    return out;
}

// P(0,k) for k = 1..d.
std::vector<double> stockout_by_day(const DemandModel& model, int m, int horizon) {
    if (model.kind() == DemandKind::Frequentist) {
        auto curve = solve_recursive(model, m, horizon);
        return {curve.p0.begin() + 1, curve.p0.end()};
    }
    std::vector<double> p0(static_cast<std::size_t>(horizon));
    for (int k = 1; k <= horizon; ++k) p0[k - 1] = cf_p0k(model, m, k);
    return p0;
}

void score(EvaluationRecord& rec, const Fitted& fitted, const EvalOptions& options) {
    const int d = options.horizon;
    try {
        if (rec.model == ModelTag::Uniform) {
            rec.p0_at_d = 1.0;
            rec.rps = rps_discrete(make_outcome(d, rec.u), uniform_forecast(d));
        } else {
            const auto p0 = stockout_by_day(*fitted.model, rec.m, d);
            rec.p0_at_d = p0.back();
            if (!(rec.p0_at_d > 0.0)) {
                rec.status = RecordStatus::Skipped;
                rec.reason = SkipReason::NormalizationUndefined;
                rec.rps = std::numeric_limits<double>::quiet_NaN();
                return;
            }
            rec.rps = rps_discrete(make_outcome(d, rec.u), normalize_curve(p0));
        }
    } catch (const DomainError&) {
        rec.status = RecordStatus::Skipped;
        rec.reason = SkipReason::NormalizationUndefined;
        rec.rps = std::numeric_limits<double>::quiet_NaN();
        return;
    } catch (const std::runtime_error&) {
        rec.status = RecordStatus::Skipped;
        rec.reason = SkipReason::ComputationError;
        rec.rps = std::numeric_limits<double>::quiet_NaN();
        return;
    }
    if (options.exclusion_threshold && rec.p0_at_d < *options.exclusion_threshold) {
        rec.status = RecordStatus::Excluded;
    }
}

bool canonical_less(const EvaluationRecord& a, const EvaluationRecord& b) {
    return std::tie(a.sku, a.m, a.model) < std::tie(b.sku, b.m, b.model);
}

std::string format_double(double v) {
    if (std::isnan(v)) return "";
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << std::setprecision(12) << v;
    return os.str();
}

std::string format_fixed(double v, int digits) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << std::fixed << std::setprecision(digits) << v;
    return os.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot open " + path.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw InputError("write failed for " + path.string());
}

std::vector<ModelTag> models_present(const std::vector<EvaluationRecord>& records) {
    std::set<ModelTag> seen;
    for (const auto& r : records) seen.insert(r.model);
    return {seen.begin(), seen.end()};
}

}  // namespace

// ---------------------------------------------------------------- ingestion

InputFormat format_from_path(const fs::path& path) {
    const auto ext = path.extension().string();
    if (ext == ".jsonl" || ext == ".json" || ext == ".ndjson") return InputFormat::Jsonl;
    if (ext == ".csv") return InputFormat::Csv;
    throw InputError("cannot infer input format from '" + path.string() + "'; use --input-format");
}

std::size_t Dataset::evaluable_count() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(skus.begin(), skus.end(), [](const SkuHistory& h) { return h.evaluable(); }));
}

std::vector<SkuId> Dataset::train_only() const {
    std::vector<SkuId> out;
    for (const auto& h : skus)
        if (h.train && !h.test) out.push_back(h.sku);
    return out;
}

std::vector<SkuId> Dataset::test_only() const {
    std::vector<SkuId> out;
    for (const auto& h : skus)
        if (!h.train && h.test) out.push_back(h.sku);
    return out;
}

Dataset ingest(std::istream& in, InputFormat format, const DateWindow& train_window,
               const DateWindow& test_window, std::string_view source) {
    Dataset data{train_window, test_window, {}, 0, 0};
    std::map<SkuId, std::vector<RawRow>> rows;
    std::string line;
    std::size_t line_no = 0;

    int col_sku = -1, col_date = -1, col_qty = -1;
    std::size_t n_cols = 0;
    if (format == InputFormat::Csv) {
        if (!std::getline(in, line)) throw InputError(std::string(source) + ": empty input, expected a CSV header");
        ++line_no;
        const auto header = split_csv(line);
        n_cols = header.size();
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == "sku") col_sku = static_cast<int>(i);
            if (header[i] == "date") col_date = static_cast<int>(i);
            if (header[i] == "sold_quantity") col_qty = static_cast<int>(i);
        }
        if (col_sku < 0 || col_date < 0 || col_qty < 0) {
            bad_row(source, 1, "CSV header must name sku, date and sold_quantity");
        }
    }

    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        SkuId sku = 0;
        Date date;
        std::int64_t qty = 0;
        if (format == InputFormat::Jsonl) {
            nlohmann::json obj;
            try {
                obj = nlohmann::json::parse(line);
            } catch (const nlohmann::json::parse_error& e) {
                bad_row(source, line_no, std::string("invalid JSON: ") + e.what());
            }
            if (!obj.is_object()) bad_row(source, line_no, "expected a JSON object");
            sku = json_int(obj, "sku", source, line_no);
            const auto it = obj.find("date");
            if (it == obj.end() || !it->is_string()) bad_row(source, line_no, "field 'date' must be a string");
            date = parse_date_at(it->get<std::string>(), source, line_no);
            qty = json_int(obj, "sold_quantity", source, line_no);
        } else {
            const auto cells = split_csv(line);
            if (cells.size() != n_cols) {
                bad_row(source, line_no,
                        "expected " + std::to_string(n_cols) + " columns, got " + std::to_string(cells.size()));
            }
            sku = parse_int(cells[col_sku], "sku", source, line_no);
            date = parse_date_at(cells[col_date], source, line_no);
            qty = parse_int(cells[col_qty], "sold_quantity", source, line_no);
        }
        ++data.rows;
        if (!train_window.contains(date) && !test_window.contains(date)) {
            ++data.rows_outside_windows;
            continue;
        }
        add_row(rows, sku, date, qty, source, line_no);
    }
    if (in.bad()) throw InputError(std::string(source) + ": read error");

    data.skus.reserve(rows.size());
    for (auto& [sku, list] : rows) {
        std::stable_sort(list.begin(), list.end(),
                         [](const RawRow& a, const RawRow& b) { return std::chrono::sys_days(a.date) < std::chrono::sys_days(b.date); });
        for (std::size_t i = 1; i < list.size(); ++i) {
            if (list[i].date == list[i - 1].date) {
                const auto [first, second] = std::minmax(list[i - 1].line, list[i].line);
                bad_row(source, second,
                        "duplicate (sku " + std::to_string(sku) + ", " + format_iso_date(list[i].date) +
                            "), first seen at line " + std::to_string(first));
            }
        }
        data.skus.push_back(SkuHistory{sku, build_series(sku, train_window, list), build_series(sku, test_window, list)});
    }
    return data;
}

Dataset ingest(const fs::path& path, std::optional<InputFormat> format, const DateWindow& train_window,
               const DateWindow& test_window) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    return ingest(in, format ? *format : format_from_path(path), train_window, test_window, path.string());
}

// ---------------------------------------------------------------- augmentation

std::vector<StockPair> augment(const SalesSeries& test) {
    std::vector<StockPair> out;
    std::int64_t cumulative = 0;
    for (const auto& day : test.days()) {
        if (day.quantity <= 0) continue;
        cumulative += day.quantity;
        if (cumulative > std::numeric_limits<int>::max()) {
            throw InputError("sku " + std::to_string(test.sku()) + ": cumulative sales overflow");
        }
        out.push_back(StockPair{static_cast<int>(cumulative), test.window().offset(day.date) + 1});
    }
    return out;
}

// ---------------------------------------------------------------- evaluation

std::string_view to_string(ModelTag tag) noexcept {
    switch (tag) {
        case ModelTag::Nfq: return "nfq";
        case ModelTag::Poisson: return "poisson";
        case ModelTag::Bnbp: return "bnbp";
        case ModelTag::Uniform: return "uniform";
    }
    return "unknown";
}

ModelTag parse_model_tag(std::string_view text) {
    for (auto tag : {ModelTag::Nfq, ModelTag::Poisson, ModelTag::Bnbp, ModelTag::Uniform}) {
        if (text == to_string(tag)) return tag;
    }
    throw InputError("unknown model '" + std::string(text) + "' (expected nfq, poisson, bnbp or uniform)");
}

std::string_view to_string(SkipReason reason) noexcept {
    switch (reason) {
        case SkipReason::None: return "none";
        case SkipReason::ZeroTrainSales: return "zero_train_sales";
        case SkipReason::NormalizationUndefined: return "normalization_undefined";
        case SkipReason::EstimationDegenerate: return "estimation_degenerate";
        case SkipReason::ComputationError: return "computation_error";
        case SkipReason::BeyondHorizon: return "beyond_horizon";
    }
    return "unknown";
}

std::string EvaluationRecord::status_label() const {
    switch (status) {
        case RecordStatus::Scored: return "scored";
        case RecordStatus::Excluded: return "excluded";
        case RecordStatus::Skipped: return "skipped:" + std::string(to_string(reason));
    }
    return "unknown";
}

std::vector<EvaluationRecord> evaluate_sku(SkuId sku, const SalesSeries& train, const SalesSeries& test,
                                           const std::vector<ModelTag>& models, const EvalOptions& options) {
    if (options.horizon < 1) throw DomainError("horizon d must be >= 1");
    const auto pairs = augment(test);
    const int train_days = train.days_with_sales();
    const bool no_sales = train.total() == 0;

    std::vector<EvaluationRecord> out;
    out.reserve(pairs.size() * models.size());
    for (const ModelTag tag : models) {
        const Fitted fitted = no_sales ? Fitted{} : fit(tag, train, options);
        for (const auto& pair : pairs) {
            EvaluationRecord rec;
            rec.sku = sku;
            rec.m = pair.m;
            rec.u = pair.u;
            rec.model = tag;
            rec.branch = fitted.branch;
            rec.train_days_with_sales = train_days;
            rec.rps = std::numeric_limits<double>::quiet_NaN();
            if (no_sales) {
                rec.status = RecordStatus::Skipped;
                rec.reason = SkipReason::ZeroTrainSales;
            } else if (fitted.failure != SkipReason::None) {
                rec.status = RecordStatus::Skipped;
                rec.reason = fitted.failure;
            } else if (pair.u > options.horizon) {
                rec.status = RecordStatus::Skipped;
                rec.reason = SkipReason::BeyondHorizon;
            } else {
                score(rec, fitted, options);
            }
            out.push_back(std::move(rec));
        }
    }
    std::sort(out.begin(), out.end(), canonical_less);
    return out;
}

std::vector<EvaluationRecord> evaluate(const Dataset& data, const std::vector<ModelTag>& models,
                                       const EvalOptions& options) {
    std::vector<const SkuHistory*> work;
    for (const auto& h : data.skus)
        if (h.evaluable()) work.push_back(&h);

    std::vector<std::vector<EvaluationRecord>> per_sku(work.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < work.size(); i = next++) {
            try {
                per_sku[i] = evaluate_sku(work[i]->sku, *work[i]->train, *work[i]->test, models, options);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    unsigned jobs = options.jobs == 0 ? std::max(1u, std::thread::hardware_concurrency()) : options.jobs;
    jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(work.size(), 1)));
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    std::vector<EvaluationRecord> out;
    for (auto& chunk : per_sku) std::move(chunk.begin(), chunk.end(), std::back_inserter(out));
    // SKUs are already in order and each chunk is sorted; this is a no-op
    // safeguard for callers that build datasets by hand.
    std::stable_sort(out.begin(), out.end(), canonical_less);
    return out;
}

// ---------------------------------------------------------------- summaries

double quantile_type7(const std::vector<double>& sorted, double prob) {
    if (sorted.empty()) throw DomainError("quantile of an empty sample");
    const double h = (static_cast<double>(sorted.size()) - 1.0) * prob;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

SampleStats describe_sample(std::vector<double> values) {
    if (values.empty()) throw DomainError("cannot describe an empty sample");
    std::sort(values.begin(), values.end());
    SampleStats s;
    s.count = values.size();
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(s.count);
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.sd = s.count > 1 ? std::sqrt(ss / static_cast<double>(s.count - 1)) : 0.0;
    s.min = values.front();
    s.max = values.back();
    s.q1 = quantile_type7(values, 0.25);
    s.median = quantile_type7(values, 0.5);
    s.q3 = quantile_type7(values, 0.75);
    return s;
}

SummaryReport summarize(const std::vector<EvaluationRecord>& records, int horizon,
                        std::optional<double> exclusion_threshold) {
    if (records.empty()) throw InputError("no evaluation records to summarize");
    SummaryReport report;
    report.horizon = horizon;
    report.exclusion_threshold = exclusion_threshold;
    report.baseline = baseline_uniform(horizon).mean;

    for (const ModelTag tag : models_present(records)) {
        ModelSummary ms;
        ms.model = tag;
        std::vector<double> scores;
        std::set<SkuId> skus;
        std::map<std::string, std::pair<std::vector<double>, std::set<SkuId>>> by_branch;
        std::map<int, std::pair<std::vector<double>, std::set<SkuId>>> by_days;
        for (const auto& r : records) {
            if (r.model != tag) continue;
            if (r.status == RecordStatus::Excluded) {
                ++ms.excluded;
                continue;
            }
            if (r.status == RecordStatus::Skipped) {
                ++ms.skipped;
                ++ms.skip_counts[r.reason];
                continue;
            }
            scores.push_back(r.rps);
            skus.insert(r.sku);
            if (!r.branch.empty()) {
                by_branch[r.branch].first.push_back(r.rps);
                by_branch[r.branch].second.insert(r.sku);
            }
            by_days[r.train_days_with_sales].first.push_back(r.rps);
            by_days[r.train_days_with_sales].second.insert(r.sku);
        }
        ms.n_skus = skus.size();
        if (!scores.empty()) ms.stats = describe_sample(std::move(scores));
        for (auto& [branch, entry] : by_branch) {
            ms.branches[branch] = BranchSummary{entry.second.size(), describe_sample(std::move(entry.first))};
        }
        for (auto& [days, entry] : by_days) {
            ms.strata.push_back(Stratum{days, entry.second.size(), describe_sample(std::move(entry.first))});
        }
        report.models.push_back(std::move(ms));
    }
    return report;
}

// ---------------------------------------------------------------- export

void write_summary_text(std::ostream& out, const SummaryReport& report) {
    out << "RPS summary (horizon d=" << report.horizon << ", quantiles " << report.quantile_convention << ")\n";
    out << "filter: "
        << (report.exclusion_threshold ? "P(0,d) < " + format_fixed(*report.exclusion_threshold, 3) + " excluded"
                                       : std::string("off"))
        << "\n";
    out << "uniform baseline d/6 = " << format_fixed(report.baseline, 2) << ", benchmark (reference only) = "
        << format_fixed(report.benchmark, 2) << "\n\n";
    out << std::left << std::setw(10) << "model" << std::right << std::setw(9) << "skus" << std::setw(11) << "evals"
        << std::setw(8) << "mean" << std::setw(8) << "sd" << std::setw(8) << "min" << std::setw(8) << "q1"
        << std::setw(8) << "median" << std::setw(8) << "q3" << std::setw(8) << "max" << std::setw(10) << "excluded"
        << std::setw(9) << "skipped" << "\n";
    auto row = [&](const std::string& name, std::size_t n_skus, const SampleStats& s) {
        out << std::left << std::setw(10) << name << std::right << std::setw(9) << n_skus << std::setw(11) << s.count
            << std::setw(8) << format_fixed(s.mean, 2) << std::setw(8) << format_fixed(s.sd, 2) << std::setw(8)
            << format_fixed(s.min, 2) << std::setw(8) << format_fixed(s.q1, 2) << std::setw(8)
            << format_fixed(s.median, 2) << std::setw(8) << format_fixed(s.q3, 2) << std::setw(8)
            << format_fixed(s.max, 2);
    };
    for (const auto& m : report.models) {
        row(std::string(to_string(m.model)), m.n_skus, m.stats);
        out << std::setw(10) << m.excluded << std::setw(9) << m.skipped << "\n";
        for (const auto& [branch, b] : m.branches) {
            row("  " + branch, b.n_skus, b.stats);
            out << "\n";
        }
    }
    bool any_skips = false;
    for (const auto& m : report.models) any_skips |= !m.skip_counts.empty();
    if (any_skips) {
        out << "\nskipped records by reason\n";
        for (const auto& m : report.models)
            for (const auto& [reason, n] : m.skip_counts)
                out << "  " << std::left << std::setw(10) << to_string(m.model) << std::setw(26) << to_string(reason)
                    << std::right << n << "\n";
    }
}

void write_summary_kv(std::ostream& out, const SummaryReport& report) {
    out << "horizon=" << report.horizon << "\n";
    out << "quantile_convention=" << report.quantile_convention << "\n";
    out << "exclusion_threshold=" << (report.exclusion_threshold ? format_double(*report.exclusion_threshold) : "none")
        << "\n";
    out << "baseline=" << format_double(report.baseline) << "\n";
    out << "benchmark=" << format_double(report.benchmark) << "\n";
    auto stats = [&](const std::string& prefix, const SampleStats& s) {
        out << prefix << ".n_evals=" << s.count << "\n";
        out << prefix << ".mean=" << format_double(s.mean) << "\n";
        out << prefix << ".sd=" << format_double(s.sd) << "\n";
        out << prefix << ".min=" << format_double(s.min) << "\n";
        out << prefix << ".q1=" << format_double(s.q1) << "\n";
        out << prefix << ".median=" << format_double(s.median) << "\n";
        out << prefix << ".q3=" << format_double(s.q3) << "\n";
        out << prefix << ".max=" << format_double(s.max) << "\n";
    };
    for (const auto& m : report.models) {
        const std::string name(to_string(m.model));
        out << name << ".n_skus=" << m.n_skus << "\n";
        stats(name, m.stats);
        out << name << ".excluded=" << m.excluded << "\n";
        out << name << ".skipped=" << m.skipped << "\n";
        for (const auto& [reason, n] : m.skip_counts) out << name << ".skipped." << to_string(reason) << "=" << n << "\n";
        for (const auto& [branch, b] : m.branches) {
            out << name << ".branch." << branch << ".n_skus=" << b.n_skus << "\n";
            stats(name + ".branch." + branch, b.stats);
        }
    }
}

void write_records_csv(std::ostream& out, const std::vector<EvaluationRecord>& records) {
    out << "sku,m,u,model,branch,rps,train_days_with_sales,status,p0_at_d\n";
    for (const auto& r : records) {
        out << r.sku << ',' << r.m << ',' << r.u << ',' << to_string(r.model) << ',' << r.branch << ','
            << format_double(r.rps) << ',' << r.train_days_with_sales << ',' << r.status_label() << ','
            << format_double(r.p0_at_d) << '\n';
    }
}

std::vector<EvaluationRecord> read_records_csv(std::istream& in, std::string_view source) {
    std::string line;
    if (!std::getline(in, line)) throw InputError(std::string(source) + ": empty records file");
    const auto header = split_csv(line);
    const std::vector<std::string_view> expected{"sku", "m", "u", "model", "branch", "rps",
                                                 "train_days_with_sales", "status", "p0_at_d"};
    if (header != expected) bad_row(source, 1, "unexpected records header");
    std::vector<EvaluationRecord> out;
    std::size_t line_no = 1;
    auto parse_real = [&](std::string_view text, const char* field) {
        if (text.empty()) return std::numeric_limits<double>::quiet_NaN();
        try {
            std::size_t used = 0;
            const double v = std::stod(std::string(text), &used);
            if (used != text.size()) throw std::invalid_argument(field);
            return v;
        } catch (const std::exception&) {
            bad_row(source, line_no, std::string(field) + " '" + std::string(text) + "' is not a number");
        }
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto c = split_csv(line);
        if (c.size() != expected.size()) bad_row(source, line_no, "expected 9 columns");
        EvaluationRecord r;
        r.sku = parse_int(c[0], "sku", source, line_no);
        r.m = static_cast<int>(parse_int(c[1], "m", source, line_no));
        r.u = static_cast<int>(parse_int(c[2], "u", source, line_no));
        try {
            r.model = parse_model_tag(c[3]);
        } catch (const InputError& e) {
            bad_row(source, line_no, e.what());
        }
        r.branch = std::string(c[4]);
        r.rps = parse_real(c[5], "rps");
        r.train_days_with_sales = static_cast<int>(parse_int(c[6], "train_days_with_sales", source, line_no));
        const std::string_view status = c[7];
        if (status == "scored") {
            r.status = RecordStatus::Scored;
        } else if (status == "excluded") {
            r.status = RecordStatus::Excluded;
        } else if (status.rfind("skipped:", 0) == 0) {
            r.status = RecordStatus::Skipped;
            const auto reason = status.substr(8);
            bool found = false;
            for (auto s : {SkipReason::ZeroTrainSales, SkipReason::NormalizationUndefined,
                           SkipReason::EstimationDegenerate, SkipReason::ComputationError, SkipReason::BeyondHorizon}) {
                if (reason == to_string(s)) {
                    r.reason = s;
                    found = true;
                }
            }
            if (!found) bad_row(source, line_no, "unknown skip reason '" + std::string(reason) + "'");
        } else {
            bad_row(source, line_no, "unknown status '" + std::string(status) + "'");
        }
        r.p0_at_d = parse_real(c[8], "p0_at_d");
        if (r.status != RecordStatus::Skipped && !(r.rps >= 0.0)) bad_row(source, line_no, "scored record without rps");
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<HistogramBin> rps_histogram(const std::vector<EvaluationRecord>& records, ModelTag model, int horizon) {
    if (horizon < 1) throw DomainError("horizon d must be >= 1");
    std::vector<HistogramBin> bins(static_cast<std::size_t>(horizon));
    for (int i = 0; i < horizon; ++i) bins[i] = HistogramBin{static_cast<double>(i), static_cast<double>(i + 1), 0};
    for (const auto& r : records) {
        if (r.model != model || r.status != RecordStatus::Scored) continue;
        const auto idx = std::clamp(static_cast<int>(std::floor(r.rps)), 0, horizon - 1);
        ++bins[static_cast<std::size_t>(idx)].count;
    }
    return bins;
}

std::vector<fs::path> export_report(const SummaryReport& report, const std::vector<EvaluationRecord>& records,
                                    const fs::path& out_dir) {
    if (records.empty()) throw InputError("no evaluation records; nothing exported to " + out_dir.string());
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw InputError("cannot create " + out_dir.string() + ": " + ec.message());

    std::vector<fs::path> written;
    auto emit = [&](const std::string& name, const std::string& content) {
        const auto path = out_dir / name;
        write_file(path, content);
        written.push_back(path);
    };

    std::ostringstream summary;
    write_summary_kv(summary, report);
    emit("summary.txt", summary.str());

    std::ostringstream table;
    write_records_csv(table, records);
    emit("records.csv", table.str());

    for (const auto& m : report.models) {
        const std::string name(to_string(m.model));
        std::ostringstream hist;
        hist << "bin_lo,bin_hi,count\n";
        for (const auto& b : rps_histogram(records, m.model, report.horizon)) {
            hist << format_double(b.lo) << ',' << format_double(b.hi) << ',' << b.count << '\n';
        }
        emit("histogram_" + name + ".csv", hist.str());

        std::ostringstream strata;
        strata << "train_days,n,count,min,q1,median,mean,q3,max\n";
        for (const auto& s : m.strata) {
            strata << s.train_days_with_sales << ',' << s.n_skus << ',' << s.stats.count << ','
                   << format_double(s.stats.min) << ',' << format_double(s.stats.q1) << ','
                   << format_double(s.stats.median) << ',' << format_double(s.stats.mean) << ','
                   << format_double(s.stats.q3) << ',' << format_double(s.stats.max) << '\n';
        }
        emit("strata_" + name + ".csv", strata.str());
    }
    return written;
}

}  // namespace stockout
