#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stockout/demand_model.hpp"
#include "stockout/sales_series.hpp"

namespace stockout {

// ---------------------------------------------------------------- ingestion

enum class InputFormat { Jsonl, Csv };

/// Picks the format from the extension (.jsonl/.json -> Jsonl, .csv -> Csv).
/// Throws InputError for anything else.
InputFormat format_from_path(const std::filesystem::path& path);

/// Train and test series of one SKU. A SKU missing from either window keeps
/// an empty optional and is not evaluable.
struct SkuHistory {
    SkuId sku = 0;
    std::optional<SalesSeries> train;
    std::optional<SalesSeries> test;

    [[nodiscard]] bool evaluable() const noexcept { return train.has_value() && test.has_value(); }
};

struct Dataset {
    DateWindow train_window;
    DateWindow test_window;
    std::vector<SkuHistory> skus;  // sorted by sku
    std::size_t rows = 0;
    std::size_t rows_outside_windows = 0;

    [[nodiscard]] std::size_t evaluable_count() const noexcept;
    [[nodiscard]] std::vector<SkuId> train_only() const;
    [[nodiscard]] std::vector<SkuId> test_only() const;
};

/// Reads (sku, date, sold_quantity) rows. JSONL needs one object per line;
/// CSV needs a header naming the three columns (others are ignored). Rows
/// dated outside both windows are counted and dropped. Malformed rows and
/// duplicate (sku, date) pairs raise InputError naming the line.
Dataset ingest(std::istream& in, InputFormat format, const DateWindow& train_window,
               const DateWindow& test_window, std::string_view source = "<input>");
Dataset ingest(const std::filesystem::path& path, std::optional<InputFormat> format,
               const DateWindow& train_window, const DateWindow& test_window);

// ---------------------------------------------------------------- augmentation

struct StockPair {
    int m = 0;  // initial stock: cumulative test sales through day u
    int u = 0;  // stockout day, 1-based within the test window

    friend bool operator==(const StockPair&, const StockPair&) = default;
};

/// One (m, u) pair per test day with positive sales.
std::vector<StockPair> augment(const SalesSeries& test);

// ---------------------------------------------------------------- evaluation

/// Forecasting models. Uniform is the G(k) = k/d control.
enum class ModelTag { Nfq, Poisson, Bnbp, Uniform };

std::string_view to_string(ModelTag tag) noexcept;
/// Parses nfq, poisson, bnbp or uniform; throws InputError otherwise.
ModelTag parse_model_tag(std::string_view text);

enum class RecordStatus { Scored, Excluded, Skipped };

enum class SkipReason {
    None,
    ZeroTrainSales,
    NormalizationUndefined,
    EstimationDegenerate,
    ComputationError,
    BeyondHorizon,
};

std::string_view to_string(SkipReason reason) noexcept;

struct EvaluationRecord {
    SkuId sku = 0;
    int m = 0;
    int u = 0;
    ModelTag model = ModelTag::Nfq;
    std::string branch;  // P, NB, B or D for BNBP; empty otherwise
    double rps = 0.0;    // NaN when skipped
    int train_days_with_sales = 0;
    double p0_at_d = 0.0;
    RecordStatus status = RecordStatus::Scored;
    SkipReason reason = SkipReason::None;

    /// "scored", "excluded" or "skipped:<reason>".
    [[nodiscard]] std::string status_label() const;
};

struct EvalOptions {
    int horizon = 31;
    /// Records with P(0,d) below this are marked Excluded. nullopt = no filter.
    std::optional<double> exclusion_threshold;
    VarianceDivisor variance_divisor = VarianceDivisor::N;
    double poisson_tolerance = 1e-9;
    unsigned jobs = 1;  // 0 = hardware concurrency
};

/// Scores every (sku, m, u, model). Per-record failures become skip reasons.
/// Output is sorted by (sku, m, model) whatever the degree of parallelism.
std::vector<EvaluationRecord> evaluate(const Dataset& data, const std::vector<ModelTag>& models,
                                       const EvalOptions& options);

/// The records of one SKU, for callers that hold their own series.
std::vector<EvaluationRecord> evaluate_sku(SkuId sku, const SalesSeries& train, const SalesSeries& test,
                                           const std::vector<ModelTag>& models, const EvalOptions& options);

// ---------------------------------------------------------------- summaries

struct SampleStats {
    std::size_t count = 0;
    double mean = 0.0;
    double sd = 0.0;  // n-1 divisor; 0 for a single value
    double min = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double max = 0.0;
};

/// Linear-interpolation quantile (type 7) of sorted data.
double quantile_type7(const std::vector<double>& sorted, double prob);
/// Throws DomainError for an empty sample.
SampleStats describe_sample(std::vector<double> values);

struct BranchSummary {
    std::size_t n_skus = 0;
    SampleStats stats;
};

struct Stratum {
    int train_days_with_sales = 0;
    std::size_t n_skus = 0;
    SampleStats stats;
};

struct ModelSummary {
    ModelTag model = ModelTag::Nfq;
    std::size_t n_skus = 0;  // SKUs with at least one scored record
    SampleStats stats;       // over scored records
    std::size_t excluded = 0;
    std::size_t skipped = 0;
    std::map<SkipReason, std::size_t> skip_counts;
    std::map<std::string, BranchSummary> branches;  // BNBP only
    std::vector<Stratum> strata;                    // by train_days_with_sales
};

struct SummaryReport {
    int horizon = 31;
    std::optional<double> exclusion_threshold;
    double baseline = 0.0;          // d/6
    double benchmark = 3.71;        // reference line only
    std::string quantile_convention = "type7-linear";
    std::vector<ModelSummary> models;
};

/// Throws InputError for an empty record set.
SummaryReport summarize(const std::vector<EvaluationRecord>& records, int horizon,
                        std::optional<double> exclusion_threshold);

// ---------------------------------------------------------------- export

/// Human-aligned text, one block per model.
void write_summary_text(std::ostream& out, const SummaryReport& report);
/// key=value lines, e.g. "nfq.mean=4.91".
void write_summary_kv(std::ostream& out, const SummaryReport& report);
/// Header plus one row per record.
void write_records_csv(std::ostream& out, const std::vector<EvaluationRecord>& records);
/// Reads what write_records_csv wrote. Throws InputError with line numbers.
std::vector<EvaluationRecord> read_records_csv(std::istream& in, std::string_view source = "<records>");

/// Unit-width bins covering [0, d]; the last bin is closed on the right.
struct HistogramBin {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t count = 0;
};
std::vector<HistogramBin> rps_histogram(const std::vector<EvaluationRecord>& records, ModelTag model, int horizon);

/// Writes summary.txt, records.csv and histogram_<model>.csv plus
/// strata_<model>.csv for every model present. Returns the paths written.
/// Throws InputError before touching the directory when there are no
/// records; I/O failures raise InputError naming the path.
std::vector<std::filesystem::path> export_report(const SummaryReport& report,
                                                 const std::vector<EvaluationRecord>& records,
                                                 const std::filesystem::path& out_dir);

}  // namespace stockout
