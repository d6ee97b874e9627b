#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace stockout {

using Date = std::chrono::year_month_day;
using SkuId = std::int64_t;

/// Parses YYYY-MM-DD; throws InputError on anything else.
Date parse_iso_date(std::string_view text);
std::string format_iso_date(const Date& date);

/// Inclusive calendar window [first, last].
struct DateWindow {
    Date first;
    Date last;

    /// Parses "YYYY-MM-DD:YYYY-MM-DD".
    static DateWindow parse(std::string_view text);

    [[nodiscard]] int length() const;
    [[nodiscard]] bool contains(const Date& d) const;
    /// 0-based offset of d from first.
    [[nodiscard]] int offset(const Date& d) const;
    [[nodiscard]] std::string to_string() const;
};

struct DailySale {
    Date date;
    std::int64_t quantity = 0;
};

/// Daily sales of one SKU inside a calendar window. Days on which the SKU was
/// not offered are simply absent; they are not zero-sales days.
class SalesSeries {
public:
    /// Throws InputError if dates are not strictly increasing, fall outside
    /// the window, or a quantity is negative.
    SalesSeries(SkuId sku, DateWindow window, std::vector<DailySale> days);

    /// Convenience for a fully recorded window starting at `first`.
    static SalesSeries from_counts(SkuId sku, Date first, const std::vector<std::int64_t>& counts);

    [[nodiscard]] SkuId sku() const noexcept { return sku_; }
    [[nodiscard]] const DateWindow& window() const noexcept { return window_; }
    [[nodiscard]] const std::vector<DailySale>& days() const noexcept { return days_; }
    [[nodiscard]] int recorded_days() const noexcept { return static_cast<int>(days_.size()); }
    [[nodiscard]] bool empty() const noexcept { return days_.empty(); }
    [[nodiscard]] std::int64_t total() const noexcept;
    /// Recorded days with a positive quantity.
    [[nodiscard]] int days_with_sales() const noexcept;
    /// One entry per window day; nullopt where the day is absent.
    [[nodiscard]] std::vector<std::optional<std::int64_t>> by_day() const;

private:
    SkuId sku_;
    DateWindow window_;
    std::vector<DailySale> days_;
};

}  // namespace stockout
