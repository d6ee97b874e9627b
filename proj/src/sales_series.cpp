#include "stockout/sales_series.hpp"

#include <charconv>
#include <cstdio>

#include "stockout/errors.hpp"

namespace stockout {

namespace {

int parse_field(std::string_view text, std::size_t pos, std::size_t len, std::string_view whole) {
    int value = 0;
    const char* begin = text.data() + pos;
    const auto [ptr, ec] = std::from_chars(begin, begin + len, value);
    if (ec != std::errc{} || ptr != begin + len) {
        throw InputError("invalid date '" + std::string(whole) + "' (expected YYYY-MM-DD)");
    }
    return value;
}

}  // namespace

Date parse_iso_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        throw InputError("invalid date '" + std::string(text) + "' (expected YYYY-MM-DD)");
    }
    const int y = parse_field(text, 0, 4, text);
    const int m = parse_field(text, 5, 2, text);
    const int d = parse_field(text, 8, 2, text);
    const Date date{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                    std::chrono::day{static_cast<unsigned>(d)}};
    if (!date.ok()) throw InputError("invalid calendar date '" + std::string(text) + "'");
    return date;
}

std::string format_iso_date(const Date& date) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                  static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
    return buf;
}

DateWindow DateWindow::parse(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) {
        throw InputError("invalid window '" + std::string(text) + "' (expected FIRST:LAST)");
    }
    DateWindow w{parse_iso_date(text.substr(0, colon)), parse_iso_date(text.substr(colon + 1))};
    if (std::chrono::sys_days{w.last} < std::chrono::sys_days{w.first}) {
        throw InputError("window '" + std::string(text) + "' ends before it starts");
    }
    return w;
}

int DateWindow::length() const { return offset(last) + 1; }

bool DateWindow::contains(const Date& d) const {
    const std::chrono::sys_days day{d};
    return day >= std::chrono::sys_days{first} && day <= std::chrono::sys_days{last};
}

int DateWindow::offset(const Date& d) const {
    return static_cast<int>((std::chrono::sys_days{d} - std::chrono::sys_days{first}).count());
}

std::string DateWindow::to_string() const { return format_iso_date(first) + ":" + format_iso_date(last); }

SalesSeries::SalesSeries(SkuId sku, DateWindow window, std::vector<DailySale> days)
    : sku_(sku), window_(window), days_(std::move(days)) {
    for (std::size_t i = 0; i < days_.size(); ++i) {
        const auto& day = days_[i];
        if (!window_.contains(day.date)) {
            throw InputError("sku " + std::to_string(sku_) + ": date " + format_iso_date(day.date) +
                             " outside window " + window_.to_string());
        }
        if (day.quantity < 0) {
            throw InputError("sku " + std::to_string(sku_) + ": negative quantity on " +
                             format_iso_date(day.date));
        }
        if (i > 0 && std::chrono::sys_days{days_[i - 1].date} >= std::chrono::sys_days{day.date}) {
            throw InputError("sku " + std::to_string(sku_) + ": dates not strictly increasing at " +
                             format_iso_date(day.date));
        }
    }
}

SalesSeries SalesSeries::from_counts(SkuId sku, Date first, const std::vector<std::int64_t>& counts) {
    std::vector<DailySale> days;
    days.reserve(counts.size());
    const std::chrono::sys_days start{first};
    for (std::size_t i = 0; i < counts.size(); ++i) {
        days.push_back({Date{start + std::chrono::days{static_cast<int>(i)}}, counts[i]});
    }
    const auto n = static_cast<int>(counts.empty() ? 0 : counts.size() - 1);
    const DateWindow window{first, Date{start + std::chrono::days{n}}};
    return SalesSeries(sku, window, std::move(days));
}

std::int64_t SalesSeries::total() const noexcept {
    std::int64_t sum = 0;
    for (const auto& d : days_) sum += d.quantity;
    return sum;
}

int SalesSeries::days_with_sales() const noexcept {
    int n = 0;
    for (const auto& d : days_) n += d.quantity > 0 ? 1 : 0;
    return n;
}

std::vector<std::optional<std::int64_t>> SalesSeries::by_day() const {
    std::vector<std::optional<std::int64_t>> out(static_cast<std::size_t>(window_.length()));
    for (const auto& d : days_) out[static_cast<std::size_t>(window_.offset(d.date))] = d.quantity;
    return out;
}

}  // namespace stockout
