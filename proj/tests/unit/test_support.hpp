#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "stockout/demand_model.hpp"
#include "stockout/sales_series.hpp"
#include "stockout/special_functions.hpp"

namespace testdata {

// Daily series for SKU 538100, February and March.
inline const std::vector<std::int64_t> kFeb538100 = {0, 0, 2, 1, 2, 0, 0, 0, 0, 1, 0, 2, 1, 0,
                                                     0, 0, 0, 0, 0, 1, 0, 0, 2, 1, 0, 0, 1, 1};
inline const std::vector<std::int64_t> kMar538100 = {0, 1, 2, 0, 0, 0, 1, 0, 1, 0, 3, 1, 0, 0, 1, 0,
                                                     1, 1, 0, 0, 0, 0, 0, 2, 0, 1, 0, 1, 2, 3, 4};

inline stockout::SalesSeries sku538100_february() {
    return stockout::SalesSeries::from_counts(538100, stockout::parse_iso_date("2021-02-01"), kFeb538100);
}
inline stockout::SalesSeries sku538100_march() {
    return stockout::SalesSeries::from_counts(538100, stockout::parse_iso_date("2021-03-01"), kMar538100);
}

}  // namespace testdata

inline bool is_integral_customers(const stockout::DemandModel& model) {
    return stockout::is_integral(std::get<stockout::BinomialParams>(model.params()).customers);
}
