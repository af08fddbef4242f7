#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sectorlab/date.hpp"

namespace sectorlab {

// Price-weighted synthetic ETF over one sector's constituents. Weights are
// set at restructure events and held stale in between; the fund price is the
// dot product of those stale weights with current constituent prices.
struct SyntheticEtf {
    std::string sector_label;
    std::vector<std::string> constituents;
    std::vector<double> weights;          // same length; non-negative, sums to 1
    std::optional<Date> last_restructure;
};

// Recompute weights as price / sum(prices). Constituents without a price
// (not yet listed, even after forward-fill) get weight zero and re-enter at
// a later restructure once priced; the remaining weights renormalize.
SyntheticEtf restructure(SyntheticEtf etf,
                         std::span<const std::optional<double>> prices, Date when);

// Strict variant: every constituent must be priced.
SyntheticEtf restructure(SyntheticEtf etf, std::span<const double> prices, Date when);

// Stale-weight dot product. A missing price is only an error when its
// constituent carries positive weight.
double etf_price(const SyntheticEtf& etf,
                 std::span<const std::optional<double>> prices);
double etf_price(const SyntheticEtf& etf, std::span<const double> prices);

// Sum_i |w_new_i - w_old_i| * price_i, priced at the new restructure time.
double restructuring_turnover(std::span<const double> w_old,
                              std::span<const double> w_new,
                              std::span<const double> prices_at_new);

// Per-ETF price series dump: date,sector_label,price.
void save_etf_prices(const std::vector<Date>& dates,
                     const std::vector<std::string>& sector_labels,
                     const std::vector<std::vector<double>>& prices_by_day,
                     const std::string& path);

} // namespace sectorlab
