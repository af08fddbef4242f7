#include "sectorlab/setf.hpp"

#include <cmath>

#include "sectorlab/csv.hpp"
#include "sectorlab/error.hpp"

namespace sectorlab {

SyntheticEtf restructure(SyntheticEtf etf,
                         std::span<const std::optional<double>> prices, Date when) {
    if (prices.size() != etf.constituents.size()) {
        throw Error("restructure: " + std::to_string(prices.size()) + " prices for " +
                    std::to_string(etf.constituents.size()) + " constituents in sector " +
                    etf.sector_label);
    }
    double total = 0.0;
    for (std::size_t i = 0; i < prices.size(); ++i) {
        if (!prices[i]) continue;
        if (!(*prices[i] > 0.0)) {
            throw Error("restructure: non-positive price for ticker " +
                        etf.constituents[i] + " in sector " + etf.sector_label);
        }
        total += *prices[i];
    }
    if (total <= 0.0) {
        throw Error("restructure: no priced constituents in sector " + etf.sector_label +
                    " on " + when.iso());
    }
    etf.weights.assign(etf.constituents.size(), 0.0);
    for (std::size_t i = 0; i < prices.size(); ++i) {
        if (prices[i]) etf.weights[i] = *prices[i] / total;
    }
    etf.last_restructure = when;
    return etf;
}

SyntheticEtf restructure(SyntheticEtf etf, std::span<const double> prices, Date when) {
    std::vector<std::optional<double>> boxed(prices.begin(), prices.end());
    for (std::size_t i = 0; i < prices.size(); ++i) {
        if (!(prices[i] > 0.0)) {
            throw Error("restructure: missing or non-positive price for ticker " +
                        (i < etf.constituents.size() ? etf.constituents[i]
                                                     : std::to_string(i)));
        }
    }
    return restructure(std::move(etf), std::span<const std::optional<double>>(boxed),
                       when);
}

double etf_price(const SyntheticEtf& etf,
                 std::span<const std::optional<double>> prices) {
    if (!etf.last_restructure) {
        throw Error("etf_price: sector " + etf.sector_label +
                    " has no weights (never restructured)");
    }
    if (prices.size() != etf.weights.size()) {
        throw Error("etf_price: price vector length mismatch for sector " +
                    etf.sector_label);
    }
    double value = 0.0;
    for (std::size_t i = 0; i < prices.size(); ++i) {
        if (etf.weights[i] == 0.0) continue;
        if (!prices[i]) {
            throw Error("etf_price: unpriced constituent " + etf.constituents[i] +
                        " in sector " + etf.sector_label);
        }
        value += etf.weights[i] * *prices[i];
    }
    return value;
}

double etf_price(const SyntheticEtf& etf, std::span<const double> prices) {
    std::vector<std::optional<double>> boxed(prices.begin(), prices.end());
    return etf_price(etf, std::span<const std::optional<double>>(boxed));
}

double restructuring_turnover(std::span<const double> w_old,
                              std::span<const double> w_new,
                              std::span<const double> prices_at_new) {
    if (w_old.size() != w_new.size() || w_new.size() != prices_at_new.size()) {
        throw Error("restructuring_turnover: vector length mismatch (" +
                    std::to_string(w_old.size()) + ", " + std::to_string(w_new.size()) +
                    ", " + std::to_string(prices_at_new.size()) + ")");
    }
    double turnover = 0.0;
    for (std::size_t i = 0; i < w_old.size(); ++i) {
        turnover += std::abs(w_new[i] - w_old[i]) * prices_at_new[i];
    }
    return turnover;
}

void save_etf_prices(const std::vector<Date>& dates,
                     const std::vector<std::string>& sector_labels,
                     const std::vector<std::vector<double>>& prices_by_day,
                     const std::string& path) {
    csv::Writer w(path);
    w.row({"date", "sector_label", "price"});
    for (std::size_t d = 0; d < dates.size(); ++d) {
        for (std::size_t s = 0; s < sector_labels.size(); ++s) {
            w.row({dates[d].iso(), sector_labels[s],
                   csv::format_double(prices_by_day[d][s])});
        }
    }
    w.close();
}

} // namespace sectorlab
