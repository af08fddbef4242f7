#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sectorlab/date.hpp"
#include "sectorlab/error.hpp"

namespace sectorlab {

// Fundamentals feature schema. Column order is fixed here, not by the input
// file: loaders map header names onto this order so downstream distance
// computations are independent of column permutations in the source CSV.
inline constexpr std::array<std::string_view, 15> kFeatureColumns = {
    "total_assets",
    "cash_and_equivalents",
    "receivables",
    "inventories",
    "sales",
    "cost_of_goods_sold",
    "gross_profit",
    "operating_cash_flow",
    "operating_income",
    "depreciation_depletion_amortization",
    "interest_expense",
    "non_operating_income_expense",
    "income_taxes",
    "advertising_expense",
    "rnd_expense",
};

inline constexpr std::size_t kFeatureCount = kFeatureColumns.size();

struct FundamentalsRecord {
    std::string ticker;
    int fiscal_year = 0;
    std::array<double, kFeatureCount> features{};
};

struct FundamentalsTable {
    std::vector<FundamentalsRecord> records; // file order preserved

    std::vector<int> fiscal_years() const; // distinct, ascending
    int latest_year() const;
};

// Wide daily price table. Missing cells stay missing here; forward-fill is a
// backtest-engine policy, not a load-time transformation.
struct PriceTable {
    std::vector<Date> dates;              // strictly increasing
    std::vector<std::string> tickers;     // column order
    std::vector<std::vector<std::optional<double>>> cells; // [date][ticker]

    std::optional<std::size_t> ticker_index(const std::string& ticker) const;
};

// Total assignment of tickers to sector labels, with generation provenance.
// linkage is one of "single","complete","average","ward" for learned
// universes, or "benchmark" for externally supplied classifications.
struct SectorUniverse {
    std::map<std::string, std::string> assignments; // ticker -> sector label

    struct Meta {
        std::string linkage = "benchmark";
        int sector_count = 0;
        int source_year = 0;
    } meta;

    int distinct_label_count() const;
};

FundamentalsTable load_fundamentals(const std::string& path);
void save_fundamentals(const FundamentalsTable& table, const std::string& path);

PriceTable load_prices(const std::string& path);

// Universe CSV columns: ticker,benchmark_sector[,learned_sector]. The
// assignment is read from learned_sector when that column is present,
// otherwise from benchmark_sector. Provenance (linkage, k) is recovered from
// a "<linkage>_<k>.csv" filename when the name matches that pattern.
SectorUniverse load_universe(const std::string& path);

// Writes ticker,benchmark_sector,learned_sector sorted by ticker. When no
// companion benchmark is supplied the benchmark_sector column repeats the
// universe's own labels so the file stays loadable as a two-sided record.
void save_universe(const SectorUniverse& u, const std::string& path,
                   const SectorUniverse* benchmark = nullptr);

std::map<std::string, int> sector_distribution(const SectorUniverse& u);

} // namespace sectorlab
