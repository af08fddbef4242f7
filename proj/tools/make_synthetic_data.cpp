// Deterministic synthetic dataset generator for the bundled demo/test data.
// Uses a self-contained PRNG (splitmix64) so regeneration is reproducible
// independent of the standard library's distribution implementations.

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "sectorlab/calendar.hpp"
#include "sectorlab/csv.hpp"
#include "sectorlab/data_ingest.hpp"
#include "sectorlab/date.hpp"

using namespace sectorlab;

namespace {

struct Rng {
    std::uint64_t state;

    explicit Rng(std::uint64_t seed) : state(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    double uniform() { // in (0, 1)
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal() { // Box-Muller
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }
};

const std::vector<std::string> kTickers = {
    "ALFA", "BRKT", "CMET", "DYNE", "ENTR", "FLUX", "GRID", "HONY", "IRON", "JUMP",
    "KELP", "LUMN", "MECH", "NOVA", "ORCA", "PLUM", "QUAR", "RIFT", "SOLR", "TRNT",
    "UMBR", "VAST", "WICK", "XENO", "YARD", "ZEST", "ARGO", "BLIP", "CRUX", "DELV",
    "EMBR", "FERN", "GALE", "HUSK", "INLT", "JOLT", "KITE", "LOOM", "MIRA", "NEST"};

constexpr int kBlobCount = 34; // the rest are outliers

// Feature magnitudes for the blob center, in dollars, ordered as in
// kFeatureColumns.
constexpr std::array<double, 15> kCenter = {
    5.0e9,  // total_assets
    6.0e8,  // cash_and_equivalents
    4.5e8,  // receivables
    3.0e8,  // inventories
    3.5e9,  // sales
    2.2e9,  // cost_of_goods_sold
    1.3e9,  // gross_profit
    5.5e8,  // operating_cash_flow
    4.8e8,  // operating_income
    2.5e8,  // depreciation_depletion_amortization
    9.0e7,  // interest_expense
    3.0e7,  // non_operating_income_expense
    1.2e8,  // income_taxes
    8.0e7,  // advertising_expense
    1.5e8,  // rnd_expense
};

void write_fundamentals(const std::string& path) {
    Rng rng(0x5ec70f01u);

    FundamentalsTable table;
    for (int idx = 0; idx < static_cast<int>(kTickers.size()); ++idx) {
        // Blob companies lie along a size gradient so single linkage chains
        // them into one cluster while diameter-sensitive linkages split the
        // range. Outliers carry grossly inflated single features.
        std::array<double, 15> base{};
        if (idx < kBlobCount) {
            const double size = 0.5 + 1.5 * static_cast<double>(idx) /
                                          static_cast<double>(kBlobCount - 1);
            for (std::size_t f = 0; f < kCenter.size(); ++f) {
                base[f] = kCenter[f] * size * (1.0 + 0.02 * rng.normal());
            }
        } else {
            const int o = idx - kBlobCount; // 0..5
            for (std::size_t f = 0; f < kCenter.size(); ++f) {
                base[f] = kCenter[f] * (1.0 + 0.02 * rng.normal());
            }
            // One dominant anomalous feature per outlier, at increasing scale.
            const std::size_t feature = static_cast<std::size_t>(o % 3); // assets/cash/recv
            const double scale = 0.6 + 0.45 * static_cast<double>(o);
            base[feature] += kCenter[0] * scale * 1.2;
            base[4] *= 1.0 + 0.3 * static_cast<double>(o); // sales drift too
        }

        for (int year = 2015; year <= 2017; ++year) {
            FundamentalsRecord rec;
            rec.ticker = kTickers[static_cast<std::size_t>(idx)];
            rec.fiscal_year = year;
            const double growth = std::pow(1.03, year - 2015);
            for (std::size_t f = 0; f < base.size(); ++f) {
                rec.features[f] = base[f] * growth * (1.0 + 0.005 * rng.normal());
            }
            table.records.push_back(rec);
        }
    }
    save_fundamentals(table, path);
    std::printf("wrote %s (%zu records)\n", path.c_str(), table.records.size());
}

void write_prices(const std::string& path, const std::vector<std::string>& tickers,
                  Date start, Date end, std::uint64_t seed) {
    Rng rng(seed);
    const TradingCalendar cal = default_us_calendar();
    const std::vector<Date> days = trading_days(cal, start, end);
    const std::size_t n = tickers.size();

    std::vector<double> level(n), idio_vol(n), market_beta(n), drift(n);
    for (std::size_t i = 0; i < n; ++i) {
        const bool outlier = i >= static_cast<std::size_t>(kBlobCount) && n == kTickers.size();
        level[i] = 15.0 + 235.0 * rng.uniform();
        idio_vol[i] = outlier ? 0.018 + 0.012 * rng.uniform()
                              : 0.004 + 0.008 * rng.uniform();
        market_beta[i] = outlier ? 0.3 + 0.3 * rng.uniform() : 0.8 + 0.4 * rng.uniform();
        drift[i] = 0.00010 + 0.00020 * rng.uniform();
    }

    // A couple of mid-series reporting gaps to exercise forward-fill.
    auto in_gap = [&](std::size_t i, const Date& d) {
        if (n != kTickers.size()) return false;
        if (tickers[i] == "HONY") {
            return d >= Date::from_ymd(2014, 6, 2) && d <= Date::from_ymd(2014, 6, 13);
        }
        if (tickers[i] == "KITE") {
            return d >= Date::from_ymd(2016, 3, 7) && d <= Date::from_ymd(2016, 3, 11);
        }
        return false;
    };

    csv::Writer w(path);
    std::vector<std::string> header = {"date"};
    for (const auto& t : tickers) header.push_back(t);
    w.row(header);
    for (const Date& d : days) {
        const double market = 0.0002 + 0.008 * rng.normal();
        std::vector<std::string> row = {d.iso()};
        for (std::size_t i = 0; i < n; ++i) {
            const double shock = market_beta[i] * market + idio_vol[i] * rng.normal();
            level[i] *= std::exp(drift[i] + shock);
            row.push_back(in_gap(i, d) ? std::string()
                                       : csv::format_double(level[i]));
        }
        w.row(row);
    }
    w.close();
    std::printf("wrote %s (%zu days x %zu tickers)\n", path.c_str(), days.size(), n);
}

void write_benchmark_universe(const std::string& path) {
    const std::array<std::string, 8> sectors = {
        "Financials",     "Information Technology", "Health Care", "Industrials",
        "Consumer Goods", "Energy",                 "Utilities",   "Materials"};
    SectorUniverse u;
    for (std::size_t i = 0; i < kTickers.size(); ++i) {
        u.assignments[kTickers[i]] = sectors[(i * 5) % sectors.size()];
    }
    u.meta.linkage = "benchmark";
    u.meta.sector_count = static_cast<int>(sectors.size());
    save_universe(u, path);
    std::printf("wrote %s\n", path.c_str());
}

void write_universe_362(const std::string& path) {
    const std::vector<std::pair<std::string, int>> sectors = {
        {"Information Technology", 66}, {"Health Care", 60},
        {"Financials", 48},             {"Consumer Discretionary", 40},
        {"Industrials", 33},            {"Consumer Staples", 30},
        {"Energy", 28},                 {"Utilities", 22},
        {"Real Estate", 15},            {"Materials", 12},
        {"Communication Services", 8}};
    SectorUniverse u;
    int serial = 0;
    for (const auto& [label, count] : sectors) {
        for (int i = 0; i < count; ++i) {
            char ticker[8];
            std::snprintf(ticker, sizeof(ticker), "%c%c%c",
                          'A' + (serial / 676) % 26, 'A' + (serial / 26) % 26,
                          'A' + serial % 26);
            u.assignments[ticker] = label;
            ++serial;
        }
    }
    u.meta.sector_count = static_cast<int>(sectors.size());
    save_universe(u, path);
    std::printf("wrote %s (%d tickers)\n", path.c_str(), serial);
}

void write_mini_universe(const std::string& path,
                         std::vector<std::string>& tickers_out) {
    const std::vector<std::pair<std::string, std::vector<std::string>>> sectors = {
        {"Alpha", {"BAKR", "COVE", "DUNE", "FJRD", "GLEN"}},
        {"Bravo", {"HALE", "KNLL", "MESA", "PINE"}},
        {"Charlie", {"REEF", "TARN", "WOLD"}}};
    SectorUniverse u;
    for (const auto& [label, tickers] : sectors) {
        for (const auto& t : tickers) {
            u.assignments[t] = label;
            tickers_out.push_back(t);
        }
    }
    u.meta.sector_count = 3;
    save_universe(u, path);
    std::printf("wrote %s\n", path.c_str());
}

void write_holidays(const std::string& path) {
    const TradingCalendar cal = default_us_calendar();
    std::FILE* f = std::fopen(path.c_str(), "w");
    std::fprintf(f, "# US market holidays, 2010-2018, as observed.\n");
    int year = 0;
    for (const Date& d : cal.holidays) {
        if (d.year() != year) {
            year = d.year();
            std::fprintf(f, "\n# %d\n", year);
        }
        std::fprintf(f, "%s\n", d.iso().c_str());
    }
    std::fclose(f);
    std::printf("wrote %s\n", path.c_str());
}

} // namespace

int main(int argc, char** argv) {
    const std::string outdir = argc > 1 ? argv[1] : "data";

    write_fundamentals(outdir + "/fundamentals.csv");
    write_prices(outdir + "/prices.csv", kTickers, Date::from_ymd(2012, 1, 1),
                 Date::from_ymd(2017, 12, 31), 0x9a11ce5u);
    write_benchmark_universe(outdir + "/benchmark_universe.csv");
    write_universe_362(outdir + "/universe_362.csv");
    write_holidays(outdir + "/holidays_us_2010_2018.txt");

    std::vector<std::string> mini_tickers;
    write_mini_universe(outdir + "/mini_universe.csv", mini_tickers);
    write_prices(outdir + "/mini_prices.csv", mini_tickers, Date::from_ymd(2012, 1, 1),
                 Date::from_ymd(2013, 12, 31), 0x3141592u);
    return 0;
}
