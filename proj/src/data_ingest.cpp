#include "sectorlab/data_ingest.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "sectorlab/csv.hpp"

namespace sectorlab {

std::vector<int> FundamentalsTable::fiscal_years() const {
    std::set<int> years;
    for (const auto& r : records) years.insert(r.fiscal_year);
    return {years.begin(), years.end()};
}

int FundamentalsTable::latest_year() const {
    if (records.empty()) throw Error("fundamentals table is empty");
    int latest = records.front().fiscal_year;
    for (const auto& r : records) latest = std::max(latest, r.fiscal_year);
    return latest;
}

std::optional<std::size_t> PriceTable::ticker_index(const std::string& ticker) const {
    for (std::size_t i = 0; i < tickers.size(); ++i) {
        if (tickers[i] == ticker) return i;
    }
    return std::nullopt;
}

int SectorUniverse::distinct_label_count() const {
    std::set<std::string> labels;
    for (const auto& [ticker, label] : assignments) labels.insert(label);
    return static_cast<int>(labels.size());
}

FundamentalsTable load_fundamentals(const std::string& path) {
    const csv::Table t = csv::read_file(path);

    auto column = [&](const std::string& name) -> std::size_t {
        for (std::size_t i = 0; i < t.header.size(); ++i) {
            if (t.header[i] == name) return i;
        }
        throw Error("fundamentals schema error: missing column '" + name + "' in " + path);
    };

    const std::size_t ticker_col = column("ticker");
    const std::size_t year_col = column("fiscal_year");
    std::array<std::size_t, kFeatureCount> feature_cols{};
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
        feature_cols[f] = column(std::string(kFeatureColumns[f]));
    }

    FundamentalsTable table;
    std::set<std::pair<std::string, int>> seen;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        if (row.size() != t.header.size()) {
            throw Error("fundamentals row at line " + std::to_string(t.line_numbers[r]) +
                        " has " + std::to_string(row.size()) + " fields, expected " +
                        std::to_string(t.header.size()));
        }
        FundamentalsRecord rec;
        rec.ticker = row[ticker_col];
        if (rec.ticker.empty()) {
            throw Error("empty ticker at line " + std::to_string(t.line_numbers[r]));
        }
        rec.fiscal_year = csv::parse_int(row[year_col], "fiscal_year, ticker " + rec.ticker);
        for (std::size_t f = 0; f < kFeatureCount; ++f) {
            const std::string context = std::string(kFeatureColumns[f]) + ", ticker " +
                                        rec.ticker + ", year " +
                                        std::to_string(rec.fiscal_year);
            rec.features[f] = csv::parse_double(row[feature_cols[f]], context);
            if (!std::isfinite(rec.features[f])) {
                throw Error("non-finite value in " + context);
            }
        }
        if (!seen.insert({rec.ticker, rec.fiscal_year}).second) {
            throw Error("duplicate (ticker, fiscal_year): " + rec.ticker + ", " +
                        std::to_string(rec.fiscal_year));
        }
        table.records.push_back(std::move(rec));
    }
    return table;
}

void save_fundamentals(const FundamentalsTable& table, const std::string& path) {
    csv::Writer w(path);
    std::vector<std::string> header = {"ticker", "fiscal_year"};
    for (auto col : kFeatureColumns) header.emplace_back(col);
    w.row(header);
    for (const auto& rec : table.records) {
        std::vector<std::string> row = {rec.ticker, std::to_string(rec.fiscal_year)};
        for (double v : rec.features) row.push_back(csv::format_double(v));
        w.row(row);
    }
    w.close();
}

PriceTable load_prices(const std::string& path) {
    const csv::Table t = csv::read_file(path);
    if (t.header.empty() || t.header[0] != "date") {
        throw Error("prices file must start with a 'date' column: " + path);
    }

    PriceTable pt;
    pt.tickers.assign(t.header.begin() + 1, t.header.end());
    for (const auto& tk : pt.tickers) {
        if (tk.empty()) throw Error("empty ticker column name in " + path);
    }

    std::vector<std::pair<Date, std::vector<std::optional<double>>>> parsed;
    parsed.reserve(t.rows.size());
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        if (row.size() != t.header.size()) {
            throw Error("price row at line " + std::to_string(t.line_numbers[r]) +
                        " has " + std::to_string(row.size()) + " fields, expected " +
                        std::to_string(t.header.size()));
        }
        const Date d = Date::parse_iso(row[0]);
        std::vector<std::optional<double>> prices(pt.tickers.size());
        for (std::size_t c = 0; c < pt.tickers.size(); ++c) {
            const std::string& cell = row[c + 1];
            if (cell.empty()) continue; // gap, resolved later by the backtest
            const double p = csv::parse_double(
                cell, "price, ticker " + pt.tickers[c] + ", date " + row[0]);
            if (!(p > 0.0)) {
                throw Error("non-positive price " + cell + " for ticker " +
                            pt.tickers[c] + " on " + row[0]);
            }
            prices[c] = p;
        }
        parsed.emplace_back(d, std::move(prices));
    }

    std::stable_sort(parsed.begin(), parsed.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& [date, prices] : parsed) {
        if (!pt.dates.empty() && pt.dates.back() == date) {
            throw Error("duplicate price row for date " + date.iso());
        }
        pt.dates.push_back(date);
        pt.cells.push_back(std::move(prices));
    }
    return pt;
}

namespace {

// Recover (linkage, k) from a "<linkage>_<k>.csv" basename if it matches.
void infer_meta_from_filename(const std::string& path, SectorUniverse::Meta& meta) {
    std::string base = path;
    if (auto pos = base.find_last_of("/\\"); pos != std::string::npos) {
        base = base.substr(pos + 1);
    }
    if (base.size() > 4 && base.substr(base.size() - 4) == ".csv") {
        base = base.substr(0, base.size() - 4);
    }
    const auto underscore = base.find('_');
    if (underscore == std::string::npos) return;
    const std::string linkage = base.substr(0, underscore);
    const std::string k_text = base.substr(underscore + 1);
    if (linkage != "single" && linkage != "complete" && linkage != "average" &&
        linkage != "ward") {
        return;
    }
    if (k_text.empty() ||
        !std::all_of(k_text.begin(), k_text.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        return;
    }
    meta.linkage = linkage;
    meta.sector_count = std::stoi(k_text);
}

} // namespace

SectorUniverse load_universe(const std::string& path) {
    const csv::Table t = csv::read_file(path);

    std::optional<std::size_t> ticker_col, bench_col, learned_col;
    for (std::size_t i = 0; i < t.header.size(); ++i) {
        if (t.header[i] == "ticker") ticker_col = i;
        if (t.header[i] == "benchmark_sector") bench_col = i;
        if (t.header[i] == "learned_sector") learned_col = i;
    }
    if (!ticker_col) throw Error("universe file missing 'ticker' column: " + path);
    if (!bench_col && !learned_col) {
        throw Error("universe file needs a 'benchmark_sector' or 'learned_sector' column: " + path);
    }
    const std::size_t label_col = learned_col ? *learned_col : *bench_col;

    SectorUniverse u;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        if (row.size() != t.header.size()) {
            throw Error("universe row at line " + std::to_string(t.line_numbers[r]) +
                        " has " + std::to_string(row.size()) + " fields, expected " +
                        std::to_string(t.header.size()));
        }
        const std::string ticker = row[*ticker_col];
        const std::string label = row[label_col];
        if (ticker.empty()) {
            throw Error("empty ticker at line " + std::to_string(t.line_numbers[r]));
        }
        if (label.empty()) {
            throw Error("empty sector label for ticker " + ticker + " at line " +
                        std::to_string(t.line_numbers[r]));
        }
        if (u.assignments.count(ticker)) {
            throw Error("duplicate ticker in universe file: " + ticker);
        }
        u.assignments[ticker] = label;
    }

    infer_meta_from_filename(path, u.meta);
    u.meta.sector_count = u.distinct_label_count();
    return u;
}

void save_universe(const SectorUniverse& u, const std::string& path,
                   const SectorUniverse* benchmark) {
    csv::Writer w(path);
    w.row({"ticker", "benchmark_sector", "learned_sector"});
    for (const auto& [ticker, label] : u.assignments) { // map: sorted by ticker
        std::string bench_label = label;
        if (benchmark) {
            const auto it = benchmark->assignments.find(ticker);
            if (it != benchmark->assignments.end()) bench_label = it->second;
        }
        w.row({ticker, bench_label, label});
    }
    w.close();
}

std::map<std::string, int> sector_distribution(const SectorUniverse& u) {
    std::map<std::string, int> counts;
    for (const auto& [ticker, label] : u.assignments) counts[label] += 1;
    return counts;
}

} // namespace sectorlab
