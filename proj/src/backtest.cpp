#include "sectorlab/backtest.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "sectorlab/csv.hpp"

namespace sectorlab {

ShareMode share_mode_from_name(const std::string& name) {
    if (name == "integer") return ShareMode::integer_shares;
    if (name == "fractional") return ShareMode::fractional;
    throw Error("unknown share mode '" + name + "' (expected integer|fractional)");
}

std::string share_mode_name(ShareMode mode) {
    return mode == ShareMode::integer_shares ? "integer" : "fractional";
}

void BacktestConfig::validate() const {
    if (!(start < end)) {
        throw Error("backtest window invalid: start " + start.iso() + " not before end " +
                    end.iso());
    }
    if (!(starting_capital > 0.0)) throw Error("starting capital must be positive");
    if (lookback < 2) throw Error("lookback must be at least 2 trading days");
    if (sharpe_window < 2) throw Error("sharpe window must be at least 2 trading days");
}

FlatWeights flatten_weights(const std::vector<SyntheticEtf>& etfs,
                            std::span<const double> omega) {
    if (omega.size() != etfs.size()) {
        throw Error("flatten_weights: " + std::to_string(omega.size()) +
                    " portfolio weights for " + std::to_string(etfs.size()) + " sectors");
    }
    FlatWeights flat;
    std::set<std::string> seen;
    for (std::size_t s = 0; s < etfs.size(); ++s) {
        const auto& etf = etfs[s];
        for (std::size_t c = 0; c < etf.constituents.size(); ++c) {
            if (!seen.insert(etf.constituents[c]).second) {
                throw Error("flatten_weights: ticker " + etf.constituents[c] +
                            " appears in more than one sector");
            }
            flat.tickers.push_back(etf.constituents[c]);
            flat.gamma.push_back(etf.weights[c] * omega[s]);
        }
    }
    return flat;
}

ShareOrders to_share_orders(std::span<const double> value_weights, double portfolio_value,
                            std::span<const double> prices,
                            std::span<const double> current_shares, ShareMode mode) {
    const std::size_t n = value_weights.size();
    if (prices.size() != n || current_shares.size() != n) {
        throw Error("to_share_orders: vector length mismatch");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!(prices[i] > 0.0)) {
            throw Error("to_share_orders: non-positive price at index " + std::to_string(i));
        }
    }

    ShareOrders orders;
    orders.target_shares.resize(n);
    orders.deltas.resize(n);
    double invested = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double exact = value_weights[i] * portfolio_value / prices[i];
        const double target =
            mode == ShareMode::integer_shares ? std::floor(exact) : exact;
        orders.target_shares[i] = target;
        orders.deltas[i] = target - current_shares[i];
        invested += target * prices[i];
    }
    orders.residual_cash = portfolio_value - invested;
    if (mode == ShareMode::fractional) orders.residual_cash = 0.0;
    return orders;
}

std::vector<std::optional<double>> rolling_sharpe(std::span<const double> values,
                                                  int window, double risk_free_rate) {
    if (window < 2) throw Error("rolling_sharpe: window must be at least 2");
    const std::size_t n = values.size();
    std::vector<std::optional<double>> out(n);
    const int r_count = window - 1; // log-returns inside a window of `window` values
    if (r_count < 2) return out;    // stdev needs at least two return observations

    for (std::size_t t = static_cast<std::size_t>(window - 1); t < n; ++t) {
        double mean = 0.0;
        for (int k = 0; k < r_count; ++k) {
            const std::size_t hi = t - static_cast<std::size_t>(k);
            mean += std::log(values[hi] / values[hi - 1]);
        }
        mean /= static_cast<double>(r_count);
        double var = 0.0;
        for (int k = 0; k < r_count; ++k) {
            const std::size_t hi = t - static_cast<std::size_t>(k);
            const double diff = std::log(values[hi] / values[hi - 1]) - mean;
            var += diff * diff;
        }
        var /= static_cast<double>(r_count - 1);
        const double sigma = std::sqrt(var) * std::sqrt(252.0);
        if (sigma == 0.0) continue;
        const double annual_return = mean * 252.0;
        out[t] = (annual_return - risk_free_rate) / sigma;
    }
    return out;
}

namespace {

struct SectorState {
    SyntheticEtf etf;
    std::vector<std::size_t> price_cols; // index into the price table per constituent
};

} // namespace

BacktestLedger run_backtest(const SectorUniverse& universe, const PriceTable& prices,
                            const BacktestConfig& cfg, const TradingCalendar& cal) {
    cfg.validate();

    BacktestLedger ledger;

    // Sector membership, restricted to tickers present in the price table.
    std::map<std::string, std::vector<std::string>> members; // label -> tickers (sorted)
    for (const auto& [ticker, label] : universe.assignments) {
        if (!prices.ticker_index(ticker)) {
            ledger.warnings.push_back("ticker " + ticker +
                                      " missing from price data; dropped from backtest");
            continue;
        }
        members[label].push_back(ticker);
    }
    if (members.empty()) {
        throw Error("no universe ticker has price data; nothing to backtest");
    }

    std::vector<SectorState> sectors;
    for (const auto& [label, tickers] : members) { // map order: labels sorted
        SectorState s;
        s.etf.sector_label = label;
        s.etf.constituents = tickers;
        s.etf.weights.assign(tickers.size(), 0.0);
        for (const auto& t : tickers) s.price_cols.push_back(*prices.ticker_index(t));
        sectors.push_back(std::move(s));
        ledger.sector_labels.push_back(label);
    }
    const std::size_t n_sectors = sectors.size();

    // Ticker column order for the ledger: sector order, then constituent order.
    std::vector<std::size_t> ledger_price_cols;
    for (const auto& s : sectors) {
        for (std::size_t c = 0; c < s.etf.constituents.size(); ++c) {
            ledger.tickers.push_back(s.etf.constituents[c]);
            ledger_price_cols.push_back(s.price_cols[c]);
        }
    }
    const std::size_t n_tickers = ledger.tickers.size();

    const std::vector<Date> days = trading_days(cal, cfg.start, cfg.end);
    if (days.empty()) throw Error("backtest window contains no trading days");
    if (prices.dates.empty() || prices.dates.front() > days.front()) {
        throw Error("insufficient price history: price data begins " +
                    (prices.dates.empty() ? std::string("never")
                                          : prices.dates.front().iso()) +
                    ", window starts trading " + days.front().iso());
    }
    if (prices.dates.back() < days.back()) {
        throw Error("price data ends " + prices.dates.back().iso() +
                    " before window end " + days.back().iso());
    }

    auto schedule = [&](TriggerRule rule) {
        return rule == TriggerRule::third_friday
                   ? third_friday_schedule(cal, cfg.start, cfg.end, &ledger.warnings)
                   : first_trading_day_schedule(cal, cfg.start, cfg.end, &ledger.warnings);
    };
    const std::vector<Date> restructure_days = schedule(cfg.restructure_trigger);
    const std::vector<Date> rebalance_days = schedule(cfg.rebalance_trigger);
    const std::set<Date> restructure_set(restructure_days.begin(), restructure_days.end());
    const std::set<Date> rebalance_set(rebalance_days.begin(), rebalance_days.end());

    // Simulation state.
    std::vector<std::optional<double>> filled(prices.tickers.size()); // forward-fill
    std::size_t price_row = 0;
    std::vector<double> shares(n_tickers, 0.0);
    double cash = cfg.starting_capital;
    std::vector<double> omega; // empty until the first rebalance
    double cum_setf_turnover = 0.0;
    double cum_rebal_turnover = 0.0;
    bool restructured_once = false;
    bool rebalanced_once = false;

    ledger.rows.reserve(days.size());
    ledger.positions.reserve(days.size());
    ledger.sector_weights.reserve(days.size());
    ledger.etf_prices.reserve(days.size());

    for (std::size_t t = 0; t < days.size(); ++t) {
        const Date today = days[t];

        // Forward-fill prices up to and including today.
        while (price_row < prices.dates.size() && prices.dates[price_row] <= today) {
            for (std::size_t c = 0; c < prices.tickers.size(); ++c) {
                if (prices.cells[price_row][c]) filled[c] = prices.cells[price_row][c];
            }
            ++price_row;
        }

        bool traded_event = false;

        // SETF restructuring. An initial restructure is forced on the first
        // trading day so synthetic prices exist from day 0.
        if (t == 0 || restructure_set.count(today)) {
            double day_turnover = 0.0;
            for (auto& s : sectors) {
                std::vector<std::optional<double>> sector_prices;
                sector_prices.reserve(s.price_cols.size());
                for (std::size_t col : s.price_cols) sector_prices.push_back(filled[col]);

                const std::vector<double> old_weights = s.etf.weights;
                SyntheticEtf updated;
                try {
                    updated = restructure(s.etf, sector_prices, today);
                } catch (const Error& e) {
                    throw Error("restructure failed on " + today.iso() + ": " + e.what());
                }
                if (restructured_once) {
                    for (std::size_t c = 0; c < updated.weights.size(); ++c) {
                        const double delta = std::abs(updated.weights[c] - old_weights[c]);
                        if (delta == 0.0) continue;
                        day_turnover += delta * *sector_prices[c];
                    }
                }
                s.etf = std::move(updated);
            }
            if (restructured_once) cum_setf_turnover += day_turnover;
            restructured_once = true;
            traded_event = true;
        }

        // Record today's synthetic ETF prices with end-of-day active weights.
        std::vector<double> pi_today(n_sectors, 0.0);
        for (std::size_t s = 0; s < n_sectors; ++s) {
            std::vector<std::optional<double>> sector_prices;
            sector_prices.reserve(sectors[s].price_cols.size());
            for (std::size_t col : sectors[s].price_cols) {
                sector_prices.push_back(filled[col]);
            }
            pi_today[s] = etf_price(sectors[s].etf, sector_prices);
        }
        ledger.etf_prices.push_back(pi_today);

        // Portfolio rebalancing, once enough SETF history has accumulated.
        if (rebalance_set.count(today) &&
            t + 1 >= static_cast<std::size_t>(cfg.lookback)) {
            std::vector<std::vector<double>> histories(n_sectors);
            const std::size_t begin = t + 1 - static_cast<std::size_t>(cfg.lookback);
            for (std::size_t s = 0; s < n_sectors; ++s) {
                histories[s].reserve(static_cast<std::size_t>(cfg.lookback));
                for (std::size_t d = begin; d <= t; ++d) {
                    histories[s].push_back(ledger.etf_prices[d][s]);
                }
            }

            PortfolioWeights solved;
            try {
                const CovarianceMatrix cov =
                    log_return_covariance(histories, cfg.lookback, today);
                GmvOptions opts;
                opts.max_iterations = cfg.solver_max_iterations;
                opts.tolerance = cfg.solver_tolerance;
                solved = solve_gmv(cov, opts);
            } catch (const Error& e) {
                throw Error("rebalance failed on " + today.iso() + ": " + e.what());
            }
            if (!solved.report.warning.empty()) {
                ledger.warnings.push_back(today.iso() + ": " + solved.report.warning);
            }
            if (rebalanced_once) {
                cum_rebal_turnover += rebalancing_turnover(omega, solved.omega, pi_today);
            }
            omega = solved.omega;
            rebalanced_once = true;
            traded_event = true;
        }

        // Retarget holdings after any event once portfolio weights exist. The
        // target share count of ticker j in sector i is units * w_j * omega_i
        // with units = V / (sum of flattened weights dotted with prices), so
        // the ledger follows the stale-weight SETF valuation chain.
        if (traded_event && !omega.empty()) {
            double value = cash;
            for (std::size_t j = 0; j < n_tickers; ++j) {
                if (shares[j] != 0.0) value += shares[j] * *filled[ledger_price_cols[j]];
            }

            const FlatWeights flat = flatten_weights(
                [&] {
                    std::vector<SyntheticEtf> etfs;
                    etfs.reserve(n_sectors);
                    for (const auto& s : sectors) etfs.push_back(s.etf);
                    return etfs;
                }(),
                omega);

            std::vector<double> order_prices(n_tickers, 1.0);
            double composite_price = 0.0;
            for (std::size_t j = 0; j < n_tickers; ++j) {
                const auto& p = filled[ledger_price_cols[j]];
                if (p) order_prices[j] = *p;
                composite_price += flat.gamma[j] * (p ? *p : 0.0);
            }
            if (!(composite_price > 0.0)) {
                throw Error("degenerate composite price on " + today.iso());
            }
            std::vector<double> value_weights(n_tickers, 0.0);
            for (std::size_t j = 0; j < n_tickers; ++j) {
                value_weights[j] = flat.gamma[j] * (filled[ledger_price_cols[j]]
                                                        ? *filled[ledger_price_cols[j]]
                                                        : 0.0) /
                                   composite_price;
            }

            const ShareOrders orders = to_share_orders(value_weights, value, order_prices,
                                                       shares, cfg.share_mode);
            shares = orders.target_shares;
            cash = orders.residual_cash;
        }

        // Mark to market.
        double value = cash;
        for (std::size_t j = 0; j < n_tickers; ++j) {
            if (shares[j] != 0.0) value += shares[j] * *filled[ledger_price_cols[j]];
        }

        LedgerRow row;
        row.date = today;
        row.portfolio_value = value;
        row.cash = cash;
        row.cum_setf_turnover = cum_setf_turnover;
        row.cum_rebal_turnover = cum_rebal_turnover;
        ledger.rows.push_back(row);
        ledger.positions.push_back(shares);
        ledger.sector_weights.push_back(omega.empty() ? std::vector<double>(n_sectors, 0.0)
                                                      : omega);
    }

    if (!rebalanced_once) {
        ledger.warnings.push_back(
            "no rebalance executed: the window holds fewer than lookback (" +
            std::to_string(cfg.lookback) + ") trading days before the last trigger");
    }

    // Rolling Sharpe over the completed value series.
    std::vector<double> values;
    values.reserve(ledger.rows.size());
    for (const auto& row : ledger.rows) values.push_back(row.portfolio_value);
    const auto sharpe = rolling_sharpe(values, cfg.sharpe_window, cfg.risk_free_rate);
    for (std::size_t t = 0; t < ledger.rows.size(); ++t) {
        ledger.rows[t].rolling_sharpe = sharpe[t];
    }

    return ledger;
}

void save_ledger_csv(const BacktestLedger& ledger, const std::string& path) {
    csv::Writer w(path);
    w.row({"date", "portfolio_value", "cash", "cum_setf_turnover", "cum_rebal_turnover",
           "rolling_sharpe"});
    for (const auto& row : ledger.rows) {
        w.row({row.date.iso(), csv::format_double(row.portfolio_value),
               csv::format_double(row.cash), csv::format_double(row.cum_setf_turnover),
               csv::format_double(row.cum_rebal_turnover),
               row.rolling_sharpe ? csv::format_double(*row.rolling_sharpe) : ""});
    }
    w.close();
}

void save_positions_csv(const BacktestLedger& ledger, const std::string& path) {
    csv::Writer w(path);
    w.row({"date", "ticker", "shares"});
    for (std::size_t t = 0; t < ledger.rows.size(); ++t) {
        for (std::size_t j = 0; j < ledger.tickers.size(); ++j) {
            if (ledger.positions[t][j] == 0.0) continue;
            w.row({ledger.rows[t].date.iso(), ledger.tickers[j],
                   csv::format_double(ledger.positions[t][j])});
        }
    }
    w.close();
}

void save_weights_csv(const BacktestLedger& ledger, const std::string& path) {
    csv::Writer w(path);
    w.row({"date", "sector_label", "weight"});
    for (std::size_t t = 0; t < ledger.rows.size(); ++t) {
        for (std::size_t s = 0; s < ledger.sector_labels.size(); ++s) {
            w.row({ledger.rows[t].date.iso(), ledger.sector_labels[s],
                   csv::format_double(ledger.sector_weights[t][s])});
        }
    }
    w.close();
}

BacktestLedger load_ledger_csv(const std::string& path) {
    const csv::Table t = csv::read_file(path);
    const std::vector<std::string> expected = {"date", "portfolio_value", "cash",
                                               "cum_setf_turnover", "cum_rebal_turnover",
                                               "rolling_sharpe"};
    if (t.header != expected) {
        throw Error("unexpected ledger header in " + path);
    }
    BacktestLedger ledger;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        if (row.size() != expected.size()) {
            throw Error("ledger row at line " + std::to_string(t.line_numbers[r]) +
                        " malformed in " + path);
        }
        LedgerRow lr;
        lr.date = Date::parse_iso(row[0]);
        lr.portfolio_value = csv::parse_double(row[1], "portfolio_value " + row[0]);
        lr.cash = csv::parse_double(row[2], "cash " + row[0]);
        lr.cum_setf_turnover = csv::parse_double(row[3], "cum_setf_turnover " + row[0]);
        lr.cum_rebal_turnover = csv::parse_double(row[4], "cum_rebal_turnover " + row[0]);
        if (!row[5].empty()) {
            lr.rolling_sharpe = csv::parse_double(row[5], "rolling_sharpe " + row[0]);
        }
        ledger.rows.push_back(lr);
    }
    if (ledger.rows.empty()) throw Error("ledger file has no rows: " + path);
    return ledger;
}

} // namespace sectorlab
