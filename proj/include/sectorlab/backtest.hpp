#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sectorlab/calendar.hpp"
#include "sectorlab/data_ingest.hpp"
#include "sectorlab/date.hpp"
#include "sectorlab/optimizer.hpp"
#include "sectorlab/setf.hpp"

namespace sectorlab {

enum class ShareMode { integer_shares, fractional };
enum class TriggerRule { third_friday, first_trading_day };

ShareMode share_mode_from_name(const std::string& name);
std::string share_mode_name(ShareMode mode);

struct BacktestConfig {
    Date start;
    Date end;
    double starting_capital = 10'000'000'000.0;
    TriggerRule restructure_trigger = TriggerRule::third_friday;
    TriggerRule rebalance_trigger = TriggerRule::first_trading_day;
    int lookback = 126;          // trading days of SETF history for covariance
    ShareMode share_mode = ShareMode::integer_shares;
    double risk_free_rate = 0.0; // annualized
    int sharpe_window = 63;      // trading days per rolling Sharpe window
    int solver_max_iterations = 5000;
    double solver_tolerance = 1e-10;

    void validate() const;
};

struct LedgerRow {
    Date date;
    double portfolio_value = 0.0;
    double cash = 0.0;
    double cum_setf_turnover = 0.0;
    double cum_rebal_turnover = 0.0;
    std::optional<double> rolling_sharpe;
};

struct BacktestLedger {
    std::vector<LedgerRow> rows;               // one per trading day
    std::vector<std::string> tickers;          // column order for positions
    std::vector<std::vector<double>> positions; // [day][ticker] shares held
    std::vector<std::string> sector_labels;     // column order for weights
    std::vector<std::vector<double>> sector_weights; // [day][sector] active omega
    std::vector<std::vector<double>> etf_prices;     // [day][sector] synthetic price
    std::vector<std::string> warnings;
};

// Daily event-driven simulation of one sector universe. Each trading day:
// forward-fill prices; on a restructure trigger recompute SETF weights and
// accrue restructuring turnover; record synthetic ETF prices; on a rebalance
// trigger (once `lookback` SETF observations exist) estimate the log-return
// covariance, solve the long-only GMV portfolio and accrue rebalancing
// turnover; retarget share holdings after any event; mark to market.
//
// Holdings track the stale-weight SETF valuation chain exactly: the target
// share count of each asset is proportional to its flattened weight, so the
// ledger value follows units * sum_i sum_j w_j * P_j * omega_i between
// events (exactly in fractional mode, within rounding residual otherwise).
BacktestLedger run_backtest(const SectorUniverse& universe, const PriceTable& prices,
                            const BacktestConfig& cfg, const TradingCalendar& cal);

// Per-ticker flattened weights gamma = w_i(ticker) * omega_i. Requires every
// ticker to live in exactly one sector; the result sums to 1 whenever omega
// and every per-sector w do.
struct FlatWeights {
    std::vector<std::string> tickers;
    std::vector<double> gamma;
};
FlatWeights flatten_weights(const std::vector<SyntheticEtf>& etfs,
                            std::span<const double> omega);

// Convert target value weights into share targets. Integer mode floors
// gamma*V/price per ticker and accumulates the remainder as cash; fractional
// mode holds exact real shares with zero residual.
struct ShareOrders {
    std::vector<double> target_shares;
    std::vector<double> deltas; // target - current
    double residual_cash = 0.0;
};
ShareOrders to_share_orders(std::span<const double> value_weights, double portfolio_value,
                            std::span<const double> prices,
                            std::span<const double> current_shares, ShareMode mode);

// Trailing-window annualized Sharpe ratio of a daily value series. A window
// of `window` value observations (window-1 log-returns) ends at each day;
// absent for the first window-1 days and whenever the return stdev is zero.
// Annualization: mean * 252 over stdev * sqrt(252).
std::vector<std::optional<double>> rolling_sharpe(std::span<const double> values,
                                                  int window, double risk_free_rate);

void save_ledger_csv(const BacktestLedger& ledger, const std::string& path);
void save_positions_csv(const BacktestLedger& ledger, const std::string& path);
void save_weights_csv(const BacktestLedger& ledger, const std::string& path);

// Minimal reader for ledger CSVs produced by save_ledger_csv (used by the
// ranking subcommands).
BacktestLedger load_ledger_csv(const std::string& path);

} // namespace sectorlab
