#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sectorlab/backtest.hpp"

namespace sectorlab {

// Identity of a scored universe: a (linkage, k) pair for learned universes,
// or linkage == "benchmark" with k == 0.
struct UniverseKey {
    std::string linkage = "benchmark";
    int k = 0;

    std::string text() const;
    static UniverseKey parse(const std::string& text);

    bool operator==(const UniverseKey&) const = default;
};

struct UniverseScore {
    UniverseKey key;
    double terminal_cum_setf_turnover = 0.0;
    double terminal_cum_rebal_turnover = 0.0;
    double terminal_portfolio_value = 0.0;
    std::optional<double> mean_rolling_sharpe; // mean over days where defined
};

// Terminal metrics from the last ledger row plus the defined-days mean of
// the rolling Sharpe series. With allow_degenerate false (the default) a
// ledger whose Sharpe is undefined on every day raises
// DegenerateUniverseError; with true the score carries an absent mean and
// the universe is later excluded from the Sharpe ranking only.
UniverseScore score(const BacktestLedger& ledger, const UniverseKey& key,
                    bool allow_degenerate = false);

struct MetricWinner {
    UniverseKey key;
    double value = 0.0;
    std::vector<UniverseKey> tied; // additional keys attaining the same value
};

struct RankReport {
    MetricWinner min_setf_turnover;
    MetricWinner min_rebal_turnover;
    MetricWinner max_portfolio_value;
    std::optional<MetricWinner> max_mean_sharpe; // absent if no universe has a mean
    std::vector<std::string> warnings;
};

// Per-metric winners. Exact ties break toward smaller k, then linkage order
// single < complete < average < ward < benchmark, and are reported as ties.
RankReport rank(const std::vector<UniverseScore>& scores);

struct ComparisonReport {
    UniverseKey key_a;
    UniverseKey key_b;
    double delta_setf_turnover = 0.0;   // a - b
    double delta_rebal_turnover = 0.0;  // a - b
    double delta_terminal_value = 0.0;  // a - b
    double delta_mean_sharpe = 0.0;     // a - b (0 when either is undefined)
    double terminal_value_ratio = 1.0;  // a / b
    double outperformance_pct = 0.0;    // (a - b) / starting capital * 100

    std::vector<Date> dates;
    // Aligned per-day series, one pair per metric panel.
    std::vector<double> value_a, value_b;
    std::vector<double> setf_turnover_a, setf_turnover_b;
    std::vector<double> rebal_turnover_a, rebal_turnover_b;
    std::vector<std::optional<double>> sharpe_a, sharpe_b;
};

ComparisonReport compare(const UniverseScore& score_a, const BacktestLedger& ledger_a,
                         const UniverseScore& score_b, const BacktestLedger& ledger_b);

// ranking report CSV: linkage,k,terminal_value,terminal_setf_turnover,
// terminal_rebal_turnover,mean_rolling_sharpe, followed by the winners file.
void save_ranking_csv(const std::vector<UniverseScore>& scores, const std::string& path);
void save_winners_csv(const RankReport& report, const std::string& path);

// One CSV per metric panel: date,<metric>_a,<metric>_b.
void save_comparison_csvs(const ComparisonReport& report, const std::string& directory);

} // namespace sectorlab
