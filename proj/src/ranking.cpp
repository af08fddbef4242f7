#include "sectorlab/ranking.hpp"

#include <algorithm>
#include <cmath>

#include "sectorlab/csv.hpp"

namespace sectorlab {

std::string UniverseKey::text() const {
    if (linkage == "benchmark") return "benchmark";
    return linkage + "_" + std::to_string(k);
}

UniverseKey UniverseKey::parse(const std::string& text) {
    UniverseKey key;
    if (text == "benchmark") return key;
    const auto underscore = text.find('_');
    if (underscore == std::string::npos) {
        throw Error("cannot parse universe key '" + text + "'");
    }
    key.linkage = text.substr(0, underscore);
    key.k = csv::parse_int(text.substr(underscore + 1), "universe key " + text);
    return key;
}

UniverseScore score(const BacktestLedger& ledger, const UniverseKey& key,
                    bool allow_degenerate) {
    if (ledger.rows.empty()) {
        throw Error("cannot score an empty ledger (" + key.text() + ")");
    }
    UniverseScore s;
    s.key = key;
    const LedgerRow& last = ledger.rows.back();
    s.terminal_cum_setf_turnover = last.cum_setf_turnover;
    s.terminal_cum_rebal_turnover = last.cum_rebal_turnover;
    s.terminal_portfolio_value = last.portfolio_value;

    double sum = 0.0;
    int defined = 0;
    for (const auto& row : ledger.rows) {
        if (row.rolling_sharpe) {
            sum += *row.rolling_sharpe;
            ++defined;
        }
    }
    if (defined > 0) {
        s.mean_rolling_sharpe = sum / static_cast<double>(defined);
    } else if (!allow_degenerate) {
        throw DegenerateUniverseError("universe " + key.text() +
                                      " has no defined rolling Sharpe days");
    }
    return s;
}

namespace {

int linkage_rank(const std::string& linkage) {
    if (linkage == "single") return 0;
    if (linkage == "complete") return 1;
    if (linkage == "average") return 2;
    if (linkage == "ward") return 3;
    return 4; // benchmark and anything else sort last
}

bool key_before(const UniverseKey& a, const UniverseKey& b) {
    if (a.k != b.k) return a.k < b.k;
    return linkage_rank(a.linkage) < linkage_rank(b.linkage);
}

template <typename Value>
MetricWinner pick_winner(const std::vector<UniverseScore>& scores, Value value,
                         bool minimize) {
    MetricWinner winner;
    bool first = true;
    for (const auto& s : scores) {
        const double v = value(s);
        const bool better = minimize ? v < winner.value : v > winner.value;
        if (first || better) {
            winner.key = s.key;
            winner.value = v;
            winner.tied.clear();
            first = false;
        } else if (v == winner.value) {
            if (key_before(s.key, winner.key)) {
                winner.tied.push_back(winner.key);
                winner.key = s.key;
            } else {
                winner.tied.push_back(s.key);
            }
        }
    }
    return winner;
}

} // namespace

RankReport rank(const std::vector<UniverseScore>& scores) {
    if (scores.empty()) throw Error("rank: no scores given");

    RankReport report;
    report.min_setf_turnover = pick_winner(
        scores, [](const UniverseScore& s) { return s.terminal_cum_setf_turnover; }, true);
    report.min_rebal_turnover = pick_winner(
        scores, [](const UniverseScore& s) { return s.terminal_cum_rebal_turnover; }, true);
    report.max_portfolio_value = pick_winner(
        scores, [](const UniverseScore& s) { return s.terminal_portfolio_value; }, false);

    std::vector<UniverseScore> with_sharpe;
    for (const auto& s : scores) {
        if (s.mean_rolling_sharpe) {
            with_sharpe.push_back(s);
        } else {
            report.warnings.push_back("universe " + s.key.text() +
                                      " excluded from Sharpe ranking (no defined days)");
        }
    }
    if (!with_sharpe.empty()) {
        report.max_mean_sharpe = pick_winner(
            with_sharpe, [](const UniverseScore& s) { return *s.mean_rolling_sharpe; },
            false);
    }
    return report;
}

ComparisonReport compare(const UniverseScore& score_a, const BacktestLedger& ledger_a,
                         const UniverseScore& score_b, const BacktestLedger& ledger_b) {
    if (ledger_a.rows.size() != ledger_b.rows.size()) {
        throw Error("comparison window mismatch: " + std::to_string(ledger_a.rows.size()) +
                    " vs " + std::to_string(ledger_b.rows.size()) + " trading days");
    }
    for (std::size_t t = 0; t < ledger_a.rows.size(); ++t) {
        if (ledger_a.rows[t].date != ledger_b.rows[t].date) {
            throw Error("comparison window mismatch on day " + std::to_string(t) + ": " +
                        ledger_a.rows[t].date.iso() + " vs " + ledger_b.rows[t].date.iso());
        }
    }

    ComparisonReport r;
    r.key_a = score_a.key;
    r.key_b = score_b.key;
    r.delta_setf_turnover =
        score_a.terminal_cum_setf_turnover - score_b.terminal_cum_setf_turnover;
    r.delta_rebal_turnover =
        score_a.terminal_cum_rebal_turnover - score_b.terminal_cum_rebal_turnover;
    r.delta_terminal_value =
        score_a.terminal_portfolio_value - score_b.terminal_portfolio_value;
    if (score_a.mean_rolling_sharpe && score_b.mean_rolling_sharpe) {
        r.delta_mean_sharpe = *score_a.mean_rolling_sharpe - *score_b.mean_rolling_sharpe;
    }
    r.terminal_value_ratio =
        score_a.terminal_portfolio_value / score_b.terminal_portfolio_value;

    // Outperformance expressed against the common starting capital, read off
    // the first ledger day (the portfolio is fully in cash at the start).
    const double capital = ledger_b.rows.front().portfolio_value;
    r.outperformance_pct = (score_a.terminal_portfolio_value -
                            score_b.terminal_portfolio_value) /
                           capital * 100.0;

    for (std::size_t t = 0; t < ledger_a.rows.size(); ++t) {
        r.dates.push_back(ledger_a.rows[t].date);
        r.value_a.push_back(ledger_a.rows[t].portfolio_value);
        r.value_b.push_back(ledger_b.rows[t].portfolio_value);
        r.setf_turnover_a.push_back(ledger_a.rows[t].cum_setf_turnover);
        r.setf_turnover_b.push_back(ledger_b.rows[t].cum_setf_turnover);
        r.rebal_turnover_a.push_back(ledger_a.rows[t].cum_rebal_turnover);
        r.rebal_turnover_b.push_back(ledger_b.rows[t].cum_rebal_turnover);
        r.sharpe_a.push_back(ledger_a.rows[t].rolling_sharpe);
        r.sharpe_b.push_back(ledger_b.rows[t].rolling_sharpe);
    }
    return r;
}

void save_ranking_csv(const std::vector<UniverseScore>& scores, const std::string& path) {
    csv::Writer w(path);
    w.row({"linkage", "k", "terminal_value", "terminal_setf_turnover",
           "terminal_rebal_turnover", "mean_rolling_sharpe"});
    for (const auto& s : scores) {
        w.row({s.key.linkage, std::to_string(s.key.k),
               csv::format_double(s.terminal_portfolio_value),
               csv::format_double(s.terminal_cum_setf_turnover),
               csv::format_double(s.terminal_cum_rebal_turnover),
               s.mean_rolling_sharpe ? csv::format_double(*s.mean_rolling_sharpe) : ""});
    }
    w.close();
}

void save_winners_csv(const RankReport& report, const std::string& path) {
    csv::Writer w(path);
    w.row({"metric", "winner", "value", "ties"});
    auto row = [&](const std::string& metric, const MetricWinner& winner) {
        std::string ties;
        for (const auto& k : winner.tied) {
            if (!ties.empty()) ties += ';';
            ties += k.text();
        }
        w.row({metric, winner.key.text(), csv::format_double(winner.value), ties});
    };
    row("min_cum_setf_turnover", report.min_setf_turnover);
    row("min_cum_rebal_turnover", report.min_rebal_turnover);
    row("max_terminal_value", report.max_portfolio_value);
    if (report.max_mean_sharpe) row("max_mean_rolling_sharpe", *report.max_mean_sharpe);
    w.close();
}

void save_comparison_csvs(const ComparisonReport& report, const std::string& directory) {
    auto write_panel = [&](const std::string& name, const std::vector<double>& a,
                           const std::vector<double>& b) {
        csv::Writer w(directory + "/compare_" + name + ".csv");
        w.row({"date", name + "_a", name + "_b"});
        for (std::size_t t = 0; t < report.dates.size(); ++t) {
            w.row({report.dates[t].iso(), csv::format_double(a[t]),
                   csv::format_double(b[t])});
        }
        w.close();
    };
    write_panel("setf_turnover", report.setf_turnover_a, report.setf_turnover_b);
    write_panel("rebal_turnover", report.rebal_turnover_a, report.rebal_turnover_b);
    write_panel("portfolio_value", report.value_a, report.value_b);

    csv::Writer w(directory + "/compare_rolling_sharpe.csv");
    w.row({"date", "rolling_sharpe_a", "rolling_sharpe_b"});
    for (std::size_t t = 0; t < report.dates.size(); ++t) {
        w.row({report.dates[t].iso(),
               report.sharpe_a[t] ? csv::format_double(*report.sharpe_a[t]) : "",
               report.sharpe_b[t] ? csv::format_double(*report.sharpe_b[t]) : ""});
    }
    w.close();

    csv::Writer s(directory + "/compare_summary.csv");
    s.row({"field", "value"});
    s.row({"universe_a", report.key_a.text()});
    s.row({"universe_b", report.key_b.text()});
    s.row({"delta_setf_turnover", csv::format_double(report.delta_setf_turnover)});
    s.row({"delta_rebal_turnover", csv::format_double(report.delta_rebal_turnover)});
    s.row({"delta_terminal_value", csv::format_double(report.delta_terminal_value)});
    s.row({"delta_mean_sharpe", csv::format_double(report.delta_mean_sharpe)});
    s.row({"terminal_value_ratio", csv::format_double(report.terminal_value_ratio)});
    s.row({"outperformance_pct", csv::format_double(report.outperformance_pct)});
    s.close();
}

} // namespace sectorlab
