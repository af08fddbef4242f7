// sectorlab command line: derive learned sector universes from company
// fundamentals by hierarchical clustering, backtest synthetic-ETF portfolios
// of those universes under a long-only minimum-variance allocation, and rank
// or compare the results.
//
// Exit codes: 0 success, 1 runtime error, 2 usage error.

#include <CLI11.hpp>

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include "sectorlab/backtest.hpp"
#include "sectorlab/calendar.hpp"
#include "sectorlab/csv.hpp"
#include "sectorlab/data_ingest.hpp"
#include "sectorlab/hca.hpp"
#include "sectorlab/optimizer.hpp"
#include "sectorlab/ranking.hpp"
#include "sectorlab/universe.hpp"

namespace fs = std::filesystem;
using namespace sectorlab;

namespace {

struct BacktestFlags {
    std::string prices_path;
    std::string holidays_path;
    std::string start = "2012-01-01";
    std::string end = "2017-12-31";
    double capital = 10'000'000'000.0;
    int lookback = 126;
    std::string share_mode = "integer";
    double risk_free_rate = 0.0;
    int sharpe_window = 63;
    int jobs = 1;
    bool dump_etf_prices = false;
    bool dump_solve_trace = false;
};

BacktestConfig to_config(const BacktestFlags& flags) {
    BacktestConfig cfg;
    cfg.start = Date::parse_iso(flags.start);
    cfg.end = Date::parse_iso(flags.end);
    cfg.starting_capital = flags.capital;
    cfg.lookback = flags.lookback;
    cfg.share_mode = share_mode_from_name(flags.share_mode);
    cfg.risk_free_rate = flags.risk_free_rate;
    cfg.sharpe_window = flags.sharpe_window;
    cfg.validate();
    return cfg;
}

TradingCalendar calendar_for(const BacktestFlags& flags) {
    return flags.holidays_path.empty() ? default_us_calendar()
                                       : load_holidays(flags.holidays_path);
}

void ensure_outdir(const std::string& out) {
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw Error("cannot create output directory " + out + ": " + ec.message());
}

// Every run leaves a key=value record in the output directory that is enough
// to reproduce it with --config.
void echo_config(const std::string& out, const std::string& command,
                 const std::vector<std::pair<std::string, std::string>>& entries) {
    std::ofstream f(out + "/effective_config.cfg");
    f << "# effective configuration (" << command << ")\n";
    for (const auto& [key, value] : entries) f << key << "=" << value << "\n";
}

std::pair<FeatureMatrix, std::vector<std::string>> features_for_year(
    const FundamentalsTable& table, int year) {
    FeatureMatrix fm;
    std::vector<std::string> tickers;
    for (const auto& rec : table.records) {
        if (rec.fiscal_year != year) continue;
        fm.rows.emplace_back(rec.features.begin(), rec.features.end());
        tickers.push_back(rec.ticker);
    }
    if (fm.rows.empty()) {
        throw Error("no fundamentals records for fiscal year " + std::to_string(year));
    }
    return {std::move(fm), std::move(tickers)};
}

int resolve_year(const FundamentalsTable& table, int year_flag) {
    return year_flag > 0 ? year_flag : table.latest_year();
}

void run_one_backtest(const SectorUniverse& universe, const std::string& name,
                      const PriceTable& prices, const BacktestConfig& cfg,
                      const TradingCalendar& cal, const std::string& out,
                      const BacktestFlags& flags) {
    BacktestLedger ledger = run_backtest(universe, prices, cfg, cal);
    for (const auto& w : ledger.warnings) {
        std::cerr << "warning [" << name << "]: " << w << "\n";
    }

    // Write through a temp name so a crash never leaves half a ledger behind.
    auto commit = [&](const std::string& suffix,
                      const std::function<void(const std::string&)>& writer) {
        const std::string final_path = out + "/" + name + suffix;
        const std::string tmp_path = final_path + ".tmp";
        writer(tmp_path);
        fs::rename(tmp_path, final_path);
    };
    commit("_ledger.csv", [&](const std::string& p) { save_ledger_csv(ledger, p); });
    commit("_positions.csv", [&](const std::string& p) { save_positions_csv(ledger, p); });
    commit("_weights.csv", [&](const std::string& p) { save_weights_csv(ledger, p); });
    if (flags.dump_etf_prices) {
        commit("_etf_prices.csv", [&](const std::string& p) {
            std::vector<Date> dates;
            for (const auto& row : ledger.rows) dates.push_back(row.date);
            save_etf_prices(dates, ledger.sector_labels, ledger.etf_prices, p);
        });
    }
}

std::string universe_name_from_path(const std::string& path) {
    std::string base = fs::path(path).filename().string();
    if (base.size() > 4 && base.substr(base.size() - 4) == ".csv") {
        base = base.substr(0, base.size() - 4);
    }
    return base;
}

int cmd_cluster(const std::string& fundamentals_path, const std::string& linkage_name_flag,
                int year_flag, const std::string& out) {
    const auto table = load_fundamentals(fundamentals_path);
    const int year = resolve_year(table, year_flag);
    const auto [features, tickers] = features_for_year(table, year);
    const Linkage linkage = linkage_from_name(linkage_name_flag);

    ensure_outdir(out);
    const MergeTree tree = build_merge_tree(euclidean_distances(features), linkage);
    const std::string dump =
        out + "/dendrogram_" + linkage_name_flag + "_" + std::to_string(year) + ".csv";
    save_merge_tree(tree, dump);

    // leaf id -> ticker mapping alongside the dendrogram
    csv::Writer w(out + "/leaves_" + linkage_name_flag + "_" + std::to_string(year) +
                  ".csv");
    w.row({"leaf_id", "ticker"});
    for (std::size_t i = 0; i < tickers.size(); ++i) {
        w.row({std::to_string(i), tickers[i]});
    }
    w.close();

    echo_config(out, "cluster",
                {{"fundamentals", fundamentals_path},
                 {"linkage", linkage_name_flag},
                 {"year", std::to_string(year)},
                 {"out", out}});
    std::cout << "wrote " << dump << " (" << tree.merges.size() << " merges)\n";
    return 0;
}

int cmd_universes(const std::string& fundamentals_path, int k_min, int k_max,
                  int year_flag, const std::string& benchmark_path,
                  const std::string& out, bool all_years) {
    const auto table = load_fundamentals(fundamentals_path);
    ensure_outdir(out);

    SectorUniverse benchmark;
    const SectorUniverse* benchmark_ptr = nullptr;
    if (!benchmark_path.empty()) {
        benchmark = load_universe(benchmark_path);
        benchmark_ptr = &benchmark;
    }

    std::vector<int> years;
    if (all_years) {
        years = table.fiscal_years();
    } else {
        years.push_back(resolve_year(table, year_flag));
    }

    int files = 0;
    for (int year : years) {
        const auto [features, tickers] = features_for_year(table, year);
        const SearchSpace space =
            generate_search_space(features, tickers, k_min, k_max, year);
        const std::string year_dir =
            all_years ? out + "/" + std::to_string(year) : out;
        ensure_outdir(year_dir);
        for (const auto& u : space.universes) {
            const std::string path =
                year_dir + "/" +
                universe_filename(linkage_from_name(u.meta.linkage), u.meta.sector_count);
            save_universe(u, path, benchmark_ptr);
            ++files;
        }
    }

    echo_config(out, "universes",
                {{"fundamentals", fundamentals_path},
                 {"k_min", std::to_string(k_min)},
                 {"k_max", std::to_string(k_max)},
                 {"year", all_years ? std::string("all") : std::to_string(years[0])},
                 {"benchmark", benchmark_path},
                 {"out", out}});
    std::cout << "wrote " << files << " universe files to " << out << "\n";
    return 0;
}

int cmd_backtest(const std::vector<std::string>& universe_paths,
                 const BacktestFlags& flags, const std::string& out) {
    const BacktestConfig cfg = to_config(flags);
    const TradingCalendar cal = calendar_for(flags);
    const PriceTable prices = load_prices(flags.prices_path);
    ensure_outdir(out);

    // expand directories into their universe CSVs
    std::vector<std::string> paths;
    for (const auto& p : universe_paths) {
        if (fs::is_directory(p)) {
            std::vector<std::string> found;
            for (const auto& entry : fs::directory_iterator(p)) {
                if (entry.path().extension() == ".csv") {
                    found.push_back(entry.path().string());
                }
            }
            std::sort(found.begin(), found.end());
            paths.insert(paths.end(), found.begin(), found.end());
        } else {
            paths.push_back(p);
        }
    }
    if (paths.empty()) throw Error("no universe files given");

    const int jobs = std::max(1, flags.jobs);
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::vector<std::string> errors;
    auto worker = [&] {
        for (;;) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= paths.size()) return;
            try {
                const SectorUniverse u = load_universe(paths[idx]);
                run_one_backtest(u, universe_name_from_path(paths[idx]), prices, cfg, cal,
                                 out, flags);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(error_mutex);
                errors.push_back(paths[idx] + ": " + e.what());
            }
        }
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (!errors.empty()) {
        for (const auto& e : errors) std::cerr << "error: " << e << "\n";
        return 1;
    }

    echo_config(out, "backtest",
                {{"prices", flags.prices_path},
                 {"holidays", flags.holidays_path},
                 {"start", flags.start},
                 {"end", flags.end},
                 {"capital", csv::format_double(flags.capital)},
                 {"lookback", std::to_string(flags.lookback)},
                 {"share_mode", flags.share_mode},
                 {"risk_free_rate", csv::format_double(flags.risk_free_rate)},
                 {"sharpe_window", std::to_string(flags.sharpe_window)},
                 {"jobs", std::to_string(flags.jobs)},
                 {"out", out}});
    std::cout << "backtested " << paths.size() << " universe(s) into " << out << "\n";
    return 0;
}

int cmd_rank(const std::string& ledger_dir, const std::string& out) {
    std::vector<std::string> ledgers;
    for (const auto& entry : fs::directory_iterator(ledger_dir)) {
        const std::string name = entry.path().filename().string();
        if (name.size() > 11 && name.substr(name.size() - 11) == "_ledger.csv") {
            ledgers.push_back(entry.path().string());
        }
    }
    std::sort(ledgers.begin(), ledgers.end());
    if (ledgers.empty()) throw Error("no *_ledger.csv files in " + ledger_dir);

    std::vector<UniverseScore> scores;
    for (const auto& path : ledgers) {
        std::string key_text = fs::path(path).filename().string();
        key_text = key_text.substr(0, key_text.size() - 11);
        UniverseKey key;
        try {
            key = UniverseKey::parse(key_text);
        } catch (const Error&) {
            key = UniverseKey{key_text, 0}; // not linkage_k named; keep the stem
        }
        const BacktestLedger ledger = load_ledger_csv(path);
        scores.push_back(score(ledger, key, /*allow_degenerate=*/true));
    }

    // Deterministic report order: linkage, then k.
    std::sort(scores.begin(), scores.end(), [](const auto& a, const auto& b) {
        if (a.key.linkage != b.key.linkage) return a.key.linkage < b.key.linkage;
        return a.key.k < b.key.k;
    });

    ensure_outdir(out);
    const RankReport report = rank(scores);
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
    save_ranking_csv(scores, out + "/ranking_report.csv");
    save_winners_csv(report, out + "/winners.csv");
    echo_config(out, "rank", {{"ledgers", ledger_dir}, {"out", out}});

    std::cout << "min cumulative SETF turnover:   " << report.min_setf_turnover.key.text()
              << "\n";
    std::cout << "min cumulative rebal turnover:  " << report.min_rebal_turnover.key.text()
              << "\n";
    std::cout << "max terminal portfolio value:   "
              << report.max_portfolio_value.key.text() << "\n";
    if (report.max_mean_sharpe) {
        std::cout << "max mean rolling Sharpe:        "
                  << report.max_mean_sharpe->key.text() << "\n";
    }
    return 0;
}

int cmd_compare(const std::string& ledger_a, const std::string& ledger_b,
                const std::string& out) {
    const BacktestLedger a = load_ledger_csv(ledger_a);
    const BacktestLedger b = load_ledger_csv(ledger_b);
    auto key_of = [](const std::string& path) {
        std::string name = fs::path(path).filename().string();
        if (name.size() > 11 && name.substr(name.size() - 11) == "_ledger.csv") {
            name = name.substr(0, name.size() - 11);
        }
        try {
            return UniverseKey::parse(name);
        } catch (const Error&) {
            return UniverseKey{name, 0};
        }
    };
    const auto sa = score(a, key_of(ledger_a), /*allow_degenerate=*/true);
    const auto sb = score(b, key_of(ledger_b), /*allow_degenerate=*/true);

    ensure_outdir(out);
    const ComparisonReport report = compare(sa, a, sb, b);
    save_comparison_csvs(report, out);
    echo_config(out, "compare", {{"a", ledger_a}, {"b", ledger_b}, {"out", out}});

    std::printf("terminal value ratio a/b: %.6f\n", report.terminal_value_ratio);
    std::printf("outperformance: %.2f%% of starting capital\n", report.outperformance_pct);
    return 0;
}

int cmd_transitions(const std::string& from_path, const std::string& to_path,
                    const std::string& out) {
    const SectorUniverse from = load_universe(from_path);
    const SectorUniverse to = load_universe(to_path);
    const TransitionTable table = transitions(from, to);
    ensure_outdir(out);
    save_transitions(table, out + "/transitions.csv");
    echo_config(out, "transitions", {{"from", from_path}, {"to", to_path}, {"out", out}});
    std::cout << "wrote " << out << "/transitions.csv (" << table.total()
              << " tickers in common";
    if (!table.missing_from_target.empty() || !table.missing_from_source.empty()) {
        std::cout << "; " << table.missing_from_target.size() << " only in from, "
                  << table.missing_from_source.size() << " only in to";
    }
    std::cout << ")\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"learned market-sector universes: clustering, synthetic-ETF "
                 "backtesting, ranking"};
    app.require_subcommand(1);
    app.fallthrough(); // global options remain valid after the subcommand name
    app.set_config("--config", "", "key=value configuration file");

    std::string out = "out";
    app.add_option("--out", out, "output directory")->capture_default_str();

    // cluster
    auto* cluster = app.add_subcommand("cluster", "build a merge tree and dump it");
    std::string fundamentals_path, linkage_flag = "ward";
    int year_flag = 0;
    cluster->add_option("--fundamentals", fundamentals_path, "fundamentals CSV")
        ->required();
    cluster->add_option("--linkage", linkage_flag, "single|complete|average|ward")
        ->check(CLI::IsMember({"single", "complete", "average", "ward"}))
        ->capture_default_str();
    cluster->add_option("--year", year_flag, "fiscal year (default: latest)");

    // universes
    auto* universes = app.add_subcommand("universes", "generate the candidate universes");
    int k_min = 5, k_max = 19;
    std::string benchmark_path;
    bool all_years = false;
    universes->add_option("--fundamentals", fundamentals_path, "fundamentals CSV")
        ->required();
    universes->add_option("--k-min", k_min, "smallest sector count")
        ->capture_default_str();
    universes->add_option("--k-max", k_max, "largest sector count")->capture_default_str();
    universes->add_option("--year", year_flag, "fiscal year (default: latest)");
    universes->add_option("--benchmark", benchmark_path,
                          "benchmark universe CSV for the benchmark_sector column");
    universes->add_flag("--all-years", all_years, "generate per-year universe sets");

    // backtest
    auto* backtest = app.add_subcommand("backtest", "backtest universe file(s)");
    std::vector<std::string> universe_paths;
    BacktestFlags flags;
    backtest->add_option("--universe", universe_paths, "universe CSV file(s) or directory")
        ->required();
    backtest->add_option("--prices", flags.prices_path, "daily price CSV")->required();
    backtest->add_option("--holidays", flags.holidays_path,
                         "holiday file (default: bundled US list)");
    backtest->add_option("--start", flags.start, "window start")->capture_default_str();
    backtest->add_option("--end", flags.end, "window end")->capture_default_str();
    backtest->add_option("--capital", flags.capital, "starting capital")
        ->capture_default_str();
    backtest->add_option("--lookback", flags.lookback, "covariance lookback, trading days")
        ->capture_default_str();
    backtest->add_option("--share-mode", flags.share_mode, "integer|fractional")
        ->check(CLI::IsMember({"integer", "fractional"}))
        ->capture_default_str();
    backtest->add_option("--risk-free-rate", flags.risk_free_rate, "annualized r_f")
        ->capture_default_str();
    backtest
        ->add_option("--sharpe-window", flags.sharpe_window,
                     "rolling Sharpe window, trading days")
        ->capture_default_str();
    backtest->add_option("--jobs", flags.jobs, "parallel backtest workers")
        ->capture_default_str();
    backtest->add_flag("--dump-etf-prices", flags.dump_etf_prices,
                       "also write per-sector synthetic price series");

    // rank
    auto* rank_cmd = app.add_subcommand("rank", "rank backtested universes");
    std::string ledger_dir;
    rank_cmd->add_option("--ledgers", ledger_dir, "directory of *_ledger.csv")->required();

    // compare
    auto* compare_cmd = app.add_subcommand("compare", "compare two backtests");
    std::string ledger_a, ledger_b;
    compare_cmd->add_option("--a", ledger_a, "ledger CSV of universe A")->required();
    compare_cmd->add_option("--b", ledger_b, "ledger CSV of universe B")->required();

    // transitions
    auto* transitions_cmd =
        app.add_subcommand("transitions", "sector flows between two universes");
    std::string from_path, to_path;
    transitions_cmd->add_option("--from", from_path, "source universe CSV")->required();
    transitions_cmd->add_option("--to", to_path, "target universe CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (cluster->parsed()) {
            return cmd_cluster(fundamentals_path, linkage_flag, year_flag, out);
        }
        if (universes->parsed()) {
            return cmd_universes(fundamentals_path, k_min, k_max, year_flag,
                                 benchmark_path, out, all_years);
        }
        if (backtest->parsed()) return cmd_backtest(universe_paths, flags, out);
        if (rank_cmd->parsed()) return cmd_rank(ledger_dir, out);
        if (compare_cmd->parsed()) return cmd_compare(ledger_a, ledger_b, out);
        if (transitions_cmd->parsed()) return cmd_transitions(from_path, to_path, out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
