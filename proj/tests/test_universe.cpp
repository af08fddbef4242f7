#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "sectorlab/csv.hpp"
#include "sectorlab/data_ingest.hpp"
#include "sectorlab/universe.hpp"

using namespace sectorlab;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Fixture {
    FeatureMatrix features;
    std::vector<std::string> tickers;
};

Fixture latest_year_features() {
    const auto table =
        load_fundamentals(std::string(SECTORLAB_DATA_DIR) + "/fundamentals.csv");
    const int year = table.latest_year();
    Fixture f;
    for (const auto& rec : table.records) {
        if (rec.fiscal_year != year) continue;
        f.features.rows.emplace_back(rec.features.begin(), rec.features.end());
        f.tickers.push_back(rec.ticker);
    }
    return f;
}

} // namespace

TEST_CASE("sector labels follow descending size with leaf-id tie-break") {
    CHECK(label_sectors({{0, 1, 2}, {3}, {4}}) ==
          std::vector<std::string>{"Alpha", "Bravo", "Charlie"});

    // two clusters of equal size: the one holding leaf 0 wins Alpha
    CHECK(label_sectors({{2, 3}, {0, 1}}) == std::vector<std::string>{"Bravo", "Alpha"});

    // 27 clusters: the 27th label extends numerically
    std::vector<std::vector<int>> many;
    for (int i = 0; i < 27; ++i) many.push_back({i});
    const auto labels = label_sectors(many);
    CHECK(labels[0] == "Alpha");
    CHECK(labels[25] == "Zulu");
    CHECK(labels[26] == "Alpha2");
    CHECK(sector_label_at(27) == "Bravo2");
}

TEST_CASE("universes from tree: counts, singleton cut, nesting") {
    const Fixture f = latest_year_features();
    const auto tree = build_merge_tree(euclidean_distances(f.features), Linkage::ward);

    const auto universes = universes_from_tree(tree, f.tickers, 5, 19, 2017);
    CHECK(universes.size() == 15);
    for (const auto& u : universes) {
        CHECK(u.meta.linkage == "ward");
        CHECK(u.distinct_label_count() == u.meta.sector_count);
        CHECK(u.assignments.size() == f.tickers.size());
    }

    const auto singles =
        universes_from_tree(tree, f.tickers, static_cast<int>(f.tickers.size()),
                            static_cast<int>(f.tickers.size()), 2017);
    REQUIRE(singles.size() == 1);
    CHECK(singles[0].distinct_label_count() == static_cast<int>(f.tickers.size()));

    // coarsening: every k=6 sector maps into exactly one k=5 sector
    const auto& u5 = universes[0];
    const auto& u6 = universes[1];
    std::map<std::string, std::string> fine_to_coarse;
    for (const auto& [ticker, fine_label] : u6.assignments) {
        const auto& coarse_label = u5.assignments.at(ticker);
        const auto it = fine_to_coarse.find(fine_label);
        if (it == fine_to_coarse.end()) {
            fine_to_coarse[fine_label] = coarse_label;
        } else {
            CHECK(it->second == coarse_label);
        }
    }

    CHECK_THROWS_AS(universes_from_tree(tree, {"only", "two"}, 1, 2, 2017), Error);
    CHECK_THROWS_AS(universes_from_tree(tree, f.tickers, 0, 5, 2017), Error);
}

TEST_CASE("search space has exactly linkages x k universes") {
    const Fixture f = latest_year_features();
    const auto space = generate_search_space(f.features, f.tickers, 5, 19, 2017);
    CHECK(space.universes.size() == 60);

    // keyed uniquely by (linkage, k)
    std::set<std::pair<std::string, int>> keys;
    for (const auto& u : space.universes) {
        keys.insert({u.meta.linkage, u.meta.sector_count});
    }
    CHECK(keys.size() == 60);
}

TEST_CASE("regenerated universe files are byte-identical") {
    const Fixture f = latest_year_features();
    const auto tree = build_merge_tree(euclidean_distances(f.features), Linkage::complete);
    const auto universes = universes_from_tree(tree, f.tickers, 7, 7, 2017);
    REQUIRE(universes.size() == 1);

    const std::string a = "/tmp/sectorlab_universe_a.csv";
    const std::string b = "/tmp/sectorlab_universe_b.csv";
    save_universe(universes[0], a);
    save_universe(universes[0], b);
    CHECK(slurp(a) == slurp(b));
    CHECK(!slurp(a).empty());
}

TEST_CASE("universe filename convention") {
    CHECK(universe_filename(Linkage::complete, 17) == "complete_17.csv");
    CHECK(universe_filename(Linkage::single, 5) == "single_5.csv");
}

TEST_CASE("transitions: identity stays on the diagonal") {
    SectorUniverse u;
    u.assignments = {{"A", "x"}, {"B", "x"}, {"C", "y"}};
    const auto t = transitions(u, u);
    CHECK(t.total() == 3);
    CHECK(t.flows.at({"x", "x"}) == 2);
    CHECK(t.flows.at({"y", "y"}) == 1);
    CHECK(t.flows.size() == 2);
    CHECK(t.missing_from_source.empty());
    CHECK(t.missing_from_target.empty());
}

TEST_CASE("transitions: splits and missing tickers") {
    SectorUniverse from, to;
    from.assignments = {{"A", "alpha"}, {"B", "alpha"}};
    to.assignments = {{"A", "x"}, {"B", "y"}, {"Z", "x"}};
    const auto t = transitions(from, to);
    CHECK(t.flows.at({"alpha", "x"}) == 1);
    CHECK(t.flows.at({"alpha", "y"}) == 1);
    CHECK(t.total() == 2);
    REQUIRE(t.missing_from_source.size() == 1);
    CHECK(t.missing_from_source[0] == "Z");

    SectorUniverse disjoint;
    disjoint.assignments = {{"Q", "z"}};
    CHECK_THROWS_AS(transitions(from, disjoint), Error);
}

TEST_CASE("transitions conserve sector sizes over common tickers") {
    // 20-ticker hand fixture: benchmark sectors of size 8, 7, 5
    SectorUniverse bench, learned;
    const std::vector<std::pair<std::string, int>> plan = {{"Fin", 8}, {"Tech", 7}, {"Egy", 5}};
    int serial = 0;
    for (const auto& [label, count] : plan) {
        for (int i = 0; i < count; ++i) {
            const std::string ticker = "T" + std::to_string(serial);
            bench.assignments[ticker] = label;
            learned.assignments[ticker] = (serial % 2 == 0) ? "Alpha" : "Bravo";
            ++serial;
        }
    }
    const auto t = transitions(bench, learned);
    CHECK(t.total() == 20);

    for (const auto& [label, count] : plan) {
        int row_sum = 0;
        for (const auto& [pair, flow] : t.flows) {
            if (pair.first == label) row_sum += flow;
        }
        CHECK(row_sum == count);
    }

    const std::string path = "/tmp/sectorlab_transitions.csv";
    save_transitions(t, path);
    const auto parsed = csv::read_file(path);
    int total = 0;
    for (const auto& row : parsed.rows) total += csv::parse_int(row[2], "count");
    CHECK(total == 20);
}

TEST_CASE("benchmark vs learned transitions on the bundled dataset") {
    const auto bench =
        load_universe(std::string(SECTORLAB_DATA_DIR) + "/benchmark_universe.csv");
    const Fixture f = latest_year_features();
    const auto tree = build_merge_tree(euclidean_distances(f.features), Linkage::single);
    const auto learned = universes_from_tree(tree, f.tickers, 5, 5, 2017)[0];
    const auto t = transitions(bench, learned);
    CHECK(t.total() == 40);
}
