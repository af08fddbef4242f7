#include "sectorlab/universe.hpp"

#include <algorithm>
#include <set>

#include "sectorlab/csv.hpp"

namespace sectorlab {

namespace {

constexpr std::array<std::string_view, 26> kNatoAlphabet = {
    "Alpha",   "Bravo",   "Charlie", "Delta",  "Echo",    "Foxtrot", "Golf",
    "Hotel",   "India",   "Juliett", "Kilo",   "Lima",    "Mike",    "November",
    "Oscar",   "Papa",    "Quebec",  "Romeo",  "Sierra",  "Tango",   "Uniform",
    "Victor",  "Whiskey", "Xray",    "Yankee", "Zulu"};

} // namespace

std::string sector_label_at(std::size_t index) {
    const std::string base{kNatoAlphabet[index % kNatoAlphabet.size()]};
    const std::size_t round = index / kNatoAlphabet.size();
    if (round == 0) return base;
    return base + std::to_string(round + 1);
}

std::vector<std::string> label_sectors(const std::vector<std::vector<int>>& partition) {
    std::vector<std::size_t> order(partition.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (partition[a].size() != partition[b].size()) {
            return partition[a].size() > partition[b].size();
        }
        // cut() keeps leaf lists ascending, so front() is the smallest id
        return partition[a].front() < partition[b].front();
    });

    std::vector<std::string> labels(partition.size());
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        labels[order[rank]] = sector_label_at(rank);
    }
    return labels;
}

std::vector<SectorUniverse> universes_from_tree(const MergeTree& tree,
                                                const std::vector<std::string>& tickers,
                                                int k_min, int k_max, int year) {
    if (tickers.size() != tree.n_leaves) {
        throw Error("ticker list size " + std::to_string(tickers.size()) +
                    " does not match tree leaf count " + std::to_string(tree.n_leaves));
    }
    if (k_min < 1 || k_max > static_cast<int>(tree.n_leaves) || k_min > k_max) {
        throw Error("k range [" + std::to_string(k_min) + ", " + std::to_string(k_max) +
                    "] out of bounds for " + std::to_string(tree.n_leaves) + " leaves");
    }

    std::vector<SectorUniverse> out;
    out.reserve(static_cast<std::size_t>(k_max - k_min + 1));
    for (int k = k_min; k <= k_max; ++k) {
        const auto partition = cut(tree, static_cast<std::size_t>(k));
        const auto labels = label_sectors(partition);
        SectorUniverse u;
        u.meta.linkage = linkage_name(tree.linkage);
        u.meta.sector_count = k;
        u.meta.source_year = year;
        for (std::size_t c = 0; c < partition.size(); ++c) {
            for (int leaf : partition[c]) {
                u.assignments[tickers[static_cast<std::size_t>(leaf)]] = labels[c];
            }
        }
        out.push_back(std::move(u));
    }
    return out;
}

SearchSpace generate_search_space(const FeatureMatrix& features,
                                  const std::vector<std::string>& tickers,
                                  int k_min, int k_max, int year) {
    const DistanceMatrix d = euclidean_distances(features);
    SearchSpace space;
    space.k_min = k_min;
    space.k_max = k_max;
    for (Linkage linkage : kAllLinkages) {
        const MergeTree tree = build_merge_tree(d, linkage);
        auto universes = universes_from_tree(tree, tickers, k_min, k_max, year);
        for (auto& u : universes) space.universes.push_back(std::move(u));
    }
    return space;
}

int TransitionTable::total() const {
    int sum = 0;
    for (const auto& [pair, count] : flows) sum += count;
    return sum;
}

TransitionTable transitions(const SectorUniverse& from, const SectorUniverse& to) {
    TransitionTable t;
    for (const auto& [ticker, from_label] : from.assignments) {
        const auto it = to.assignments.find(ticker);
        if (it == to.assignments.end()) {
            t.missing_from_target.push_back(ticker);
            continue;
        }
        t.flows[{from_label, it->second}] += 1;
    }
    for (const auto& [ticker, to_label] : to.assignments) {
        if (!from.assignments.count(ticker)) t.missing_from_source.push_back(ticker);
    }
    if (t.flows.empty()) {
        throw Error("universes share no tickers; transition table would be empty");
    }
    return t;
}

void save_transitions(const TransitionTable& t, const std::string& path) {
    csv::Writer w(path);
    w.row({"from_label", "to_label", "count"});
    for (const auto& [pair, count] : t.flows) {
        w.row({pair.first, pair.second, std::to_string(count)});
    }
    w.close();
}

std::string universe_filename(Linkage linkage, int k) {
    return linkage_name(linkage) + "_" + std::to_string(k) + ".csv";
}

} // namespace sectorlab
