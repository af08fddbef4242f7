#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "sectorlab/data_ingest.hpp"
#include "sectorlab/hca.hpp"

namespace sectorlab {

// Sector labels: NATO phonetic alphabet in descending-size order (ties go to
// the cluster holding the smallest leaf id), extended as Alpha2, Bravo2, ...
// past 26 clusters. The largest sector is therefore always "Alpha".
std::vector<std::string> label_sectors(const std::vector<std::vector<int>>& partition);

std::string sector_label_at(std::size_t index);

struct SearchSpace {
    std::vector<SectorUniverse> universes; // ordered by (linkage, k)
    int k_min = 0;
    int k_max = 0;
};

// One universe per k in [k_min, k_max], cut from an existing tree.
std::vector<SectorUniverse> universes_from_tree(const MergeTree& tree,
                                                const std::vector<std::string>& tickers,
                                                int k_min, int k_max, int year);

// Full candidate search space: every linkage crossed with every k. The
// default k range 5..19 over four linkages yields 60 universes.
SearchSpace generate_search_space(const FeatureMatrix& features,
                                  const std::vector<std::string>& tickers,
                                  int k_min, int k_max, int year);

struct TransitionTable {
    std::map<std::pair<std::string, std::string>, int> flows; // (from,to) -> count
    std::vector<std::string> missing_from_source; // in `to` only
    std::vector<std::string> missing_from_target; // in `from` only

    int total() const;
};

// Cross-universe sector flows over the ticker intersection (Sankey data).
TransitionTable transitions(const SectorUniverse& from, const SectorUniverse& to);

void save_transitions(const TransitionTable& t, const std::string& path);

// "<linkage>_<k>.csv"
std::string universe_filename(Linkage linkage, int k);

} // namespace sectorlab
