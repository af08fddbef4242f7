#pragma once

#include <array>
#include <string>
#include <vector>

#include "sectorlab/error.hpp"

namespace sectorlab {

enum class Linkage { single, complete, average, ward };

std::string linkage_name(Linkage l);
Linkage linkage_from_name(const std::string& name);
inline constexpr std::array<Linkage, 4> kAllLinkages = {
    Linkage::single, Linkage::complete, Linkage::average, Linkage::ward};

// Row-per-item feature matrix. Rows must share one dimension; the dimension
// itself is not fixed so small geometric test cases work unchanged.
struct FeatureMatrix {
    std::vector<std::vector<double>> rows;

    std::size_t size() const { return rows.size(); }
};

// Symmetric pairwise l2 distances, zero diagonal. Stored dense; the intended
// problem sizes (a few hundred companies) make anything fancier pointless.
class DistanceMatrix {
public:
    DistanceMatrix() = default;
    explicit DistanceMatrix(std::size_t n) : n_(n), d_(n * n, 0.0) {}

    std::size_t size() const { return n_; }
    double at(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }
    void set(std::size_t i, std::size_t j, double v) {
        d_[i * n_ + j] = v;
        d_[j * n_ + i] = v;
    }

private:
    std::size_t n_ = 0;
    std::vector<double> d_;
};

// One agglomerative merge. Leaves are ids 0..n-1; merge t creates id n+t.
struct Merge {
    int left = 0;   // smaller cluster id
    int right = 0;  // larger cluster id
    double height = 0.0;
    int new_id = 0;
};

struct MergeTree {
    std::size_t n_leaves = 0;
    std::vector<Merge> merges; // n_leaves - 1 entries, heights non-decreasing
    Linkage linkage = Linkage::single;
};

DistanceMatrix euclidean_distances(const FeatureMatrix& m);

// Bottom-up agglomeration: repeatedly merge the pair of active clusters at
// minimal linkage distance. Inter-cluster distances are maintained by the
// Lance-Williams update for the chosen linkage; Ward distances are seeded
// with the raw euclidean distances between singletons. Ties on the minimal
// distance break toward the lexicographically smallest (min id, max id).
MergeTree build_merge_tree(const DistanceMatrix& d, Linkage linkage);

// Partition after applying the first n_leaves - k merges. Each cluster's
// leaf list is ascending and clusters are ordered by smallest member, so the
// result is a canonical form independent of merge bookkeeping.
std::vector<std::vector<int>> cut(const MergeTree& tree, std::size_t k);

// Dendrogram dump, one merge per row: step,left_id,right_id,height,new_id.
void save_merge_tree(const MergeTree& tree, const std::string& path);

} // namespace sectorlab
