#include "sectorlab/hca.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sectorlab/csv.hpp"

namespace sectorlab {

std::string linkage_name(Linkage l) {
    switch (l) {
        case Linkage::single: return "single";
        case Linkage::complete: return "complete";
        case Linkage::average: return "average";
        case Linkage::ward: return "ward";
    }
    throw Error("unknown linkage enum value");
}

Linkage linkage_from_name(const std::string& name) {
    if (name == "single") return Linkage::single;
    if (name == "complete") return Linkage::complete;
    if (name == "average") return Linkage::average;
    if (name == "ward") return Linkage::ward;
    throw Error("unknown linkage '" + name + "' (expected single|complete|average|ward)");
}

DistanceMatrix euclidean_distances(const FeatureMatrix& m) {
    const std::size_t n = m.rows.size();
    const std::size_t dim = n ? m.rows[0].size() : 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (m.rows[i].size() != dim) {
            throw Error("feature dimension mismatch: row " + std::to_string(i) + " has " +
                        std::to_string(m.rows[i].size()) + " values, expected " +
                        std::to_string(dim));
        }
        for (double v : m.rows[i]) {
            if (!std::isfinite(v)) {
                throw Error("non-finite feature value in row " + std::to_string(i));
            }
        }
    }

    DistanceMatrix d(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double acc = 0.0; // fixed summation order keeps fills bit-deterministic
            for (std::size_t f = 0; f < dim; ++f) {
                const double diff = m.rows[i][f] - m.rows[j][f];
                acc += diff * diff;
            }
            d.set(i, j, std::sqrt(acc));
        }
    }
    return d;
}

MergeTree build_merge_tree(const DistanceMatrix& d, Linkage linkage) {
    const std::size_t n = d.size();
    if (n < 2) {
        throw Error("need at least 2 items to cluster, got " + std::to_string(n));
    }

    // Active-cluster working state, indexed by slot. A merge frees the higher
    // slot and reuses the lower one for the new cluster.
    std::vector<bool> active(n, true);
    std::vector<int> cluster_id(n);       // current cluster id per slot
    std::vector<std::size_t> cluster_size(n, 1);
    std::iota(cluster_id.begin(), cluster_id.end(), 0);

    // Pairwise inter-cluster distances between active slots.
    std::vector<double> dist(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            dist[i * n + j] = d.at(i, j);
        }
    }
    auto dd = [&](std::size_t i, std::size_t j) -> double& { return dist[i * n + j]; };

    MergeTree tree;
    tree.n_leaves = n;
    tree.linkage = linkage;
    tree.merges.reserve(n - 1);

    for (std::size_t step = 0; step + 1 < n; ++step) {
        // Nearest active pair; ties break on smallest (min id, max id).
        double best = std::numeric_limits<double>::infinity();
        std::size_t bi = 0, bj = 0;
        int best_lo = 0, best_hi = 0;
        bool found = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (!active[i]) continue;
            for (std::size_t j = i + 1; j < n; ++j) {
                if (!active[j]) continue;
                const double v = dd(i, j);
                const int lo = std::min(cluster_id[i], cluster_id[j]);
                const int hi = std::max(cluster_id[i], cluster_id[j]);
                if (!found || v < best ||
                    (v == best && (lo < best_lo || (lo == best_lo && hi < best_hi)))) {
                    best = v;
                    bi = i;
                    bj = j;
                    best_lo = lo;
                    best_hi = hi;
                    found = true;
                }
            }
        }

        const std::size_t size_x = cluster_size[bi];
        const std::size_t size_y = cluster_size[bj];
        const double d_xy = dd(bi, bj);

        Merge m;
        m.left = best_lo;
        m.right = best_hi;
        m.height = best;
        m.new_id = static_cast<int>(n + step);
        tree.merges.push_back(m);

        // Lance-Williams update of distances from the merged cluster C = X u Y
        // to every other active cluster A.
        for (std::size_t a = 0; a < n; ++a) {
            if (!active[a] || a == bi || a == bj) continue;
            const double d_ax = dd(a, bi);
            const double d_ay = dd(a, bj);
            double updated = 0.0;
            switch (linkage) {
                case Linkage::single:
                    updated = std::min(d_ax, d_ay);
                    break;
                case Linkage::complete:
                    updated = std::max(d_ax, d_ay);
                    break;
                case Linkage::average: {
                    const double wx = static_cast<double>(size_x);
                    const double wy = static_cast<double>(size_y);
                    updated = (wx * d_ax + wy * d_ay) / (wx + wy);
                    break;
                }
                case Linkage::ward: {
                    const double na = static_cast<double>(cluster_size[a]);
                    const double nx = static_cast<double>(size_x);
                    const double ny = static_cast<double>(size_y);
                    const double total = na + nx + ny;
                    const double sq = ((na + nx) / total) * d_ax * d_ax +
                                      ((na + ny) / total) * d_ay * d_ay -
                                      (na / total) * d_xy * d_xy;
                    updated = std::sqrt(std::max(sq, 0.0));
                    break;
                }
            }
            dd(a, bi) = updated;
            dd(bi, a) = updated;
        }

        active[bj] = false;
        cluster_id[bi] = m.new_id;
        cluster_size[bi] = size_x + size_y;
    }

    return tree;
}

std::vector<std::vector<int>> cut(const MergeTree& tree, std::size_t k) {
    const std::size_t n = tree.n_leaves;
    if (k < 1 || k > n) {
        throw Error("cut arity " + std::to_string(k) + " out of range [1, " +
                    std::to_string(n) + "]");
    }

    // Union-find over the first n - k merges. Cluster ids >= n map to the
    // merge that created them.
    std::vector<int> parent(2 * n - 1);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };

    const std::size_t applied = n - k;
    for (std::size_t t = 0; t < applied; ++t) {
        const Merge& m = tree.merges[t];
        parent[find(m.left)] = m.new_id;
        parent[find(m.right)] = m.new_id;
    }

    // Group leaves by root, ordered by smallest contained leaf.
    std::vector<int> root_order; // roots in order of first (= smallest) leaf
    std::vector<int> root_slot(2 * n - 1, -1);
    std::vector<std::vector<int>> clusters;
    for (std::size_t leaf = 0; leaf < n; ++leaf) {
        const int r = find(static_cast<int>(leaf));
        if (root_slot[r] < 0) {
            root_slot[r] = static_cast<int>(clusters.size());
            clusters.emplace_back();
        }
        clusters[root_slot[r]].push_back(static_cast<int>(leaf));
    }
    return clusters;
}

void save_merge_tree(const MergeTree& tree, const std::string& path) {
    csv::Writer w(path);
    w.row({"step", "left_id", "right_id", "height", "new_id"});
    for (std::size_t t = 0; t < tree.merges.size(); ++t) {
        const Merge& m = tree.merges[t];
        w.row({std::to_string(t), std::to_string(m.left), std::to_string(m.right),
               csv::format_double(m.height), std::to_string(m.new_id)});
    }
    w.close();
}

} // namespace sectorlab
