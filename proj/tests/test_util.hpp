#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "sbmgof/graph.hpp"
#include "sbmgof/rng.hpp"
#include "sbmgof/sbm.hpp"

namespace sbmgof::testutil {

// Erdos-Renyi style graph for property tests.
inline AdjacencyMatrix random_graph(NodeId n, double p, std::uint64_t seed) {
    rng::Stream stream(rng::mix(seed));
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (NodeId i = 0; i < n; ++i)
        for (NodeId j = i + 1; j < n; ++j)
            if (stream.next_unit() < p) edges.emplace_back(i, j);
    return AdjacencyMatrix(n, std::move(edges));
}

// Random surjective membership with every community of size >= 2.
inline Membership random_membership(NodeId n, int k, std::uint64_t seed) {
    rng::Stream stream(rng::mix(seed) + 1);
    Membership g;
    g.k = k;
    g.labels.resize(static_cast<std::size_t>(n));
    for (;;) {
        for (NodeId i = 0; i < n; ++i)
            g.labels[i] = static_cast<NodeId>(stream.next_below(static_cast<std::uint64_t>(k)));
        std::vector<int> sizes(static_cast<std::size_t>(k), 0);
        for (NodeId lab : g.labels) ++sizes[lab];
        bool ok = true;
        for (int s : sizes) ok = ok && s >= 2;
        if (ok) return g;
    }
}

inline Membership blocks_of(std::vector<std::pair<int, NodeId>> sizes_by_label) {
    Membership g;
    g.k = static_cast<int>(sizes_by_label.size());
    for (auto [label, count] : sizes_by_label)
        g.labels.insert(g.labels.end(), static_cast<std::size_t>(count),
                        static_cast<NodeId>(label));
    return g;
}

// Fraction of nodes on which two partitions agree under the best label
// matching (exact over all permutations for small k, greedy otherwise).
inline double partition_agreement(const Membership& a, const Membership& b) {
    const int k = std::max(a.k, b.k);
    const auto n = a.node_count();
    std::vector<std::int64_t> confusion(static_cast<std::size_t>(k) * k, 0);
    for (NodeId i = 0; i < n; ++i) ++confusion[a.labels[i] * k + b.labels[i]];
    std::int64_t best = 0;
    if (k <= 8) {
        std::vector<int> perm(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) perm[i] = i;
        do {
            std::int64_t hits = 0;
            for (int u = 0; u < k; ++u) hits += confusion[u * k + perm[u]];
            best = std::max(best, hits);
        } while (std::next_permutation(perm.begin(), perm.end()));
    } else {
        std::vector<char> used(static_cast<std::size_t>(k), 0);
        for (int u = 0; u < k; ++u) {
            int pick = -1;
            std::int64_t pick_hits = -1;
            for (int v = 0; v < k; ++v)
                if (!used[v] && confusion[u * k + v] > pick_hits) {
                    pick_hits = confusion[u * k + v];
                    pick = v;
                }
            used[pick] = 1;
            best += pick_hits;
        }
    }
    return static_cast<double>(best) / static_cast<double>(n);
}

} // namespace sbmgof::testutil
