#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sbmgof/graph.hpp"

namespace sbmgof {

/// Symmetric K x K matrix of connection probabilities.
struct BlockProbabilityMatrix {
    int k = 0;
    std::vector<double> p; // k*k row-major

    BlockProbabilityMatrix() = default;
    BlockProbabilityMatrix(int k_, double fill) : k(k_), p(static_cast<std::size_t>(k_) * k_, fill) {}

    double operator()(int u, int v) const { return p[u * k + v]; }
    double& at(int u, int v) { return p[u * k + v]; }

    // Throws unless symmetric with entries in [0, 1].
    void validate() const;
};

struct SbmSpec {
    BlockProbabilityMatrix q;
    Membership g;
    std::uint64_t seed = 0;
};

// JSON document {"k":..., "sizes":[...], "q":[[...]], "seed":...}; membership
// assigns the first sizes[0] nodes to community 0 and so on.
SbmSpec parse_sbm_spec_json(const std::string& text);

// Draws each unordered pair {i, j} as an independent Bernoulli(Q_{g(i)g(j)}).
// The draw for a pair comes from a stream keyed by (seed, i, j), so the result
// is a pure function of the spec regardless of iteration order.
AdjacencyMatrix generate_sbm(const SbmSpec& spec);

struct AugmentedGraph {
    AdjacencyMatrix graph;      // original edges plus new-community edges
    Membership membership;      // g0 with the new label k0 appended
    NodeId added_nodes = 0;     // size of the appended community
    double self_probability = 0;  // max_u qhat_uu
    double cross_probability = 0; // min_{u != v} qhat_uv / 2
};

// Appends a community of floor(min_u |g0^-1(u)| / 2) nodes. The new block
// self-connects with max_u qhat_uu; new-to-old edges use min_{u!=v} qhat_uv/2.
// Edges among the original nodes are preserved exactly. Throws when k0 == 1
// (no off-diagonal minimum) or when the new community would have < 3 nodes.
AugmentedGraph augment(const AdjacencyMatrix& a, const Membership& g0,
                       const BlockProbabilityMatrix& qhat, std::uint64_t seed);

} // namespace sbmgof
