#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace sbmgof {

using NodeId = std::int32_t;

/// Undirected simple graph over nodes [0, n). Neighbor lists are sorted and
/// deduplicated; no self-loops. Immutable after construction.
class AdjacencyMatrix {
public:
    AdjacencyMatrix() = default;

    // Takes unordered pairs; duplicates (in either orientation) collapse.
    // Throws on self-loops or ids outside [0, n).
    AdjacencyMatrix(NodeId n, std::vector<std::pair<NodeId, NodeId>> edges);

    NodeId node_count() const { return n_; }
    std::int64_t edge_count() const { return edge_count_; }

    std::span<const NodeId> neighbors(NodeId i) const {
        return {adj_.data() + offsets_[i], adj_.data() + offsets_[i + 1]};
    }
    NodeId degree(NodeId i) const {
        return static_cast<NodeId>(offsets_[i + 1] - offsets_[i]);
    }
    bool has_edge(NodeId i, NodeId j) const;

    // Unordered edge list, each pair once with first < second, sorted.
    std::vector<std::pair<NodeId, NodeId>> edges() const;

private:
    NodeId n_ = 0;
    std::int64_t edge_count_ = 0;
    std::vector<std::int64_t> offsets_{0};
    std::vector<NodeId> adj_;
};

/// Node-to-community map with communities 0..k-1, each nonempty.
struct Membership {
    std::vector<NodeId> labels;
    int k = 0;

    NodeId node_count() const { return static_cast<NodeId>(labels.size()); }
    NodeId operator[](NodeId i) const { return labels[i]; }

    // Throws unless every label is in [0, k) and every community is nonempty.
    void validate() const;
};

/// Per-community node lists derived from a Membership.
struct BlockIndex {
    std::vector<std::vector<NodeId>> members; // sorted node ids per community
    std::vector<std::int64_t> sizes;

    int k() const { return static_cast<int>(members.size()); }
};

/// Ordered-pair edge counts m_uv and pair counts n_uv per community pair.
/// m_uu is twice the within-block edge count; n_uu = s_u * (s_u - 1).
struct BlockCounts {
    int k = 0;
    std::vector<std::int64_t> m;      // k*k row-major, symmetric
    std::vector<std::int64_t> nPairs; // k*k row-major, symmetric

    std::int64_t edge_endpoints(int u, int v) const { return m[u * k + v]; }
    std::int64_t pair_count(int u, int v) const { return nPairs[u * k + v]; }
};

// --- file ingestion -------------------------------------------------------

// Format: one "i j" pair per line, '#' comment lines allowed, optional first
// line "n=<int>" declaring the node count (for isolated trailing nodes).
// Throws with a line number on malformed input, self-loops, or empty input.
AdjacencyMatrix load_edge_list(std::istream& in);
AdjacencyMatrix load_edge_list_file(const std::string& path); // "-" = stdin
void save_edge_list(const AdjacencyMatrix& a, std::ostream& out);
void save_edge_list_file(const AdjacencyMatrix& a, const std::string& path);

// One community id per line; line number = node id.
Membership load_membership(std::istream& in);
Membership load_membership_file(const std::string& path); // "-" = stdin
void save_membership(const Membership& g, std::ostream& out);
void save_membership_file(const Membership& g, const std::string& path);

// --- block bookkeeping ----------------------------------------------------

// 2|E| / (n(n-1)); requires n >= 2.
double density(const AdjacencyMatrix& a);

// Throws if any community is empty.
BlockIndex block_index(const Membership& g);

// Requires idx consistent with a (labels cover exactly [0, n)).
BlockCounts block_counts(const AdjacencyMatrix& a, const Membership& g,
                         const BlockIndex& idx);

} // namespace sbmgof
