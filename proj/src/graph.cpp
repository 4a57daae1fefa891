#include "sbmgof/graph.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace sbmgof {

AdjacencyMatrix::AdjacencyMatrix(NodeId n, std::vector<std::pair<NodeId, NodeId>> edges)
    : n_(n) {
    if (n < 0) throw std::invalid_argument("node count must be nonnegative");
    for (auto& [i, j] : edges) {
        if (i == j) throw std::invalid_argument("self-loop on node " + std::to_string(i));
        if (i < 0 || j < 0 || i >= n || j >= n)
            throw std::invalid_argument("edge endpoint out of range: " + std::to_string(i) +
                                        " " + std::to_string(j));
        if (i > j) std::swap(i, j);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    edge_count_ = static_cast<std::int64_t>(edges.size());

    std::vector<NodeId> deg(static_cast<std::size_t>(n), 0);
    for (const auto& [i, j] : edges) {
        ++deg[i];
        ++deg[j];
    }
    offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
    for (NodeId i = 0; i < n; ++i) offsets_[i + 1] = offsets_[i] + deg[i];
    adj_.resize(static_cast<std::size_t>(offsets_[n]));
    std::vector<std::int64_t> cursor(offsets_.begin(), offsets_.end() - 1);
    for (const auto& [i, j] : edges) {
        adj_[cursor[i]++] = j;
        adj_[cursor[j]++] = i;
    }
    for (NodeId i = 0; i < n; ++i)
        std::sort(adj_.begin() + offsets_[i], adj_.begin() + offsets_[i + 1]);
}

bool AdjacencyMatrix::has_edge(NodeId i, NodeId j) const {
    const auto nb = neighbors(i);
    return std::binary_search(nb.begin(), nb.end(), j);
}

std::vector<std::pair<NodeId, NodeId>> AdjacencyMatrix::edges() const {
    std::vector<std::pair<NodeId, NodeId>> out;
    out.reserve(static_cast<std::size_t>(edge_count_));
    for (NodeId i = 0; i < n_; ++i)
        for (NodeId j : neighbors(i))
            if (i < j) out.emplace_back(i, j);
    return out;
}

void Membership::validate() const {
    if (k <= 0) throw std::invalid_argument("community count must be positive");
    std::vector<std::int64_t> sizes(static_cast<std::size_t>(k), 0);
    for (NodeId lab : labels) {
        if (lab < 0 || lab >= k)
            throw std::invalid_argument("community id " + std::to_string(lab) +
                                        " outside [0, " + std::to_string(k) + ")");
        ++sizes[lab];
    }
    for (int u = 0; u < k; ++u)
        if (sizes[u] == 0)
            throw std::invalid_argument("community " + std::to_string(u) + " is empty");
}

namespace {

[[noreturn]] void parse_fail(std::int64_t line_no, const std::string& line) {
    throw std::runtime_error("edge list parse error at line " + std::to_string(line_no) +
                             ": \"" + line + "\"");
}

} // namespace

AdjacencyMatrix load_edge_list(std::istream& in) {
    std::string line;
    std::vector<std::pair<NodeId, NodeId>> edges;
    NodeId max_id = -1;
    NodeId declared_n = -1;
    bool saw_content = false;
    std::int64_t line_no = 0;
    bool first_content_line = true;
    while (std::getline(in, line)) {
        ++line_no;
        const auto start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos) continue;
        if (line[start] == '#') continue;
        if (first_content_line && line.compare(start, 2, "n=") == 0) {
            first_content_line = false;
            saw_content = true;
            try {
                declared_n = static_cast<NodeId>(std::stol(line.substr(start + 2)));
            } catch (const std::exception&) {
                parse_fail(line_no, line);
            }
            if (declared_n < 0) parse_fail(line_no, line);
            continue;
        }
        first_content_line = false;
        std::istringstream ss(line);
        long long a = 0, b = 0;
        std::string extra;
        if (!(ss >> a >> b) || (ss >> extra)) parse_fail(line_no, line);
        if (a < 0 || b < 0) parse_fail(line_no, line);
        if (a == b)
            throw std::runtime_error("self-loop at line " + std::to_string(line_no) + ": " +
                                     std::to_string(a));
        saw_content = true;
        edges.emplace_back(static_cast<NodeId>(a), static_cast<NodeId>(b));
        max_id = std::max({max_id, static_cast<NodeId>(a), static_cast<NodeId>(b)});
    }
    if (!saw_content) throw std::runtime_error("empty edge list input");
    NodeId n = max_id + 1;
    if (declared_n >= 0) {
        if (declared_n < n)
            throw std::runtime_error("declared n=" + std::to_string(declared_n) +
                                     " smaller than max node id " + std::to_string(max_id));
        n = declared_n;
    }
    return AdjacencyMatrix(n, std::move(edges));
}

AdjacencyMatrix load_edge_list_file(const std::string& path) {
    if (path == "-") return load_edge_list(std::cin);
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open edge list file: " + path);
    return load_edge_list(in);
}

void save_edge_list(const AdjacencyMatrix& a, std::ostream& out) {
    out << "n=" << a.node_count() << "\n";
    for (NodeId i = 0; i < a.node_count(); ++i)
        for (NodeId j : a.neighbors(i))
            if (i < j) out << i << " " << j << "\n";
}

void save_edge_list_file(const AdjacencyMatrix& a, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write edge list file: " + path);
    save_edge_list(a, out);
}

Membership load_membership(std::istream& in) {
    Membership g;
    std::string line;
    std::int64_t line_no = 0;
    NodeId max_label = -1;
    while (std::getline(in, line)) {
        ++line_no;
        const auto start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos) continue;
        if (line[start] == '#') continue;
        std::istringstream ss(line);
        long long lab = 0;
        std::string extra;
        if (!(ss >> lab) || (ss >> extra) || lab < 0)
            throw std::runtime_error("membership parse error at line " +
                                     std::to_string(line_no) + ": \"" + line + "\"");
        g.labels.push_back(static_cast<NodeId>(lab));
        max_label = std::max(max_label, static_cast<NodeId>(lab));
    }
    if (g.labels.empty()) throw std::runtime_error("empty membership input");
    g.k = max_label + 1;
    g.validate();
    return g;
}

Membership load_membership_file(const std::string& path) {
    if (path == "-") return load_membership(std::cin);
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open membership file: " + path);
    return load_membership(in);
}

void save_membership(const Membership& g, std::ostream& out) {
    for (NodeId lab : g.labels) out << lab << "\n";
}

void save_membership_file(const Membership& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write membership file: " + path);
    save_membership(g, out);
}

double density(const AdjacencyMatrix& a) {
    const auto n = static_cast<double>(a.node_count());
    if (a.node_count() < 2) throw std::invalid_argument("density needs n >= 2");
    return 2.0 * static_cast<double>(a.edge_count()) / (n * (n - 1.0));
}

BlockIndex block_index(const Membership& g) {
    g.validate();
    BlockIndex idx;
    idx.members.resize(static_cast<std::size_t>(g.k));
    idx.sizes.assign(static_cast<std::size_t>(g.k), 0);
    for (NodeId i = 0; i < g.node_count(); ++i) {
        idx.members[g[i]].push_back(i);
        ++idx.sizes[g[i]];
    }
    return idx;
}

BlockCounts block_counts(const AdjacencyMatrix& a, const Membership& g,
                         const BlockIndex& idx) {
    if (g.node_count() != a.node_count())
        throw std::invalid_argument("membership length does not match graph node count");
    const int k = idx.k();
    BlockCounts c;
    c.k = k;
    c.m.assign(static_cast<std::size_t>(k) * k, 0);
    c.nPairs.assign(static_cast<std::size_t>(k) * k, 0);
    for (int u = 0; u < k; ++u)
        for (int v = 0; v < k; ++v)
            c.nPairs[u * k + v] =
                u == v ? idx.sizes[u] * (idx.sizes[u] - 1) : idx.sizes[u] * idx.sizes[v];
    for (NodeId i = 0; i < a.node_count(); ++i) {
        const int u = g[i];
        for (NodeId j : a.neighbors(i)) ++c.m[u * k + g[j]];
    }
    return c;
}

} // namespace sbmgof
