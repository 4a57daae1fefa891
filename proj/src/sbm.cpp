#include "sbmgof/sbm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "sbmgof/rng.hpp"

namespace sbmgof {

void BlockProbabilityMatrix::validate() const {
    if (k <= 0 || p.size() != static_cast<std::size_t>(k) * k)
        throw std::invalid_argument("block probability matrix has wrong shape");
    for (int u = 0; u < k; ++u)
        for (int v = 0; v < k; ++v) {
            const double x = (*this)(u, v);
            if (!(x >= 0.0 && x <= 1.0))
                throw std::invalid_argument("connection probability outside [0,1]");
            if (x != (*this)(v, u))
                throw std::invalid_argument("block probability matrix not symmetric");
        }
}

SbmSpec parse_sbm_spec_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("invalid SBM spec JSON: ") + e.what());
    }
    SbmSpec spec;
    try {
        const int k = j.at("k").get<int>();
        const auto sizes = j.at("sizes").get<std::vector<std::int64_t>>();
        const auto q = j.at("q").get<std::vector<std::vector<double>>>();
        spec.seed = j.value("seed", std::uint64_t{0});
        if (k <= 0) throw std::invalid_argument("k must be positive");
        if (static_cast<int>(sizes.size()) != k)
            throw std::invalid_argument("sizes length does not match k");
        if (static_cast<int>(q.size()) != k)
            throw std::invalid_argument("q row count does not match k");
        spec.q.k = k;
        spec.q.p.resize(static_cast<std::size_t>(k) * k);
        for (int u = 0; u < k; ++u) {
            if (static_cast<int>(q[u].size()) != k)
                throw std::invalid_argument("q column count does not match k");
            for (int v = 0; v < k; ++v) spec.q.at(u, v) = q[u][v];
        }
        spec.q.validate();
        for (int u = 0; u < k; ++u) {
            if (sizes[u] <= 0) throw std::invalid_argument("community sizes must be positive");
            spec.g.labels.insert(spec.g.labels.end(), static_cast<std::size_t>(sizes[u]),
                                 static_cast<NodeId>(u));
        }
        spec.g.k = k;
        spec.g.validate();
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("invalid SBM spec JSON: ") + e.what());
    }
    return spec;
}

AdjacencyMatrix generate_sbm(const SbmSpec& spec) {
    spec.q.validate();
    spec.g.validate();
    if (spec.q.k != spec.g.k)
        throw std::invalid_argument("probability matrix and membership disagree on k");
    const NodeId n = spec.g.node_count();
    const std::uint64_t base = rng::derive(spec.seed, rng::kTagSbmPair);
    std::vector<std::pair<NodeId, NodeId>> edges;
    edges.reserve(static_cast<std::size_t>(n) * 4);
    for (NodeId i = 0; i < n; ++i) {
        const int gi = spec.g[i];
        const double* row = spec.q.p.data() + static_cast<std::size_t>(gi) * spec.q.k;
        const std::uint64_t row_key = rng::derive(base, static_cast<std::uint64_t>(i));
        for (NodeId j = i + 1; j < n; ++j) {
            const double p = row[spec.g[j]];
            if (p <= 0.0) continue;
            if (p >= 1.0 || rng::unit_at(rng::derive(row_key, static_cast<std::uint64_t>(j))) < p)
                edges.emplace_back(i, j);
        }
    }
    return AdjacencyMatrix(n, std::move(edges));
}

AugmentedGraph augment(const AdjacencyMatrix& a, const Membership& g0,
                       const BlockProbabilityMatrix& qhat, std::uint64_t seed) {
    g0.validate();
    if (g0.node_count() != a.node_count())
        throw std::invalid_argument("membership length does not match graph node count");
    if (qhat.k != g0.k)
        throw std::invalid_argument("probability matrix and membership disagree on k");
    const int k0 = g0.k;
    if (k0 == 1)
        throw std::invalid_argument(
            "augmentation not applicable for k0 = 1: no off-diagonal probability exists");

    std::vector<std::int64_t> sizes(static_cast<std::size_t>(k0), 0);
    for (NodeId i = 0; i < g0.node_count(); ++i) ++sizes[g0[i]];
    const std::int64_t min_size = *std::min_element(sizes.begin(), sizes.end());
    const NodeId added = static_cast<NodeId>(min_size / 2);
    if (added < 3)
        throw std::invalid_argument("augmentation infeasible: new community would have " +
                                    std::to_string(added) + " nodes (< 3)");

    double self_p = 0.0;
    double cross_p = std::numeric_limits<double>::infinity();
    for (int u = 0; u < k0; ++u) {
        self_p = std::max(self_p, qhat(u, u));
        for (int v = 0; v < k0; ++v)
            if (u != v) cross_p = std::min(cross_p, qhat(u, v));
    }
    cross_p /= 2.0;

    const NodeId n = a.node_count();
    const NodeId n_plus = n + added;
    auto edges = a.edges();
    const std::uint64_t base = rng::derive(seed, rng::kTagAugmentPair);
    for (NodeId j = n; j < n_plus; ++j) {
        const std::uint64_t col_key = rng::derive(base, static_cast<std::uint64_t>(j));
        for (NodeId i = 0; i < j; ++i) {
            const double p = i < n ? cross_p : self_p;
            if (p <= 0.0) continue;
            if (p >= 1.0 || rng::unit_at(rng::derive(col_key, static_cast<std::uint64_t>(i))) < p)
                edges.emplace_back(i, j);
        }
    }

    AugmentedGraph out;
    out.graph = AdjacencyMatrix(n_plus, std::move(edges));
    out.membership.labels = g0.labels;
    out.membership.labels.insert(out.membership.labels.end(), static_cast<std::size_t>(added),
                                 static_cast<NodeId>(k0));
    out.membership.k = k0 + 1;
    out.added_nodes = added;
    out.self_probability = self_p;
    out.cross_probability = cross_p;
    return out;
}

} // namespace sbmgof
