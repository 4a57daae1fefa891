#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "sbmgof/graph.hpp"
#include "sbmgof/sbm.hpp"

namespace sbmgof {

// Maximum likelihood estimate of the block probability matrix under (a, g0):
// qhat_uv = m_uv / nPairs_uv. Throws if any community has fewer than 2 nodes
// (the within-block denominator would vanish).
BlockProbabilityMatrix estimate_q(const AdjacencyMatrix& a, const Membership& g0);

// Bernoulli log-likelihood 0.5 * sum_uv [m log q + (n_uv - m) log(1 - q)] with
// the 0 log 0 convention. A q_uv in {0,1} that disagrees with the counts makes
// the likelihood -infinity, returned as such.
double log_likelihood(const AdjacencyMatrix& a, const Membership& g0,
                      const BlockProbabilityMatrix& q);

struct KMeansResult {
    std::vector<NodeId> labels;
    double inertia = 0.0; // within-cluster sum of squared distances
};

// Lloyd iterations with k-means++ seeding; 10 restarts of at most 100
// iterations each, best inertia wins. An emptied cluster is re-seeded at the
// point farthest from its assigned center. Deterministic given seed.
KMeansResult kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed);

// Row embedding from the k leading eigenvectors of a (symmetric, so these are
// the leading singular vectors), ordered by |eigenvalue| descending. Dense
// solve for n <= 2000, subspace iteration above (residual tolerance 1e-8,
// at most 5000 iterations; throws with diagnostics on non-convergence).
Eigen::MatrixXd spectral_embedding(const AdjacencyMatrix& a, int k, std::uint64_t seed);

// k-means on the spectral embedding rows; every community nonempty.
Membership spectral_membership(const AdjacencyMatrix& a, int k0, std::uint64_t seed);

} // namespace sbmgof
