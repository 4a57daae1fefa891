#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "sbmgof/graph.hpp"
#include "sbmgof/sbm.hpp"

namespace sbmgof {

/// Entry-wise deviations: values(i, v) is the normalized sum of standardized
/// residuals of node i's edges into community v. Cells whose fitted
/// probability is 0 or 1 contribute nothing; the dropped-term totals are kept
/// per community pair in `skipped`.
struct DeviationMatrix {
    Eigen::MatrixXd values;            // n x k0
    std::vector<std::int64_t> skipped; // k0*k0 row-major dropped-term counts
    int k0 = 0;

    std::int64_t skipped_at(int u, int v) const { return skipped[u * k0 + v]; }
};

/// Sampled sums psi(m, v) = sum of b resampled deviations / sqrt(b).
struct PsiMatrix {
    Eigen::MatrixXd values; // m x k0
    int b = 0;
    int m = 0;
    std::uint64_t seed = 0;
};

/// Disparity between a true block structure and a hypothesized coarser one.
struct DisparityVector {
    std::vector<double> qv; // per hypothesized community
    double scaled = 0.0;    // sqrt(b) * max qv / sqrt(log(m * k0))
};

// Requires qhat = estimate_q(a, g0). For each node i and community v, sums
// (a_ij - qhat) / sqrt(qhat (1 - qhat)) over j in g0^-1(v) \ {i} and divides
// by sqrt(number of retained terms); a degenerate qhat drops the whole cell.
DeviationMatrix entrywise_deviations(const AdjacencyMatrix& a, const Membership& g0,
                                     const BlockProbabilityMatrix& qhat);

// For every (m, v) independently draws b node indices uniformly with
// replacement from a substream keyed by (seed, m, v); deterministic and
// schedule-independent.
PsiMatrix sample_psi(const DeviationMatrix& d, int b, int m, std::uint64_t seed);

// max_{m,v} |psi_mv|
double gamma_max(const PsiMatrix& psi);

// gamma^2 - 2 log(m k0) + log log(m k0); requires m * k0 >= 3.
double theta(double gamma, int m, int k0);

// Baseline max entry-wise deviation statistic:
// L^2 - 2 log(k0 n) + log log(k0 n) with L = max |values|; requires k0*n >= 3.
double hu_statistic(const DeviationMatrix& d, NodeId n, int k0);

// Block-averages q_true over the cells of g0 and measures, per hypothesized
// community v, the weighted standardized mean difference between the true and
// averaged probabilities. Under (g0, k0) = (g_true, k_true) all entries are 0.
DisparityVector disparity(const BlockProbabilityMatrix& q_true, const Membership& g_true,
                          const Membership& g0, int b, int m);

// Block-average of q_true over the cells of g0 (the averaged matrix used by
// the disparity measure), exposed for tests.
BlockProbabilityMatrix block_average_q(const BlockProbabilityMatrix& q_true,
                                       const Membership& g_true, const Membership& g0);

// ceil(densityQ^{-1/2} (n / log n)^{1/3}); requires densityQ > 0 and n >= 3.
int default_b(double density_q, std::int64_t n);

} // namespace sbmgof
