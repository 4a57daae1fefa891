#include "sbmgof/deviation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "sbmgof/rng.hpp"

namespace sbmgof {

namespace {

bool degenerate(double q) { return q <= 0.0 || q >= 1.0; }

} // namespace

DeviationMatrix entrywise_deviations(const AdjacencyMatrix& a, const Membership& g0,
                                     const BlockProbabilityMatrix& qhat) {
    if (g0.node_count() != a.node_count())
        throw std::invalid_argument("membership length does not match graph node count");
    if (qhat.k != g0.k)
        throw std::invalid_argument("probability matrix and membership disagree on k");
    const int k0 = g0.k;
    const NodeId n = a.node_count();
    const BlockIndex idx = block_index(g0);

    DeviationMatrix d;
    d.k0 = k0;
    d.values = Eigen::MatrixXd::Zero(n, k0);
    d.skipped.assign(static_cast<std::size_t>(k0) * k0, 0);
    for (int u = 0; u < k0; ++u)
        for (int v = 0; v < k0; ++v)
            if (degenerate(qhat(u, v)))
                d.skipped[u * k0 + v] = u == v ? idx.sizes[u] * (idx.sizes[u] - 1)
                                               : idx.sizes[u] * idx.sizes[v];

    std::vector<std::int64_t> neighbor_count(static_cast<std::size_t>(k0));
    for (NodeId i = 0; i < n; ++i) {
        std::fill(neighbor_count.begin(), neighbor_count.end(), 0);
        for (NodeId j : a.neighbors(i)) ++neighbor_count[g0[j]];
        const int u = g0[i];
        for (int v = 0; v < k0; ++v) {
            const std::int64_t retained = idx.sizes[v] - (u == v ? 1 : 0);
            const double q = qhat(u, v);
            if (retained <= 0 || degenerate(q)) continue; // cell contributes 0
            const double c = static_cast<double>(retained);
            d.values(i, v) = (static_cast<double>(neighbor_count[v]) - c * q) /
                             std::sqrt(c * q * (1.0 - q));
        }
    }
    return d;
}

PsiMatrix sample_psi(const DeviationMatrix& d, int b, int m, std::uint64_t seed) {
    if (b < 1 || m < 1) throw std::invalid_argument("b and m must be at least 1");
    const auto n = static_cast<std::uint64_t>(d.values.rows());
    if (n == 0) throw std::invalid_argument("deviation matrix has no rows");
    PsiMatrix psi;
    psi.b = b;
    psi.m = m;
    psi.seed = seed;
    psi.values.resize(m, d.k0);
    const double inv_sqrt_b = 1.0 / std::sqrt(static_cast<double>(b));
    for (int row = 0; row < m; ++row) {
        for (int v = 0; v < d.k0; ++v) {
            rng::Stream stream(rng::derive(seed, rng::kTagPsiCell,
                                           static_cast<std::uint64_t>(row),
                                           static_cast<std::uint64_t>(v)));
            double sum = 0.0;
            for (int h = 0; h < b; ++h)
                sum += d.values(static_cast<Eigen::Index>(stream.next_below(n)), v);
            psi.values(row, v) = sum * inv_sqrt_b;
        }
    }
    return psi;
}

double gamma_max(const PsiMatrix& psi) {
    if (psi.values.size() == 0) throw std::invalid_argument("empty psi matrix");
    return psi.values.cwiseAbs().maxCoeff();
}

double theta(double gamma, int m, int k0) {
    const auto mk = static_cast<std::int64_t>(m) * k0;
    if (mk < 3)
        throw std::invalid_argument("m * k0 must be at least 3 for the centering constants");
    const double lmk = std::log(static_cast<double>(mk));
    return gamma * gamma - 2.0 * lmk + std::log(lmk);
}

double hu_statistic(const DeviationMatrix& d, NodeId n, int k0) {
    const auto kn = static_cast<std::int64_t>(k0) * n;
    if (kn < 3)
        throw std::invalid_argument("k0 * n must be at least 3 for the centering constants");
    const double l = d.values.cwiseAbs().maxCoeff();
    const double lkn = std::log(static_cast<double>(kn));
    return l * l - 2.0 * lkn + std::log(lkn);
}

BlockProbabilityMatrix block_average_q(const BlockProbabilityMatrix& q_true,
                                       const Membership& g_true, const Membership& g0) {
    if (g_true.node_count() != g0.node_count())
        throw std::invalid_argument("memberships cover different node counts");
    if (q_true.k != g_true.k)
        throw std::invalid_argument("probability matrix and true membership disagree on k");
    const int k = g_true.k;
    const int k0 = g0.k;

    // cross-tab: nodes per (hypothesized, true) community pair
    std::vector<std::int64_t> cross(static_cast<std::size_t>(k0) * k, 0);
    for (NodeId i = 0; i < g0.node_count(); ++i) ++cross[g0[i] * k + g_true[i]];
    const BlockIndex idx0 = block_index(g0);

    // a community drawn from a single true block, or -1 when mixed
    std::vector<int> pure(static_cast<std::size_t>(k0), -1);
    for (int u = 0; u < k0; ++u) {
        int only = -1;
        for (int x = 0; x < k; ++x)
            if (cross[u * k + x] > 0) only = only == -1 ? x : -2;
        pure[u] = only;
    }

    BlockProbabilityMatrix avg(k0, 0.0);
    for (int u = 0; u < k0; ++u)
        for (int v = u; v < k0; ++v) {
            if (u == v && idx0.sizes[u] < 2)
                throw std::invalid_argument("hypothesized community too small for block average");
            if (pure[u] >= 0 && pure[v] >= 0) {
                // averaging a constant: take it exactly
                avg.at(u, v) = q_true(pure[u], pure[v]);
                avg.at(v, u) = avg(u, v);
                continue;
            }
            double numer = 0.0;
            for (int x = 0; x < k; ++x) {
                const auto cu = static_cast<double>(cross[u * k + x]);
                if (cu == 0.0) continue;
                for (int y = 0; y < k; ++y)
                    numer += cu * static_cast<double>(cross[v * k + y]) * q_true(x, y);
            }
            double denom;
            if (u == v) {
                for (int x = 0; x < k; ++x)
                    numer -= static_cast<double>(cross[u * k + x]) * q_true(x, x);
                denom = static_cast<double>(idx0.sizes[u] * (idx0.sizes[u] - 1));
            } else {
                denom = static_cast<double>(idx0.sizes[u] * idx0.sizes[v]);
            }
            if (denom <= 0.0)
                throw std::invalid_argument("hypothesized community too small for block average");
            avg.at(u, v) = numer / denom;
            avg.at(v, u) = avg(u, v);
        }
    return avg;
}

DisparityVector disparity(const BlockProbabilityMatrix& q_true, const Membership& g_true,
                          const Membership& g0, int b, int m) {
    const BlockProbabilityMatrix avg = block_average_q(q_true, g_true, g0);
    const int k = g_true.k;
    const int k0 = g0.k;
    const auto mk = static_cast<std::int64_t>(m) * k0;
    if (b < 1 || mk < 2)
        throw std::invalid_argument("need b >= 1 and m * k0 >= 2 for the scaled criterion");

    std::vector<std::int64_t> cross(static_cast<std::size_t>(k0) * k, 0);
    for (NodeId i = 0; i < g0.node_count(); ++i) ++cross[g0[i] * k + g_true[i]];
    const BlockIndex idx_true = block_index(g_true);
    const double n = static_cast<double>(g0.node_count());

    DisparityVector out;
    out.qv.assign(static_cast<std::size_t>(k0), 0.0);
    for (int v = 0; v < k0; ++v) {
        double qv = 0.0;
        for (int ustar = 0; ustar < k; ++ustar) {
            const NodeId rep = idx_true.members[ustar].front();
            const int g0_rep = g0[rep];
            const double q0 = avg(g0_rep, v);
            double q_vu = 0.0;
            if (!degenerate(q0)) {
                double numer = 0.0;
                std::int64_t retained = 0;
                for (int y = 0; y < k; ++y) {
                    std::int64_t c = cross[v * k + y];
                    if (g0_rep == v && y == g_true[rep]) --c; // exclude the node itself
                    if (c <= 0) continue;
                    retained += c;
                    numer += static_cast<double>(c) * (q_true(ustar, y) - q0);
                }
                if (retained > 0)
                    q_vu = std::abs(numer) /
                           (std::sqrt(static_cast<double>(retained)) *
                            std::sqrt(q0 * (1.0 - q0)));
            }
            qv += static_cast<double>(idx_true.sizes[ustar]) / n * q_vu;
        }
        out.qv[v] = qv;
    }
    const double max_qv = *std::max_element(out.qv.begin(), out.qv.end());
    out.scaled = std::sqrt(static_cast<double>(b)) * max_qv /
                 std::sqrt(std::log(static_cast<double>(mk)));
    return out;
}

int default_b(double density_q, std::int64_t n) {
    if (!(density_q > 0.0)) throw std::invalid_argument("graph empty; B undefined");
    if (n < 3) throw std::invalid_argument("need n >= 3 to choose B");
    const double value =
        std::pow(density_q, -0.5) * std::cbrt(static_cast<double>(n) / std::log(static_cast<double>(n)));
    return static_cast<int>(std::ceil(value));
}

} // namespace sbmgof
