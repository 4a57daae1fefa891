#include "sbmgof/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "sbmgof/rng.hpp"

namespace sbmgof {

BlockProbabilityMatrix estimate_q(const AdjacencyMatrix& a, const Membership& g0) {
    const BlockIndex idx = block_index(g0);
    for (int u = 0; u < idx.k(); ++u)
        if (idx.sizes[u] < 2)
            throw std::invalid_argument("community " + std::to_string(u) +
                                        " has a single node; within-block estimate undefined");
    const BlockCounts counts = block_counts(a, g0, idx);
    BlockProbabilityMatrix q(g0.k, 0.0);
    for (int u = 0; u < g0.k; ++u)
        for (int v = 0; v < g0.k; ++v)
            q.at(u, v) = static_cast<double>(counts.edge_endpoints(u, v)) /
                         static_cast<double>(counts.pair_count(u, v));
    return q;
}

double log_likelihood(const AdjacencyMatrix& a, const Membership& g0,
                      const BlockProbabilityMatrix& q) {
    if (q.k != g0.k)
        throw std::invalid_argument("probability matrix and membership disagree on k");
    const BlockIndex idx = block_index(g0);
    const BlockCounts counts = block_counts(a, g0, idx);
    double ll = 0.0;
    for (int u = 0; u < g0.k; ++u)
        for (int v = 0; v < g0.k; ++v) {
            const auto m = static_cast<double>(counts.edge_endpoints(u, v));
            const auto pairs = static_cast<double>(counts.pair_count(u, v));
            const double quv = q(u, v);
            if (quv > 0.0 && quv < 1.0) {
                ll += m * std::log(quv) + (pairs - m) * std::log1p(-quv);
            } else if (quv == 0.0) {
                if (m > 0.0) return -std::numeric_limits<double>::infinity();
            } else if (quv == 1.0) {
                if (m < pairs) return -std::numeric_limits<double>::infinity();
            } else {
                throw std::invalid_argument("connection probability outside [0,1]");
            }
        }
    return 0.5 * ll;
}

namespace {

double squared_distance(const Eigen::MatrixXd& points, Eigen::Index row,
                        const Eigen::MatrixXd& centers, Eigen::Index c) {
    return (points.row(row) - centers.row(c)).squaredNorm();
}

struct Assignment {
    std::vector<NodeId> labels;
    std::vector<double> dist2; // to the assigned center
    double cost = 0.0;
};

Assignment assign_points(const Eigen::MatrixXd& points, const Eigen::MatrixXd& centers) {
    const auto n = points.rows();
    const auto k = centers.rows();
    Assignment out;
    out.labels.resize(static_cast<std::size_t>(n));
    out.dist2.resize(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        double best = squared_distance(points, i, centers, 0);
        Eigen::Index best_c = 0;
        for (Eigen::Index c = 1; c < k; ++c) {
            const double d = squared_distance(points, i, centers, c);
            if (d < best) {
                best = d;
                best_c = c;
            }
        }
        out.labels[static_cast<std::size_t>(i)] = static_cast<NodeId>(best_c);
        out.dist2[static_cast<std::size_t>(i)] = best;
        out.cost += best;
    }
    return out;
}

Eigen::MatrixXd kmeanspp_centers(const Eigen::MatrixXd& points, int k, rng::Stream& stream) {
    const auto n = points.rows();
    Eigen::MatrixXd centers(k, points.cols());
    std::vector<double> min_dist2(static_cast<std::size_t>(n),
                                  std::numeric_limits<double>::infinity());
    Eigen::Index first = static_cast<Eigen::Index>(stream.next_below(static_cast<std::uint64_t>(n)));
    centers.row(0) = points.row(first);
    for (int c = 1; c < k; ++c) {
        double total = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double d = squared_distance(points, i, centers, c - 1);
            auto& md = min_dist2[static_cast<std::size_t>(i)];
            if (d < md) md = d;
            total += md;
        }
        Eigen::Index pick = 0;
        if (total > 0.0) {
            const double target = stream.next_unit() * total;
            double acc = 0.0;
            pick = n - 1;
            for (Eigen::Index i = 0; i < n; ++i) {
                acc += min_dist2[static_cast<std::size_t>(i)];
                if (acc > target) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = static_cast<Eigen::Index>(stream.next_below(static_cast<std::uint64_t>(n)));
        }
        centers.row(c) = points.row(pick);
    }
    return centers;
}

} // namespace

KMeansResult kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed) {
    const auto n = points.rows();
    if (k <= 0) throw std::invalid_argument("k must be positive");
    if (static_cast<Eigen::Index>(k) > n)
        throw std::invalid_argument("k exceeds number of points");

    constexpr int kRestarts = 10;
    constexpr int kMaxIterations = 100;

    KMeansResult best;
    best.inertia = std::numeric_limits<double>::infinity();
    bool found = false;

    for (int restart = 0; restart < kRestarts; ++restart) {
        rng::Stream stream(rng::derive(seed, rng::kTagKmeans, static_cast<std::uint64_t>(restart)));
        Eigen::MatrixXd centers = kmeanspp_centers(points, k, stream);
        Assignment cur = assign_points(points, centers);
        double prev_cost = cur.cost;
        for (int iter = 0; iter < kMaxIterations; ++iter) {
            // update step
            Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, points.cols());
            std::vector<std::int64_t> counts(static_cast<std::size_t>(k), 0);
            for (Eigen::Index i = 0; i < n; ++i) {
                sums.row(cur.labels[static_cast<std::size_t>(i)]) += points.row(i);
                ++counts[cur.labels[static_cast<std::size_t>(i)]];
            }
            std::vector<char> taken(static_cast<std::size_t>(n), 0);
            for (int c = 0; c < k; ++c) {
                if (counts[c] > 0) {
                    centers.row(c) = sums.row(c) / static_cast<double>(counts[c]);
                    continue;
                }
                // empty cluster: re-seed at the farthest unused point
                Eigen::Index far = -1;
                double far_d = -1.0;
                for (Eigen::Index i = 0; i < n; ++i) {
                    if (taken[static_cast<std::size_t>(i)]) continue;
                    if (cur.dist2[static_cast<std::size_t>(i)] > far_d) {
                        far_d = cur.dist2[static_cast<std::size_t>(i)];
                        far = i;
                    }
                }
                centers.row(c) = points.row(far);
                taken[static_cast<std::size_t>(far)] = 1;
            }
            Assignment next = assign_points(points, centers);
            if (next.cost > prev_cost * (1.0 + 1e-9) + 1e-12)
                throw std::logic_error("k-means cost increased across an iteration");
            const bool stable = next.labels == cur.labels;
            prev_cost = next.cost;
            cur = std::move(next);
            if (stable) break;
        }
        std::vector<std::int64_t> counts(static_cast<std::size_t>(k), 0);
        for (NodeId lab : cur.labels) ++counts[lab];
        if (std::any_of(counts.begin(), counts.end(), [](std::int64_t c) { return c == 0; }))
            continue; // this restart failed to keep every cluster populated
        if (cur.cost < best.inertia) {
            best.inertia = cur.cost;
            best.labels = std::move(cur.labels);
            found = true;
        }
    }
    if (!found)
        throw std::runtime_error("k-means failed to produce " + std::to_string(k) +
                                 " nonempty clusters after 10 restarts");
    return best;
}

namespace {

// Order eigenvalues by |value| descending; ties by sign ascending, then index.
std::vector<Eigen::Index> spectral_order(const Eigen::VectorXd& values, int k) {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(values.size()));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        const double aa = std::abs(values[a]);
        const double ab = std::abs(values[b]);
        if (aa != ab) return aa > ab;
        if ((values[a] < 0) != (values[b] < 0)) return values[a] < values[b];
        return a < b;
    });
    order.resize(static_cast<std::size_t>(k));
    return order;
}

Eigen::MatrixXd dense_embedding(const AdjacencyMatrix& a, int k) {
    const auto n = a.node_count();
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(n, n);
    for (NodeId i = 0; i < n; ++i)
        for (NodeId j : a.neighbors(i)) dense(i, j) = 1.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("dense eigensolver failed");
    const auto order = spectral_order(solver.eigenvalues(), k);
    Eigen::MatrixXd embedding(n, k);
    for (int c = 0; c < k; ++c) embedding.col(c) = solver.eigenvectors().col(order[c]);
    return embedding;
}

void sparse_multiply(const AdjacencyMatrix& a, const Eigen::VectorXd& x, Eigen::VectorXd& out) {
    out.setZero();
    for (NodeId i = 0; i < a.node_count(); ++i) {
        double acc = 0.0;
        for (NodeId j : a.neighbors(i)) acc += x[j];
        out[i] = acc;
    }
}

// Lanczos with full reorthogonalization; the basis grows in chunks until the
// k leading Ritz pairs (by |value|) hit the residual tolerance.
Eigen::MatrixXd lanczos_embedding(const AdjacencyMatrix& a, int k, std::uint64_t seed) {
    constexpr double kTol = 1e-8;
    const auto n = static_cast<Eigen::Index>(a.node_count());
    const int cap = static_cast<int>(std::min<Eigen::Index>(n, 5000));

    rng::Stream stream(rng::derive(seed, rng::kTagEigenInit));
    auto random_vector = [&] {
        Eigen::VectorXd v(n);
        for (Eigen::Index i = 0; i < n; ++i) v[i] = 2.0 * stream.next_unit() - 1.0;
        return v;
    };

    int allocated = std::min(cap, std::max(3 * k + 24, 64));
    Eigen::MatrixXd basis(n, allocated);
    std::vector<double> alpha, beta; // tridiagonal entries
    alpha.reserve(static_cast<std::size_t>(cap));
    beta.reserve(static_cast<std::size_t>(cap));

    Eigen::VectorXd v = random_vector();
    v.normalize();
    basis.col(0) = v;
    Eigen::VectorXd w(n);
    double last_norm = 1.0;

    int m = 0; // number of completed columns
    while (true) {
        // extend the factorization as far as currently allocated
        for (; m < allocated; ++m) {
            sparse_multiply(a, basis.col(m), w);
            if (m > 0) w -= beta[m - 1] * basis.col(m - 1);
            const double a_m = basis.col(m).dot(w);
            alpha.push_back(a_m);
            w -= a_m * basis.col(m);
            // full reorthogonalization, twice
            for (int pass = 0; pass < 2; ++pass)
                w -= basis.leftCols(m + 1) * (basis.leftCols(m + 1).transpose() * w);
            double b_m = w.norm();
            if (b_m < 1e-12) {
                // invariant subspace; continue from a fresh direction
                w = random_vector();
                for (int pass = 0; pass < 2; ++pass)
                    w -= basis.leftCols(m + 1) * (basis.leftCols(m + 1).transpose() * w);
                b_m = w.norm();
                if (b_m < 1e-12) break; // nothing orthogonal left (tiny n)
                beta.push_back(0.0);
            } else {
                beta.push_back(b_m);
            }
            last_norm = b_m;
            if (m + 1 < allocated) basis.col(m + 1) = w / b_m;
        }

        // Ritz pairs of the tridiagonal section
        const int dim = static_cast<int>(alpha.size());
        Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(dim, dim);
        for (int i = 0; i < dim; ++i) {
            tri(i, i) = alpha[static_cast<std::size_t>(i)];
            if (i + 1 < dim)
                tri(i, i + 1) = tri(i + 1, i) = beta[static_cast<std::size_t>(i)];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(tri);
        if (small.info() != Eigen::Success)
            throw std::runtime_error("tridiagonal eigensolver failed");
        const auto order = spectral_order(small.eigenvalues(), std::min(k, dim));

        bool converged = dim >= k;
        const double edge = dim < static_cast<int>(beta.size()) + 1 && !beta.empty()
                                ? beta.back()
                                : 0.0;
        for (std::size_t c = 0; converged && c < order.size(); ++c) {
            const double theta = small.eigenvalues()[order[c]];
            const double resid = std::abs(edge * small.eigenvectors()(dim - 1, order[c]));
            if (resid > kTol * std::max(1.0, std::abs(theta))) converged = false;
        }
        if ((converged && dim >= k) || dim >= cap) {
            if (!converged)
                throw std::runtime_error(
                    "Lanczos did not converge within " + std::to_string(cap) +
                    " steps for the leading " + std::to_string(k) + " eigenpairs");
            Eigen::MatrixXd embedding(n, k);
            for (int c = 0; c < k; ++c)
                embedding.col(c) = basis.leftCols(dim) * small.eigenvectors().col(order[c]);
            return embedding;
        }

        const int next = std::min(cap, allocated + std::max(64, allocated / 2));
        basis.conservativeResize(Eigen::NoChange, next);
        basis.col(m) = w / last_norm;
        allocated = next;
    }
}

} // namespace

Eigen::MatrixXd spectral_embedding(const AdjacencyMatrix& a, int k, std::uint64_t seed) {
    const auto n = a.node_count();
    if (k < 1 || k > n) throw std::invalid_argument("k must lie in [1, n]");
    if (n <= 800) return dense_embedding(a, k);
    return lanczos_embedding(a, k, seed);
}

Membership spectral_membership(const AdjacencyMatrix& a, int k0, std::uint64_t seed) {
    const Eigen::MatrixXd embedding =
        spectral_embedding(a, k0, rng::derive(seed, rng::kTagEigenInit));
    KMeansResult clusters = kmeans(embedding, k0, rng::derive(seed, rng::kTagKmeans));
    Membership g;
    g.labels = std::move(clusters.labels);
    g.k = k0;
    g.validate();
    return g;
}

} // namespace sbmgof
