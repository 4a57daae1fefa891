#include "sbmgof/gof.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "sbmgof/rng.hpp"

namespace sbmgof {

std::string variant_name(Variant v) {
    switch (v) {
        case Variant::plain: return "plain";
        case Variant::bootstrap: return "bootstrap";
        case Variant::augmented: return "augmented";
        case Variant::augmented_bootstrap: return "augmented-bootstrap";
    }
    throw std::logic_error("unknown variant");
}

Variant parse_variant(const std::string& name) {
    if (name == "plain") return Variant::plain;
    if (name == "bootstrap") return Variant::bootstrap;
    if (name == "augmented") return Variant::augmented;
    if (name == "augmented-bootstrap") return Variant::augmented_bootstrap;
    throw std::invalid_argument("unknown test variant: " + name);
}

std::string hypothesis_name(Hypothesis h) { return h == Hypothesis::k ? "K" : "G"; }

std::string membership_source_name(MembershipSource s) {
    return s == MembershipSource::given ? "given" : "spectral";
}

void TestOptions::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("alpha must lie in (0, 1)");
    if (m < 1) throw std::invalid_argument("m must be at least 1");
    if (b && *b < 1) throw std::invalid_argument("b must be at least 1");
    if ((variant == Variant::bootstrap || variant == Variant::augmented_bootstrap) &&
        bootstrap_j < 10)
        throw std::invalid_argument("bootstrap needs at least 10 replicates, got " +
                                    std::to_string(bootstrap_j));
}

std::string report_to_json(const TestReport& r, int indent) {
    nlohmann::json j{
        {"statistic", r.statistic},
        {"criticalValue", r.critical_value},
        {"pValue", r.p_value},
        {"reject", r.reject},
        {"variant", variant_name(r.variant)},
        {"k0", r.k0},
        {"hypothesis", hypothesis_name(r.hypothesis)},
        {"bUsed", r.b_used},
        {"mUsed", r.m_used},
        {"seed", r.seed},
        {"membershipSource", membership_source_name(r.membership_source)},
    };
    if (r.gumbel_fit)
        j["gumbelFit"] = {{"mu", r.gumbel_fit->mu}, {"beta", r.gumbel_fit->beta}};
    return j.dump(indent);
}

namespace {

int resolve_b(const AdjacencyMatrix& a, const TestOptions& opts) {
    if (opts.b) return *opts.b;
    return default_b(density(a), a.node_count());
}

double plain_statistic(const AdjacencyMatrix& a, const Membership& g0, int b, int m,
                       std::uint64_t psi_seed) {
    const BlockProbabilityMatrix qhat = estimate_q(a, g0);
    const DeviationMatrix dev = entrywise_deviations(a, g0, qhat);
    const PsiMatrix psi = sample_psi(dev, b, m, psi_seed);
    return theta(gamma_max(psi), m, g0.k);
}

TestReport finalize(double statistic, const TestOptions& opts) {
    TestReport r;
    r.statistic = statistic;
    r.critical_value = critical_value(opts.alpha);
    r.p_value = p_value(statistic);
    r.reject = statistic > r.critical_value;
    r.variant = opts.variant;
    r.m_used = opts.m;
    r.seed = opts.seed;
    return r;
}

// Algorithm 2 on (a, g0): plain statistic, then an affine recentering against
// a Gumbel fitted to the statistic recomputed on networks regenerated from
// the fitted model. The replicates reuse g0, b and m.
TestReport bootstrap_core(const AdjacencyMatrix& a, const Membership& g0,
                          const TestOptions& opts) {
    const int b = resolve_b(a, opts);
    const double theta_n =
        plain_statistic(a, g0, b, opts.m, rng::derive(opts.seed, rng::kTagPsi));

    const BlockProbabilityMatrix qhat = estimate_q(a, g0);
    std::vector<double> replicate_stats(static_cast<std::size_t>(opts.bootstrap_j));
    for (int j = 0; j < opts.bootstrap_j; ++j) {
        SbmSpec spec{qhat, g0,
                     rng::derive(opts.seed, rng::kTagBootstrap, static_cast<std::uint64_t>(j), 0)};
        const AdjacencyMatrix replica = generate_sbm(spec);
        replicate_stats[static_cast<std::size_t>(j)] = plain_statistic(
            replica, g0, b, opts.m,
            rng::derive(opts.seed, rng::kTagBootstrap, static_cast<std::uint64_t>(j), 1));
    }

    GumbelParams fit;
    try {
        fit = fit_gumbel_mle(replicate_stats);
    } catch (const std::exception& e) {
        throw BootstrapFitError(std::string("bootstrap Gumbel fit failed: ") + e.what(),
                                replicate_stats);
    }
    const GumbelParams null = null_gumbel_params();
    const double corrected = null.mu + null.beta * (theta_n - fit.mu) / fit.beta;

    TestReport r = finalize(corrected, opts);
    r.b_used = b;
    r.gumbel_fit = fit;
    return r;
}

TestReport plain_core(const AdjacencyMatrix& a, const Membership& g0, const TestOptions& opts) {
    const int b = resolve_b(a, opts);
    const double stat =
        plain_statistic(a, g0, b, opts.m, rng::derive(opts.seed, rng::kTagPsi));
    TestReport r = finalize(stat, opts);
    r.b_used = b;
    return r;
}

// The augmented statistic as a function of (graph, base membership): augment
// with probabilities fitted under g_base; for hypothesis (I) the augmented
// graph's membership is estimated afresh with k_base + 1 communities, for
// hypothesis (II) the known membership is extended with the new label.
struct AugmentedStat {
    double theta = 0.0;
    int b_used = 0;
    Membership membership;
    BlockProbabilityMatrix q_base; // fit of the input graph under g_base
};

AugmentedStat augmented_statistic(const AdjacencyMatrix& a, const Membership& g_base,
                                  bool reestimate_membership, std::optional<int> b_override,
                                  int m, std::uint64_t aug_seed, std::uint64_t spectral_seed,
                                  std::uint64_t psi_seed) {
    AugmentedStat out;
    out.q_base = estimate_q(a, g_base);
    AugmentedGraph aug = augment(a, g_base, out.q_base, aug_seed);
    out.membership = reestimate_membership
                         ? spectral_membership(aug.graph, g_base.k + 1, spectral_seed)
                         : aug.membership;
    out.b_used = b_override ? *b_override
                            : default_b(density(aug.graph), aug.graph.node_count());
    out.theta = plain_statistic(aug.graph, out.membership, out.b_used, m, psi_seed);
    return out;
}

// Algorithm 2 wrapped around the augmented statistic: every replicate is
// regenerated from the fitted base model and pushed through the whole
// augmentation pipeline (fresh added edges and, for hypothesis (I), a fresh
// membership estimate), so the fitted Gumbel sees the same estimation noise
// as the observed statistic.
TestReport augmented_core(const AdjacencyMatrix& a, const Membership& g_base,
                          bool reestimate_membership, const TestOptions& opts,
                          bool with_bootstrap) {
    const AugmentedStat observed = augmented_statistic(
        a, g_base, reestimate_membership, opts.b, opts.m,
        rng::derive(opts.seed, rng::kTagAugment),
        rng::derive(opts.seed, rng::kTagSpectral, 1), rng::derive(opts.seed, rng::kTagPsi));

    TestReport r;
    if (!with_bootstrap) {
        r = finalize(observed.theta, opts);
        r.b_used = observed.b_used;
        return r;
    }

    std::vector<double> replicate_stats(static_cast<std::size_t>(opts.bootstrap_j));
    for (int j = 0; j < opts.bootstrap_j; ++j) {
        const auto jj = static_cast<std::uint64_t>(j);
        SbmSpec spec{observed.q_base, g_base, rng::derive(opts.seed, rng::kTagBootstrap, jj, 0)};
        const AdjacencyMatrix replica = generate_sbm(spec);
        replicate_stats[static_cast<std::size_t>(j)] =
            augmented_statistic(replica, g_base, reestimate_membership,
                                observed.b_used, opts.m,
                                rng::derive(opts.seed, rng::kTagBootstrap, jj, 2),
                                rng::derive(opts.seed, rng::kTagBootstrap, jj, 3),
                                rng::derive(opts.seed, rng::kTagBootstrap, jj, 1))
                .theta;
    }
    GumbelParams fit;
    try {
        fit = fit_gumbel_mle(replicate_stats);
    } catch (const std::exception& e) {
        throw BootstrapFitError(std::string("bootstrap Gumbel fit failed: ") + e.what(),
                                replicate_stats);
    }
    const GumbelParams null = null_gumbel_params();
    r = finalize(null.mu + null.beta * (observed.theta - fit.mu) / fit.beta, opts);
    r.b_used = observed.b_used;
    r.gumbel_fit = fit;
    return r;
}

TestReport run_on(const AdjacencyMatrix& a, const Membership& g0, const TestOptions& opts,
                  bool with_bootstrap) {
    return with_bootstrap ? bootstrap_core(a, g0, opts) : plain_core(a, g0, opts);
}

} // namespace

TestReport bootstrap_corrected(const AdjacencyMatrix& a, const Membership& g0,
                               const TestOptions& opts) {
    g0.validate();
    if (opts.bootstrap_j < 10)
        throw std::invalid_argument("bootstrap needs at least 10 replicates, got " +
                                    std::to_string(opts.bootstrap_j));
    TestReport r = bootstrap_core(a, g0, opts);
    r.k0 = g0.k;
    r.hypothesis = Hypothesis::g;
    r.membership_source = MembershipSource::given;
    return r;
}

TestReport augmented_test(const AdjacencyMatrix& a, const Membership& g0,
                          const TestOptions& opts, bool with_bootstrap) {
    g0.validate();
    if (with_bootstrap && opts.bootstrap_j < 10)
        throw std::invalid_argument("bootstrap needs at least 10 replicates, got " +
                                    std::to_string(opts.bootstrap_j));
    TestReport r = augmented_core(a, g0, /*reestimate_membership=*/false, opts, with_bootstrap);
    r.k0 = g0.k;
    r.hypothesis = Hypothesis::g;
    r.membership_source = MembershipSource::given;
    return r;
}

TestReport test_membership(const AdjacencyMatrix& a, const Membership& g0,
                           const TestOptions& opts) {
    opts.validate();
    g0.validate();
    if (g0.node_count() != a.node_count())
        throw std::invalid_argument("membership length does not match graph node count");
    TestReport r;
    switch (opts.variant) {
        case Variant::plain:
            r = plain_core(a, g0, opts);
            break;
        case Variant::bootstrap:
            r = bootstrap_core(a, g0, opts);
            break;
        case Variant::augmented:
            return augmented_test(a, g0, opts, false);
        case Variant::augmented_bootstrap:
            return augmented_test(a, g0, opts, true);
    }
    r.k0 = g0.k;
    r.hypothesis = Hypothesis::g;
    r.membership_source = MembershipSource::given;
    return r;
}

TestReport test_k(const AdjacencyMatrix& a, int k0, const TestOptions& opts) {
    opts.validate();
    if (k0 < 1 || k0 > a.node_count())
        throw std::invalid_argument("k0 must lie in [1, n]");
    const Membership ghat =
        spectral_membership(a, k0, rng::derive(opts.seed, rng::kTagSpectral, 0));

    TestReport r;
    if (opts.variant == Variant::augmented || opts.variant == Variant::augmented_bootstrap) {
        // Augmentation probabilities come from the fit on the observed graph;
        // the membership of the augmented graph is re-estimated with k0 + 1
        // communities, which is what lets the added block expose a merged fit.
        r = augmented_core(a, ghat, /*reestimate_membership=*/true, opts,
                           opts.variant == Variant::augmented_bootstrap);
    } else {
        r = run_on(a, ghat, opts, opts.variant == Variant::bootstrap);
    }
    r.k0 = k0;
    r.hypothesis = Hypothesis::k;
    r.membership_source = MembershipSource::spectral;
    return r;
}

} // namespace sbmgof
