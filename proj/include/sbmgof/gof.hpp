#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sbmgof/deviation.hpp"
#include "sbmgof/estimation.hpp"
#include "sbmgof/graph.hpp"
#include "sbmgof/gumbel.hpp"
#include "sbmgof/sbm.hpp"

namespace sbmgof {

enum class Variant { plain, bootstrap, augmented, augmented_bootstrap };
enum class Hypothesis { k, g };
enum class MembershipSource { given, spectral };

std::string variant_name(Variant v);
Variant parse_variant(const std::string& name);
std::string hypothesis_name(Hypothesis h);
std::string membership_source_name(MembershipSource s);

struct TestOptions {
    double alpha = 0.05;
    std::optional<int> b;  // nullopt = auto via default_b
    int m = 100;
    int bootstrap_j = 100;
    std::uint64_t seed = 0;
    Variant variant = Variant::plain;

    void validate() const;
};

struct TestReport {
    double statistic = 0.0;
    double critical_value = 0.0;
    double p_value = 0.0;
    bool reject = false;
    Variant variant = Variant::plain;
    int k0 = 0;
    Hypothesis hypothesis = Hypothesis::g;
    int b_used = 0;
    int m_used = 0;
    std::uint64_t seed = 0;
    std::optional<GumbelParams> gumbel_fit; // present for bootstrap variants
    MembershipSource membership_source = MembershipSource::given;
};

// Single JSON object with stable field names; `indent < 0` gives one line.
std::string report_to_json(const TestReport& report, int indent = 2);

/// Carries the bootstrap replicate statistics when the Gumbel fit degenerates.
class BootstrapFitError : public std::runtime_error {
public:
    BootstrapFitError(const std::string& what, std::vector<double> statistics)
        : std::runtime_error(what), statistics_(std::move(statistics)) {}
    const std::vector<double>& statistics() const { return statistics_; }

private:
    std::vector<double> statistics_;
};

// Hypothesis (II), H0: g = g0. Chains estimate -> deviations -> sampling ->
// max -> centering, then applies the variant chosen in opts (bootstrap
// correction and/or augmentation).
TestReport test_membership(const AdjacencyMatrix& a, const Membership& g0,
                           const TestOptions& opts);

// Hypothesis (I), H0: K = k0. Estimates the membership by spectral clustering
// and proceeds as test_membership; augmented variants re-estimate the
// membership of the augmented graph with k0 + 1 communities.
TestReport test_k(const AdjacencyMatrix& a, int k0, const TestOptions& opts);

// The bootstrap correction with a given membership (the opts.variant field is
// ignored; this is the plain statistic corrected by refitting on replicates).
TestReport bootstrap_corrected(const AdjacencyMatrix& a, const Membership& g0,
                               const TestOptions& opts);

// Augmented statistic for a given membership (hypothesis II form); set
// with_bootstrap to apply the bootstrap correction on the augmented graph.
TestReport augmented_test(const AdjacencyMatrix& a, const Membership& g0,
                          const TestOptions& opts, bool with_bootstrap);

} // namespace sbmgof
