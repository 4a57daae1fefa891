// Acceptance suite: every release gate in one binary, one pass/fail line per
// criterion. Exit code is the number of failed criteria.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "sbmgof/deviation.hpp"
#include "sbmgof/estimation.hpp"
#include "sbmgof/gof.hpp"
#include "sbmgof/graph.hpp"
#include "sbmgof/gumbel.hpp"
#include "sbmgof/rng.hpp"
#include "sbmgof/sbm.hpp"
#include "sbmgof/simulate.hpp"

using namespace sbmgof;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& details) {
    std::printf("[%s] %d. %s: %s\n", pass ? "PASS" : "FAIL", id, name.c_str(),
                details.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

int workers() {
    const unsigned hw = std::thread::hardware_concurrency();
    return static_cast<int>(std::min(8u, hw == 0 ? 1u : hw));
}

double timed_cell(const SimConfig& config, int k0, int k_true, double& seconds) {
    const auto start = std::chrono::steady_clock::now();
    const double fraction = run_cell(config, k0, k_true);
    seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return fraction;
}

std::string fraction_line(double fraction, double seconds) {
    std::ostringstream ss;
    ss << "rejection fraction " << fraction << " (" << static_cast<int>(seconds) << "s)";
    return ss.str();
}

// ---- criteria 1-5: Monte Carlo size and power -----------------------------

void criterion_1() {
    SimConfig config;
    config.setting = "1i";
    config.variant = Variant::plain;
    config.reps = 200;
    config.seed = 1001;
    config.workers = 1; // the runtime target is single-threaded
    double seconds = 0.0;
    const double f = timed_cell(config, 2, 2, seconds);
    report(1, "null size, dense (Setting 1i, K=K0=2, plain)",
           f >= 0.01 && f <= 0.10 && seconds <= 300.0, fraction_line(f, seconds));
}

void criterion_2() {
    SimConfig config;
    config.setting = "2i";
    config.variant = Variant::plain;
    config.reps = 200;
    config.seed = 1002;
    config.workers = workers();
    double seconds = 0.0;
    const double f = timed_cell(config, 2, 2, seconds);
    report(2, "null size, sparse (Setting 2i, K=K0=2, plain)", f >= 0.01 && f <= 0.11,
           fraction_line(f, seconds));
}

void criterion_3() {
    SimConfig config;
    config.setting = "1i";
    config.variant = Variant::augmented_bootstrap;
    config.reps = 100;
    config.seed = 1003;
    config.workers = workers();
    double seconds = 0.0;
    const double f = timed_cell(config, 2, 4, seconds);
    report(3, "power, dense (Setting 1i, K=4, K0=2, augmented bootstrap)", f >= 0.95,
           fraction_line(f, seconds));
}

void criterion_4() {
    SimConfig config;
    config.setting = "2ii";
    config.variant = Variant::augmented_bootstrap;
    config.reps = 100;
    config.seed = 1004;
    config.workers = workers();
    double seconds = 0.0;
    const double f = timed_cell(config, 2, 3, seconds);
    report(4, "power, sparse (Setting 2ii, K=3, K0=2, augmented bootstrap)",
           f >= 0.50 && seconds <= 1800.0, fraction_line(f, seconds));
}

void criterion_5() {
    SimConfig config;
    config.setting = "2ii";
    config.variant = Variant::augmented_bootstrap;
    config.reps = 100;
    config.seed = 1005;
    config.workers = workers();
    double seconds = 0.0;
    const double f = timed_cell(config, 3, 3, seconds);
    report(5, "size under augmentation (Setting 2ii, K=K0=3, augmented bootstrap)",
           f >= 0.005 && f <= 0.12, fraction_line(f, seconds));
}

// ---- criterion 6: exact-algebra suite --------------------------------------

void criterion_6() {
    bool pass = true;
    std::string detail = "all identities held on 100 random graphs";
    for (std::uint64_t trial = 0; trial < 100 && pass; ++trial) {
        rng::Stream meta(rng::derive(600, trial));
        const NodeId n = static_cast<NodeId>(20 + meta.next_below(41));
        const int k = static_cast<int>(2 + meta.next_below(3));
        const double p = 0.15 + 0.5 * meta.next_unit();

        SbmSpec spec;
        spec.q = BlockProbabilityMatrix(k, p * 0.4);
        for (int u = 0; u < k; ++u) spec.q.at(u, u) = p;
        spec.g.k = k;
        spec.g.labels.resize(static_cast<std::size_t>(n));
        for (NodeId i = 0; i < n; ++i)
            spec.g.labels[i] = static_cast<NodeId>(i % k); // every block has >= 2 nodes
        spec.seed = rng::derive(601, trial);
        const AdjacencyMatrix a = generate_sbm(spec);

        const auto qhat = estimate_q(a, spec.g);
        const BlockCounts counts = block_counts(a, spec.g, block_index(spec.g));
        const DeviationMatrix dev = entrywise_deviations(a, spec.g, qhat);
        const BlockIndex idx = block_index(spec.g);

        // m_uv = qhat_uv * nPairs_uv to 1e-12 relative
        for (int u = 0; u < k && pass; ++u)
            for (int v = 0; v < k && pass; ++v) {
                const double m = static_cast<double>(counts.edge_endpoints(u, v));
                const double recon = qhat(u, v) * static_cast<double>(counts.pair_count(u, v));
                if (std::abs(m - recon) > 1e-12 * std::max(1.0, m)) {
                    pass = false;
                    detail = "m != qhat * nPairs on trial " + std::to_string(trial);
                }
            }
        // block zero-sum of deviations to 1e-9
        for (int u = 0; u < k && pass; ++u)
            for (int v = 0; v < k && pass; ++v) {
                if (qhat(u, v) <= 0.0 || qhat(u, v) >= 1.0) continue;
                double sum = 0.0;
                for (NodeId i : idx.members[u]) sum += dev.values(i, v);
                if (std::abs(sum) > 1e-9) {
                    pass = false;
                    detail = "block zero-sum violated on trial " + std::to_string(trial);
                }
            }
        // gamma bound
        const int b = 4 + static_cast<int>(meta.next_below(12));
        const PsiMatrix psi = sample_psi(dev, b, 50, rng::derive(602, trial));
        if (pass && gamma_max(psi) >
                        std::sqrt(static_cast<double>(b)) * dev.values.cwiseAbs().maxCoeff() +
                            1e-12) {
            pass = false;
            detail = "gamma bound violated on trial " + std::to_string(trial);
        }
        // cdf/quantile round-trip at 1e-12
        const double alpha = 0.001 + 0.998 * meta.next_unit();
        if (pass && std::abs(gumbel_cdf(critical_value(alpha)) - (1.0 - alpha)) > 1e-12) {
            pass = false;
            detail = "cdf/quantile round-trip failed on trial " + std::to_string(trial);
        }
        // theta algebraic zero
        const int m_count = 20 + static_cast<int>(meta.next_below(200));
        const double lmk = std::log(static_cast<double>(m_count) * k);
        if (pass &&
            std::abs(theta(std::sqrt(2.0 * lmk - std::log(lmk)), m_count, k)) > 1e-10) {
            pass = false;
            detail = "theta zero identity failed on trial " + std::to_string(trial);
        }
        // disparity null
        const DisparityVector null_disp = disparity(spec.q, spec.g, spec.g, b, m_count);
        for (double value : null_disp.qv)
            if (value != 0.0) {
                pass = false;
                detail = "null disparity nonzero on trial " + std::to_string(trial);
            }
        if (null_disp.scaled != 0.0) {
            pass = false;
            detail = "null scaled disparity nonzero on trial " + std::to_string(trial);
        }
    }
    report(6, "exact-algebra suite (100 random 20-60 node graphs)", pass, detail);
}

// ---- criterion 7: brute-force oracle equivalence ----------------------------

Eigen::MatrixXd deviations_bruteforce(const AdjacencyMatrix& a, const Membership& g,
                                      const BlockProbabilityMatrix& qhat) {
    const NodeId n = a.node_count();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, g.k);
    for (NodeId i = 0; i < n; ++i)
        for (int v = 0; v < g.k; ++v) {
            double sum = 0.0;
            std::int64_t retained = 0;
            for (NodeId j = 0; j < n; ++j) {
                if (j == i || g[j] != v) continue;
                const double q = qhat(g[i], g[j]);
                if (q <= 0.0 || q >= 1.0) continue;
                sum += ((a.has_edge(i, j) ? 1.0 : 0.0) - q) / std::sqrt(q * (1.0 - q));
                ++retained;
            }
            out(i, v) = retained > 0 ? sum / std::sqrt(static_cast<double>(retained)) : 0.0;
        }
    return out;
}

BlockProbabilityMatrix estimate_q_bruteforce(const AdjacencyMatrix& a, const Membership& g) {
    const int k = g.k;
    std::vector<double> sum(static_cast<std::size_t>(k) * k, 0.0);
    std::vector<double> pairs(static_cast<std::size_t>(k) * k, 0.0);
    for (NodeId i = 0; i < a.node_count(); ++i)
        for (NodeId j = 0; j < a.node_count(); ++j) {
            if (i == j) continue;
            sum[g[i] * k + g[j]] += a.has_edge(i, j) ? 1.0 : 0.0;
            pairs[g[i] * k + g[j]] += 1.0;
        }
    BlockProbabilityMatrix q(k, 0.0);
    for (int u = 0; u < k; ++u)
        for (int v = 0; v < k; ++v) q.at(u, v) = sum[u * k + v] / pairs[u * k + v];
    return q;
}

std::vector<double> disparity_bruteforce(const BlockProbabilityMatrix& q_true,
                                         const Membership& g_true, const Membership& g0) {
    const auto avg = block_average_q(q_true, g_true, g0);
    const NodeId n = g0.node_count();
    const BlockIndex idx_true = block_index(g_true);
    std::vector<double> qv(static_cast<std::size_t>(g0.k), 0.0);
    for (int v = 0; v < g0.k; ++v)
        for (int ustar = 0; ustar < g_true.k; ++ustar) {
            const NodeId i = idx_true.members[ustar].front();
            double sum = 0.0;
            std::int64_t retained = 0;
            for (NodeId j = 0; j < n; ++j) {
                if (j == i || g0[j] != v) continue;
                const double q0 = avg(g0[i], g0[j]);
                if (q0 <= 0.0 || q0 >= 1.0) continue;
                sum += (q_true(g_true[i], g_true[j]) - q0) / std::sqrt(q0 * (1.0 - q0));
                ++retained;
            }
            const double q_vu =
                retained > 0 ? std::abs(sum) / std::sqrt(static_cast<double>(retained)) : 0.0;
            qv[v] += static_cast<double>(idx_true.sizes[ustar]) / n * q_vu;
        }
    return qv;
}

void criterion_7() {
    bool pass = true;
    std::string detail = "implementation matched brute force on 25 graphs";
    for (std::uint64_t trial = 0; trial < 25 && pass; ++trial) {
        rng::Stream meta(rng::derive(700, trial));
        const NodeId n = static_cast<NodeId>(12 + meta.next_below(19)); // up to 30
        const int k = static_cast<int>(2 + meta.next_below(2));

        SbmSpec spec;
        spec.q = BlockProbabilityMatrix(k, 0.15);
        for (int u = 0; u < k; ++u) spec.q.at(u, u) = 0.15 + 0.3 * meta.next_unit();
        spec.g.k = k;
        spec.g.labels.resize(static_cast<std::size_t>(n));
        for (NodeId i = 0; i < n; ++i) spec.g.labels[i] = static_cast<NodeId>(i % k);
        spec.seed = rng::derive(701, trial);
        const AdjacencyMatrix a = generate_sbm(spec);

        const auto qhat = estimate_q(a, spec.g);
        const auto q_brute = estimate_q_bruteforce(a, spec.g);
        for (int u = 0; u < k; ++u)
            for (int v = 0; v < k; ++v)
                if (std::abs(qhat(u, v) - q_brute(u, v)) > 1e-10) {
                    pass = false;
                    detail = "estimate_q mismatch on trial " + std::to_string(trial);
                }

        const DeviationMatrix dev = entrywise_deviations(a, spec.g, qhat);
        const Eigen::MatrixXd dev_brute = deviations_bruteforce(a, spec.g, qhat);
        if (pass && (dev.values - dev_brute).cwiseAbs().maxCoeff() > 1e-10) {
            pass = false;
            detail = "entrywise_deviations mismatch on trial " + std::to_string(trial);
        }

        const Membership coarse = merge_adjacent_blocks(spec.g, std::max(1, k - 1));
        const DisparityVector disp = disparity(spec.q, spec.g, coarse, 8, 60);
        const auto disp_brute = disparity_bruteforce(spec.q, spec.g, coarse);
        for (std::size_t v = 0; pass && v < disp.qv.size(); ++v)
            if (std::abs(disp.qv[v] - disp_brute[v]) > 1e-10) {
                pass = false;
                detail = "disparity mismatch on trial " + std::to_string(trial);
            }
    }
    report(7, "oracle equivalence (25 random graphs, n <= 30)", pass, detail);
}

// ---- criterion 8: Gumbel MLE recovery ---------------------------------------

void criterion_8() {
    const GumbelParams truth = null_gumbel_params();
    rng::Stream stream(800800);
    std::vector<double> sample(100000);
    for (auto& x : sample) {
        double u = stream.next_unit();
        while (u <= 0.0) u = stream.next_unit();
        x = gumbel_quantile(u, truth);
    }
    const GumbelParams fit = fit_gumbel_mle(sample);
    const bool pass = std::abs(fit.mu + 1.1447) <= 0.05 && std::abs(fit.beta - 2.0) <= 0.05;
    std::ostringstream ss;
    ss << "mu_hat " << fit.mu << ", beta_hat " << fit.beta;
    report(8, "Gumbel MLE recovery (1e5 samples)", pass, ss.str());
}

// ---- criterion 9: CLI determinism -------------------------------------------

struct CliRun {
    int exit_code = -1;
    std::string out;
};

CliRun run_cli(const std::string& args) {
    const std::string cmd = std::string(SBMGOF_CLI_PATH) + " " + args + " 2>/dev/null";
    CliRun res;
    std::array<char, 4096> buf{};
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return res;
    std::size_t got = 0;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) res.out.append(buf.data(), got);
    const int status = pclose(pipe);
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void criterion_9() {
    bool pass = true;
    std::string detail = "byte-identical outputs across reruns and worker counts";
    const fs::path dir = fs::temp_directory_path() / "sbmgof_acceptance";
    fs::create_directories(dir);
    {
        std::ofstream spec(dir / "spec.json");
        spec << R"({"k":2,"sizes":[60,60],"q":[[0.5,0.1],[0.1,0.5]],"seed":5})";
    }
    const std::string spec = (dir / "spec.json").string();
    const std::string g1 = (dir / "a1.edges").string();
    const std::string g2 = (dir / "a2.edges").string();
    if (run_cli("generate --config " + spec + " --out " + g1).exit_code != 0 ||
        run_cli("generate --config " + spec + " --out " + g2).exit_code != 0) {
        report(9, "CLI determinism", false, "generate failed");
        return;
    }
    if (slurp(g1) != slurp(g2) || slurp(g1 + ".membership") != slurp(g2 + ".membership")) {
        pass = false;
        detail = "generate outputs differ between runs";
    }

    const std::string tk =
        "test-k --graph " + g1 + " --k 2 --seed 7 --variant bootstrap --boot-j 20";
    const CliRun tk1 = run_cli(tk);
    const CliRun tk2 = run_cli(tk);
    if (tk1.exit_code != 0 || tk1.out != tk2.out) {
        pass = false;
        detail = "test-k outputs differ between runs";
    }

    const std::string tg =
        "test-g --graph " + g1 + " --membership " + g1 + ".membership --seed 3";
    const CliRun tg1 = run_cli(tg);
    const CliRun tg2 = run_cli(tg);
    if (tg1.exit_code != 0 || tg1.out != tg2.out) {
        pass = false;
        detail = "test-g outputs differ between runs";
    }

    const std::string sim_base =
        "simulate --setting 1i --reps 4 --k 2 --k0 2 --seed 11 --variant bootstrap "
        "--boot-j 15 --out ";
    const std::string c1 = (dir / "w1.csv").string();
    const std::string c8 = (dir / "w8.csv").string();
    if (run_cli(sim_base + c1 + " --workers 1").exit_code != 0 ||
        run_cli(sim_base + c8 + " --workers 8").exit_code != 0 || slurp(c1) != slurp(c8)) {
        pass = false;
        detail = "simulate output depends on worker count";
    }
    const std::string c1b = (dir / "w1b.csv").string();
    if (run_cli(sim_base + c1b + " --workers 1").exit_code != 0 || slurp(c1) != slurp(c1b)) {
        pass = false;
        detail = "simulate outputs differ between identical runs";
    }
    report(9, "CLI determinism (reruns and 1 vs 8 workers)", pass, detail);
}

} // namespace

int main(int argc, char** argv) {
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
    auto wanted = [&](int id) { return selected.empty() || selected.count(id) > 0; };

    if (wanted(1)) criterion_1();
    if (wanted(2)) criterion_2();
    if (wanted(3)) criterion_3();
    if (wanted(4)) criterion_4();
    if (wanted(5)) criterion_5();
    if (wanted(6)) criterion_6();
    if (wanted(7)) criterion_7();
    if (wanted(8)) criterion_8();
    if (wanted(9)) criterion_9();

    if (g_failures == 0)
        std::printf("acceptance: all criteria passed\n");
    else
        std::printf("acceptance: %d criterion(s) failed\n", g_failures);
    return g_failures;
}
