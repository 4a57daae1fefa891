#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "sbmgof/gof.hpp"
#include "sbmgof/graph.hpp"
#include "sbmgof/sbm.hpp"
#include "sbmgof/simulate.hpp"

namespace {

std::uint64_t default_seed() {
    // SBMGOF_SEED provides the fallback when --seed is not given.
    if (const char* env = std::getenv("SBMGOF_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw std::invalid_argument("SBMGOF_SEED is not a valid integer: " +
                                        std::string(env));
        }
    }
    return 0;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TestFlags {
    std::string graph_path;
    double alpha = 0.05;
    std::string variant = "plain";
    std::string b = "auto";
    int m = 100;
    int boot_j = 100;
    std::uint64_t seed = 0;
    bool seed_given = false;
};

void add_shared_test_flags(CLI::App* cmd, TestFlags& flags) {
    cmd->add_option("--graph", flags.graph_path, "edge list file ('-' for stdin)")->required();
    cmd->add_option("--alpha", flags.alpha, "significance level")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    cmd->add_option("--variant", flags.variant, "test variant")
        ->check(CLI::IsMember({"plain", "bootstrap", "augmented", "augmented-bootstrap"}))
        ->capture_default_str();
    cmd->add_option("--b", flags.b, "sample count B or 'auto'")->capture_default_str();
    cmd->add_option("--m", flags.m, "realization count M")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--boot-j", flags.boot_j, "bootstrap replicate count")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--seed", flags.seed, "RNG seed (default: SBMGOF_SEED or 0)");
}

sbmgof::TestOptions make_options(const TestFlags& flags) {
    sbmgof::TestOptions opts;
    opts.alpha = flags.alpha;
    opts.variant = sbmgof::parse_variant(flags.variant);
    opts.m = flags.m;
    opts.bootstrap_j = flags.boot_j;
    opts.seed = flags.seed_given ? flags.seed : default_seed();
    if (flags.b != "auto") {
        try {
            opts.b = std::stoi(flags.b);
        } catch (const std::exception&) {
            throw std::invalid_argument("--b must be a positive integer or 'auto'");
        }
    }
    opts.validate();
    return opts;
}

int run_test_k(const sbmgof::TestOptions& opts, const TestFlags& flags, int k0) {
    const sbmgof::AdjacencyMatrix a = sbmgof::load_edge_list_file(flags.graph_path);
    const sbmgof::TestReport report = sbmgof::test_k(a, k0, opts);
    std::cout << sbmgof::report_to_json(report) << "\n";
    return 0;
}

int run_test_g(const sbmgof::TestOptions& opts, const TestFlags& flags,
               const std::string& membership_path) {
    const sbmgof::AdjacencyMatrix a = sbmgof::load_edge_list_file(flags.graph_path);
    const sbmgof::Membership g0 = sbmgof::load_membership_file(membership_path);
    if (g0.node_count() != a.node_count())
        throw std::runtime_error("membership covers " + std::to_string(g0.node_count()) +
                                 " nodes but the graph has " +
                                 std::to_string(a.node_count()));
    const sbmgof::TestReport report = sbmgof::test_membership(a, g0, opts);
    std::cout << sbmgof::report_to_json(report) << "\n";
    return 0;
}

int run_generate(const std::string& config_path, const std::string& out_path,
                 bool seed_given, std::uint64_t seed) {
    sbmgof::SbmSpec spec = sbmgof::parse_sbm_spec_json(read_file(config_path));
    if (seed_given) spec.seed = seed;
    const sbmgof::AdjacencyMatrix a = sbmgof::generate_sbm(spec);
    sbmgof::save_edge_list_file(a, out_path);
    sbmgof::save_membership_file(spec.g, out_path + ".membership");
    return 0;
}

struct SimulateFlags {
    std::string setting;
    std::string config_path;
    int reps = 0;
    std::string out_path;
    std::string variant;
    std::string hypothesis;
    std::vector<int> k_list;
    std::vector<int> k0_list;
    bool alpha_given = false;
    double alpha = 0.05;
    bool m_given = false;
    int m = 100;
    bool boot_given = false;
    int boot_j = 100;
    std::string b;
    std::uint64_t seed = 0;
    bool seed_given = false;
    int workers = 0;
};

sbmgof::SimConfig make_sim_config(const SimulateFlags& flags) {
    sbmgof::SimConfig config;
    if (!flags.config_path.empty())
        config = sbmgof::parse_sim_config_json(read_file(flags.config_path));
    if (!flags.setting.empty()) config.setting = flags.setting;
    config.reps = flags.reps;
    if (!flags.variant.empty()) config.variant = sbmgof::parse_variant(flags.variant);
    if (!flags.hypothesis.empty())
        config.hypothesis =
            flags.hypothesis == "K" ? sbmgof::Hypothesis::k : sbmgof::Hypothesis::g;
    if (!flags.k_list.empty()) config.k_list = flags.k_list;
    if (!flags.k0_list.empty()) config.k0_list = flags.k0_list;
    if (flags.alpha_given) config.alpha = flags.alpha;
    if (flags.m_given) config.m = flags.m;
    if (flags.boot_given) config.bootstrap_j = flags.boot_j;
    if (!flags.b.empty()) {
        if (flags.b == "auto") {
            config.b.reset();
        } else {
            try {
                config.b = std::stoi(flags.b);
            } catch (const std::exception&) {
                throw std::invalid_argument("--b must be a positive integer or 'auto'");
            }
        }
    }
    config.seed = flags.seed_given ? flags.seed : default_seed();
    if (flags.workers > 0) config.workers = flags.workers;
    config.validate();
    return config;
}

int run_simulate(const sbmgof::SimConfig& config, const std::string& out_path) {
    const sbmgof::RejectionTable table = sbmgof::run_table(config);
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write table file: " + out_path);
    sbmgof::write_table_csv(table, out);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Goodness-of-fit tests for stochastic block models"};
    app.require_subcommand(1);

    TestFlags tk;
    int k0 = 0;
    auto* cmd_test_k = app.add_subcommand("test-k", "test H0: K = K0 on a graph");
    add_shared_test_flags(cmd_test_k, tk);
    cmd_test_k->add_option("--k", k0, "hypothesized community count")
        ->required()
        ->check(CLI::PositiveNumber);

    TestFlags tg;
    std::string membership_path;
    auto* cmd_test_g = app.add_subcommand("test-g", "test H0: g = g0 on a graph");
    add_shared_test_flags(cmd_test_g, tg);
    cmd_test_g->add_option("--membership", membership_path,
                           "membership file, one community id per line")
        ->required();

    std::string gen_config, gen_out;
    std::uint64_t gen_seed = 0;
    auto* cmd_generate = app.add_subcommand("generate", "sample a network from an SBM spec");
    cmd_generate->add_option("--config", gen_config, "SBM spec JSON file")->required();
    cmd_generate->add_option("--out", gen_out, "edge list output path")->required();
    auto* gen_seed_opt = cmd_generate->add_option("--seed", gen_seed, "RNG seed override");

    SimulateFlags sim;
    auto* cmd_simulate = app.add_subcommand("simulate", "rejection-rate tables");
    auto* setting_opt =
        cmd_simulate->add_option("--setting", sim.setting, "built-in simulation setting")
            ->check(CLI::IsMember({"1i", "1ii", "2i", "2ii"}));
    auto* config_opt =
        cmd_simulate->add_option("--config", sim.config_path, "simulation config JSON file");
    setting_opt->excludes(config_opt);
    cmd_simulate->add_option("--reps", sim.reps, "replications per cell")
        ->required()
        ->check(CLI::PositiveNumber);
    cmd_simulate->add_option("--out", sim.out_path, "CSV output path")->required();
    cmd_simulate->add_option("--variant", sim.variant, "test variant")
        ->check(CLI::IsMember({"plain", "bootstrap", "augmented", "augmented-bootstrap"}));
    cmd_simulate->add_option("--hypothesis", sim.hypothesis, "K or G")
        ->check(CLI::IsMember({"K", "G"}));
    cmd_simulate->add_option("--k", sim.k_list, "true community counts (columns)")
        ->delimiter(',');
    cmd_simulate->add_option("--k0", sim.k0_list, "hypothesized counts (rows)")
        ->delimiter(',');
    auto* sim_alpha = cmd_simulate->add_option("--alpha", sim.alpha, "significance level")
                          ->check(CLI::Range(0.0, 1.0));
    auto* sim_m = cmd_simulate->add_option("--m", sim.m, "realization count M")
                      ->check(CLI::PositiveNumber);
    auto* sim_boot = cmd_simulate->add_option("--boot-j", sim.boot_j, "bootstrap replicates")
                         ->check(CLI::PositiveNumber);
    cmd_simulate->add_option("--b", sim.b, "sample count B or 'auto'");
    auto* sim_seed = cmd_simulate->add_option("--seed", sim.seed, "RNG seed");
    cmd_simulate->add_option("--workers", sim.workers, "parallel workers")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (cmd_test_k->parsed() || cmd_test_g->parsed()) {
            TestFlags& flags = cmd_test_k->parsed() ? tk : tg;
            flags.seed_given =
                (cmd_test_k->parsed() ? cmd_test_k : cmd_test_g)->count("--seed") > 0;
            sbmgof::TestOptions opts;
            try {
                opts = make_options(flags);
            } catch (const std::invalid_argument& e) {
                std::cerr << "error: " << e.what() << "\n";
                return 2;
            }
            return cmd_test_k->parsed() ? run_test_k(opts, flags, k0)
                                        : run_test_g(opts, flags, membership_path);
        }
        if (cmd_generate->parsed()) {
            try {
                return run_generate(gen_config, gen_out, gen_seed_opt->count() > 0, gen_seed);
            } catch (const std::invalid_argument& e) {
                std::cerr << "error: " << e.what() << "\n";
                return 2;
            }
        }
        if (cmd_simulate->parsed()) {
            if (sim.setting.empty() && sim.config_path.empty()) {
                std::cerr << "error: simulate needs --setting or --config\n";
                return 2;
            }
            sim.alpha_given = sim_alpha->count() > 0;
            sim.m_given = sim_m->count() > 0;
            sim.boot_given = sim_boot->count() > 0;
            sim.seed_given = sim_seed->count() > 0;
            sbmgof::SimConfig config;
            try {
                config = make_sim_config(sim);
            } catch (const std::invalid_argument& e) {
                std::cerr << "error: " << e.what() << "\n";
                return 2;
            }
            return run_simulate(config, sim.out_path);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
