#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>
#include <vector>

#include "sbmgof/deviation.hpp"
#include "sbmgof/estimation.hpp"
#include "sbmgof/gof.hpp"
#include "sbmgof/graph.hpp"
#include "sbmgof/gumbel.hpp"
#include "sbmgof/sbm.hpp"
#include "sbmgof/simulate.hpp"

namespace py = pybind11;
using namespace sbmgof;

namespace {

TestOptions options_from_kwargs(double alpha, std::optional<int> b, int m, int boot_j,
                                std::uint64_t seed, const std::string& variant) {
    TestOptions opts;
    opts.alpha = alpha;
    opts.b = b;
    opts.m = m;
    opts.bootstrap_j = boot_j;
    opts.seed = seed;
    opts.variant = parse_variant(variant);
    opts.validate();
    return opts;
}

py::dict report_to_dict(const TestReport& r) {
    py::dict d;
    d["statistic"] = r.statistic;
    d["criticalValue"] = r.critical_value;
    d["pValue"] = r.p_value;
    d["reject"] = r.reject;
    d["variant"] = variant_name(r.variant);
    d["k0"] = r.k0;
    d["hypothesis"] = hypothesis_name(r.hypothesis);
    d["bUsed"] = r.b_used;
    d["mUsed"] = r.m_used;
    d["seed"] = r.seed;
    d["membershipSource"] = membership_source_name(r.membership_source);
    if (r.gumbel_fit) {
        py::dict fit;
        fit["mu"] = r.gumbel_fit->mu;
        fit["beta"] = r.gumbel_fit->beta;
        d["gumbelFit"] = fit;
    }
    return d;
}

Membership membership_from_labels(const std::vector<NodeId>& labels) {
    Membership g;
    g.labels = labels;
    g.k = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
    g.validate();
    return g;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Goodness-of-fit tests for stochastic block models";

    py::class_<AdjacencyMatrix>(m, "Graph")
        .def(py::init([](NodeId n, const std::vector<std::pair<NodeId, NodeId>>& edges) {
                 return AdjacencyMatrix(n, edges);
             }),
             py::arg("n"), py::arg("edges"))
        .def_property_readonly("n", &AdjacencyMatrix::node_count)
        .def_property_readonly("edge_count", &AdjacencyMatrix::edge_count)
        .def("edges", &AdjacencyMatrix::edges)
        .def("degree", &AdjacencyMatrix::degree, py::arg("node"))
        .def("has_edge", &AdjacencyMatrix::has_edge, py::arg("i"), py::arg("j"))
        .def("density", [](const AdjacencyMatrix& a) { return density(a); })
        .def("__repr__", [](const AdjacencyMatrix& a) {
            std::ostringstream ss;
            ss << "Graph(n=" << a.node_count() << ", edges=" << a.edge_count() << ")";
            return ss.str();
        });

    m.def("load_edge_list", &load_edge_list_file, py::arg("path"),
          "Read an edge-list file (one 'i j' pair per line, optional n=<int> header).");
    m.def(
        "save_edge_list",
        [](const AdjacencyMatrix& a, const std::string& path) { save_edge_list_file(a, path); },
        py::arg("graph"), py::arg("path"));
    m.def(
        "load_membership",
        [](const std::string& path) { return load_membership_file(path).labels; },
        py::arg("path"), "Read a membership file; returns the label list.");

    m.def(
        "generate_sbm",
        [](int k, const std::vector<std::int64_t>& sizes,
           const std::vector<std::vector<double>>& q, std::uint64_t seed) {
            SbmSpec spec;
            spec.q.k = k;
            spec.q.p.resize(static_cast<std::size_t>(k) * k);
            if (static_cast<int>(q.size()) != k)
                throw std::invalid_argument("q row count does not match k");
            for (int u = 0; u < k; ++u) {
                if (static_cast<int>(q[u].size()) != k)
                    throw std::invalid_argument("q column count does not match k");
                for (int v = 0; v < k; ++v) spec.q.at(u, v) = q[u][v];
            }
            if (static_cast<int>(sizes.size()) != k)
                throw std::invalid_argument("sizes length does not match k");
            spec.g.k = k;
            for (int u = 0; u < k; ++u)
                spec.g.labels.insert(spec.g.labels.end(), static_cast<std::size_t>(sizes[u]),
                                     static_cast<NodeId>(u));
            spec.seed = seed;
            return generate_sbm(spec);
        },
        py::arg("k"), py::arg("sizes"), py::arg("q"), py::arg("seed") = 0,
        "Sample an adjacency matrix from a stochastic block model.");

    m.def(
        "spectral_membership",
        [](const AdjacencyMatrix& a, int k0, std::uint64_t seed) {
            return spectral_membership(a, k0, seed).labels;
        },
        py::arg("graph"), py::arg("k0"), py::arg("seed") = 0,
        "k-means on the rows of the leading eigenvectors; returns labels.");

    m.def(
        "estimate_q",
        [](const AdjacencyMatrix& a, const std::vector<NodeId>& labels) {
            const auto q = estimate_q(a, membership_from_labels(labels));
            std::vector<std::vector<double>> out(static_cast<std::size_t>(q.k));
            for (int u = 0; u < q.k; ++u)
                for (int v = 0; v < q.k; ++v) out[u].push_back(q(u, v));
            return out;
        },
        py::arg("graph"), py::arg("labels"),
        "Maximum likelihood block probability matrix under the given labels.");

    m.def(
        "test_k",
        [](const AdjacencyMatrix& a, int k0, double alpha, std::optional<int> b, int m,
           int boot_j, std::uint64_t seed, const std::string& variant) {
            return report_to_dict(
                test_k(a, k0, options_from_kwargs(alpha, b, m, boot_j, seed, variant)));
        },
        py::arg("graph"), py::arg("k0"), py::arg("alpha") = 0.05, py::arg("b") = py::none(),
        py::arg("m") = 100, py::arg("boot_j") = 100, py::arg("seed") = 0,
        py::arg("variant") = "plain",
        "Test H0: K = k0 (membership estimated by spectral clustering).");

    m.def(
        "test_g",
        [](const AdjacencyMatrix& a, const std::vector<NodeId>& labels, double alpha,
           std::optional<int> b, int m, int boot_j, std::uint64_t seed,
           const std::string& variant) {
            return report_to_dict(test_membership(
                a, membership_from_labels(labels),
                options_from_kwargs(alpha, b, m, boot_j, seed, variant)));
        },
        py::arg("graph"), py::arg("labels"), py::arg("alpha") = 0.05, py::arg("b") = py::none(),
        py::arg("m") = 100, py::arg("boot_j") = 100, py::arg("seed") = 0,
        py::arg("variant") = "plain", "Test H0: g = labels.");

    m.def("gumbel_cdf", &gumbel_cdf, py::arg("x"));
    m.def("critical_value", &critical_value, py::arg("alpha"));
    m.def("p_value", &p_value, py::arg("theta"));
    m.def("default_b", &default_b, py::arg("density"), py::arg("n"));
    m.def(
        "fit_gumbel",
        [](const std::vector<double>& sample) {
            const GumbelParams fit = fit_gumbel_mle(sample);
            return py::make_tuple(fit.mu, fit.beta);
        },
        py::arg("sample"), "Maximum likelihood (mu, beta) of a Gumbel fit.");

    m.def(
        "simulate",
        [](const std::string& config_json) {
            const RejectionTable table = run_table(parse_sim_config_json(config_json));
            std::ostringstream out;
            write_table_csv(table, out);
            return out.str();
        },
        py::arg("config_json"),
        "Run a rejection-rate table from a JSON config; returns the CSV text.");
}
