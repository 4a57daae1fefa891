#include "sbmgof/simulate.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "sbmgof/parallel.hpp"
#include "sbmgof/rng.hpp"

namespace sbmgof {

namespace {

std::uint64_t setting_tag(const std::string& s) {
    if (s == "1i") return 1;
    if (s == "1ii") return 2;
    if (s == "2i") return 3;
    if (s == "2ii") return 4;
    if (s == "custom") return 5;
    throw std::invalid_argument("unknown setting: " + s);
}

std::vector<int> default_k_grid(const std::string& setting) {
    if (setting == "1i" || setting == "2i") return {2, 4, 6, 8, 10};
    if (setting == "1ii") return {3, 5, 10, 15, 20};
    if (setting == "2ii") return {2, 3, 4, 5, 6, 8, 10};
    return {};
}

Membership equal_blocks(int k, std::int64_t size) {
    Membership g;
    g.k = k;
    g.labels.reserve(static_cast<std::size_t>(k) * size);
    for (int u = 0; u < k; ++u)
        g.labels.insert(g.labels.end(), static_cast<std::size_t>(size), static_cast<NodeId>(u));
    return g;
}

BlockProbabilityMatrix planted_q(int k, double within, double between) {
    BlockProbabilityMatrix q(k, between);
    for (int u = 0; u < k; ++u) q.at(u, u) = within;
    return q;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) throw std::runtime_error("double formatting failed");
    return std::string(buf, ptr);
}

} // namespace

void SimConfig::validate() const {
    setting_tag(setting);
    if (reps < 1) throw std::invalid_argument("reps must be at least 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
    if (m < 1) throw std::invalid_argument("m must be at least 1");
    if (b && *b < 1) throw std::invalid_argument("b must be at least 1");
    if (workers < 1) throw std::invalid_argument("workers must be at least 1");
    if (setting == "custom" && !custom)
        throw std::invalid_argument("setting custom requires a custom model");
    if ((setting == "1i" || setting == "2i") && block_size < 2)
        throw std::invalid_argument("block size must be at least 2");
    if ((setting == "1ii" || setting == "2ii") && n < 2)
        throw std::invalid_argument("n must be at least 2");
}

SimConfig parse_sim_config_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("invalid sim config JSON: ") + e.what());
    }
    SimConfig c;
    try {
        c.setting = j.value("setting", std::string("1i"));
        auto read_int_list = [&](const char* key) -> std::vector<int> {
            if (!j.contains(key)) return {};
            if (j.at(key).is_array()) return j.at(key).get<std::vector<int>>();
            return {j.at(key).get<int>()};
        };
        c.k_list = read_int_list("k");
        c.k0_list = read_int_list("k0");
        c.block_size = j.value("blockSize", 300);
        c.n = j.value("n", 3000);
        c.reps = j.value("reps", 200);
        c.variant = parse_variant(j.value("variant", std::string("plain")));
        const std::string hyp = j.value("hypothesis", std::string("K"));
        if (hyp == "K")
            c.hypothesis = Hypothesis::k;
        else if (hyp == "G")
            c.hypothesis = Hypothesis::g;
        else
            throw std::invalid_argument("hypothesis must be K or G");
        c.alpha = j.value("alpha", 0.05);
        c.seed = j.value("seed", std::uint64_t{0});
        c.m = j.value("m", 100);
        c.bootstrap_j = j.value("bootJ", 100);
        if (j.contains("b") && !(j.at("b").is_string() && j.at("b") == "auto"))
            c.b = j.at("b").get<int>();
        c.workers = j.value("workers", 1);
        if (j.contains("custom")) c.custom = parse_sbm_spec_json(j.at("custom").dump());
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("invalid sim config JSON: ") + e.what());
    }
    c.validate();
    return c;
}

SbmSpec setting_model(const SimConfig& config, int k_true) {
    if (k_true < 1) throw std::invalid_argument("k must be at least 1");
    SbmSpec spec;
    if (config.setting == "custom") {
        spec = *config.custom;
        if (spec.g.k != k_true)
            throw std::invalid_argument("custom model has k=" + std::to_string(spec.g.k) +
                                        ", cell requested k=" + std::to_string(k_true));
        return spec;
    }
    if (config.setting == "1i" || config.setting == "2i") {
        const std::int64_t n = static_cast<std::int64_t>(config.block_size) * k_true;
        spec.g = equal_blocks(k_true, config.block_size);
        if (config.setting == "1i") {
            spec.q = planted_q(k_true, 0.5, 0.1);
        } else {
            const double base = 2.0 * std::log(std::log(static_cast<double>(n))) /
                                static_cast<double>(n);
            spec.q = planted_q(k_true, 5.0 * base, base);
        }
        return spec;
    }
    // fixed-n settings
    const std::int64_t n = config.n;
    if (n % k_true != 0)
        throw std::invalid_argument("network size " + std::to_string(n) +
                                    " is not divisible by k=" + std::to_string(k_true));
    spec.g = equal_blocks(k_true, n / k_true);
    if (config.setting == "1ii") {
        spec.q = planted_q(k_true, 0.5, 0.1);
    } else {
        const double base =
            3.0 * std::log(std::log(static_cast<double>(n))) / static_cast<double>(n);
        spec.q = planted_q(k_true, 5.0 * base, base);
    }
    return spec;
}

Membership merge_adjacent_blocks(const Membership& g, int k0) {
    if (k0 < 1 || k0 > g.k)
        throw std::invalid_argument("merge target must lie in [1, k]");
    Membership out;
    out.k = k0;
    out.labels.resize(g.labels.size());
    for (std::size_t i = 0; i < g.labels.size(); ++i)
        out.labels[i] = static_cast<NodeId>(
            static_cast<std::int64_t>(g.labels[i]) * k0 / g.k);
    out.validate();
    return out;
}

double run_cell(const SimConfig& config, int k0, int k_true) {
    config.validate();
    const SbmSpec model = setting_model(config, k_true);
    const std::uint64_t cell_seed =
        rng::derive(config.seed, rng::kTagSimReplicate, setting_tag(config.setting),
                    static_cast<std::uint64_t>(k0), static_cast<std::uint64_t>(k_true));

    std::vector<char> rejected(static_cast<std::size_t>(config.reps), 0);
    parallel_for(config.reps, config.workers, [&](std::int64_t r) {
        try {
            const std::uint64_t rep_seed = rng::derive(cell_seed, static_cast<std::uint64_t>(r));
            SbmSpec draw = model;
            draw.seed = rng::derive(rep_seed, 0);
            const AdjacencyMatrix a = generate_sbm(draw);
            TestOptions opts;
            opts.alpha = config.alpha;
            opts.b = config.b;
            opts.m = config.m;
            opts.bootstrap_j = config.bootstrap_j;
            opts.seed = rng::derive(rep_seed, 1);
            opts.variant = config.variant;
            TestReport report;
            if (config.hypothesis == Hypothesis::k) {
                report = test_k(a, k0, opts);
            } else {
                const Membership g0 = merge_adjacent_blocks(model.g, k0);
                report = test_membership(a, g0, opts);
            }
            rejected[static_cast<std::size_t>(r)] = report.reject ? 1 : 0;
        } catch (const std::exception& e) {
            throw std::runtime_error("cell (k0=" + std::to_string(k0) +
                                     ", K=" + std::to_string(k_true) + ") replicate " +
                                     std::to_string(r) + " failed: " + e.what());
        }
    });
    std::int64_t tally = 0;
    for (char c : rejected) tally += c;
    return static_cast<double>(tally) / static_cast<double>(config.reps);
}

RejectionTable run_table(const SimConfig& config) {
    config.validate();
    RejectionTable table;
    table.k_list = config.k_list;
    table.k0_list = config.k0_list;
    if (config.setting == "custom" && table.k_list.empty())
        table.k_list = {config.custom->g.k};
    if (table.k_list.empty()) table.k_list = default_k_grid(config.setting);
    if (table.k0_list.empty()) table.k0_list = table.k_list;
    table.reps = config.reps;
    table.cells.assign(table.k0_list.size() * table.k_list.size(), std::nullopt);
    for (std::size_t row = 0; row < table.k0_list.size(); ++row)
        for (std::size_t col = 0; col < table.k_list.size(); ++col) {
            const int k0 = table.k0_list[row];
            const int k_true = table.k_list[col];
            if (k0 > k_true) continue; // one-sided design: absent cell
            table.cells[row * table.k_list.size() + col] = run_cell(config, k0, k_true);
        }
    table.metadata = {
        "setting=" + config.setting,
        "hypothesis=" + hypothesis_name(config.hypothesis),
        "variant=" + variant_name(config.variant),
        "alpha=" + format_double(config.alpha),
        "reps=" + std::to_string(config.reps),
        "seed=" + std::to_string(config.seed),
        "m=" + std::to_string(config.m),
        "bootJ=" + std::to_string(config.bootstrap_j),
        "b=" + (config.b ? std::to_string(*config.b) : std::string("auto")),
    };
    return table;
}

void write_table_csv(const RejectionTable& table, std::ostream& out) {
    out << "K0";
    for (int k : table.k_list) out << "," << k;
    out << "\n";
    for (std::size_t row = 0; row < table.k0_list.size(); ++row) {
        out << table.k0_list[row];
        for (std::size_t col = 0; col < table.k_list.size(); ++col) {
            const auto& cell = table.cells[row * table.k_list.size() + col];
            out << ",";
            if (cell)
                out << format_double(*cell);
            else
                out << "*";
        }
        out << "\n";
    }
    for (const auto& line : table.metadata) out << "# " << line << "\n";
}

RejectionTable read_table_csv(std::istream& in) {
    RejectionTable table;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty table CSV");
    {
        std::stringstream header(line);
        std::string tok;
        if (!std::getline(header, tok, ',') || tok != "K0")
            throw std::runtime_error("table CSV must start with a K0 header");
        while (std::getline(header, tok, ',')) table.k_list.push_back(std::stoi(tok));
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::string meta = line.substr(1);
            if (!meta.empty() && meta.front() == ' ') meta.erase(0, 1);
            table.metadata.push_back(meta);
            continue;
        }
        std::stringstream row(line);
        std::string tok;
        if (!std::getline(row, tok, ',')) throw std::runtime_error("bad table CSV row");
        table.k0_list.push_back(std::stoi(tok));
        std::size_t col = 0;
        while (std::getline(row, tok, ',')) {
            if (col >= table.k_list.size()) throw std::runtime_error("too many table columns");
            if (tok == "*")
                table.cells.push_back(std::nullopt);
            else
                table.cells.push_back(std::stod(tok));
            ++col;
        }
        if (col != table.k_list.size()) throw std::runtime_error("missing table columns");
    }
    return table;
}

} // namespace sbmgof
