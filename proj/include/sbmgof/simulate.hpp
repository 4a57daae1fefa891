#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sbmgof/gof.hpp"
#include "sbmgof/sbm.hpp"

namespace sbmgof {

/// Monte Carlo study configuration. Settings 1i/2i grow the network with the
/// community count (300 nodes per block); 1ii/2ii keep n fixed and shrink the
/// blocks. "custom" takes an explicit (q, sizes) model.
struct SimConfig {
    std::string setting = "1i"; // 1i | 1ii | 2i | 2ii | custom
    std::vector<int> k_list;    // true community counts (columns); empty = setting default
    std::vector<int> k0_list;   // hypothesized counts (rows); empty = setting default
    int block_size = 300;       // settings 1i / 2i
    int n = 3000;               // settings 1ii / 2ii
    int reps = 200;
    Variant variant = Variant::plain;
    Hypothesis hypothesis = Hypothesis::k;
    double alpha = 0.05;
    std::uint64_t seed = 0;
    int m = 100;
    int bootstrap_j = 100;
    std::optional<int> b; // nullopt = auto
    int workers = 1;
    std::optional<SbmSpec> custom;

    void validate() const;
};

SimConfig parse_sim_config_json(const std::string& text);

/// Rejection fractions per (k0, K) cell; cells with k0 > K are absent.
struct RejectionTable {
    std::vector<int> k0_list;
    std::vector<int> k_list;
    std::vector<std::optional<double>> cells; // row-major, k0 rows x k columns
    int reps = 0;
    std::vector<std::string> metadata; // one comment line each

    std::optional<double> cell(int row, int col) const {
        return cells[static_cast<std::size_t>(row) * k_list.size() + col];
    }
};

// The generating model a setting prescribes for a given true K (exposed so
// tests can pin the edge-probability rules).
SbmSpec setting_model(const SimConfig& config, int k_true);

// Coarsens a membership to k0 communities by merging adjacent blocks; used
// for hypothesis (II) cells where a misspecified g0 is required.
Membership merge_adjacent_blocks(const Membership& g, int k0);

// Rejection fraction over config.reps replications at hypothesis count k0
// against data generated with k_true communities. Replicate seeds derive from
// (seed, setting, k0, k_true, r), so a longer run extends a shorter one.
double run_cell(const SimConfig& config, int k0, int k_true);

RejectionTable run_table(const SimConfig& config);

// Header row of K values, one row per K0, "*" for absent cells, metadata as
// trailing comment lines.
void write_table_csv(const RejectionTable& table, std::ostream& out);
RejectionTable read_table_csv(std::istream& in);

} // namespace sbmgof
