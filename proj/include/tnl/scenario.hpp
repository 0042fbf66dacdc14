#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tnl/advect.hpp"
#include "tnl/exact.hpp"
#include "tnl/mollify.hpp"

namespace tnl {

struct ScenarioConfig {
    int space_n = 4;
    double cfl = 0.25;
    Window solve_window = Window::centered(3);
    Window measure_window = Window::centered(2);
    Window analysis_window = Window::centered(1);
    std::uint64_t seed = 2024;

    /// Exact snapshots of the truncated branches need level >= 2i.
    int exact_level(int i) const { return 2 * i; }
    /// Solver spacing ladder: finer mollification earns a finer grid.
    Dyadic solver_h(int j) const { return Dyadic::pow2(std::min(8, std::max(6, j + 3))); }
};

/// Stage endpoints of the truncated schedule (checkpoint times).
std::vector<Dyadic> truncated_checkpoints(int i, int variant);

/// One numerical run of variant k at mollification scale j: solve to t=2 and
/// measure the L1 distance to the exact truncated branch at each checkpoint.
struct VariantRun {
    int variant = 0, i = 0, j = 0;
    Dyadic h;
    Trajectory traj;
    std::vector<double> checkpoint_dist;
    double time_weighted_dist = 0.0;  // checkpoint Riemann sum of the L1 gaps
};

VariantRun run_variant(int variant, int i, int j, const ScenarioConfig& cfg,
                       std::optional<Dyadic> h_override = std::nullopt);

struct SelectTrial {
    int j;
    double distance;  // summed over both variants
};

struct SelectResult {
    int j = 0;
    double achieved = 0.0;
    bool met = false;
    std::vector<SelectTrial> trail;
    std::map<std::pair<int, int>, VariantRun> runs;  // (variant, j) -> run
};

/// Doubling-resolution search (j -> j+1 halves the kernel scale) for the
/// smallest tested j with summed checkpoint distance below the target.
/// Never silently passes: `met` reports whether the target was reached.
SelectResult select_j(int i, double target, const ScenarioConfig& cfg, int j_start = 3,
                      int j_max = 5);

struct TheoremRunOptions {
    std::vector<int> i_list = {1, 2, 3};
    ScenarioConfig cfg;
    double target_scale = 1.0;  // target = target_scale * 2^-i
    int j_start = 3;
    int j_max = 5;
    std::filesystem::path out_dir;  // empty: no artifacts written
};

struct TheoremVariantReport {
    int variant = 0;
    int j = 0;
    double time_weighted_dist = 0.0;
    double end_dist_to_data = 0.0;    // L1(analysis window) to rho_in
    double end_weak_gap_l0 = 0.0;     // level-0 weak gap of the end state
    double field_l1_gap = 0.0;        // |b^k_{i,j} - b| over [0,2] x Q1
    double field_sup = 0.0;           // measured sup of the mollified field
};

struct TheoremReport {
    int i = 0;
    int j_selected = 0;
    bool target_met = false;
    double target = 0.0;
    double achieved = 0.0;
    double data_l1_gap = 0.0;           // |rho_{j,in} - rho_in| over Q1
    double data_sup = 0.0;
    double exact_gap_var1 = 0.0;        // weak gap of trunc1 end at level 2i-1 (exact)
    bool exact_var2_returns = false;    // trunc2 end state == rho_in, bit-exact
    double end_state_separation = 0.0;  // L1 distance between the two end states
    double distinctness_floor = 0.0;    // exact L1(prime(2), tilde(2)) on Q1
    TheoremVariantReport variants[2];
};

std::vector<TheoremReport> run_theorem2(const TheoremRunOptions& opt);

struct LiftedSliceReport {
    double t = 0.0;
    double y0 = 0.0;
    double slice_distance = 0.0;  // L1 per window between prime and tilde slices
    bool branches_equal = false;
};

std::vector<LiftedSliceReport> run_lifted(const std::vector<double>& t_list, int level,
                                          int space_n,
                                          const std::filesystem::path& out_dir = {});

/// Serializes reports and writes manifest.json / diagnostics CSVs / snapshot
/// artifacts under out_dir (skipped when out_dir is empty).
void write_theorem_artifacts(const std::filesystem::path& out_dir,
                             const TheoremRunOptions& opt,
                             const std::vector<TheoremReport>& reports,
                             const std::map<std::pair<int, int>, VariantRun>& final_runs);

}  // namespace tnl
