#pragma once

#include "swrhc/rhc.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace swrhc::experiment {

enum class Mode { free, switching, nonswitching };

std::string_view mode_name(Mode mode);

/// A named run: the RHC parameters plus which pipeline to drive.
struct ExperimentConfig {
    std::string name = "custom";
    Mode mode = Mode::switching;
    RhcConfig rhc;

    /// Throws InvalidArgument naming the offending field.
    void validate() const;
};

/// Default actuator layouts for M in {3, 4, 9, 12}:
///   M=3  (0.25,0.25) (0.75,0.25) (0.5,0.75)
///   M=4  {0.25, 0.75}^2
///   M=9  {1/6, 1/2, 5/6}^2
///   M=12 {0.125, 0.375, 0.625, 0.875} x {1/6, 1/2, 5/6}
/// Points are listed row by row (x fastest). Other counts are rejected.
std::vector<Point> default_placement(std::size_t m);

/// free, switch_m3, switch_m4, switch_m9, switch_m12, nonswitch_m4
const std::vector<std::string>& preset_names();

/// nu = 0.1, beta = 5e-4, dt = 5e-3, T = 1, delta = 0.25, t_infinity = 5,
/// 32 cells per side. Throws InvalidArgument for unknown names.
ExperimentConfig preset(std::string_view name);

/// JSON config schema (all keys optional except where a preset is absent):
///   { "name": str, "preset": str, "mode": "free"|"switching"|"nonswitching",
///     "mesh_cells": int, "nu": num, "beta": num, "dt": num, "delta": num,
///     "horizon": num, "t_infinity": num,
///     "actuators": [[x, y], ...] | "placement": int,
///     "optimizer": { "tol", "max_iters", "ls_memory", "ls_shrink",
///                    "ls_sufficient_decrease", "alpha_min", "alpha_max",
///                    "max_backtracks" } }
/// When "preset" is given its values are the defaults for the other keys.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const ExperimentConfig& config);

struct RunSummary {
    int format_version = 1;
    std::string name;
    std::string mode;
    std::size_t actuators = 0;
    std::size_t mesh_cells = 0;
    double t_infinity = 0.0;
    double accumulated_cost = 0.0;
    double initial_vprime_norm = 0.0;
    double final_vprime_norm = 0.0;
    double final_h_norm = 0.0;
    std::size_t outer_iterations = 0;
    std::size_t inner_iterations = 0;
    std::size_t windows_converged = 0;
    bool failed = false;
    std::string failure;
    double wall_time_seconds = 0.0;
    std::string isa;
};

struct RunArtifacts {
    std::filesystem::path norms_csv;
    std::filesystem::path switching_csv;
    std::filesystem::path windows_csv;
    std::filesystem::path summary_json;
    std::filesystem::path config_json;
    RunSummary summary;
    RhcReport report;
};

/// Runs the configured pipeline from the default initial state
/// x1 (1 + sin(2 x2)) and writes into out_dir:
///   norms.csv      t,h_norm,v_norm,vprime_norm           (every dt node)
///   switching.csv  t,active,magnitude,u1..uM             (every dt step)
///   windows.csv    window,t0,iterations,cost,converged
///   summary.json   RunSummary
///   config.json    the validated config echo
/// A solver failure still writes the partial artifacts plus a FAILED file.
RunArtifacts run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir);
RunArtifacts run_experiment(const std::filesystem::path& config_path, const std::filesystem::path& out_dir);

/// Runs several configs, each into out_root/<name>, on up to
/// SWRHC_THREADS worker threads (default: hardware concurrency).
std::vector<RunSummary> run_batch(const std::vector<ExperimentConfig>& configs,
                                  const std::filesystem::path& out_root);

std::size_t thread_cap();

RunSummary summary_from_json(std::string_view json_text);
RunSummary load_summary(const std::filesystem::path& path);
std::string summary_to_json(const RunSummary& summary);

/// Aligned text table (csv = false) or CSV of cost and final norms.
std::string compare_runs(const std::vector<RunSummary>& runs, bool csv = false);

} // namespace swrhc::experiment
