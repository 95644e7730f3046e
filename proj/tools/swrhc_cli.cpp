// swrhc: switching receding horizon control experiments.
//
//   swrhc run --preset switch_m9 --out runs/m9
//   swrhc run --config my.json --out runs/custom [--t-infinity 10]
//   swrhc batch --preset switch_m4 --preset nonswitch_m4 --out runs
//   swrhc compare runs/*/summary.json [--csv]
//   swrhc placements --m 9

#include "swrhc/error.hpp"
#include "swrhc/experiment.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>

namespace ex = swrhc::experiment;

namespace {

struct Overrides {
    std::optional<double> t_infinity;
    std::optional<std::size_t> mesh_cells;
    std::optional<std::size_t> max_iters;
    std::optional<double> tol;
    std::optional<double> horizon;
    std::optional<double> delta;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--t-infinity", t_infinity, "Total simulated time");
        cmd->add_option("--mesh", mesh_cells, "Cells per side of the uniform triangulation");
        cmd->add_option("--max-iters", max_iters, "Inner optimizer iteration cap");
        cmd->add_option("--tol", tol, "Inner optimizer termination threshold");
        cmd->add_option("--horizon", horizon, "Prediction horizon T");
        cmd->add_option("--delta", delta, "Sampling time");
    }

    void apply(ex::ExperimentConfig& c) const {
        if (t_infinity) c.rhc.t_infinity = *t_infinity;
        if (mesh_cells) c.rhc.mesh_cells = *mesh_cells;
        if (max_iters) c.rhc.optimizer.max_iters = *max_iters;
        if (tol) c.rhc.optimizer.tol = *tol;
        if (horizon) c.rhc.horizon = *horizon;
        if (delta) c.rhc.delta = *delta;
        c.validate();
    }
};

void print_summary(const ex::RunSummary& s, const std::string& out) {
    std::printf("%s (%s, M=%zu): J=%.6e  final V'=%.6e  windows=%zu  inner=%zu  %.1fs%s\n  -> %s\n",
                s.name.c_str(), s.mode.c_str(), s.actuators, s.accumulated_cost, s.final_vprime_norm,
                s.outer_iterations, s.inner_iterations, s.wall_time_seconds, s.failed ? "  FAILED" : "",
                out.c_str());
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Switching point-actuator receding horizon control"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run one experiment");
    std::string config_path, preset_name, out_dir;
    auto* opt_config = run->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    auto* opt_preset = run->add_option("--preset", preset_name, "Named preset");
    opt_config->excludes(opt_preset);
    run->add_option("--out", out_dir, "Output directory")->required();
    Overrides run_over;
    run_over.add_to(run);

    auto* batch = app.add_subcommand("batch", "Run several presets, each into <out>/<name>");
    std::vector<std::string> batch_presets;
    std::string batch_out;
    batch->add_option("--preset", batch_presets, "Preset name (repeatable)")->required();
    batch->add_option("--out", batch_out, "Output root")->required();
    Overrides batch_over;
    batch_over.add_to(batch);

    auto* compare = app.add_subcommand("compare", "Tabulate run summaries");
    std::vector<std::string> summaries;
    bool as_csv = false;
    compare->add_option("summaries", summaries, "summary.json files")->required()->check(CLI::ExistingFile);
    compare->add_flag("--csv", as_csv, "Emit CSV instead of an aligned table");

    auto* placements = app.add_subcommand("placements", "Print a default actuator layout");
    std::size_t m = 0;
    placements->add_option("--m", m, "Actuator count (3, 4, 9 or 12)")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            if (config_path.empty() && preset_name.empty()) throw swrhc::InvalidArgument("run: give --config or --preset");
            ex::ExperimentConfig cfg = config_path.empty() ? ex::preset(preset_name) : ex::load_config(config_path);
            run_over.apply(cfg);
            const auto art = ex::run_experiment(cfg, out_dir);
            print_summary(art.summary, out_dir);
            return art.summary.failed ? 2 : 0;
        }
        if (batch->parsed()) {
            std::vector<ex::ExperimentConfig> cfgs;
            for (const auto& name : batch_presets) {
                cfgs.push_back(ex::preset(name));
                batch_over.apply(cfgs.back());
            }
            const auto results = ex::run_batch(cfgs, batch_out);
            bool failed = false;
            for (std::size_t i = 0; i < results.size(); ++i) {
                print_summary(results[i], batch_out + "/" + cfgs[i].name);
                failed = failed || results[i].failed;
            }
            return failed ? 2 : 0;
        }
        if (compare->parsed()) {
            std::vector<ex::RunSummary> runs;
            for (const auto& p : summaries) runs.push_back(ex::load_summary(p));
            std::cout << ex::compare_runs(runs, as_csv);
            return 0;
        }
        if (placements->parsed()) {
            const auto pts = ex::default_placement(m);
            std::printf("j,x,y\n");
            for (std::size_t j = 0; j < pts.size(); ++j) std::printf("%zu,%.17g,%.17g\n", j + 1, pts[j].x, pts[j].y);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
