#pragma once

#include "swrhc/dynamics.hpp"
#include "swrhc/fem.hpp"
#include "swrhc/mesh.hpp"
#include "swrhc/norms.hpp"
#include "swrhc/optimizer.hpp"

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace swrhc {

struct RhcConfig {
    double delta = 0.25;       ///< sampling time
    double horizon = 1.0;      ///< prediction horizon T >= delta
    double t_infinity = 5.0;   ///< total simulated time
    double dt = 5e-3;
    double beta = 5e-4;
    double nu = 0.1;
    std::size_t mesh_cells = 32;
    std::vector<Point> actuators;
    OptimizerOptions optimizer;
    Constraint constraint = Constraint::switching;

    /// delta <= horizon, delta and horizon multiples of dt, t_infinity a
    /// multiple of delta, positive parameters. Throws InvalidArgument.
    void validate() const;

    std::size_t steps_per_delta() const;
    std::size_t steps_per_window() const;
    std::size_t windows() const;
    std::size_t total_steps() const;
};

/// Mesh, operators, actuators and norms for one configuration.
struct RhcSetup {
    Mesh mesh;
    std::unique_ptr<OperatorSet> ops;
    std::unique_ptr<ActuatorSet> actuators;
    std::unique_ptr<NormContext> norms;

    static RhcSetup build(const RhcConfig& config, Coefficients coeffs = unstable_coefficients());
};

/// active is 1-based (0 = no actuator); magnitude carries the sign of the
/// active channel.
struct SwitchingSample {
    std::size_t active = 0;
    double magnitude = 0.0;
    friend bool operator==(const SwitchingSample&, const SwitchingSample&) = default;
};

struct NormSample {
    double t = 0.0;
    double h = 0.0;
    double v = 0.0;
    double vprime = 0.0;
};

struct WindowDiagnostics {
    double t0 = 0.0;
    std::size_t iterations = 0;
    double cost = 0.0;
    bool converged = false;
    ControlTrajectory control; ///< the window's returned optimum
};

struct RhcReport {
    ControlTrajectory control;
    StateTrajectory states;
    std::vector<SwitchingSample> switching_path;
    std::vector<NormSample> norm_history;
    double accumulated_cost = 0.0;
    std::vector<WindowDiagnostics> windows;
    bool failed = false;
    std::string failure;

    std::size_t inner_iterations() const;
};

/// Per-step reduction of a control vector to (j_v, v_{j_v}) where j_v is
/// the smallest index of maximal magnitude; all-zero steps map to (0, 0).
std::vector<SwitchingSample> dominant_channels(const ControlTrajectory& u);

/// As dominant_channels, but rejects controls with two active channels at
/// one step (InvalidArgument).
std::vector<SwitchingSample> extract_switching(const ControlTrajectory& u);

/// Receding horizon loop: for t0 = 0, delta, ... < t_infinity solve the
/// horizon problem from the current state, apply its first delta of control
/// and advance. Windows are warm-started from the previous optimum shifted
/// by delta and zero-padded. A numerical failure stops the loop and returns
/// the partial report with failed set.
RhcReport run_rhc(const RhcConfig& config, const RhcSetup& setup, std::span<const double> y0);
RhcReport run_rhc(const RhcConfig& config, std::span<const double> y0);

/// The same pipeline with every actuator allowed to act at once.
RhcReport run_rhc_nonswitching(const RhcConfig& config, const RhcSetup& setup, std::span<const double> y0);
RhcReport run_rhc_nonswitching(const RhcConfig& config, std::span<const double> y0);

/// Uncontrolled evolution over [0, t_infinity] reported in the same shape
/// (zero control channels).
RhcReport run_free(const RhcConfig& config, const RhcSetup& setup, std::span<const double> y0);

/// Norm samples (t, H, V, V') at every node of a trajectory.
std::vector<NormSample> norm_history(const StateTrajectory& states, const NormContext& norms);

} // namespace swrhc
