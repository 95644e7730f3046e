#include "swrhc/rhc.hpp"

#include "swrhc/error.hpp"
#include "swrhc/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace swrhc {
namespace {

std::size_t multiple_of(double value, double unit, const char* what) {
    const double q = value / unit;
    const long n = std::lround(q);
    if (n < 1 || std::abs(q - static_cast<double>(n)) > 1e-6) {
        throw InvalidArgument(std::string("rhc config: ") + what + " is not a positive integer multiple");
    }
    return static_cast<std::size_t>(n);
}

double trajectory_cost(const ControlTrajectory& u, const StateTrajectory& states, const CsrMatrix& mass,
                       double beta, std::size_t n_steps) {
    const double dt = u.grid().dt;
    double state_term = 0.0;
    for (std::size_t k = 0; k <= n_steps; ++k) {
        const double w = (k == 0 || k == n_steps) ? 0.5 : 1.0;
        state_term += w * mass.quadratic_form(states.state(k));
    }
    const std::size_t used = n_steps * u.channels();
    const auto vals = u.values().first(used);
    return 0.5 * dt * (state_term + beta * kernels::dot(vals, vals));
}

RhcReport run_receding(const RhcConfig& config, const RhcSetup& setup, std::span<const double> y0,
                       Constraint constraint) {
    config.validate();
    const std::size_t n = setup.ops->size();
    if (y0.size() != n) throw InvalidArgument("rhc: initial state has wrong dimension");
    const std::size_t m = setup.actuators->count();
    const std::size_t spd = config.steps_per_delta();
    const std::size_t spw = config.steps_per_window();
    const std::size_t total = config.total_steps();
    const TimeGrid grid{0.0, config.dt, total};

    const CrankNicolson cn(*setup.ops, *setup.actuators, config.dt, spw + spd + 8);

    RhcReport report;
    report.control = ControlTrajectory(grid, m);
    report.states = StateTrajectory(grid, n);
    std::copy(y0.begin(), y0.end(), report.states.state(0).begin());

    std::vector<double> y(y0.begin(), y0.end());
    std::vector<double> scratch(n);
    ControlTrajectory previous;
    std::size_t applied = 0;

    for (std::size_t w = 0; w < config.windows(); ++w) {
        const std::size_t first = w * spd;
        const double t0 = static_cast<double>(first) * config.dt;
        const long g0 = static_cast<long>(first);
        cn.release_before(g0);

        try {
            const OcpInstance inst = make_instance(cn, t0, config.horizon, y, config.beta);
            ControlTrajectory init(inst.grid, m);
            if (w > 0) {
                for (std::size_t k = 0; k + spd < spw; ++k) {
                    std::copy(previous.step(k + spd).begin(), previous.step(k + spd).end(), init.step(k).begin());
                }
            }
            OcpSolution sol = solve_ocp(inst, init, config.optimizer, constraint);

            for (std::size_t k = 0; k < spd; ++k) {
                std::copy(sol.control.step(k).begin(), sol.control.step(k).end(),
                          report.control.step(first + k).begin());
                const auto sys = cn.step(g0 + static_cast<long>(k));
                cn.advance(*sys, sol.control.step(k), y, scratch);
                std::copy(y.begin(), y.end(), report.states.state(first + k + 1).begin());
            }
            applied = first + spd;
            report.windows.push_back({t0, sol.iterations, sol.cost, sol.converged, sol.control});
            previous = std::move(sol.control);
        } catch (const NumericalFailure& e) {
            report.failed = true;
            report.failure = "window at t0=" + std::to_string(t0) + ": " + e.what();
            break;
        }
    }

    report.switching_path = dominant_channels(report.control);
    report.switching_path.resize(applied);
    try {
        for (std::size_t k = 0; k <= applied; ++k) {
            const auto s = report.states.state(k);
            const NormContext& nc = *setup.norms;
            report.norm_history.push_back({grid.time(k), nc.h_norm(s), nc.v_norm(s), nc.vprime_norm(s)});
        }
        report.accumulated_cost =
            trajectory_cost(report.control, report.states, setup.ops->mass(), config.beta, applied);
    } catch (const NumericalFailure& e) {
        report.failed = true;
        if (report.failure.empty()) report.failure = std::string("diagnostics: ") + e.what();
        report.accumulated_cost = std::numeric_limits<double>::infinity();
    }
    return report;
}

} // namespace

void RhcConfig::validate() const {
    if (!(dt > 0.0)) throw InvalidArgument("rhc config: dt must be positive");
    if (!(delta > 0.0)) throw InvalidArgument("rhc config: delta must be positive");
    if (!(horizon >= delta)) throw InvalidArgument("rhc config: the prediction horizon must satisfy T >= delta");
    if (!(t_infinity > 0.0)) throw InvalidArgument("rhc config: t_infinity must be positive");
    if (!(beta > 0.0)) throw InvalidArgument("rhc config: beta must be positive");
    if (!(nu > 0.0)) throw InvalidArgument("rhc config: nu must be positive");
    if (mesh_cells < 2) throw InvalidArgument("rhc config: mesh_cells must be at least 2");
    multiple_of(delta, dt, "delta / dt");
    multiple_of(horizon, dt, "horizon / dt");
    multiple_of(t_infinity, delta, "t_infinity / delta");
    optimizer.validate();
}

std::size_t RhcConfig::steps_per_delta() const { return multiple_of(delta, dt, "delta / dt"); }
std::size_t RhcConfig::steps_per_window() const { return multiple_of(horizon, dt, "horizon / dt"); }
std::size_t RhcConfig::windows() const { return multiple_of(t_infinity, delta, "t_infinity / delta"); }
std::size_t RhcConfig::total_steps() const { return windows() * steps_per_delta(); }

RhcSetup RhcSetup::build(const RhcConfig& config, Coefficients coeffs) {
    RhcSetup s;
    s.mesh = build_mesh(config.mesh_cells);
    s.ops = std::make_unique<OperatorSet>(s.mesh, config.nu, std::move(coeffs));
    s.actuators = std::make_unique<ActuatorSet>(s.mesh, config.actuators);
    s.norms = std::make_unique<NormContext>(*s.ops);
    return s;
}

std::size_t RhcReport::inner_iterations() const {
    std::size_t total = 0;
    for (const auto& w : windows) total += w.iterations;
    return total;
}

std::vector<SwitchingSample> dominant_channels(const ControlTrajectory& u) {
    std::vector<SwitchingSample> out(u.steps());
    for (std::size_t k = 0; k < u.steps(); ++k) {
        const auto s = u.step(k);
        double best = 0.0;
        for (std::size_t j = 0; j < s.size(); ++j) {
            if (std::abs(s[j]) > best) {
                best = std::abs(s[j]);
                out[k] = {j + 1, s[j]};
            }
        }
    }
    return out;
}

std::vector<SwitchingSample> extract_switching(const ControlTrajectory& u) {
    if (!is_switching(u)) throw InvalidArgument("extract_switching: more than one active channel at a step");
    return dominant_channels(u);
}

RhcReport run_rhc(const RhcConfig& config, const RhcSetup& setup, std::span<const double> y0) {
    return run_receding(config, setup, y0, config.constraint);
}

RhcReport run_rhc(const RhcConfig& config, std::span<const double> y0) {
    const RhcSetup setup = RhcSetup::build(config);
    return run_rhc(config, setup, y0);
}

RhcReport run_rhc_nonswitching(const RhcConfig& config, const RhcSetup& setup, std::span<const double> y0) {
    return run_receding(config, setup, y0, Constraint::none);
}

RhcReport run_rhc_nonswitching(const RhcConfig& config, std::span<const double> y0) {
    const RhcSetup setup = RhcSetup::build(config);
    return run_rhc_nonswitching(config, setup, y0);
}

RhcReport run_free(const RhcConfig& config, const RhcSetup& setup, std::span<const double> y0) {
    if (!(config.dt > 0.0) || !(config.t_infinity > 0.0)) throw InvalidArgument("free run: bad time parameters");
    const std::size_t total = multiple_of(config.t_infinity, config.dt, "t_infinity / dt");
    const TimeGrid grid{0.0, config.dt, total};
    RhcReport report;
    report.control = ControlTrajectory(grid, 0);
    report.states = solve_uncontrolled(y0, *setup.ops, grid);
    report.switching_path.assign(total, SwitchingSample{});
    report.norm_history = norm_history(report.states, *setup.norms);
    report.accumulated_cost = trajectory_cost(report.control, report.states, setup.ops->mass(), config.beta, total);
    return report;
}

std::vector<NormSample> norm_history(const StateTrajectory& states, const NormContext& norms) {
    std::vector<NormSample> out(states.nodes());
    for (std::size_t k = 0; k < states.nodes(); ++k) {
        const auto y = states.state(k);
        out[k] = {states.grid().time(k), norms.h_norm(y), norms.v_norm(y), norms.vprime_norm(y)};
    }
    return out;
}

} // namespace swrhc
