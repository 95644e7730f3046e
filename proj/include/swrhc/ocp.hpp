#pragma once

#include "swrhc/dynamics.hpp"

#include <span>
#include <vector>

namespace swrhc {

/// Finite-horizon problem on [t0, t0 + horizon] from state y0:
///   J(u) = 1/2 int ( |y(t)|_H^2 + beta |u(t)|^2 ) dt
/// discretized with the trapezoidal rule on the Crank-Nicolson nodes for the
/// state term and exact integration of the piecewise-constant control.
struct OcpInstance {
    double t0 = 0.0;
    double horizon = 0.0;
    std::vector<double> y0;
    double beta = 0.0;
    TimeGrid grid;
    const CrankNicolson* integrator = nullptr;

    std::size_t channels() const { return integrator->actuators().count(); }
};

/// Builds the grid and checks horizon > 0, beta > 0, horizon a multiple of dt.
OcpInstance make_instance(const CrankNicolson& integrator, double t0, double horizon, std::vector<double> y0,
                          double beta);

struct CostEvaluation {
    double cost = 0.0;
    StateTrajectory states;
};

/// Costates p_{k+1} = L_k^{-T} lambda_{k+1}, one per step, of the transposed
/// Crank-Nicolson recursion. The sweep starts from lambda_N = dt/2 M y_N
/// (no terminal penalty).
struct AdjointTrajectory {
    TimeGrid grid;
    std::size_t dim = 0;
    std::vector<double> costates;

    std::span<const double> costate(std::size_t k) const { return {costates.data() + k * dim, dim}; }
};

/// Discrete cost of a trajectory already computed for u.
double discrete_cost(const ControlTrajectory& u, const StateTrajectory& states, const OcpInstance& inst);

CostEvaluation eval_cost(const ControlTrajectory& u, const OcpInstance& inst);

AdjointTrajectory solve_adjoint(const StateTrajectory& states, const OcpInstance& inst);

/// Exact gradient of the discrete cost with respect to the per-step control
/// values (Euclidean in R^{n_steps x M}): beta dt u_k + B^T p_{k+1}.
ControlTrajectory gradient(const ControlTrajectory& u, const OcpInstance& inst);
ControlTrajectory gradient(const ControlTrajectory& u, const StateTrajectory& states, const OcpInstance& inst);

} // namespace swrhc
