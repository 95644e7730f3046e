#include "swrhc/ocp.hpp"

#include "swrhc/error.hpp"
#include "swrhc/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace swrhc {
namespace {

void check_control(const ControlTrajectory& u, const OcpInstance& inst) {
    if (inst.integrator == nullptr) throw InvalidArgument("OCP instance has no integrator");
    const TimeGrid& g = u.grid();
    if (g.n_steps != inst.grid.n_steps || g.dt != inst.grid.dt || g.t0 != inst.grid.t0) {
        throw InvalidArgument("control grid does not match the OCP grid");
    }
    if (u.channels() != inst.channels()) throw InvalidArgument("control channels do not match actuators");
}

double trapezoid_weight(std::size_t k, std::size_t n) { return (k == 0 || k == n) ? 0.5 : 1.0; }

} // namespace

OcpInstance make_instance(const CrankNicolson& integrator, double t0, double horizon, std::vector<double> y0,
                          double beta) {
    if (!(horizon > 0.0)) throw InvalidArgument("OCP horizon must be positive");
    if (!(beta > 0.0)) throw InvalidArgument("OCP control penalty beta must be positive");
    if (y0.size() != integrator.operators().size()) throw InvalidArgument("OCP initial state has wrong dimension");
    const double dt = integrator.dt();
    const long steps = std::lround(horizon / dt);
    if (steps < 1 || std::abs(static_cast<double>(steps) * dt - horizon) > 1e-9 * std::max(1.0, horizon)) {
        throw InvalidArgument("OCP horizon is not an integer multiple of dt");
    }
    OcpInstance inst;
    inst.t0 = t0;
    inst.horizon = horizon;
    inst.y0 = std::move(y0);
    inst.beta = beta;
    inst.grid = TimeGrid{t0, dt, static_cast<std::size_t>(steps)};
    inst.integrator = &integrator;
    integrator.first_step_index(inst.grid);
    return inst;
}

double discrete_cost(const ControlTrajectory& u, const StateTrajectory& states, const OcpInstance& inst) {
    check_control(u, inst);
    const std::size_t n = inst.grid.n_steps;
    const double dt = inst.grid.dt;
    const CsrMatrix& mass = inst.integrator->operators().mass();
    double state_term = 0.0;
    for (std::size_t k = 0; k <= n; ++k) state_term += trapezoid_weight(k, n) * mass.quadratic_form(states.state(k));
    const double control_term = kernels::dot(u.values(), u.values());
    const double j = 0.5 * dt * (state_term + inst.beta * control_term);
    if (!std::isfinite(j)) throw NumericalFailure("cost evaluation produced a non-finite value");
    return j;
}

CostEvaluation eval_cost(const ControlTrajectory& u, const OcpInstance& inst) {
    check_control(u, inst);
    CostEvaluation out;
    out.states = inst.integrator->solve_forward(inst.y0, u);
    out.cost = discrete_cost(u, out.states, inst);
    return out;
}

AdjointTrajectory solve_adjoint(const StateTrajectory& states, const OcpInstance& inst) {
    const CrankNicolson& cn = *inst.integrator;
    const std::size_t n = inst.grid.n_steps;
    const std::size_t dim = cn.operators().size();
    const double dt = inst.grid.dt;
    const CsrMatrix& mass = cn.operators().mass();
    const long g0 = cn.first_step_index(inst.grid);

    AdjointTrajectory adj{inst.grid, dim, std::vector<double>(n * dim)};
    std::vector<double> lambda(dim), scratch(dim);
    mass.multiply(states.state(n), lambda);
    for (double& v : lambda) v *= 0.5 * dt;

    for (std::size_t k = n; k-- > 0;) {
        const auto sys = cn.step(g0 + static_cast<long>(k));
        std::span<double> p{adj.costates.data() + k * dim, dim};
        sys->lhs.solve_transpose(lambda, p);
        if (k == 0) break;
        sys->rhs_transposed.multiply(p, lambda);
        mass.multiply(states.state(k), scratch);
        kernels::axpy(dt, scratch, lambda);
    }
    return adj;
}

ControlTrajectory gradient(const ControlTrajectory& u, const StateTrajectory& states, const OcpInstance& inst) {
    check_control(u, inst);
    const AdjointTrajectory adj = solve_adjoint(states, inst);
    const ActuatorSet& act = inst.integrator->actuators();
    const double dt = inst.grid.dt;
    ControlTrajectory g(u.grid(), u.channels());
    for (std::size_t k = 0; k < inst.grid.n_steps; ++k) {
        auto gk = g.step(k);
        act.apply_transpose(adj.costate(k), gk);
        kernels::axpy(inst.beta * dt, u.step(k), gk);
    }
    return g;
}

ControlTrajectory gradient(const ControlTrajectory& u, const OcpInstance& inst) {
    check_control(u, inst);
    const StateTrajectory states = inst.integrator->solve_forward(inst.y0, u);
    return gradient(u, states, inst);
}

} // namespace swrhc
