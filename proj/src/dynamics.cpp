#include "swrhc/dynamics.hpp"

#include "swrhc/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace swrhc {

void TimeGrid::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("time grid: dt must be positive");
    if (n_steps < 1) throw InvalidArgument("time grid: need at least one step");
    if (!std::isfinite(t0)) throw InvalidArgument("time grid: t0 must be finite");
}

ControlTrajectory::ControlTrajectory(TimeGrid grid, std::size_t channels)
    : grid_(grid), channels_(channels), values_(grid.n_steps * channels, 0.0) {}

ControlTrajectory::ControlTrajectory(TimeGrid grid, std::size_t channels, std::vector<double> values)
    : grid_(grid), channels_(channels), values_(std::move(values)) {
    if (values_.size() != grid.n_steps * channels) throw InvalidArgument("control trajectory size mismatch");
}

StateTrajectory::StateTrajectory(TimeGrid grid, std::size_t dim)
    : grid_(grid), dim_(dim), data_((grid.n_steps + 1) * dim, 0.0) {}

CrankNicolson::CrankNicolson(const OperatorSet& ops, const ActuatorSet& actuators, double dt,
                             std::size_t cache_capacity)
    : ops_(&ops), actuators_(&actuators), dt_(dt), capacity_(std::max<std::size_t>(cache_capacity, 1)) {
    if (!(dt > 0.0)) throw InvalidArgument("Crank-Nicolson: dt must be positive");
    for (const auto& load : actuators.loads()) {
        if (load.size != ops.size()) throw InvalidArgument("actuator loads do not match the operator size");
    }
}

long CrankNicolson::first_step_index(const TimeGrid& grid) const {
    if (std::abs(grid.dt - dt_) > 1e-12 * dt_) throw InvalidArgument("time grid step differs from integrator step");
    const double q = grid.t0 / dt_;
    const long g = std::lround(q);
    if (std::abs(q - static_cast<double>(g)) > 1e-6) {
        throw InvalidArgument("time grid start " + std::to_string(grid.t0) + " is not a multiple of dt");
    }
    return g;
}

std::shared_ptr<const CnStep> CrankNicolson::step(long global_index) const {
    {
        std::lock_guard lock(mutex_);
        if (auto it = cache_.find(global_index); it != cache_.end()) return it->second;
    }
    const double t_mid = (static_cast<double>(global_index) + 0.5) * dt_;
    const CsrMatrix s = ops_->spatial_operator(t_mid);
    const double inv_dt = 1.0 / dt_;
    const CsrMatrix lhs = lincomb(inv_dt, ops_->mass(), 0.5, s);
    CsrMatrix rhs = lincomb(inv_dt, ops_->mass(), -0.5, s);
    auto built = std::make_shared<CnStep>();
    built->lhs = BandLu(lhs);
    built->rhs_transposed = rhs.transposed();
    built->rhs = std::move(rhs);

    std::lock_guard lock(mutex_);
    auto [it, inserted] = cache_.emplace(global_index, std::move(built));
    while (cache_.size() > capacity_) {
        // evict the step farthest behind the one just requested
        auto victim = cache_.begin();
        if (victim->first == global_index) victim = std::prev(cache_.end());
        cache_.erase(victim);
    }
    return it->second;
}

void CrankNicolson::release_before(long first) const {
    std::lock_guard lock(mutex_);
    cache_.erase(cache_.begin(), cache_.lower_bound(first));
}

std::size_t CrankNicolson::cached_steps() const {
    std::lock_guard lock(mutex_);
    return cache_.size();
}

void CrankNicolson::advance(const CnStep& step, std::span<const double> u, std::span<double> y,
                            std::span<double> scratch) const {
    step.rhs.multiply(y, scratch);
    actuators_->apply(u, scratch);
    step.lhs.solve(scratch, y);
}

StateTrajectory CrankNicolson::solve_forward(std::span<const double> y0, const ControlTrajectory& u) const {
    const TimeGrid& grid = u.grid();
    grid.validate();
    const std::size_t n = ops_->size();
    if (y0.size() != n) throw InvalidArgument("initial state has wrong dimension");
    if (u.channels() != actuators_->count()) throw InvalidArgument("control channels do not match actuators");
    if (!std::all_of(y0.begin(), y0.end(), [](double v) { return std::isfinite(v); })) {
        throw InvalidArgument("initial state is not finite");
    }
    const long g0 = first_step_index(grid);

    StateTrajectory traj(grid, n);
    std::copy(y0.begin(), y0.end(), traj.state(0).begin());
    std::vector<double> scratch(n);
    for (std::size_t k = 0; k < grid.n_steps; ++k) {
        const auto sys = step(g0 + static_cast<long>(k));
        auto next = traj.state(k + 1);
        std::copy(traj.state(k).begin(), traj.state(k).end(), next.begin());
        advance(*sys, u.step(k), next, scratch);
    }
    return traj;
}

StateTrajectory solve_forward(std::span<const double> y0, const ControlTrajectory& u, const OperatorSet& ops,
                              const ActuatorSet& actuators) {
    u.grid().validate();
    const CrankNicolson cn(ops, actuators, u.grid().dt, 1);
    return cn.solve_forward(y0, u);
}

StateTrajectory solve_uncontrolled(std::span<const double> y0, const OperatorSet& ops, const TimeGrid& grid) {
    grid.validate();
    const ActuatorSet none(ops.mesh(), {});
    return solve_forward(y0, ControlTrajectory(grid, 0), ops, none);
}

} // namespace swrhc
