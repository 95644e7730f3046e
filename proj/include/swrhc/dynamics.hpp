#pragma once

#include "swrhc/band_lu.hpp"
#include "swrhc/fem.hpp"
#include "swrhc/sparse.hpp"

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

namespace swrhc {

/// Uniform time grid t_k = t0 + k dt, k = 0..n_steps.
struct TimeGrid {
    double t0 = 0.0;
    double dt = 0.0;
    std::size_t n_steps = 0;

    double time(std::size_t k) const { return t0 + static_cast<double>(k) * dt; }
    double t_end() const { return time(n_steps); }
    double length() const { return static_cast<double>(n_steps) * dt; }

    /// Throws InvalidArgument unless dt > 0 and n_steps >= 1.
    void validate() const;
};

/// Controls held constant on each [t_k, t_{k+1}); row k holds the M channels.
class ControlTrajectory {
public:
    ControlTrajectory() = default;
    ControlTrajectory(TimeGrid grid, std::size_t channels);
    ControlTrajectory(TimeGrid grid, std::size_t channels, std::vector<double> values);

    const TimeGrid& grid() const { return grid_; }
    std::size_t channels() const { return channels_; }
    std::size_t steps() const { return grid_.n_steps; }

    std::span<const double> step(std::size_t k) const { return {values_.data() + k * channels_, channels_}; }
    std::span<double> step(std::size_t k) { return {values_.data() + k * channels_, channels_}; }
    double operator()(std::size_t k, std::size_t j) const { return values_[k * channels_ + j]; }
    double& operator()(std::size_t k, std::size_t j) { return values_[k * channels_ + j]; }

    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }

private:
    TimeGrid grid_{};
    std::size_t channels_ = 0;
    std::vector<double> values_;
};

/// FEM coefficient vectors at every grid node, states[0] = y0.
class StateTrajectory {
public:
    StateTrajectory() = default;
    StateTrajectory(TimeGrid grid, std::size_t dim);

    const TimeGrid& grid() const { return grid_; }
    std::size_t dim() const { return dim_; }
    std::size_t nodes() const { return grid_.n_steps + 1; }
    std::span<const double> state(std::size_t k) const { return {data_.data() + k * dim_, dim_}; }
    std::span<double> state(std::size_t k) { return {data_.data() + k * dim_, dim_}; }
    std::span<const double> final_state() const { return state(grid_.n_steps); }

private:
    TimeGrid grid_{};
    std::size_t dim_ = 0;
    std::vector<double> data_;
};

/// One Crank-Nicolson step on [t_k, t_{k+1}] with S = nu K + C(t_{k+1/2}):
///   (M/dt + S/2) y_{k+1} = (M/dt - S/2) y_k + B u_k.
struct CnStep {
    BandLu lhs;
    CsrMatrix rhs;
    CsrMatrix rhs_transposed;
};

/// Crank-Nicolson integrator for M y' + (nu K + C(t)) y = B u.
///
/// Step systems are keyed by the global step index round(t_k / dt), which
/// requires every grid handed in to start on a multiple of dt. They are built
/// on first use and cached, so repeated forward/adjoint sweeps over the same
/// window share one factorization per step. The cache is guarded by a mutex;
/// concurrent solves on one integrator are safe.
class CrankNicolson {
public:
    CrankNicolson(const OperatorSet& ops, const ActuatorSet& actuators, double dt,
                  std::size_t cache_capacity = 512);

    const OperatorSet& operators() const { return *ops_; }
    const ActuatorSet& actuators() const { return *actuators_; }
    double dt() const { return dt_; }

    /// Global step index of the first interval of grid; throws
    /// InvalidArgument when grid.dt differs or t0 is off the dt lattice.
    long first_step_index(const TimeGrid& grid) const;

    std::shared_ptr<const CnStep> step(long global_index) const;

    /// Drops cached steps with global index < first.
    void release_before(long first) const;
    std::size_t cached_steps() const;

    StateTrajectory solve_forward(std::span<const double> y0, const ControlTrajectory& u) const;

    /// Advances one step in place: y <- L^{-1}(R y + B u).
    void advance(const CnStep& step, std::span<const double> u, std::span<double> y,
                 std::span<double> scratch) const;

private:
    const OperatorSet* ops_;
    const ActuatorSet* actuators_;
    double dt_;
    std::size_t capacity_;
    mutable std::mutex mutex_;
    mutable std::map<long, std::shared_ptr<const CnStep>> cache_;
};

StateTrajectory solve_forward(std::span<const double> y0, const ControlTrajectory& u, const OperatorSet& ops,
                              const ActuatorSet& actuators);

StateTrajectory solve_uncontrolled(std::span<const double> y0, const OperatorSet& ops, const TimeGrid& grid);

} // namespace swrhc
