#pragma once

#include "swrhc/ocp.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace swrhc {

struct OptimizerOptions {
    double tol = 1e-5;                     ///< stop when alpha |u_{k+1} - u_k|_{L2} <= tol
    std::size_t max_iters = 500;
    std::size_t ls_memory = 10;            ///< nonmonotone reference window
    double ls_shrink = 0.5;                ///< step 1/alpha is multiplied by this on rejection
    double ls_sufficient_decrease = 1e-4;
    double alpha_min = 1e-8;               ///< BB clip on the reciprocal step alpha
    double alpha_max = 1e8;
    std::size_t max_backtracks = 60;

    /// Throws InvalidArgument on out-of-range values.
    void validate() const;
};

/// Pointwise admissible set for the control vector.
enum class Constraint {
    switching,  ///< at most one nonzero channel per step
    none,       ///< all actuators may act simultaneously
};

/// Diagnostics of one accepted proximal step.
struct IterationRecord {
    double cost = 0.0;             ///< F(u_{k+1})
    double reference = 0.0;        ///< max of the last ls_memory accepted costs
    double alpha = 0.0;
    double step_norm_sq = 0.0;     ///< |u_{k+1} - u_k|_{L2}^2
    std::size_t backtracks = 0;
};

struct OcpSolution {
    ControlTrajectory control;
    double cost = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    std::vector<IterationRecord> history;
};

/// Keeps the entry of largest magnitude (smallest index on ties) and zeroes
/// the rest. out may alias v.
void project_card1(std::span<const double> v, std::span<double> out);
std::vector<double> project_card1(std::span<const double> v);

/// project_card1 applied independently at every step.
ControlTrajectory project_control(const ControlTrajectory& u);

/// True when every step has at most one nonzero channel.
bool is_switching(const ControlTrajectory& u);

/// Proximal gradient with Barzilai-Borwein initial steps and a nonmonotone
/// backtracking line search:
///   u_{k+1} = proj(u_k - grad F(u_k) / alpha_k),
/// gradients taken in the dt-weighted L2((t0, t0+T); R^M) inner product.
/// u_init is projected before the first iteration. Returns the lowest-cost
/// iterate. Throws NumericalFailure when the cost stops being finite.
OcpSolution solve_ocp(const OcpInstance& inst, const ControlTrajectory& u_init, const OptimizerOptions& opts,
                      Constraint constraint = Constraint::switching);

} // namespace swrhc
