#include "swrhc/optimizer.hpp"

#include "swrhc/error.hpp"
#include "swrhc/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace swrhc {

void OptimizerOptions::validate() const {
    if (!(tol > 0.0)) throw InvalidArgument("optimizer.tol must be positive");
    if (max_iters < 1) throw InvalidArgument("optimizer.max_iters must be at least 1");
    if (ls_memory < 1) throw InvalidArgument("optimizer.ls_memory must be at least 1");
    if (!(ls_shrink > 0.0 && ls_shrink < 1.0)) throw InvalidArgument("optimizer.ls_shrink must lie in (0,1)");
    if (!(ls_sufficient_decrease > 0.0 && ls_sufficient_decrease < 1.0)) {
        throw InvalidArgument("optimizer.ls_sufficient_decrease must lie in (0,1)");
    }
    if (!(alpha_min > 0.0 && alpha_min <= alpha_max)) {
        throw InvalidArgument("optimizer.alpha_min/alpha_max must satisfy 0 < alpha_min <= alpha_max");
    }
}

void project_card1(std::span<const double> v, std::span<double> out) {
    std::size_t best = 0;
    double best_abs = -1.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double a = std::abs(v[i]);
        if (a > best_abs) {
            best_abs = a;
            best = i;
        }
    }
    const double keep = v.empty() ? 0.0 : v[best];
    std::fill(out.begin(), out.end(), 0.0);
    if (!out.empty()) out[best] = keep;
}

std::vector<double> project_card1(std::span<const double> v) {
    std::vector<double> out(v.size());
    project_card1(v, out);
    return out;
}

ControlTrajectory project_control(const ControlTrajectory& u) {
    ControlTrajectory out(u.grid(), u.channels());
    for (std::size_t k = 0; k < u.steps(); ++k) project_card1(u.step(k), out.step(k));
    return out;
}

bool is_switching(const ControlTrajectory& u) {
    for (std::size_t k = 0; k < u.steps(); ++k) {
        const auto s = u.step(k);
        if (std::count_if(s.begin(), s.end(), [](double v) { return v != 0.0; }) > 1) return false;
    }
    return true;
}

namespace {

ControlTrajectory apply_constraint(const ControlTrajectory& v, Constraint c) {
    return c == Constraint::switching ? project_control(v) : v;
}

} // namespace

OcpSolution solve_ocp(const OcpInstance& inst, const ControlTrajectory& u_init, const OptimizerOptions& opts,
                      Constraint constraint) {
    opts.validate();
    const double dt = inst.grid.dt;
    const auto l2_dot = [dt](std::span<const double> a, std::span<const double> b) { return dt * kernels::dot(a, b); };

    ControlTrajectory u = apply_constraint(u_init, constraint);
    CostEvaluation eval = eval_cost(u, inst);
    double cost = eval.cost;
    // L2 gradient = Euclidean gradient / dt
    ControlTrajectory grad = gradient(u, eval.states, inst);
    for (double& v : grad.values()) v /= dt;

    OcpSolution sol;
    sol.control = u;
    sol.cost = cost;

    std::deque<double> recent{cost};
    double alpha = 1.0;
    ControlTrajectory trial(u.grid(), u.channels());

    for (std::size_t iter = 1; iter <= opts.max_iters; ++iter) {
        IterationRecord rec;
        rec.reference = *std::max_element(recent.begin(), recent.end());
        CostEvaluation trial_eval;
        bool accepted = false;
        for (;;) {
            kernels::lincomb(1.0, u.values(), -1.0 / alpha, grad.values(), trial.values());
            trial = apply_constraint(trial, constraint);
            if (constraint == Constraint::switching && !is_switching(trial)) {
                throw std::logic_error("projected iterate violates the switching constraint");
            }
            std::vector<double> step(u.values().size());
            kernels::lincomb(1.0, trial.values(), -1.0, u.values(), step);
            rec.step_norm_sq = l2_dot(step, step);
            trial_eval = eval_cost(trial, inst);
            if (!std::isfinite(trial_eval.cost)) throw NumericalFailure("optimizer: non-finite cost");
            if (trial_eval.cost <= rec.reference - opts.ls_sufficient_decrease * alpha * rec.step_norm_sq) {
                accepted = true;
                break;
            }
            if (rec.backtracks == opts.max_backtracks) break;
            alpha = std::min(alpha / opts.ls_shrink, opts.alpha_max);
            ++rec.backtracks;
        }
        if (!accepted) break;

        rec.cost = trial_eval.cost;
        rec.alpha = alpha;
        sol.history.push_back(rec);
        sol.iterations = iter;
        if (rec.cost < sol.cost) {
            sol.cost = rec.cost;
            sol.control = trial;
        }
        if (alpha * std::sqrt(rec.step_norm_sq) <= opts.tol) {
            sol.converged = true;
            break;
        }

        ControlTrajectory grad_new = gradient(trial, trial_eval.states, inst);
        for (double& v : grad_new.values()) v /= dt;

        std::vector<double> s(u.values().size()), y(u.values().size());
        kernels::lincomb(1.0, trial.values(), -1.0, u.values(), s);
        kernels::lincomb(1.0, grad_new.values(), -1.0, grad.values(), y);
        const double sy = l2_dot(s, y);
        const double ss = l2_dot(s, s);
        const double yy = l2_dot(y, y);
        // BB1 (alpha = <s,y>/<s,s>), then BB2 (alpha = <y,y>/<s,y>), then a unit safeguard
        double next = 1.0;
        if (sy > 0.0 && ss > 0.0 && std::isfinite(sy / ss)) {
            next = sy / ss;
        } else if (sy > 0.0 && std::isfinite(yy / sy) && yy > 0.0) {
            next = yy / sy;
        }
        alpha = std::clamp(next, opts.alpha_min, opts.alpha_max);

        u = trial;
        grad = std::move(grad_new);
        recent.push_back(rec.cost);
        if (recent.size() > opts.ls_memory) recent.pop_front();
    }
    return sol;
}

} // namespace swrhc
