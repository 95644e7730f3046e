#include "swrhc/error.hpp"
#include "swrhc/optimizer.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

using namespace swrhc;
using swrhc::testing::random_vector;

namespace {

// nearest point of {x : at most one nonzero} in the Euclidean norm, lowest
// index among equidistant candidates
std::vector<double> nearest_single_support(const std::vector<double>& v) {
    std::vector<double> best(v.size(), 0.0);
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < v.size(); ++i) {
        std::vector<double> cand(v.size(), 0.0);
        cand[i] = v[i];
        double d = 0.0;
        for (std::size_t j = 0; j < v.size(); ++j) d += (v[j] - cand[j]) * (v[j] - cand[j]);
        if (d < best_dist) {
            best_dist = d;
            best = cand;
        }
    }
    return best;
}

std::vector<double> to_vec(std::span<const double> v) { return {v.begin(), v.end()}; }

struct TinyProblem {
    OperatorSet ops;
    ActuatorSet act;
    CrankNicolson cn;
    OcpInstance inst;

    TinyProblem(std::size_t steps, double dt, double beta)
        : ops(build_mesh(4), 0.1, unstable_coefficients()),
          act(ops.mesh(), {{0.25, 0.25}, {0.75, 0.75}}),
          cn(ops, act, dt),
          inst(make_instance(cn, 0.0, static_cast<double>(steps) * dt, default_initial_state(ops.mesh()), beta)) {}
};

// Minimizes the convex quadratic cost over controls supported on the given
// (step, channel) pairs. The Hessian columns come from gradient differences.
double restricted_minimum(const OcpInstance& inst, const std::vector<std::size_t>& support) {
    const std::size_t total = inst.grid.n_steps * inst.channels();
    const ControlTrajectory zero(inst.grid, inst.channels());
    const auto g0 = to_vec(gradient(zero, inst).values());
    const std::size_t m = support.size();
    std::vector<double> h(m * m), rhs(m);
    for (std::size_t c = 0; c < m; ++c) {
        std::vector<double> e(total, 0.0);
        e[support[c]] = 1.0;
        const auto gc = to_vec(gradient(ControlTrajectory(inst.grid, inst.channels(), e), inst).values());
        for (std::size_t r = 0; r < m; ++r) h[r * m + c] = gc[support[r]] - g0[support[r]];
        rhs[c] = -g0[support[c]];
    }
    const auto x = swrhc::testing::dense_solve(h, rhs);
    std::vector<double> u(total, 0.0);
    for (std::size_t c = 0; c < m; ++c) u[support[c]] = x[c];
    return eval_cost(ControlTrajectory(inst.grid, inst.channels(), u), inst).cost;
}

} // namespace

TEST_CASE("card-1 projection examples") {
    CHECK(project_card1(std::vector<double>{3.0, -5.0, 2.0}) == std::vector<double>{0.0, -5.0, 0.0});
    CHECK(project_card1(std::vector<double>{2.0, -2.0, 1.0}) == std::vector<double>{2.0, 0.0, 0.0});
    CHECK(project_card1(std::vector<double>{0.0, 0.0}) == std::vector<double>{0.0, 0.0});
    CHECK(project_card1(std::vector<double>{-1.5}) == std::vector<double>{-1.5});
    CHECK(project_card1(std::vector<double>{}).empty());

    std::vector<double> inplace{1.0, 4.0, -4.0};
    project_card1(inplace, inplace);
    CHECK(inplace == std::vector<double>{0.0, 4.0, 0.0});
}

TEST_CASE("card-1 projection agrees with brute force and is idempotent") {
    std::mt19937_64 rng(21);
    std::uniform_int_distribution<int> dim(1, 8);
    std::uniform_int_distribution<int> small(-3, 3);
    for (int trial = 0; trial < 2000; ++trial) {
        const auto m = static_cast<std::size_t>(dim(rng));
        std::vector<double> v(m);
        if (trial % 2 == 0) {
            v = random_vector(m, rng, 10.0);
        } else {
            for (double& x : v) x = small(rng);  // plenty of ties
        }
        const auto p = project_card1(v);
        CHECK(p == nearest_single_support(v));
        CHECK(project_card1(p) == p);
        double nv = 0.0, np = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            nv += v[i] * v[i];
            np += p[i] * p[i];
        }
        CHECK(np <= nv);
    }
}

TEST_CASE("per-step projection of a control trajectory") {
    const TimeGrid g{0.0, 0.1, 3};
    const ControlTrajectory u(g, 3, {1.0, -2.0, 0.5, 0.0, 0.0, 0.0, 3.0, 3.0, -3.0});
    CHECK_FALSE(is_switching(u));
    const auto p = project_control(u);
    CHECK(is_switching(p));
    CHECK(to_vec(p.values()) == std::vector<double>{0.0, -2.0, 0.0, 0.0, 0.0, 0.0, 3.0, 0.0, 0.0});

    const ControlTrajectory ones(g, 2, std::vector<double>(6, 1.0));
    CHECK(to_vec(project_control(ones).values()) == std::vector<double>{1.0, 0.0, 1.0, 0.0, 1.0, 0.0});
}

TEST_CASE("option validation") {
    OptimizerOptions o;
    CHECK_NOTHROW(o.validate());
    o.tol = 0.0;
    CHECK_THROWS_AS(o.validate(), InvalidArgument);
    o = {};
    o.ls_shrink = 1.0;
    CHECK_THROWS_AS(o.validate(), InvalidArgument);
    o = {};
    o.alpha_min = 10.0;
    o.alpha_max = 1.0;
    CHECK_THROWS_AS(o.validate(), InvalidArgument);
}

TEST_CASE("zero problem converges immediately") {
    TinyProblem p(6, 0.05, 1e-2);
    p.inst.y0.assign(p.inst.y0.size(), 0.0);
    const auto sol = solve_ocp(p.inst, ControlTrajectory(p.inst.grid, 2), OptimizerOptions{});
    CHECK(sol.converged);
    CHECK(sol.iterations == 1);
    CHECK(sol.cost == 0.0);
}

TEST_CASE("iterates are feasible and satisfy the nonmonotone acceptance test") {
    TinyProblem p(20, 0.05, 1e-3);
    std::mt19937_64 rng(5);
    const ControlTrajectory init(p.inst.grid, 2, random_vector(40, rng, 5.0));
    OptimizerOptions opts;
    opts.tol = 1e-9;
    opts.max_iters = 200;
    const auto sol = solve_ocp(p.inst, init, opts);
    CHECK(is_switching(sol.control));
    REQUIRE_FALSE(sol.history.empty());
    std::vector<double> costs{eval_cost(project_control(init), p.inst).cost};
    for (const auto& rec : sol.history) {
        const std::size_t from = costs.size() > opts.ls_memory ? costs.size() - opts.ls_memory : 0;
        const double ref = *std::max_element(costs.begin() + static_cast<long>(from), costs.end());
        CHECK(rec.reference == ref);
        CHECK(rec.cost <= rec.reference - opts.ls_sufficient_decrease * rec.alpha * rec.step_norm_sq);
        CHECK(rec.alpha >= opts.alpha_min);
        CHECK(rec.alpha <= opts.alpha_max);
        costs.push_back(rec.cost);
    }
    CHECK(sol.cost == doctest::Approx(*std::min_element(costs.begin(), costs.end())));
    CHECK(sol.cost == doctest::Approx(eval_cost(sol.control, p.inst).cost).epsilon(1e-14));
}

TEST_CASE("unconstrained solve reaches the quadratic minimum") {
    TinyProblem p(5, 0.05, 1e-2);
    std::vector<std::size_t> all(10);
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    const double exact = restricted_minimum(p.inst, all);
    OptimizerOptions opts;
    opts.tol = 1e-10;
    const auto sol = solve_ocp(p.inst, ControlTrajectory(p.inst.grid, 2), opts, Constraint::none);
    CHECK(sol.converged);
    CHECK(sol.cost == doctest::Approx(exact).epsilon(1e-6));

    // Optimality residual at the returned point. For a convex quadratic with
    // largest L2 Hessian eigenvalue lambda_max, |grad J(u)|^2 <= 2 lambda_max (J(u) - J*).
    const double dt = p.inst.grid.dt;
    const auto l2_grad = [&](const std::vector<double>& v) {
        auto g = to_vec(gradient(ControlTrajectory(p.inst.grid, 2, v), p.inst).values());
        for (double& x : g) x /= dt;
        return g;
    };
    const auto g0 = l2_grad(std::vector<double>(10, 0.0));
    std::vector<double> v(10, 1.0);
    double lambda_max = 0.0;
    for (int it = 0; it < 200; ++it) {
        auto hv = l2_grad(v);
        for (std::size_t i = 0; i < hv.size(); ++i) hv[i] -= g0[i];
        double nrm = 0.0;
        for (double x : hv) nrm += x * x;
        nrm = std::sqrt(nrm);
        lambda_max = nrm / std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = hv[i] / nrm;
    }
    const auto g = l2_grad(to_vec(sol.control.values()));
    double norm_sq = 0.0;
    for (double x : g) norm_sq += dt * x * x;
    const double gap = std::max(sol.cost - exact, 0.0) + 8.0 * std::numeric_limits<double>::epsilon() * exact;
    CHECK(norm_sq <= 2.0 * lambda_max * gap);
    CHECK(std::sqrt(norm_sq) <= 1e-6);
}

TEST_CASE("switching solve is close to the enumerated global optimum") {
    TinyProblem p(4, 0.05, 1e-2);
    double global = std::numeric_limits<double>::infinity();
    for (unsigned pattern = 0; pattern < 16; ++pattern) {
        std::vector<std::size_t> support;
        for (std::size_t k = 0; k < 4; ++k) support.push_back(2 * k + ((pattern >> k) & 1u));
        global = std::min(global, restricted_minimum(p.inst, support));
    }
    const auto sol = solve_ocp(p.inst, ControlTrajectory(p.inst.grid, 2), OptimizerOptions{});
    MESSAGE("switching optimum " << sol.cost << " enumerated " << global);
    CHECK(sol.cost >= global * (1.0 - 1e-9));
    CHECK(sol.cost <= 1.1 * global);
}
