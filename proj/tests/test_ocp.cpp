#include "swrhc/error.hpp"
#include "swrhc/ocp.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace swrhc;
using swrhc::testing::random_vector;

namespace {

struct SmallProblem {
    OperatorSet ops;
    ActuatorSet act;
    CrankNicolson cn;
    OcpInstance inst;

    explicit SmallProblem(double t0 = 0.0, std::size_t cells = 4, std::size_t steps = 8, double dt = 5e-3)
        : ops(build_mesh(cells), 0.1, unstable_coefficients()),
          act(ops.mesh(), {{0.3, 0.35}, {0.7, 0.6}}),
          cn(ops, act, dt),
          inst(make_instance(cn, t0, static_cast<double>(steps) * dt, default_initial_state(ops.mesh()), 5e-4)) {}

    ControlTrajectory control(std::vector<double> v) const { return ControlTrajectory(inst.grid, 2, std::move(v)); }
    std::size_t size() const { return inst.grid.n_steps * 2; }
};

std::vector<double> to_vec(std::span<const double> v) { return {v.begin(), v.end()}; }

double inner(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

} // namespace

TEST_CASE("instance validation") {
    const OperatorSet ops(build_mesh(4), 0.1, unstable_coefficients());
    const ActuatorSet act(ops.mesh(), {{0.5, 0.5}});
    const CrankNicolson cn(ops, act, 0.01);
    const auto y0 = default_initial_state(ops.mesh());
    CHECK_THROWS_AS(make_instance(cn, 0.0, 0.0, y0, 1e-3), InvalidArgument);
    CHECK_THROWS_AS(make_instance(cn, 0.0, 0.1, y0, 0.0), InvalidArgument);
    CHECK_THROWS_AS(make_instance(cn, 0.0, 0.105, y0, 1e-3), InvalidArgument);
    CHECK_THROWS_AS(make_instance(cn, 0.0, 0.1, std::vector<double>(3), 1e-3), InvalidArgument);
    const auto inst = make_instance(cn, 0.3, 0.1, y0, 1e-3);
    CHECK(inst.grid.n_steps == 10);
    CHECK(inst.channels() == 1);
}

TEST_CASE("cost of the zero problem vanishes and the control term is exact") {
    SmallProblem p;
    p.inst.y0.assign(p.inst.y0.size(), 0.0);
    CHECK(eval_cost(p.control(std::vector<double>(p.size(), 0.0)), p.inst).cost == 0.0);
    const auto g = gradient(p.control(std::vector<double>(p.size(), 0.0)), p.inst);
    CHECK(swrhc::testing::max_abs(g.values()) == 0.0);

    std::mt19937_64 rng(3);
    const auto u = p.control(random_vector(p.size(), rng, 4.0));
    const double floor = 0.5 * p.inst.beta * p.inst.grid.dt * inner(u.values(), u.values());
    CHECK(eval_cost(u, p.inst).cost >= floor);
}

TEST_CASE("cost uses trapezoid weights on the state term") {
    SmallProblem p;
    const auto u = p.control(std::vector<double>(p.size(), 0.0));
    const auto ev = eval_cost(u, p.inst);
    const auto& m = p.ops.mass();
    const std::size_t n = p.inst.grid.n_steps;
    double s = 0.5 * (m.quadratic_form(ev.states.state(0)) + m.quadratic_form(ev.states.state(n)));
    for (std::size_t k = 1; k < n; ++k) s += m.quadratic_form(ev.states.state(k));
    CHECK(ev.cost == doctest::Approx(0.5 * p.inst.grid.dt * s).epsilon(1e-14));
}

TEST_CASE("adjoint gradient matches central finite differences") {
    for (double t0 : {0.0, 0.25}) {
        SmallProblem p(t0);
        std::mt19937_64 rng(11);
        const auto u = p.control(random_vector(p.size(), rng, 3.0));
        const auto g = gradient(u, p.inst);
        for (int d = 0; d < 20; ++d) {
            const auto dir = random_vector(p.size(), rng);
            const double h = 1e-4;
            auto up = to_vec(u.values());
            auto um = to_vec(u.values());
            for (std::size_t i = 0; i < up.size(); ++i) {
                up[i] += h * dir[i];
                um[i] -= h * dir[i];
            }
            const double fd = (eval_cost(p.control(up), p.inst).cost - eval_cost(p.control(um), p.inst).cost) / (2 * h);
            const double ad = inner(g.values(), dir);
            CHECK(std::abs(fd - ad) <= 1e-6 * std::abs(fd));
        }
    }
}

TEST_CASE("gradient is affine and the cost strongly convex") {
    SmallProblem p(0.1, 5, 12);
    std::mt19937_64 rng(12);
    const auto a = random_vector(p.size(), rng, 2.0);
    const auto b = random_vector(p.size(), rng, 2.0);
    std::vector<double> ab(p.size());
    for (std::size_t i = 0; i < ab.size(); ++i) ab[i] = a[i] + b[i];
    const auto ga = gradient(p.control(a), p.inst);
    const auto gb = gradient(p.control(b), p.inst);
    const auto gab = gradient(p.control(ab), p.inst);
    const auto g0 = gradient(p.control(std::vector<double>(p.size(), 0.0)), p.inst);
    const double scale = swrhc::testing::max_abs(gab.values());
    for (std::size_t i = 0; i < ab.size(); ++i) {
        CHECK(std::abs(ga.values()[i] + gb.values()[i] - gab.values()[i] - g0.values()[i]) <= 1e-12 * scale);
    }

    const double ja = eval_cost(p.control(a), p.inst).cost;
    const double jb = eval_cost(p.control(b), p.inst).cost;
    std::vector<double> diff(p.size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = b[i] - a[i];
    const double lower = ja + inner(ga.values(), diff) + 0.5 * p.inst.beta * p.inst.grid.dt * inner(diff, diff);
    CHECK(jb >= lower - 1e-12 * std::abs(jb));
}

TEST_CASE("midpoint strong convexity with modulus beta dt") {
    SmallProblem p(0.0, 5, 10);
    std::mt19937_64 rng(14);
    for (int trial = 0; trial < 10; ++trial) {
        const auto a = random_vector(p.size(), rng, 3.0);
        const auto b = random_vector(p.size(), rng, 3.0);
        std::vector<double> mid(p.size()), diff(p.size());
        for (std::size_t i = 0; i < mid.size(); ++i) {
            mid[i] = 0.5 * (a[i] + b[i]);
            diff[i] = a[i] - b[i];
        }
        const double ja = eval_cost(p.control(a), p.inst).cost;
        const double jb = eval_cost(p.control(b), p.inst).cost;
        const double jm = eval_cost(p.control(mid), p.inst).cost;
        const double bound = 0.5 * ja + 0.5 * jb - p.inst.beta * p.inst.grid.dt / 8.0 * inner(diff, diff);
        CHECK(jm <= bound + 1e-13 * std::abs(bound));
    }
}

TEST_CASE("cost and gradient are pure functions of their inputs") {
    SmallProblem p;
    std::mt19937_64 rng(13);
    const auto u = p.control(random_vector(p.size(), rng));
    const auto before = to_vec(u.values());
    const auto y0 = p.inst.y0;
    const auto g1 = gradient(u, p.inst);
    const double j1 = eval_cost(u, p.inst).cost;
    const auto g2 = gradient(u, p.inst);
    const double j2 = eval_cost(u, p.inst).cost;
    CHECK(j1 == j2);
    const auto ev = eval_cost(u, p.inst);
    CHECK(discrete_cost(u, ev.states, p.inst) == j1);
    CHECK(to_vec(gradient(u, ev.states, p.inst).values()) == to_vec(g1.values()));
    CHECK(to_vec(g1.values()) == to_vec(g2.values()));
    CHECK(to_vec(u.values()) == before);
    CHECK(p.inst.y0 == y0);
}

TEST_CASE("control grids must match the instance") {
    SmallProblem p;
    CHECK_THROWS_AS(eval_cost(ControlTrajectory(p.inst.grid, 3), p.inst), InvalidArgument);
    CHECK_THROWS_AS(gradient(ControlTrajectory(TimeGrid{0.0, 5e-3, 7}, 2), p.inst), InvalidArgument);
}
