#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "kernel_pi/dynamics.hpp"
#include "kernel_pi/errors.hpp"
#include "test_support.hpp"

using namespace kernel_pi;
using kernel_pi::test::pt;

namespace {
const Domain kBox = Domain::symmetric_box(2);

Eigen::VectorXd scalar(double u) {
    Eigen::VectorXd out(1);
    out << u;
    return out;
}
} // namespace

TEST_CASE("benchmark formulas") {
    const auto bm = benchmark_system();
    CHECK(bm.system.state_dim == 2);
    CHECK(bm.system.input_dim == 1);
    CHECK(bm.exact_value(pt(1, 1)) == 1.5);
    CHECK(bm.exact_policy(pt(0, 1))(0) == -3.0);
    const Eigen::MatrixXd g = bm.system.input_map(pt(std::numbers::pi / 2, 0.4));
    CHECK(g(0, 0) == 0.0);
    CHECK(g(1, 0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(bm.system.drift(Point::Zero(2)).norm() == 0.0);
    bm.cost.validate();
}

TEST_CASE("closed_loop_field") {
    const auto bm = benchmark_system();
    CHECK(closed_loop_field(bm.system, bm.exact_policy, Point::Zero(2)).norm() == 0.0);

    const Policy zero{[](const Point&) { return scalar(0.0); }, PolicySource::explicit_formula};
    const Eigen::VectorXd psi = closed_loop_field(bm.system, zero, pt(1, 0));
    CHECK(psi(0) == -1.0);
    CHECK(psi(1) == -0.5);

    std::mt19937_64 rng(7);
    for (int s = 0; s < 50; ++s) {
        const Point x = test::random_point(rng);
        const double c = std::cos(2 * x(0)) + 2;
        const double u = -c * x(1);
        const double f1 = -x(0) + x(1);
        const double f2 = -0.5 * x(0) - 0.5 * x(1) * (1 - c * c);
        const Eigen::VectorXd got = closed_loop_field(bm.system, bm.exact_policy, x);
        CHECK(std::abs(got(0) - f1) <= 1e-12);
        CHECK(std::abs(got(1) - (f2 + c * u)) <= 1e-12);
    }
}

TEST_CASE("running_cost and pde_rhs") {
    const auto bm = benchmark_system();
    CHECK(running_cost(bm.cost, Point::Zero(2), scalar(0.0)) == 0.0);
    CHECK(running_cost(bm.cost, pt(1, 1), scalar(0.0)) == 2.0);
    CHECK(running_cost(bm.cost, pt(1, 0), scalar(2.0)) == 5.0);

    CHECK(pde_rhs(bm.cost, bm.exact_policy, Point::Zero(2)) == 0.0);
    CHECK(pde_rhs(bm.cost, bm.exact_policy, pt(0, 1)) == -10.0);
    std::mt19937_64 rng(8);
    for (int s = 0; s < 1000; ++s) {
        CHECK(pde_rhs(bm.cost, bm.exact_policy, test::random_point(rng, -3, 3)) <= 0.0);
    }
}

TEST_CASE("cost validation") {
    CostSpec c{[](const Point& x) { return x.squaredNorm(); }, Eigen::MatrixXd::Identity(2, 2)};
    c.validate();
    c.input_weight(0, 1) = 0.5;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.input_weight = -Eigen::MatrixXd::Identity(1, 1);
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("optimal pair consistency") {
    const auto bm = benchmark_system();
    std::mt19937_64 rng(9);
    for (int s = 0; s < 1000; ++s) {
        const Point x = test::random_point(rng);
        const Eigen::MatrixXd g = bm.system.input_map(x);
        const Eigen::VectorXd grad = bm.exact_value_gradient(x);
        const Eigen::VectorXd u = bm.exact_policy(x);
        const Eigen::VectorXd from_grad = -0.5 * bm.cost.input_weight.inverse() * g.transpose() * grad;
        CHECK(std::abs(from_grad(0) - u(0)) <= 1e-12);
        const double hamiltonian = closed_loop_field(bm.system, bm.exact_policy, x).dot(grad) +
                                   running_cost(bm.cost, x, u);
        CHECK(std::abs(hamiltonian) <= 1e-10);
    }
}

TEST_CASE("simulate") {
    const auto bm = benchmark_system();
    SUBCASE("equilibrium stays put") {
        const auto traj = simulate(bm.system, bm.exact_policy, Point::Zero(2), 1.0, 1e-2);
        CHECK(traj.samples.size() == 101);
        for (const auto& s : traj.samples) {
            CHECK(s.x.norm() == 0.0);
        }
    }
    SUBCASE("optimal policy drives the state to the origin") {
        const auto traj = simulate(bm.system, bm.exact_policy, pt(0.5, 0.5), 10.0, 1e-3, &kBox);
        CHECK(traj.samples.back().x.norm() <= 1e-2);
        CHECK_FALSE(traj.left_domain);
        CHECK(traj.samples.back().t == doctest::Approx(10.0));
    }
    SUBCASE("fourth-order convergence") {
        const auto final_state = [&](double dt) {
            return simulate(bm.system, bm.exact_policy, pt(0.9, -0.8), 2.0, dt).samples.back().x;
        };
        const Point a = final_state(0.04);
        const Point b = final_state(0.02);
        const Point c = final_state(0.01);
        const double ratio = (a - b).norm() / (b - c).norm();
        CHECK(ratio == doctest::Approx(16.0).epsilon(0.15));
    }
    SUBCASE("blow-up is reported") {
        const ControlAffineSystem unstable{
            1, 1, [](const Point& x) { return Eigen::VectorXd(x.array().square() * 10.0); },
            [](const Point&) { return Eigen::MatrixXd::Zero(1, 1); }};
        const Policy none{[](const Point&) { return scalar(0.0); }, PolicySource::explicit_formula};
        Point x0(1);
        x0 << 1.0;
        CHECK_THROWS_AS(simulate(unstable, none, x0, 5.0, 1e-2), NonfiniteError);
    }
    SUBCASE("bad step") {
        CHECK_THROWS_AS(simulate(bm.system, bm.exact_policy, pt(0, 0), 1.0, 0.0), ConfigError);
        CHECK_THROWS_AS(simulate(bm.system, bm.exact_policy, pt(0, 0), 1e-4, 1e-3), ConfigError);
    }
}

TEST_CASE("verify_stabilizing") {
    const auto bm = benchmark_system();
    const auto good = verify_stabilizing(bm.system, bm.exact_policy, kBox);
    CHECK(good.stabilizing);
    CHECK(good.lines.size() == 8);

    CHECK(verify_stabilizing(bm.system, linear_x2_policy(-3.0), kBox).stabilizing);
    const auto bad = verify_stabilizing(bm.system, linear_x2_policy(3.0), kBox);
    CHECK_FALSE(bad.stabilizing);
}
