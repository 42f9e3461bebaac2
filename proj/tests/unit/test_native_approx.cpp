#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "kernel_pi/errors.hpp"
#include "kernel_pi/native_approx.hpp"
#include "test_support.hpp"

using namespace kernel_pi;
using kernel_pi::test::pt;

namespace {
const Domain kBox = Domain::symmetric_box(2);
}

TEST_CASE("kernel_n") {
    const Kernel m(KernelFamily::matern52, 0.5, 1.7);
    const auto centers = grid_centers(kBox, 3);
    const auto f = factorize(m, centers);

    SUBCASE("reproduces the kernel at centers") {
        for (const auto& c : centers) {
            CHECK(kernel_n(f, c, c) == doctest::Approx(1.7).epsilon(1e-12));
        }
    }
    SUBCASE("single center") {
        const Kernel g(KernelFamily::gaussian, 1.0, 2.0);
        const Point xi = pt(0.3, -0.1);
        const Point x = pt(-0.5, 0.4);
        const Point y = pt(0.9, 0.9);
        CHECK(kernel_n(g, CenterSet({xi}), x, y) == doctest::Approx(g.eval(x, xi) * g.eval(xi, y) / 2.0));
    }
    SUBCASE("matches a direct linear solve") {
        std::mt19937_64 rng(17);
        const Eigen::MatrixXd K = gram(m, centers);
        for (int s = 0; s < 10; ++s) {
            const Point x = test::random_point(rng);
            const Point y = test::random_point(rng);
            Eigen::VectorXd kx(9);
            Eigen::VectorXd ky(9);
            for (int j = 0; j < 9; ++j) {
                kx(j) = m.eval(x, centers[j]);
                ky(j) = m.eval(y, centers[j]);
            }
            const Eigen::VectorXd c = K.fullPivLu().solve(ky);
            CHECK(std::abs(kernel_n(f, x, y) - kx.dot(c)) <= 1e-10);
        }
    }
}

TEST_CASE("power_function") {
    SUBCASE("vanishes at centers") {
        const Kernel m(KernelFamily::matern52, 0.5);
        const auto centers = grid_centers(kBox, 5);
        const auto f = factorize(m, centers);
        REQUIRE(f.jitter() == 0.0);
        for (const auto& c : centers) {
            CHECK(power_function(f, c) <= 1e-7);
        }
    }
    SUBCASE("one gaussian center") {
        // sqrt(1 - e^{-1}), mpmath
        const Kernel g(KernelFamily::gaussian, 1.0);
        CHECK(power_function(g, CenterSet({pt(0, 0)}), pt(1, 0)) ==
              doctest::Approx(0.7950600976206501).epsilon(1e-12));
    }
    SUBCASE("bounded and monotone under center addition") {
        std::mt19937_64 rng(23);
        const Kernel m(KernelFamily::matern52, 0.5, 2.0);
        const auto probes = tensor_grid(kBox, 31);
        CenterSet centers({test::random_point(rng)});
        Eigen::VectorXd previous = power_function(factorize(m, centers), probes);
        for (int i = 0; i < 15; ++i) {
            centers = centers.with_point(test::random_point(rng));
            const Eigen::VectorXd now = power_function(factorize(m, centers), probes);
            CHECK((now - previous).maxCoeff() <= 1e-9);
            CHECK(now.minCoeff() >= 0.0);
            CHECK(now.maxCoeff() <= std::sqrt(2.0));
            previous = now;
        }
    }
}

TEST_CASE("interpolate") {
    const Kernel m(KernelFamily::matern52, 0.5);
    const auto centers = grid_centers(kBox, 3);

    SUBCASE("gram column gives a unit coefficient") {
        Eigen::VectorXd values(9);
        for (int j = 0; j < 9; ++j) {
            values(j) = m.eval(centers[j], centers[0]);
        }
        const auto v = interpolate(m, centers, values);
        Eigen::VectorXd e1 = Eigen::VectorXd::Zero(9);
        e1(0) = 1.0;
        CHECK((v.coefficients() - e1).norm() <= 1e-10);
        CHECK(v.value(pt(0.37, -0.61)) == doctest::Approx(m.eval(pt(0.37, -0.61), centers[0])));
    }
    SUBCASE("zero data") {
        const auto v = interpolate(m, centers, Eigen::VectorXd::Zero(9));
        CHECK(v.coefficients().norm() == 0.0);
        CHECK(v.value(pt(0.1, 0.2)) == 0.0);
    }
    SUBCASE("refinement lowers the sup error") {
        const auto target = [](const Point& x) { return 0.5 * x(0) * x(0) + x(1) * x(1); };
        const auto probes = tensor_grid(kBox, 101);
        auto sup_error = [&](int n) {
            const auto c = grid_centers(kBox, n);
            Eigen::VectorXd values(c.size());
            for (std::size_t j = 0; j < c.size(); ++j) {
                values(static_cast<Eigen::Index>(j)) = target(c[j]);
            }
            const auto v = interpolate(m, c, values);
            double worst = 0.0;
            for (const auto& x : probes) {
                worst = std::max(worst, std::abs(v.value(x) - target(x)));
            }
            return worst;
        };
        CHECK(sup_error(9) < sup_error(5));
    }
    SUBCASE("reproduction of H_N members") {
        std::mt19937_64 rng(31);
        std::normal_distribution<double> normal;
        const auto c = grid_centers(kBox, 5);
        Eigen::VectorXd alpha(25);
        for (auto& a : alpha) {
            a = normal(rng);
        }
        const Approximant v(m, c, alpha);
        Eigen::VectorXd values(25);
        for (int j = 0; j < 25; ++j) {
            values(j) = v.value(c[j]);
        }
        const auto back = interpolate(m, c, values);
        CHECK(test::relative_error(back.coefficients(), alpha) <= 1e-8);
    }
}

TEST_CASE("approximant evaluation") {
    const Kernel m(KernelFamily::matern52, 0.5, 1.5);
    std::mt19937_64 rng(41);
    const CenterSet c(test::random_points(rng, 6));
    Eigen::VectorXd alpha(6);
    alpha << 0.3, -1.2, 0.8, 0.05, -0.4, 2.0;
    const Approximant v(m, c, alpha);

    CHECK(Approximant(m, c, Eigen::VectorXd::Zero(6)).value(pt(0.2, 0.2)) == 0.0);
    Eigen::VectorXd e1 = Eigen::VectorXd::Zero(6);
    e1(0) = 1.0;
    CHECK(Approximant(m, c, e1).value(c[0]) == 1.5);

    for (int s = 0; s < 20; ++s) {
        const Point x = test::random_point(rng);
        const Eigen::VectorXd row = gram(m, {x}, c.points()).row(0).transpose();
        CHECK(std::abs(v.value(x) - row.dot(alpha)) <= 1e-12);
        const Point fd = test::central_difference([&](const Point& z) { return v.value(z); }, x);
        CHECK(test::relative_error(v.gradient(x), fd) <= 1e-6);
        CHECK(eval_approx(v, x) == v.value(x));
    }
    CHECK(Approximant(m, c, Eigen::VectorXd::Zero(6)).gradient(pt(0.1, 0.3)).norm() == 0.0);
    CHECK(Approximant(m, CenterSet({c[0]}), Eigen::VectorXd::Ones(1)).gradient(c[0]).norm() == 0.0);
    CHECK_THROWS_AS(Approximant(m, c, Eigen::VectorXd::Zero(3)), ConfigError);
    CHECK_THROWS_AS(
        (void)Approximant(Kernel(KernelFamily::matern12, 0.5), c, alpha).gradient(pt(0, 0)),
        UnsupportedDerivativeError);
}

TEST_CASE("h_norm") {
    const Kernel m(KernelFamily::matern52, 0.5, 2.25);
    const CenterSet c({pt(0.1, 0.2), pt(-0.3, 0.5)});
    CHECK(Approximant(m, c, Eigen::VectorXd::Zero(2)).h_norm() == 0.0);
    Eigen::VectorXd e1(2);
    e1 << 1.0, 0.0;
    CHECK(Approximant(m, c, e1).h_norm() == doctest::Approx(1.5));

    Eigen::VectorXd a(2);
    a << 0.7, -1.9;
    const double k01 = m.eval(c[0], c[1]);
    const double expanded = a(0) * a(0) * 2.25 + 2.0 * a(0) * a(1) * k01 + a(1) * a(1) * 2.25;
    CHECK(std::abs(Approximant(m, c, a).h_norm() - std::sqrt(expanded)) <= 1e-12);

    // difference of two approximants on disjoint centers
    const Approximant v(m, c, a);
    CHECK(v.minus(v).h_norm() <= 1e-7);
}

TEST_CASE("power-function error bound for members of a larger space") {
    std::mt19937_64 rng(43);
    std::normal_distribution<double> normal;
    const Kernel m(KernelFamily::matern52, 0.5);
    const auto small = grid_centers(kBox, 3);
    const CenterSet big(test::random_points(rng, 49));
    const auto factor = std::make_shared<const GramFactorization>(m, small);
    const auto probes = tensor_grid(kBox, 21);
    const Eigen::VectorXd power = power_function(*factor, probes);
    for (int trial = 0; trial < 10; ++trial) {
        Eigen::VectorXd a(49);
        for (auto& x : a) {
            x = normal(rng);
        }
        const Approximant f(m, big, a);
        Eigen::VectorXd values(9);
        for (int j = 0; j < 9; ++j) {
            values(j) = f.value(small[j]);
        }
        const auto proj = interpolate(factor, values);
        const double norm = f.h_norm();
        for (std::size_t i = 0; i < probes.size(); ++i) {
            CHECK(std::abs(f.value(probes[i]) - proj.value(probes[i])) <=
                  power(static_cast<Eigen::Index>(i)) * norm + 1e-8);
        }
    }
}

TEST_CASE("approximant CSV round trip") {
    const auto path = std::filesystem::temp_directory_path() / "kernel_pi_approx_test.csv";
    const Kernel m(KernelFamily::matern32, 0.4, 1.1);
    const CenterSet c({pt(0.1, 0.2), pt(-0.3, 0.5), pt(0.9, -1.0)});
    Eigen::VectorXd a(3);
    a << 0.25, -1.0 / 3.0, 7.0;
    write_approximant_csv(path, Approximant(m, c, a));
    const auto back = read_approximant_csv(path);
    CHECK(back.kernel().family() == KernelFamily::matern32);
    CHECK(back.kernel().lengthscale() == 0.4);
    CHECK(back.coefficients() == a);
    CHECK(back.centers()[2] == c[2]);
    std::filesystem::remove(path);
}
