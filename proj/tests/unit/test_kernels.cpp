#include <doctest.h>

#include <cmath>
#include <random>

#include "kernel_pi/errors.hpp"
#include "kernel_pi/kernels.hpp"
#include "test_support.hpp"

using namespace kernel_pi;
using kernel_pi::test::pt;

TEST_CASE("eval: diagonal and closed forms") {
    const Kernel g(KernelFamily::gaussian, 1.0, 1.0);
    const Kernel m(KernelFamily::matern52, 1.0, 1.0);
    CHECK(g.eval(pt(0.3, -0.7), pt(0.3, -0.7)) == 1.0);
    CHECK(m.radial(0.0) == 1.0);
    // exp(-0.5), mpmath
    CHECK(g.eval(pt(0, 0), pt(1, 0)) == doctest::Approx(0.6065306597126334).epsilon(1e-15));

    const Kernel scaled(KernelFamily::matern32, 0.7, 2.5);
    CHECK(scaled.eval(pt(-0.4, 0.9), pt(-0.4, 0.9)) == 2.5);
}

TEST_CASE("eval: matern forms") {
    const double r = 0.8;
    const double rho = 0.5;
    const Kernel m12(KernelFamily::matern12, rho);
    const Kernel m32(KernelFamily::matern32, rho);
    const Kernel m52(KernelFamily::matern52, rho);
    CHECK(m12.eval(pt(0, 0), pt(r, 0)) == doctest::Approx(std::exp(-r / rho)));
    const double a3 = std::sqrt(3.0) * r / rho;
    CHECK(m32.eval(pt(0, 0), pt(0, r)) == doctest::Approx((1 + a3) * std::exp(-a3)));
    const double a5 = std::sqrt(5.0) * r / rho;
    CHECK(m52.eval(pt(0, 0), pt(0, r)) == doctest::Approx((1 + a5 + a5 * a5 / 3) * std::exp(-a5)));
}

TEST_CASE("invalid hyperparameters are rejected") {
    CHECK_THROWS_AS(Kernel(KernelFamily::gaussian, 0.0), ConfigError);
    CHECK_THROWS_AS(Kernel(KernelFamily::gaussian, 1.0, -1.0), ConfigError);
    CHECK_THROWS_AS(parse_kernel_family("wendland"), ConfigError);
    CHECK(parse_kernel_family("matern32") == KernelFamily::matern32);
}

TEST_CASE("grad_x") {
    const Kernel g(KernelFamily::gaussian, 1.0);
    const Kernel m(KernelFamily::matern52, 1.0);

    SUBCASE("zero at coincident points") {
        for (const auto& k : {g, m, Kernel(KernelFamily::matern32, 0.3)}) {
            CHECK(k.grad_x(pt(0.2, 0.1), pt(0.2, 0.1)).norm() == 0.0);
        }
    }
    SUBCASE("gaussian closed form") {
        const Point grad = g.grad_x(pt(1, 0), pt(0, 0));
        CHECK(grad(0) == doctest::Approx(-0.6065306597126334).epsilon(1e-15));
        CHECK(grad(1) == 0.0);
    }
    SUBCASE("matern52 against finite difference") {
        const Point x = pt(0.5, 0);
        const Point y = pt(0, 0);
        const Point fd = test::central_difference([&](const Point& z) { return m.eval(z, y); }, x);
        CHECK(test::relative_error(m.grad_x(x, y), fd) <= 1e-6);
        // symbolic value, mpmath
        CHECK(m.grad_x(x, y)(0) == doctest::Approx(-0.5770264050179663).epsilon(1e-14));
    }
    SUBCASE("matern12 has no derivative") {
        const Kernel rough(KernelFamily::matern12, 1.0);
        CHECK_FALSE(rough.differentiable());
        CHECK_THROWS_AS((void)rough.grad_x(pt(0, 0), pt(1, 0)), UnsupportedDerivativeError);
        CHECK_THROWS_AS((void)grad_block(rough, pt(0, 0), CenterSet({pt(1, 0)})), UnsupportedDerivativeError);
    }
}

TEST_CASE("properties on random samples") {
    std::mt19937_64 rng(11);
    for (auto family : {KernelFamily::gaussian, KernelFamily::matern32, KernelFamily::matern52}) {
        const Kernel k(family, 0.5, 1.3);
        CAPTURE(to_string(family));
        for (int s = 0; s < 100; ++s) {
            const Point x = test::random_point(rng);
            const Point y = test::random_point(rng);
            CHECK(k.eval(x, y) == k.eval(y, x));
            CHECK(k.eval(x, x) == 1.3);
            const Point grad = k.grad_x(x, y);
            CHECK((grad + k.grad_x(y, x)).norm() == 0.0);
            const Point fd = test::central_difference([&](const Point& z) { return k.eval(z, y); }, x);
            CHECK(test::relative_error(grad, fd) <= 1e-6);
        }
    }
}

TEST_CASE("gram") {
    const Kernel g(KernelFamily::gaussian, 1.0, 2.0);
    SUBCASE("single point") {
        const auto K = gram(g, {pt(0.1, 0.2)}, {pt(0.1, 0.2)});
        REQUIRE(K.rows() == 1);
        CHECK(K(0, 0) == 2.0);
    }
    SUBCASE("coincident points are rank one") {
        const CenterSet c({pt(0.4, 0.4), pt(0.4, 0.4)});
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram(g, c));
        CHECK(std::abs(eig.eigenvalues()(0)) <= 1e-15);
    }
    SUBCASE("3x3 grid is PSD") {
        const auto c = grid_centers(Domain::symmetric_box(2), 3);
        const Eigen::MatrixXd K = gram(Kernel(KernelFamily::gaussian, 1.0), c);
        CHECK(K.isApprox(K.transpose(), 0.0));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(K);
        CHECK(eig.eigenvalues().minCoeff() >= -1e-12);
    }
    SUBCASE("random sets up to 50 points are PSD") {
        std::mt19937_64 rng(3);
        for (int n : {1, 7, 23, 50}) {
            const auto pts = test::random_points(rng, n);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram(Kernel(KernelFamily::matern52, 0.5), pts, pts));
            CHECK(eig.eigenvalues().minCoeff() >= -1e-12 * n);
        }
    }
}

TEST_CASE("grad_gram") {
    const Kernel g(KernelFamily::gaussian, 0.7);
    SUBCASE("single center at the probe") {
        const CenterSet c({pt(0.3, 0.3)});
        const auto blocks = grad_gram(g, {pt(0.3, 0.3)}, c);
        REQUIRE(blocks.size() == 1);
        CHECK(blocks[0].rows() == 2);
        CHECK(blocks[0].cols() == 1);
        CHECK(blocks[0].norm() == 0.0);
    }
    SUBCASE("columns are grad_x at each center") {
        const CenterSet c({pt(0.1, -0.2), pt(-0.5, 0.6)});
        const Point x = pt(0.25, 0.4);
        const auto block = grad_gram(g, {x}, c)[0];
        CHECK(block.col(0) == g.grad_x(x, c[0]));
        CHECK(block.col(1) == g.grad_x(x, c[1]));
    }
    SUBCASE("random configuration vs finite differences") {
        std::mt19937_64 rng(5);
        const Kernel m(KernelFamily::matern52, 0.5);
        const CenterSet c(test::random_points(rng, 5));
        const auto probes = test::random_points(rng, 5);
        const auto blocks = grad_gram(m, probes, c);
        for (std::size_t p = 0; p < probes.size(); ++p) {
            for (std::size_t j = 0; j < c.size(); ++j) {
                const Point fd = test::central_difference([&](const Point& z) { return m.eval(z, c[j]); }, probes[p]);
                CHECK(test::relative_error(blocks[p].col(static_cast<Eigen::Index>(j)), fd) <= 1e-6);
            }
        }
    }
}

TEST_CASE("factorize") {
    SUBCASE("single center") {
        const auto f = factorize(Kernel(KernelFamily::gaussian, 1.0, 4.0), CenterSet({pt(0, 0)}));
        CHECK(f.jitter() == 0.0);
        CHECK(f.lower()(0, 0) == doctest::Approx(2.0));
    }
    SUBCASE("duplicate centers need jitter") {
        const auto f = factorize(Kernel(KernelFamily::matern52, 0.5), CenterSet({pt(0.2, 0.1), pt(0.2, 0.1)}));
        CHECK(f.jitter() > 0.0);
        CHECK(f.reconstruction_error() <= 1e-10);
    }
    SUBCASE("7x7 grid reconstructs") {
        const auto f = factorize(Kernel(KernelFamily::matern52, 0.5), grid_centers(Domain::symmetric_box(2), 7));
        CHECK(f.jitter() == 0.0);
        CHECK(f.reconstruction_error() <= 1e-10);
    }
    SUBCASE("failure at maximum jitter") {
        JitterPolicy none;
        none.ladder = {0.0};
        CHECK_THROWS_AS(factorize(Kernel(KernelFamily::gaussian, 1.0), CenterSet({pt(0, 0), pt(0, 0)}), none),
                        SingularGramError);
    }
}
