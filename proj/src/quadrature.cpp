#include "kernel_pi/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "kernel_pi/errors.hpp"

namespace kernel_pi {

namespace {

// P_n(x) and P_n'(x) via the three-term recurrence.
std::pair<double, double> legendre(int n, double x) {
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}

} // namespace

GaussLegendre1d gauss_legendre(int order) {
    if (order < 1) {
        throw ConfigError("quadrature order must be at least 1");
    }
    const int n = order;
    GaussLegendre1d rule{Eigen::VectorXd(n), Eigen::VectorXd(n)};
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        for (int iter = 0; iter < 100; ++iter) {
            const auto [p, dp] = legendre(n, x);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) <= 1e-15) {
                break;
            }
        }
        const double dp = legendre(n, x).second;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes(i) = -x;
        rule.nodes(n - 1 - i) = x;
        rule.weights(i) = w;
        rule.weights(n - 1 - i) = w;
    }
    if (n % 2 == 1) {
        rule.nodes(n / 2) = 0.0;
    }
    return rule;
}

QuadratureRule gauss_legendre_tensor(const Domain& dom, int order) {
    const auto base = gauss_legendre(order);
    const int d = dom.dim();
    std::size_t total = 1;
    for (int k = 0; k < d; ++k) {
        total *= static_cast<std::size_t>(order);
    }
    const Point half = 0.5 * (dom.upper() - dom.lower());
    const Point mid = 0.5 * (dom.upper() + dom.lower());

    QuadratureRule rule;
    rule.order = order;
    rule.nodes.reserve(total);
    rule.weights.resize(static_cast<Eigen::Index>(total));
    std::vector<int> idx(d, 0);
    for (std::size_t flat = 0; flat < total; ++flat) {
        Point x(d);
        double w = 1.0;
        for (int k = 0; k < d; ++k) {
            x(k) = mid(k) + half(k) * base.nodes(idx[k]);
            w *= half(k) * base.weights(idx[k]);
        }
        rule.nodes.push_back(std::move(x));
        rule.weights(static_cast<Eigen::Index>(flat)) = w;
        for (int k = d - 1; k >= 0; --k) {
            if (++idx[k] < order) {
                break;
            }
            idx[k] = 0;
        }
    }
    return rule;
}

double integrate(const std::function<double(const Point&)>& fn, const QuadratureRule& rule) {
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double v = fn(rule.nodes[i]);
        if (!std::isfinite(v)) {
            throw NonfiniteError("integrand is not finite at quadrature node " + std::to_string(i));
        }
        acc += rule.weights(static_cast<Eigen::Index>(i)) * v;
    }
    return acc;
}

} // namespace kernel_pi
