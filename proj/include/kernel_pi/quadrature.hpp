#pragma once

#include <functional>

#include <Eigen/Dense>

#include "kernel_pi/geometry.hpp"

namespace kernel_pi {

struct QuadratureRule {
    PointList nodes;
    Eigen::VectorXd weights;
    int order = 0;
};

struct GaussLegendre1d {
    Eigen::VectorXd nodes;   // ascending, on [-1, 1]
    Eigen::VectorXd weights;
};

// Newton iteration on the Legendre recurrence.
GaussLegendre1d gauss_legendre(int order);

// Tensor product of 1-D rules mapped to the box; node ordering matches tensor_grid.
QuadratureRule gauss_legendre_tensor(const Domain& dom, int order);

// sum_i w_i fn(x_i), ascending node order. Throws NonfiniteError on a
// non-finite integrand value.
double integrate(const std::function<double(const Point&)>& fn, const QuadratureRule& rule);

} // namespace kernel_pi
