#pragma once

#include <functional>
#include <ostream>

#include <Eigen/Dense>

#include "kernel_pi/dynamics.hpp"
#include "kernel_pi/geometry.hpp"
#include "kernel_pi/kernels.hpp"
#include "kernel_pi/native_approx.hpp"
#include "kernel_pi/quadrature.hpp"

namespace kernel_pi {

/// Coordinate realization of the least-squares policy-evaluation problem
///
///   [ int Phi^T psi psi^T Phi dx ] alpha = int Phi^T psi b dx
///
/// where Phi(x) is the d x N matrix of kernel gradients at the centers and
/// psi = f + g mu is the closed-loop field.
struct GalerkinSystem {
    Eigen::MatrixXd matrix;  // symmetrized
    Eigen::VectorXd rhs;
    double rhs_energy = 0.0; // int b^2 dx, for the residual
    // sqrt(w_i)-scaled rows (Phi_i^T psi_i)^T and sqrt(w_i) b_i; matrix = design^T design
    Eigen::MatrixXd design;
    Eigen::VectorXd weighted_rhs;
    double pe_margin = 0.0;  // smallest eigenvalue of `matrix`
    double condition_estimate = 0.0;
    int quadrature_order = 0;
    std::size_t quadrature_nodes = 0;

    [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(rhs.size()); }
    // 1e-12 * trace(M) / N
    [[nodiscard]] double pe_threshold() const;
};

// Phi(x, centers)
Eigen::MatrixXd phi_matrix(const Kernel& k, const CenterSet& centers, const Point& x);

// l*(y, x) = grad_x k(x, y)^T psi(x); the unsymmetric kernel is l(x, y) = l*(y, x).
double unsym_kernel(const Kernel& k, const ControlAffineSystem& sys, const Policy& pol, const Point& y,
                    const Point& x);

// Right-hand side sampled at a node, given the node and psi there.
using RhsFunction = std::function<double(const Point& x, const Eigen::VectorXd& psi)>;

// b = -r(x, mu(x)) from the current policy.
GalerkinSystem assemble(const Kernel& k, const CenterSet& centers, const ControlAffineSystem& sys,
                        const Policy& pol, const CostSpec& cost, const QuadratureRule& rule);

// Same assembly with an arbitrary right-hand side (manufactured solutions).
GalerkinSystem assemble(const Kernel& k, const CenterSet& centers, const ControlAffineSystem& sys,
                        const Policy& pol, const RhsFunction& rhs, const QuadratureRule& rule);

// Throws PeViolationError when pe_margin <= pe_threshold().
Approximant solve_value(const GalerkinSystem& gsys, const Kernel& k, const CenterSet& centers);

// sqrt(alpha^T M alpha - 2 alpha^T rhs + int b^2), clamped at 0. Evaluated as the
// norm of the weighted residual vector when the design rows are available.
double residual_norm(const GalerkinSystem& gsys, const Eigen::VectorXd& alpha);

// Diagnostics row: N,pe_margin,condition_estimate,residual
void write_diagnostics_header(std::ostream& out);
void write_diagnostics_row(std::ostream& out, const GalerkinSystem& gsys, double residual);

} // namespace kernel_pi
