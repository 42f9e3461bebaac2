#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "kernel_pi/geometry.hpp"

namespace kernel_pi {

enum class KernelFamily { gaussian, matern12, matern32, matern52 };

std::string_view to_string(KernelFamily family);
// Accepts the names printed by to_string; throws ConfigError otherwise.
KernelFamily parse_kernel_family(std::string_view name);

/// Stationary radial Mercer kernel k(x,y) = variance * phi(|x-y| / lengthscale).
///
/// Forms follow the Rasmussen-Williams convention:
///   gaussian   exp(-r^2 / (2 rho^2))
///   matern12   exp(-r / rho)
///   matern32   (1 + sqrt3 r/rho) exp(-sqrt3 r/rho)
///   matern52   (1 + sqrt5 r/rho + 5 r^2 / (3 rho^2)) exp(-sqrt5 r/rho)
///
/// matern12 is not differentiable at r = 0 and rejects every derivative call.
class Kernel {
public:
    Kernel(KernelFamily family, double lengthscale, double variance = 1.0);

    [[nodiscard]] KernelFamily family() const noexcept { return family_; }
    [[nodiscard]] double lengthscale() const noexcept { return lengthscale_; }
    [[nodiscard]] double variance() const noexcept { return variance_; }
    [[nodiscard]] bool differentiable() const noexcept { return family_ != KernelFamily::matern12; }

    [[nodiscard]] double eval(const Point& x, const Point& y) const;
    // Gradient in the first argument.
    [[nodiscard]] Point grad_x(const Point& x, const Point& y) const;

    // Radial profile k(r) including the variance.
    [[nodiscard]] double radial(double r) const;
    // k'(r) / r, finite at r = 0 for the C^2 families.
    [[nodiscard]] double radial_derivative_over_r(double r) const;

private:
    void require_derivative() const;

    KernelFamily family_;
    double lengthscale_;
    double variance_;
};

// Entry (i,j) = k(X_i, Y_j).
Eigen::MatrixXd gram(const Kernel& k, const PointList& X, const PointList& Y);
Eigen::MatrixXd gram(const Kernel& k, const CenterSet& centers);

// Phi(x, centers): d x N, column j is grad_x k(x, xi_j).
Eigen::MatrixXd grad_block(const Kernel& k, const Point& x, const CenterSet& centers);
// One d x N block per probe point.
std::vector<Eigen::MatrixXd> grad_gram(const Kernel& k, const PointList& X, const CenterSet& centers);

struct JitterPolicy {
    // Multiples of mean(diag K) tried in order.
    std::vector<double> ladder{0.0, 1e-12, 1e-10, 1e-8};
};

/// Cholesky factorization of K(centers, centers) + jitter I.
class GramFactorization {
public:
    GramFactorization(Kernel kernel, CenterSet centers, const JitterPolicy& policy = {});

    [[nodiscard]] const Kernel& kernel() const noexcept { return kernel_; }
    [[nodiscard]] const CenterSet& centers() const noexcept { return centers_; }
    [[nodiscard]] const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }
    [[nodiscard]] double jitter() const noexcept { return jitter_; }
    [[nodiscard]] Eigen::MatrixXd lower() const { return llt_.matrixL(); }
    [[nodiscard]] std::size_t size() const noexcept { return centers_.size(); }

    // (K + jitter I)^{-1} rhs
    [[nodiscard]] Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
    [[nodiscard]] Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const;
    // L^{-1} rhs
    [[nodiscard]] Eigen::MatrixXd whiten(const Eigen::MatrixXd& rhs) const;

    // |L L^T - (K + jitter I)|_F / |K + jitter I|_F
    [[nodiscard]] double reconstruction_error() const;

private:
    Kernel kernel_;
    CenterSet centers_;
    Eigen::MatrixXd matrix_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
    double jitter_ = 0.0;
};

GramFactorization factorize(const Kernel& k, const CenterSet& centers, const JitterPolicy& policy = {});

} // namespace kernel_pi
