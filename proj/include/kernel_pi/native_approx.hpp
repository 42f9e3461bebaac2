#pragma once

#include <filesystem>
#include <memory>

#include <Eigen/Dense>

#include "kernel_pi/geometry.hpp"
#include "kernel_pi/kernels.hpp"

namespace kernel_pi {

/// v_N = sum_j alpha_j k(., xi_j), an element of the span of kernel sections.
///
/// The Gram factorization is attached when the approximant came from
/// interpolation; Galerkin solutions carry none.
class Approximant {
public:
    Approximant(Kernel kernel, CenterSet centers, Eigen::VectorXd coefficients,
                std::shared_ptr<const GramFactorization> factorization = nullptr);

    [[nodiscard]] const Kernel& kernel() const noexcept { return kernel_; }
    [[nodiscard]] const CenterSet& centers() const noexcept { return centers_; }
    [[nodiscard]] const Eigen::VectorXd& coefficients() const noexcept { return coefficients_; }
    [[nodiscard]] const GramFactorization* factorization() const noexcept { return factorization_.get(); }
    [[nodiscard]] double jitter() const noexcept { return factorization_ ? factorization_->jitter() : 0.0; }

    [[nodiscard]] double value(const Point& x) const;
    [[nodiscard]] Eigen::VectorXd values(const PointList& xs) const;
    [[nodiscard]] Point gradient(const Point& x) const;

    // sqrt(alpha^T K alpha)
    [[nodiscard]] double h_norm() const;

    // Coefficients of (this - other) on the concatenated center set; both
    // approximants must share a kernel.
    [[nodiscard]] Approximant minus(const Approximant& other) const;

private:
    Kernel kernel_;
    CenterSet centers_;
    Eigen::VectorXd coefficients_;
    std::shared_ptr<const GramFactorization> factorization_;
};

// K_N(x,y) = k_X(x)^T K^{-1} k_X(y)
double kernel_n(const GramFactorization& factor, const Point& x, const Point& y);
double kernel_n(const Kernel& k, const CenterSet& centers, const Point& x, const Point& y);

// sqrt(max(0, k(x,x) - K_N(x,x)))
double power_function(const GramFactorization& factor, const Point& x);
double power_function(const Kernel& k, const CenterSet& centers, const Point& x);
Eigen::VectorXd power_function(const GramFactorization& factor, const PointList& xs);

// alpha solves K alpha = values.
Approximant interpolate(const Kernel& k, const CenterSet& centers, const Eigen::VectorXd& values);
Approximant interpolate(std::shared_ptr<const GramFactorization> factor, const Eigen::VectorXd& values);

// Free-function spellings of the Approximant members.
inline double eval_approx(const Approximant& v, const Point& x) { return v.value(x); }
inline Point grad_approx(const Approximant& v, const Point& x) { return v.gradient(x); }
inline double h_norm(const Approximant& v) { return v.h_norm(); }

/// CSV layout:
///   # kernel=<family> lengthscale=<rho> variance=<sigma2> jitter=<j>
///   x1,...,xd,alpha
///   one row per center
void write_approximant_csv(const std::filesystem::path& path, const Approximant& v);
Approximant read_approximant_csv(const std::filesystem::path& path);

} // namespace kernel_pi
