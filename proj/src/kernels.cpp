#include "kernel_pi/kernels.hpp"

#include <cmath>
#include <string>

#include "kernel_pi/errors.hpp"

namespace kernel_pi {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;
constexpr double kSqrt5 = 2.23606797749979;

} // namespace

std::string_view to_string(KernelFamily family) {
    switch (family) {
    case KernelFamily::gaussian: return "gaussian";
    case KernelFamily::matern12: return "matern12";
    case KernelFamily::matern32: return "matern32";
    case KernelFamily::matern52: return "matern52";
    }
    return "unknown";
}

KernelFamily parse_kernel_family(std::string_view name) {
    for (auto f : {KernelFamily::gaussian, KernelFamily::matern12, KernelFamily::matern32, KernelFamily::matern52}) {
        if (to_string(f) == name) {
            return f;
        }
    }
    throw ConfigError("unknown kernel family '" + std::string(name) + "'");
}

Kernel::Kernel(KernelFamily family, double lengthscale, double variance)
    : family_(family), lengthscale_(lengthscale), variance_(variance) {
    if (!(lengthscale > 0.0) || !std::isfinite(lengthscale)) {
        throw ConfigError("kernel lengthscale must be positive and finite");
    }
    if (!(variance > 0.0) || !std::isfinite(variance)) {
        throw ConfigError("kernel variance must be positive and finite");
    }
}

double Kernel::radial(double r) const {
    const double rho = lengthscale_;
    switch (family_) {
    case KernelFamily::gaussian:
        return variance_ * std::exp(-r * r / (2.0 * rho * rho));
    case KernelFamily::matern12:
        return variance_ * std::exp(-r / rho);
    case KernelFamily::matern32: {
        const double a = kSqrt3 * r / rho;
        return variance_ * (1.0 + a) * std::exp(-a);
    }
    case KernelFamily::matern52: {
        const double a = kSqrt5 * r / rho;
        return variance_ * (1.0 + a + a * a / 3.0) * std::exp(-a);
    }
    }
    return 0.0;
}

double Kernel::radial_derivative_over_r(double r) const {
    require_derivative();
    const double rho2 = lengthscale_ * lengthscale_;
    switch (family_) {
    case KernelFamily::gaussian:
        return -variance_ / rho2 * std::exp(-r * r / (2.0 * rho2));
    case KernelFamily::matern32: {
        const double a = kSqrt3 * r / lengthscale_;
        return -variance_ * 3.0 / rho2 * std::exp(-a);
    }
    case KernelFamily::matern52: {
        const double a = kSqrt5 * r / lengthscale_;
        return -variance_ * 5.0 / (3.0 * rho2) * (1.0 + a) * std::exp(-a);
    }
    case KernelFamily::matern12:
        break;
    }
    return 0.0;
}

void Kernel::require_derivative() const {
    if (!differentiable()) {
        throw UnsupportedDerivativeError("kernel family '" + std::string(to_string(family_)) +
                                         "' is not twice differentiable");
    }
}

double Kernel::eval(const Point& x, const Point& y) const {
    return radial((x - y).norm());
}

Point Kernel::grad_x(const Point& x, const Point& y) const {
    require_derivative();
    const Point diff = x - y;
    return radial_derivative_over_r(diff.norm()) * diff;
}

Eigen::MatrixXd gram(const Kernel& k, const PointList& X, const PointList& Y) {
    Eigen::MatrixXd out(X.size(), Y.size());
    for (std::size_t i = 0; i < X.size(); ++i) {
        for (std::size_t j = 0; j < Y.size(); ++j) {
            out(i, j) = k.eval(X[i], Y[j]);
        }
    }
    return out;
}

Eigen::MatrixXd gram(const Kernel& k, const CenterSet& centers) {
    const auto n = centers.size();
    Eigen::MatrixXd out(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        out(i, i) = k.eval(centers[i], centers[i]);
        for (std::size_t j = 0; j < i; ++j) {
            out(i, j) = out(j, i) = k.eval(centers[i], centers[j]);
        }
    }
    return out;
}

Eigen::MatrixXd grad_block(const Kernel& k, const Point& x, const CenterSet& centers) {
    Eigen::MatrixXd out(x.size(), centers.size());
    for (std::size_t j = 0; j < centers.size(); ++j) {
        const Point diff = x - centers[j];
        out.col(j) = k.radial_derivative_over_r(diff.norm()) * diff;
    }
    return out;
}

std::vector<Eigen::MatrixXd> grad_gram(const Kernel& k, const PointList& X, const CenterSet& centers) {
    std::vector<Eigen::MatrixXd> out;
    out.reserve(X.size());
    for (const auto& x : X) {
        out.push_back(grad_block(k, x, centers));
    }
    return out;
}

GramFactorization::GramFactorization(Kernel kernel, CenterSet centers, const JitterPolicy& policy)
    : kernel_(std::move(kernel)), centers_(std::move(centers)) {
    matrix_ = gram(kernel_, centers_);
    const double scale = matrix_.diagonal().mean();
    const auto n = static_cast<Eigen::Index>(centers_.size());
    for (double step : policy.ladder) {
        const double jitter = step * scale;
        llt_.compute(matrix_ + jitter * Eigen::MatrixXd::Identity(n, n));
        if (llt_.info() == Eigen::Success) {
            jitter_ = jitter;
            return;
        }
    }
    const double last = policy.ladder.empty() ? 0.0 : policy.ladder.back() * scale;
    throw SingularGramError("Gram matrix of " + std::to_string(n) +
                                " centers is singular at maximum jitter (duplicate or near-duplicate centers?)",
                            last);
}

Eigen::VectorXd GramFactorization::solve(const Eigen::VectorXd& rhs) const {
    return llt_.solve(rhs);
}

Eigen::MatrixXd GramFactorization::solve(const Eigen::MatrixXd& rhs) const {
    return llt_.solve(rhs);
}

Eigen::MatrixXd GramFactorization::whiten(const Eigen::MatrixXd& rhs) const {
    return llt_.matrixL().solve(rhs);
}

double GramFactorization::reconstruction_error() const {
    const auto n = matrix_.rows();
    const Eigen::MatrixXd target = matrix_ + jitter_ * Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd L = llt_.matrixL();
    return (L * L.transpose() - target).norm() / target.norm();
}

GramFactorization factorize(const Kernel& k, const CenterSet& centers, const JitterPolicy& policy) {
    return GramFactorization(k, centers, policy);
}

} // namespace kernel_pi
