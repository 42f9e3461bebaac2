#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kernel_pi/geometry.hpp"

namespace kernel_pi {

using VectorField = std::function<Eigen::VectorXd(const Point&)>;
using MatrixField = std::function<Eigen::MatrixXd(const Point&)>;
using ScalarField = std::function<double(const Point&)>;

/// xdot = f(x) + g(x) u, with f(0) = 0.
struct ControlAffineSystem {
    int state_dim = 0;
    int input_dim = 0;
    VectorField drift;      // f: R^d -> R^d
    MatrixField input_map;  // g: R^d -> R^{d x m}
};

/// r(x,u) = Q(x) + u^T R u
struct CostSpec {
    ScalarField state_cost;
    Eigen::MatrixXd input_weight;

    // Throws ConfigError unless R is symmetric positive definite.
    void validate() const;
};

enum class PolicySource { explicit_formula, kernel_approximant };

struct Policy {
    VectorField law;
    PolicySource source = PolicySource::explicit_formula;

    Eigen::VectorXd operator()(const Point& x) const { return law(x); }
};

// psi(x) = f(x) + g(x) mu(x)
Eigen::VectorXd closed_loop_field(const ControlAffineSystem& sys, const Policy& pol, const Point& x);
double running_cost(const CostSpec& cost, const Point& x, const Eigen::VectorXd& u);
// b(x) = -r(x, mu(x))
double pde_rhs(const CostSpec& cost, const Policy& pol, const Point& x);

/// Two-state benchmark with known optimal pair:
///   f(x) = [-x1 + x2; -0.5 x1 - 0.5 x2 (1 - (cos 2x1 + 2)^2)]
///   g(x) = [0; cos 2x1 + 2]
///   Q(x) = |x|^2, R = 1
///   V*(x) = 0.5 x1^2 + x2^2,  u*(x) = -(cos 2x1 + 2) x2
struct Benchmark {
    ControlAffineSystem system;
    CostSpec cost;
    ScalarField exact_value;
    VectorField exact_value_gradient;
    Policy exact_policy;
};

Benchmark benchmark_system();

// mu(x) = gain * x2 on the benchmark (gain -3 is the default initial policy).
Policy linear_x2_policy(double gain);

struct TrajectorySample {
    double t;
    Point x;
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    bool left_domain = false;
};

/// Fixed-step classical RK4. When `domain` is given, `left_domain` flags any
/// sample outside it. Throws NonfiniteError if the state blows up.
Trajectory simulate(const ControlAffineSystem& sys, const Policy& pol, const Point& x0, double t_final, double dt,
                    const Domain* domain = nullptr);

struct StabilityReport {
    bool stabilizing = true;
    std::vector<std::string> lines;
};

struct StabilityOptions {
    double t_final = 10.0;
    double dt = 1e-3;
    double inflation = 1.5;
    double contraction = 0.1;
};

/// Simulates from the 2^d corners and 2d face centers of the box (8 starts in
/// 2-D). Passes when every trajectory stays inside the inflated box and ends with
/// |x(T)| <= contraction |x0|.
StabilityReport verify_stabilizing(const ControlAffineSystem& sys, const Policy& pol, const Domain& dom,
                                   const StabilityOptions& opts = {});

// Header `t,x1,...,xd`.
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);

} // namespace kernel_pi
