#pragma once

#include <limits>
#include <optional>
#include <ostream>
#include <vector>

#include <Eigen/Dense>

#include "kernel_pi/dynamics.hpp"
#include "kernel_pi/galerkin.hpp"
#include "kernel_pi/native_approx.hpp"

namespace kernel_pi {

// mu(x) = -1/2 R^{-1} g(x)^T grad(x)
Policy policy_from_gradient(const ControlAffineSystem& sys, const Eigen::MatrixXd& input_weight,
                            VectorField value_gradient, PolicySource source);

// Policy update from a kernel approximant of the value function.
Policy policy_update(const Approximant& v, const ControlAffineSystem& sys, const Eigen::MatrixXd& input_weight);

// |mu(0)|; the update does not force mu(0) = 0 for approximants.
double origin_control_norm(const Policy& pol, int state_dim);

// max over the probe grid of |mu(x) - mu_ref(x)|_inf
double controller_error(const Policy& mu, const Policy& mu_ref, const Domain& dom, int probe_n);
double controller_error(const Policy& mu, const Policy& mu_ref, const PointList& probes);

struct PISettings {
    double tol = 1e-6;
    int max_iter = 20;
    int probe_n = 101;
    // Skip the simulation check on the initial policy.
    bool skip_stability_check = false;
    std::optional<Policy> reference;
};

struct PIIterate {
    Approximant value;    // v_i, evaluated under mu_i
    Policy next_policy;   // mu_{i+1}
    double policy_delta;  // probe sup of |mu_{i+1} - mu_i|
    double pe_margin;
    double residual;
    double origin_control; // |mu_{i+1}(0)|
    double reference_error = std::numeric_limits<double>::quiet_NaN();
};

struct PIResult {
    std::vector<PIIterate> iterates;
    bool converged = false;
    int iterations_used = 0;

    [[nodiscard]] const PIIterate& last() const { return iterates.back(); }
};

/// Policy iteration: alternate Galerkin policy evaluation with the policy
/// update until the probe-grid policy change drops to `tol` or `max_iter`
/// evaluations have run. Throws PeViolationError (message names the iteration)
/// and Error when the initial policy fails the stability check.
PIResult policy_iterate(const Kernel& k, const CenterSet& centers, const ControlAffineSystem& sys,
                        const CostSpec& cost, const Policy& initial, const Domain& dom, const QuadratureRule& rule,
                        const PISettings& settings = {});

// iteration,pe_margin,residual,policy_delta,controller_error_vs_reference
void write_pi_log(std::ostream& out, const PIResult& result);

} // namespace kernel_pi
