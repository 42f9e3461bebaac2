#include "kernel_pi/policy_iteration.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "kernel_pi/errors.hpp"

namespace kernel_pi {

Policy policy_from_gradient(const ControlAffineSystem& sys, const Eigen::MatrixXd& input_weight,
                            VectorField value_gradient, PolicySource source) {
    const Eigen::MatrixXd r_inv = input_weight.inverse();
    return Policy{[input_map = sys.input_map, r_inv, grad = std::move(value_gradient)](const Point& x) {
                      return Eigen::VectorXd(-0.5 * r_inv * input_map(x).transpose() * grad(x));
                  },
                  source};
}

Policy policy_update(const Approximant& v, const ControlAffineSystem& sys, const Eigen::MatrixXd& input_weight) {
    if (!v.kernel().differentiable()) {
        throw UnsupportedDerivativeError("policy update needs a differentiable kernel");
    }
    return policy_from_gradient(
        sys, input_weight, [v](const Point& x) { return v.gradient(x); }, PolicySource::kernel_approximant);
}

double origin_control_norm(const Policy& pol, int state_dim) {
    return pol(Point::Zero(state_dim)).norm();
}

double controller_error(const Policy& mu, const Policy& mu_ref, const PointList& probes) {
    double worst = 0.0;
    for (const auto& x : probes) {
        worst = std::max(worst, (mu(x) - mu_ref(x)).lpNorm<Eigen::Infinity>());
    }
    return worst;
}

double controller_error(const Policy& mu, const Policy& mu_ref, const Domain& dom, int probe_n) {
    if (probe_n < 2) {
        throw ConfigError("controller error needs probe_n >= 2");
    }
    return controller_error(mu, mu_ref, tensor_grid(dom, probe_n));
}

namespace {

std::vector<Eigen::VectorXd> sample(const Policy& pol, const PointList& probes) {
    std::vector<Eigen::VectorXd> out;
    out.reserve(probes.size());
    for (const auto& x : probes) {
        out.push_back(pol(x));
    }
    return out;
}

} // namespace

PIResult policy_iterate(const Kernel& k, const CenterSet& centers, const ControlAffineSystem& sys,
                        const CostSpec& cost, const Policy& initial, const Domain& dom, const QuadratureRule& rule,
                        const PISettings& settings) {
    if (!(settings.tol > 0.0)) {
        throw ConfigError("policy iteration tolerance must be positive");
    }
    PIResult result;
    if (settings.max_iter <= 0) {
        return result;
    }
    if (!settings.skip_stability_check) {
        const auto report = verify_stabilizing(sys, initial, dom);
        if (!report.stabilizing) {
            std::string msg = "initial policy is not stabilizing on the domain:";
            for (const auto& line : report.lines) {
                msg += "\n  " + line;
            }
            throw Error(msg);
        }
    }

    const PointList probes = tensor_grid(dom, settings.probe_n);
    Policy current = initial;
    auto current_samples = sample(current, probes);
    for (int i = 0; i < settings.max_iter; ++i) {
        const auto gsys = assemble(k, centers, sys, current, cost, rule);
        std::optional<Approximant> v;
        try {
            v = solve_value(gsys, k, centers);
        } catch (const PeViolationError& e) {
            throw PeViolationError("policy iteration " + std::to_string(i) + ": " + e.what(), e.pe_margin(),
                                   e.threshold());
        }
        Policy next = policy_update(*v, sys, cost.input_weight);
        auto next_samples = sample(next, probes);
        double delta = 0.0;
        for (std::size_t p = 0; p < probes.size(); ++p) {
            delta = std::max(delta, (next_samples[p] - current_samples[p]).lpNorm<Eigen::Infinity>());
        }
        PIIterate it{*v,
                     next,
                     delta,
                     gsys.pe_margin,
                     residual_norm(gsys, v->coefficients()),
                     origin_control_norm(next, sys.state_dim)};
        if (settings.reference) {
            it.reference_error = controller_error(next, *settings.reference, probes);
        }
        result.iterates.push_back(std::move(it));
        result.iterations_used = i + 1;
        current = std::move(next);
        current_samples = std::move(next_samples);
        if (delta <= settings.tol) {
            result.converged = true;
            break;
        }
    }
    return result;
}

void write_pi_log(std::ostream& out, const PIResult& result) {
    out << "iteration,pe_margin,residual,policy_delta,controller_error_vs_reference\n";
    for (std::size_t i = 0; i < result.iterates.size(); ++i) {
        const auto& it = result.iterates[i];
        out << i << ',' << it.pe_margin << ',' << it.residual << ',' << it.policy_delta << ',';
        if (!std::isnan(it.reference_error)) {
            out << it.reference_error;
        }
        out << '\n';
    }
}

} // namespace kernel_pi
