#include "kernel_pi/dynamics.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "kernel_pi/errors.hpp"

namespace kernel_pi {

void CostSpec::validate() const {
    const auto& R = input_weight;
    if (R.rows() != R.cols() || R.rows() < 1) {
        throw ConfigError("input weight must be a nonempty square matrix");
    }
    if (!R.isApprox(R.transpose(), 1e-12)) {
        throw ConfigError("input weight must be symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(R);
    if (eig.eigenvalues().minCoeff() <= 0.0) {
        throw ConfigError("input weight must be positive definite");
    }
}

Eigen::VectorXd closed_loop_field(const ControlAffineSystem& sys, const Policy& pol, const Point& x) {
    return sys.drift(x) + sys.input_map(x) * pol(x);
}

double running_cost(const CostSpec& cost, const Point& x, const Eigen::VectorXd& u) {
    return cost.state_cost(x) + u.dot(cost.input_weight * u);
}

double pde_rhs(const CostSpec& cost, const Policy& pol, const Point& x) {
    return -running_cost(cost, x, pol(x));
}

Benchmark benchmark_system() {
    Benchmark b;
    b.system.state_dim = 2;
    b.system.input_dim = 1;
    b.system.drift = [](const Point& x) {
        const double c = std::cos(2.0 * x(0)) + 2.0;
        Eigen::VectorXd out(2);
        out << -x(0) + x(1), -0.5 * x(0) - 0.5 * x(1) * (1.0 - c * c);
        return out;
    };
    b.system.input_map = [](const Point& x) {
        Eigen::MatrixXd out(2, 1);
        out << 0.0, std::cos(2.0 * x(0)) + 2.0;
        return out;
    };
    b.cost.state_cost = [](const Point& x) { return x.squaredNorm(); };
    b.cost.input_weight = Eigen::MatrixXd::Identity(1, 1);
    b.exact_value = [](const Point& x) { return 0.5 * x(0) * x(0) + x(1) * x(1); };
    b.exact_value_gradient = [](const Point& x) {
        Eigen::VectorXd out(2);
        out << x(0), 2.0 * x(1);
        return out;
    };
    b.exact_policy.law = [](const Point& x) {
        Eigen::VectorXd out(1);
        out << -(std::cos(2.0 * x(0)) + 2.0) * x(1);
        return out;
    };
    b.exact_policy.source = PolicySource::explicit_formula;
    return b;
}

Policy linear_x2_policy(double gain) {
    return Policy{[gain](const Point& x) {
                      Eigen::VectorXd out(1);
                      out << gain * x(1);
                      return out;
                  },
                  PolicySource::explicit_formula};
}

Trajectory simulate(const ControlAffineSystem& sys, const Policy& pol, const Point& x0, double t_final, double dt,
                    const Domain* domain) {
    if (!(dt > 0.0) || !(t_final >= dt)) {
        throw ConfigError("simulate requires dt > 0 and t_final >= dt");
    }
    const auto field = [&](const Point& x) { return closed_loop_field(sys, pol, x); };
    const auto steps = static_cast<long>(std::llround(t_final / dt));
    Trajectory traj;
    traj.samples.reserve(static_cast<std::size_t>(steps) + 1);
    Point x = x0;
    traj.samples.push_back({0.0, x});
    traj.left_domain = domain && !domain->contains(x);
    for (long s = 1; s <= steps; ++s) {
        const Point k1 = field(x);
        const Point k2 = field(x + 0.5 * dt * k1);
        const Point k3 = field(x + 0.5 * dt * k2);
        const Point k4 = field(x + dt * k3);
        x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!x.allFinite()) {
            std::ostringstream msg;
            msg << "state became non-finite at t = " << s * dt;
            throw NonfiniteError(msg.str());
        }
        traj.samples.push_back({s * dt, x});
        if (domain && !domain->contains(x)) {
            traj.left_domain = true;
        }
    }
    return traj;
}

namespace {

PointList stability_starts(const Domain& dom) {
    const int d = dom.dim();
    const Point mid = 0.5 * (dom.lower() + dom.upper());
    PointList starts;
    // corners
    for (int mask = 0; mask < (1 << d); ++mask) {
        Point p(d);
        for (int k = 0; k < d; ++k) {
            p(k) = (mask >> k) & 1 ? dom.upper()(k) : dom.lower()(k);
        }
        starts.push_back(p);
    }
    // face centers
    for (int k = 0; k < d; ++k) {
        Point lo = mid;
        Point hi = mid;
        lo(k) = dom.lower()(k);
        hi(k) = dom.upper()(k);
        starts.push_back(lo);
        starts.push_back(hi);
    }
    return starts;
}

} // namespace

StabilityReport verify_stabilizing(const ControlAffineSystem& sys, const Policy& pol, const Domain& dom,
                                   const StabilityOptions& opts) {
    StabilityReport report;
    const Domain outer = dom.inflated(opts.inflation);
    for (const auto& x0 : stability_starts(dom)) {
        std::ostringstream line;
        line << "x0 = (" << x0.transpose() << "): ";
        const double start = x0.norm();
        try {
            const auto traj = simulate(sys, pol, x0, opts.t_final, opts.dt, &outer);
            const double final_norm = traj.samples.back().x.norm();
            const bool contracted = final_norm <= opts.contraction * start;
            line << "final |x| = " << final_norm << (traj.left_domain ? ", left inflated domain" : "")
                 << (contracted ? "" : ", insufficient contraction");
            if (traj.left_domain || !contracted) {
                report.stabilizing = false;
            }
        } catch (const NonfiniteError& e) {
            line << e.what();
            report.stabilizing = false;
        }
        report.lines.push_back(line.str());
    }
    return report;
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot open '" + path.string() + "' for writing");
    }
    out.precision(17);
    out << 't';
    const auto d = traj.samples.empty() ? 0 : traj.samples.front().x.size();
    for (Eigen::Index k = 0; k < d; ++k) {
        out << ",x" << (k + 1);
    }
    out << '\n';
    for (const auto& s : traj.samples) {
        out << s.t;
        for (Eigen::Index k = 0; k < d; ++k) {
            out << ',' << s.x(k);
        }
        out << '\n';
    }
}

} // namespace kernel_pi
