#include "kernel_pi/galerkin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "kernel_pi/errors.hpp"

namespace kernel_pi {

double GalerkinSystem::pe_threshold() const {
    const auto n = static_cast<double>(std::max<std::size_t>(size(), 1));
    return 1e-12 * matrix.trace() / n;
}

Eigen::MatrixXd phi_matrix(const Kernel& k, const CenterSet& centers, const Point& x) {
    return grad_block(k, x, centers);
}

double unsym_kernel(const Kernel& k, const ControlAffineSystem& sys, const Policy& pol, const Point& y,
                    const Point& x) {
    return k.grad_x(x, y).dot(closed_loop_field(sys, pol, x));
}

GalerkinSystem assemble(const Kernel& k, const CenterSet& centers, const ControlAffineSystem& sys,
                        const Policy& pol, const CostSpec& cost, const QuadratureRule& rule) {
    return assemble(k, centers, sys, pol,
                    [&](const Point& x, const Eigen::VectorXd&) { return pde_rhs(cost, pol, x); }, rule);
}

GalerkinSystem assemble(const Kernel& k, const CenterSet& centers, const ControlAffineSystem& sys,
                        const Policy& pol, const RhsFunction& rhs, const QuadratureRule& rule) {
    const auto nodes = static_cast<Eigen::Index>(rule.nodes.size());
    const auto n = static_cast<Eigen::Index>(centers.size());
    // Row i holds sqrt(w_i) (Phi_i^T psi_i)^T; the weights are positive.
    Eigen::MatrixXd G(nodes, n);
    Eigen::VectorXd b(nodes);
    for (Eigen::Index i = 0; i < nodes; ++i) {
        const Point& x = rule.nodes[static_cast<std::size_t>(i)];
        const Eigen::VectorXd psi = closed_loop_field(sys, pol, x);
        const double sw = std::sqrt(rule.weights(i));
        G.row(i) = sw * (phi_matrix(k, centers, x).transpose() * psi).transpose();
        b(i) = sw * rhs(x, psi);
        if (!G.row(i).allFinite() || !std::isfinite(b(i))) {
            std::ostringstream msg;
            msg << "Galerkin assembly produced a non-finite value at node " << i << " (x = " << x.transpose()
                << ")";
            throw NonfiniteError(msg.str());
        }
    }

    GalerkinSystem out;
    const Eigen::MatrixXd M = G.transpose() * G;
    out.matrix = 0.5 * (M + M.transpose());
    out.rhs = G.transpose() * b;
    out.rhs_energy = b.squaredNorm();
    out.design = std::move(G);
    out.weighted_rhs = std::move(b);
    out.quadrature_order = rule.order;
    out.quadrature_nodes = rule.nodes.size();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(out.matrix, Eigen::EigenvaluesOnly);
    out.pe_margin = eig.eigenvalues().minCoeff();
    const double top = eig.eigenvalues().maxCoeff();
    out.condition_estimate =
        out.pe_margin > 0.0 ? top / out.pe_margin : std::numeric_limits<double>::infinity();
    return out;
}

Approximant solve_value(const GalerkinSystem& gsys, const Kernel& k, const CenterSet& centers) {
    if (gsys.size() != centers.size()) {
        throw ConfigError("Galerkin system size does not match the center count");
    }
    const double threshold = gsys.pe_threshold();
    if (!(gsys.pe_margin > threshold)) {
        std::ostringstream msg;
        msg << "persistence of excitation violated: beta(N) = " << gsys.pe_margin << " <= threshold "
            << threshold << " (N = " << gsys.size() << ")";
        throw PeViolationError(msg.str(), gsys.pe_margin, threshold);
    }
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(gsys.matrix);
    Eigen::VectorXd alpha = ldlt.solve(gsys.rhs);
    // one step of iterative refinement
    alpha += ldlt.solve(gsys.rhs - gsys.matrix * alpha);
    return Approximant(k, centers, std::move(alpha));
}

double residual_norm(const GalerkinSystem& gsys, const Eigen::VectorXd& alpha) {
    if (alpha.size() != gsys.rhs.size()) {
        throw ConfigError("coefficient vector does not match the Galerkin system");
    }
    if (gsys.design.rows() > 0) {
        return (gsys.design * alpha - gsys.weighted_rhs).norm();
    }
    const double j = alpha.dot(gsys.matrix * alpha) - 2.0 * alpha.dot(gsys.rhs) + gsys.rhs_energy;
    return std::sqrt(std::max(0.0, j));
}

void write_diagnostics_header(std::ostream& out) {
    out << "N,pe_margin,condition_estimate,residual\n";
}

void write_diagnostics_row(std::ostream& out, const GalerkinSystem& gsys, double residual) {
    out << gsys.size() << ',' << gsys.pe_margin << ',' << gsys.condition_estimate << ',' << residual << '\n';
}

} // namespace kernel_pi
