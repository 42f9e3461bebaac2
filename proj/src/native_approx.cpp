#include "kernel_pi/native_approx.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>

#include "kernel_pi/errors.hpp"

namespace kernel_pi {

Approximant::Approximant(Kernel kernel, CenterSet centers, Eigen::VectorXd coefficients,
                         std::shared_ptr<const GramFactorization> factorization)
    : kernel_(std::move(kernel)), centers_(std::move(centers)), coefficients_(std::move(coefficients)),
      factorization_(std::move(factorization)) {
    if (static_cast<std::size_t>(coefficients_.size()) != centers_.size()) {
        throw ConfigError("approximant needs one coefficient per center");
    }
}

double Approximant::value(const Point& x) const {
    double acc = 0.0;
    for (std::size_t j = 0; j < centers_.size(); ++j) {
        acc += coefficients_(static_cast<Eigen::Index>(j)) * kernel_.eval(x, centers_[j]);
    }
    return acc;
}

Eigen::VectorXd Approximant::values(const PointList& xs) const {
    Eigen::VectorXd out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        out(static_cast<Eigen::Index>(i)) = value(xs[i]);
    }
    return out;
}

Point Approximant::gradient(const Point& x) const {
    return grad_block(kernel_, x, centers_) * coefficients_;
}

double Approximant::h_norm() const {
    const double q = coefficients_.dot(gram(kernel_, centers_) * coefficients_);
    return std::sqrt(std::max(0.0, q));
}

Approximant Approximant::minus(const Approximant& other) const {
    if (other.kernel_.family() != kernel_.family() || other.kernel_.lengthscale() != kernel_.lengthscale() ||
        other.kernel_.variance() != kernel_.variance()) {
        throw ConfigError("approximant difference requires identical kernels");
    }
    Eigen::VectorXd coeffs(coefficients_.size() + other.coefficients_.size());
    coeffs << coefficients_, -other.coefficients_;
    return Approximant(kernel_, centers_.joined(other.centers_), std::move(coeffs));
}

double kernel_n(const GramFactorization& factor, const Point& x, const Point& y) {
    const auto& centers = factor.centers().points();
    const Eigen::MatrixXd kx = gram(factor.kernel(), {x}, centers).transpose();
    const Eigen::MatrixXd ky = gram(factor.kernel(), {y}, centers).transpose();
    return (kx.transpose() * factor.solve(ky))(0, 0);
}

double kernel_n(const Kernel& k, const CenterSet& centers, const Point& x, const Point& y) {
    return kernel_n(factorize(k, centers), x, y);
}

double power_function(const GramFactorization& factor, const Point& x) {
    return power_function(factor, PointList{x})(0);
}

double power_function(const Kernel& k, const CenterSet& centers, const Point& x) {
    return power_function(factorize(k, centers), x);
}

Eigen::VectorXd power_function(const GramFactorization& factor, const PointList& xs) {
    const auto& k = factor.kernel();
    // Column i of W is L^{-1} k_X(x_i), so |W_i|^2 = K_N(x_i, x_i).
    const Eigen::MatrixXd W = factor.whiten(gram(k, factor.centers().points(), xs));
    Eigen::VectorXd out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const auto col = static_cast<Eigen::Index>(i);
        const double p2 = k.eval(xs[i], xs[i]) - W.col(col).squaredNorm();
        out(col) = std::sqrt(std::max(0.0, p2));
    }
    return out;
}

Approximant interpolate(std::shared_ptr<const GramFactorization> factor, const Eigen::VectorXd& values) {
    if (static_cast<std::size_t>(values.size()) != factor->size()) {
        throw ConfigError("interpolation needs one value per center");
    }
    Eigen::VectorXd alpha = factor->solve(values);
    const Kernel k = factor->kernel();
    const CenterSet centers = factor->centers();
    return Approximant(k, centers, std::move(alpha), std::move(factor));
}

Approximant interpolate(const Kernel& k, const CenterSet& centers, const Eigen::VectorXd& values) {
    return interpolate(std::make_shared<const GramFactorization>(k, centers), values);
}

void write_approximant_csv(const std::filesystem::path& path, const Approximant& v) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot open '" + path.string() + "' for writing");
    }
    out.precision(17);
    const auto& k = v.kernel();
    out << "# kernel=" << to_string(k.family()) << " lengthscale=" << k.lengthscale()
        << " variance=" << k.variance() << " jitter=" << v.jitter() << '\n';
    for (int i = 0; i < v.centers().dim(); ++i) {
        out << 'x' << (i + 1) << ',';
    }
    out << "alpha\n";
    for (std::size_t j = 0; j < v.centers().size(); ++j) {
        for (int i = 0; i < v.centers().dim(); ++i) {
            out << v.centers()[j](i) << ',';
        }
        out << v.coefficients()(static_cast<Eigen::Index>(j)) << '\n';
    }
}

Approximant read_approximant_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open '" + path.string() + "'");
    }
    std::string line;
    std::getline(in, line);
    if (line.rfind("# ", 0) != 0) {
        throw ConfigError("approximant CSV is missing its kernel header");
    }
    std::stringstream header(line.substr(2));
    std::string field;
    std::string family = "matern52";
    double rho = 0.0;
    double variance = 1.0;
    while (header >> field) {
        const auto eq = field.find('=');
        if (eq == std::string::npos) {
            continue;
        }
        const auto key = field.substr(0, eq);
        const auto value = field.substr(eq + 1);
        if (key == "kernel") {
            family = value;
        } else if (key == "lengthscale") {
            rho = std::stod(value);
        } else if (key == "variance") {
            variance = std::stod(value);
        }
    }
    std::getline(in, line);
    const auto dim = static_cast<Eigen::Index>(std::count(line.begin(), line.end(), ','));
    PointList pts;
    std::vector<double> alpha;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::stringstream ss(line);
        std::string cell;
        Point p(dim);
        for (Eigen::Index i = 0; i < dim; ++i) {
            std::getline(ss, cell, ',');
            p(i) = std::stod(cell);
        }
        std::getline(ss, cell, ',');
        alpha.push_back(std::stod(cell));
        pts.push_back(std::move(p));
    }
    return Approximant(Kernel(parse_kernel_family(family), rho, variance), CenterSet(std::move(pts)),
                       Eigen::Map<Eigen::VectorXd>(alpha.data(), static_cast<Eigen::Index>(alpha.size())));
}

} // namespace kernel_pi
