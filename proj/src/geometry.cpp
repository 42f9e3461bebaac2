#include "kernel_pi/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "kernel_pi/errors.hpp"
#include "kernel_pi/kernels.hpp"
#include "kernel_pi/native_approx.hpp"

namespace kernel_pi {

Domain::Domain(Point lower, Point upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
    if (lower_.size() < 1 || lower_.size() != upper_.size()) {
        throw ConfigError("domain bounds must be nonempty and of equal dimension");
    }
    if (!(lower_.array() < upper_.array()).all()) {
        throw ConfigError("domain requires lower < upper in every coordinate");
    }
}

Domain Domain::symmetric_box(int dim, double half_width) {
    return Domain(Point::Constant(dim, -half_width), Point::Constant(dim, half_width));
}

double Domain::volume() const {
    return (upper_ - lower_).prod();
}

bool Domain::contains(const Point& x, double tol) const {
    return x.size() == lower_.size() && (x.array() >= lower_.array() - tol).all() &&
           (x.array() <= upper_.array() + tol).all();
}

Domain Domain::inflated(double factor) const {
    const Point mid = 0.5 * (lower_ + upper_);
    const Point half = 0.5 * factor * (upper_ - lower_);
    return Domain(mid - half, mid + half);
}

CenterSet::CenterSet(PointList points) : points_(std::move(points)) {
    if (points_.empty()) {
        throw ConfigError("center set must contain at least one point");
    }
    const auto d = points_.front().size();
    for (const auto& p : points_) {
        if (p.size() != d || d < 1) {
            throw ConfigError("center set points must share a positive dimension");
        }
        if (!p.allFinite()) {
            throw ConfigError("center set points must be finite");
        }
    }
}

CenterSet::CenterSet(PointList points, const Domain& domain) : CenterSet(std::move(points)) {
    for (const auto& p : points_) {
        if (!domain.contains(p)) {
            throw ConfigError("center lies outside the domain");
        }
    }
}

CenterSet CenterSet::with_point(const Point& x) const {
    PointList pts = points_;
    pts.push_back(x);
    return CenterSet(std::move(pts));
}

CenterSet CenterSet::joined(const CenterSet& other) const {
    PointList pts = points_;
    pts.insert(pts.end(), other.points_.begin(), other.points_.end());
    return CenterSet(std::move(pts));
}

PointList tensor_grid(const Domain& dom, int n_per_dim) {
    if (n_per_dim < 1) {
        throw ConfigError("grid size must be at least 1 per dimension");
    }
    const int d = dom.dim();
    std::vector<Eigen::VectorXd> axes;
    for (int k = 0; k < d; ++k) {
        Eigen::VectorXd axis(n_per_dim);
        if (n_per_dim == 1) {
            axis(0) = 0.5 * (dom.lower()(k) + dom.upper()(k));
        } else {
            const double step = (dom.upper()(k) - dom.lower()(k)) / (n_per_dim - 1);
            for (int i = 0; i < n_per_dim; ++i) {
                axis(i) = dom.lower()(k) + step * i;
            }
            axis(n_per_dim - 1) = dom.upper()(k);
        }
        axes.push_back(std::move(axis));
    }
    std::size_t total = 1;
    for (int k = 0; k < d; ++k) {
        total *= static_cast<std::size_t>(n_per_dim);
    }
    PointList out;
    out.reserve(total);
    std::vector<int> idx(d, 0);
    for (std::size_t flat = 0; flat < total; ++flat) {
        Point p(d);
        for (int k = 0; k < d; ++k) {
            p(k) = axes[k](idx[k]);
        }
        out.push_back(std::move(p));
        for (int k = d - 1; k >= 0; --k) {
            if (++idx[k] < n_per_dim) {
                break;
            }
            idx[k] = 0;
        }
    }
    return out;
}

CenterSet grid_centers(const Domain& dom, int n_per_dim) {
    return CenterSet(tensor_grid(dom, n_per_dim), dom);
}

double distance_to_nearest(const CenterSet& centers, const Point& x) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : centers) {
        best = std::min(best, (x - c).squaredNorm());
    }
    return std::sqrt(best);
}

double fill_distance(const CenterSet& centers, const Domain& dom, int probe_n) {
    if (probe_n < 2) {
        throw ConfigError("fill distance needs probe_n >= 2");
    }
    double worst = 0.0;
    for (const auto& x : tensor_grid(dom, probe_n)) {
        worst = std::max(worst, distance_to_nearest(centers, x));
    }
    return worst;
}

GreedyStep greedy_augment_step(const CenterSet& centers, const Kernel& k, const Domain& dom, int probe_n) {
    const auto factor = factorize(k, centers);
    const PointList probes = tensor_grid(dom, probe_n);
    const Eigen::VectorXd power = power_function(factor, probes);
    std::size_t best = 0;
    for (std::size_t i = 1; i < probes.size(); ++i) {
        if (power(static_cast<Eigen::Index>(i)) > power(static_cast<Eigen::Index>(best))) {
            best = i;
        }
    }
    return GreedyStep{centers.with_point(probes[best]), probes[best], best,
                      power(static_cast<Eigen::Index>(best))};
}

CenterSet greedy_augment(const CenterSet& centers, const Kernel& k, const Domain& dom, int probe_n) {
    return greedy_augment_step(centers, k, dom, probe_n).centers;
}

void write_centers_csv(const std::filesystem::path& path, const CenterSet& centers) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot open '" + path.string() + "' for writing");
    }
    out.precision(17);
    for (int k = 0; k < centers.dim(); ++k) {
        out << (k ? "," : "") << 'x' << (k + 1);
    }
    out << '\n';
    for (const auto& p : centers) {
        for (int k = 0; k < p.size(); ++k) {
            out << (k ? "," : "") << p(k);
        }
        out << '\n';
    }
}

CenterSet read_centers_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open '" + path.string() + "'");
    }
    std::string line;
    std::getline(in, line);
    const auto dim = static_cast<Eigen::Index>(std::count(line.begin(), line.end(), ',') + 1);
    PointList pts;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::stringstream ss(line);
        std::string cell;
        Point p(dim);
        Eigen::Index k = 0;
        while (std::getline(ss, cell, ',')) {
            if (k >= dim) {
                throw ConfigError("too many columns in '" + path.string() + "'");
            }
            p(k++) = std::stod(cell);
        }
        if (k != dim) {
            throw ConfigError("too few columns in '" + path.string() + "'");
        }
        pts.push_back(std::move(p));
    }
    return CenterSet(std::move(pts));
}

} // namespace kernel_pi
