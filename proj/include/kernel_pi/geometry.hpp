#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include <Eigen/Dense>

namespace kernel_pi {

using Point = Eigen::VectorXd;
using PointList = std::vector<Point>;

class Kernel;

// Axis-aligned box, lower < upper in every coordinate.
class Domain {
public:
    Domain(Point lower, Point upper);

    // [-1,1]^dim
    static Domain symmetric_box(int dim, double half_width = 1.0);

    [[nodiscard]] int dim() const noexcept { return static_cast<int>(lower_.size()); }
    [[nodiscard]] const Point& lower() const noexcept { return lower_; }
    [[nodiscard]] const Point& upper() const noexcept { return upper_; }
    [[nodiscard]] double volume() const;
    [[nodiscard]] bool contains(const Point& x, double tol = 0.0) const;
    // Box scaled by `factor` about its midpoint.
    [[nodiscard]] Domain inflated(double factor) const;

private:
    Point lower_;
    Point upper_;
};

// Ordered centers; the order defines basis indexing.
class CenterSet {
public:
    explicit CenterSet(PointList points);
    // Same as above, additionally requiring every point to lie in the closed box.
    CenterSet(PointList points, const Domain& domain);

    [[nodiscard]] std::size_t size() const noexcept { return points_.size(); }
    [[nodiscard]] int dim() const noexcept { return static_cast<int>(points_.front().size()); }
    [[nodiscard]] const Point& operator[](std::size_t i) const { return points_[i]; }
    [[nodiscard]] const PointList& points() const noexcept { return points_; }
    [[nodiscard]] auto begin() const noexcept { return points_.begin(); }
    [[nodiscard]] auto end() const noexcept { return points_.end(); }

    [[nodiscard]] CenterSet with_point(const Point& x) const;
    // Concatenation; duplicates are kept.
    [[nodiscard]] CenterSet joined(const CenterSet& other) const;

private:
    PointList points_;
};

// Tensor grid including the box endpoints, row-major (last coordinate fastest).
// A single point per axis sits at the midpoint.
PointList tensor_grid(const Domain& dom, int n_per_dim);

CenterSet grid_centers(const Domain& dom, int n_per_dim);

// Distance from x to the nearest center.
double distance_to_nearest(const CenterSet& centers, const Point& x);

// Maximum over a probe_n^d tensor probe grid of the distance to the nearest
// center. This is a lower bound on the true fill distance.
double fill_distance(const CenterSet& centers, const Domain& dom, int probe_n);

struct GreedyStep {
    CenterSet centers;      // input centers plus the candidate
    Point candidate;
    std::size_t probe_index;
    double power_max;       // power function at the candidate before augmentation
};

// Adds the probe-grid maximizer of the power function (lowest row-major index on ties).
GreedyStep greedy_augment_step(const CenterSet& centers, const Kernel& k, const Domain& dom, int probe_n);

CenterSet greedy_augment(const CenterSet& centers, const Kernel& k, const Domain& dom, int probe_n);

// CSV with header `x1,...,xd`, one point per row.
void write_centers_csv(const std::filesystem::path& path, const CenterSet& centers);
CenterSet read_centers_csv(const std::filesystem::path& path);

} // namespace kernel_pi
