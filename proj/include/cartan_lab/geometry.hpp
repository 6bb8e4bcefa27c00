#pragma once

#include "cartan_lab/point.hpp"

#include <algorithm>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cartan_lab {

// Planar similarity z -> ratio * e^{i rotation} * z + translation, acting on
// the first complex coordinate. Sets in C^n with n > 1 are embedded in {z_2 = ... = 0}.
struct Similarity {
    double ratio = 0.5;
    double rotation = 0.0;
    cplx translation{0.0, 0.0};

    cplx linear() const { return std::polar(ratio, rotation); }
    cplx apply(cplx z) const { return linear() * z + translation; }
};

// Sampled compact set with its natural measure. One point per cylinder.
struct DSet {
    std::vector<Point> points;
    std::vector<double> weights;
    double dimension_d = 1.0;
    double diameter = 0.0;
    int depth = 0;
    // Smallest scale the sample cloud can resolve.
    double resolution = 0.0;
    std::optional<double> reg_a;
    std::optional<double> reg_b;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
    std::size_t ambient_n() const { return points.empty() ? 1 : points.front().dim(); }
    double total_mass() const;
};

struct RegularityReport {
    std::vector<double> scales;  // strictly decreasing
    std::vector<double> upper;   // sup_x mu(K ∩ D(x,t)) / t^d
    std::vector<double> lower;   // inf_x mu(K ∩ D(x,t)) / t^d
    double a = 0.0;
    double b = 0.0;
};

struct BallRestriction {
    DSet set;
    double mass = 0.0;
};

enum class BasePoint {
    // Barycentre of the natural measure: cylinder representatives sit at cylinder centres.
    barycenter,
    // Fixed point of the first map: representatives sit at cylinder "left" corners.
    first_fixed_point,
};

struct GenerateOptions {
    std::size_t max_points = std::size_t{1} << 20;
    BasePoint base = BasePoint::barycenter;
};

// Solves sum_i ratio_i^d = 1 by bisection on d in (0, 2 * ambient_n].
double moran_dimension(std::span<const double> ratios, std::size_t ambient_n = 1);

DSet generate_ifs_set(std::span<const Similarity> maps, int depth, std::size_t ambient_n = 1,
                      const GenerateOptions& options = {});

RegularityReport regularity_constants(const DSet& set, std::span<const double> scales);

// Scales (max ratio)^m * diameter for m = m_min..m_max.
std::vector<double> geometric_scales(double diameter, double ratio, int m_min, int m_max);

// Runs regularity_constants and stores the certified (a, b) on a copy of the set.
DSet certify(DSet set, std::span<const double> scales);

// Sub-cloud inside the closed ball and its weight. Empty result is not an error.
BallRestriction ball_restrict(const DSet& set, const Point& center, double radius);

// Sum of weights in the closed ball, without materialising the sub-cloud.
double ball_mass(const DSet& set, const Point& center, double radius);

// Sorted-by-first-coordinate index for closed-ball queries on a sample cloud.
class PointIndex {
public:
    explicit PointIndex(std::span<const Point> points);

    // Indices of points in the closed ball, in ascending index order.
    std::vector<std::size_t> query(const Point& center, double radius) const;

    template <class F>
    void for_each_in_ball(const Point& center, double radius, F&& f) const;

private:
    std::span<const Point> points_;
    std::vector<std::size_t> order_;
    std::vector<double> keys_;
};

// Diameter of a point cloud (exact; convex hull when the cloud is planar).
double cloud_diameter(std::span<const Point> points);

template <class F>
void PointIndex::for_each_in_ball(const Point& center, double radius, F&& f) const {
    const double lo = center.z[0].real() - radius * (1.0 + 1e-12);
    const double hi = center.z[0].real() + radius * (1.0 + 1e-12);
    auto it = std::lower_bound(keys_.begin(), keys_.end(), lo);
    for (auto k = static_cast<std::size_t>(it - keys_.begin()); k < keys_.size() && keys_[k] <= hi; ++k) {
        const std::size_t i = order_[k];
        if (in_closed_ball(points_[i], center, radius)) f(i);
    }
}

namespace builtin {

// Middle-thirds Cantor set on [0, 1].
std::vector<Similarity> cantor();
// Unit segment [0, 1] as two halves.
std::vector<Similarity> segment();
// Four maps of ratio 1/4 at the corners of the unit square (d = 1).
std::vector<Similarity> four_corner();
// Three maps of ratio 1/3 at the corners of an equilateral triangle (d = 1).
std::vector<Similarity> triangle_dust();

// Applies z -> scale * z + shift to every map's attractor.
std::vector<Similarity> transformed(std::vector<Similarity> maps, double scale, cplx shift);

// Looks up a generator by name ("cantor", "segment", "four-corner", "triangle-dust")
// or parses "custom:r,angle,tx,ty;r,angle,tx,ty;...". Optional suffix "@scale,sx,sy".
std::vector<Similarity> parse_ifs(const std::string& spec);

// Polyline sample of a circular arc, equal weights, d = 1.
DSet circle_arc(cplx center, double radius, double angle0, double angle1, int depth);

// The non-regular set {2^-k : k = 0..count-1} ∪ {0} with weights proportional to 2^-k
// (the limit point 0 carries weight 0).
DSet dyadic_sequence(int count);

} // namespace builtin

} // namespace cartan_lab
