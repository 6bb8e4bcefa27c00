#pragma once

#include "cartan_lab/point.hpp"

#include <cstdint>
#include <vector>

namespace cartan_lab {

// Halton sequence in [0,1)^dim with an optional Cranley-Patterson rotation.
// A zero seed gives the plain (unshifted) sequence.
class Halton {
public:
    Halton(std::size_t dim, std::uint64_t seed = 0);

    std::size_t dim() const { return bases_.size(); }
    // Writes the index-th point into out (size dim()).
    void point(std::uint64_t index, std::vector<double>& out) const;

private:
    std::vector<unsigned> bases_;
    std::vector<double> shift_;
};

// count directions on the unit sphere of R^{2n}, returned as points of C^n.
std::vector<Point> sphere_directions(std::size_t n, std::size_t count, std::uint64_t seed = 0);

// count low-discrepancy points of the closed Euclidean ball B(center, radius) in C^n.
std::vector<Point> ball_points(const Point& center, double radius, std::size_t count,
                               std::uint64_t seed = 0);

} // namespace cartan_lab
