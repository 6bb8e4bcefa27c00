#pragma once

#include "cartan_lab/cartan.hpp"
#include "cartan_lab/functions.hpp"
#include "cartan_lab/geometry.hpp"
#include "cartan_lab/multidim.hpp"
#include "cartan_lab/trace.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace fixtures {

using namespace cartan_lab;

// Middle-thirds Cantor set squeezed into [-0.3, 0.3], certified over 0.6 * 3^-m, m = 1..9.
inline DSet remez_set() {
    const auto maps = builtin::transformed(builtin::cantor(), 0.6, {-0.3, 0.0});
    return certify(generate_ifs_set(maps, 10), geometric_scales(0.6, 1.0 / 3.0, 1, 9));
}

inline std::size_t nearest_index(const DSet& set, const Point& p) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < set.size(); ++i)
        if (distance(set.points[i], p) < distance(set.points[best], p)) best = i;
    return best;
}

// Remez experiments around the sample point nearest `anchor_target`: for each t a random
// sample x near the anchor, omega = K ∩ D(anchor, (t - |x - anchor|) 3^-m), m = 1..levels.
inline std::vector<RemezExperiment> remez_batch(const Function& f, const DSet& set, cplx anchor_target,
                                                const std::vector<double>& ts, double r, std::uint64_t seed,
                                                int levels = 6) {
    std::mt19937_64 rng(seed);
    const Point anchor = set.points[nearest_index(set, Point{anchor_target})];
    std::vector<RemezExperiment> out;
    for (double t : ts) {
        std::vector<std::size_t> ok;
        for (std::size_t i = 0; i < set.size(); ++i) {
            const double off = distance(set.points[i], anchor);
            if (off <= 0.5 * t && norm(set.points[i]) + t / r <= r) ok.push_back(i);
        }
        if (ok.empty()) continue;
        const Point x = set.points[ok[std::uniform_int_distribution<std::size_t>(0, ok.size() - 1)(rng)]];
        const double room = t - distance(x, anchor);
        for (int m = 1; m <= levels; ++m) {
            const auto omega = ball_restrict(set, anchor, room * std::pow(3.0, -m)).set;
            out.push_back(remez_gap(f, set, x, t, r, omega));
        }
    }
    return out;
}

inline std::size_t count_holding(const std::vector<RemezExperiment>& exps, double c) {
    return static_cast<std::size_t>(
        std::count_if(exps.begin(), exps.end(), [&](const RemezExperiment& e) { return remez_holds(e, c); }));
}

// Cantor set of diameter 0.2 at the origin of C^2 (first coordinate axis).
inline DSet mcol1_set() {
    const auto maps = builtin::transformed(builtin::cantor(), 0.2, {-0.1, 0.0});
    return certify(generate_ifs_set(maps, 10, 2), geometric_scales(0.2, 1.0 / 3.0, 1, 9));
}

inline std::vector<RemezExperiment> mcol1_batch(const HolomorphicMapSample& F, const DSet& set, const Point& x,
                                                const std::vector<double>& ts, double r, int levels = 5) {
    std::vector<RemezExperiment> out;
    for (double t : ts)
        for (int m = 1; m <= levels; ++m) {
            const auto omega = ball_restrict(set, x, t * 0.5 * std::pow(3.0, -m)).set;
            if (!omega.empty()) out.push_back(mcol1_gap(F, set, x, t, r, omega));
        }
    return out;
}

// Sample points with extreme first real coordinate.
inline std::pair<Point, Point> extreme_points(const DSet& set) {
    auto cmp = [](const Point& a, const Point& b) { return a.z[0].real() < b.z[0].real(); };
    const auto [lo, hi] = std::minmax_element(set.points.begin(), set.points.end(), cmp);
    return {*lo, *hi};
}

// k unit atoms uniform in the unit disk.
inline DiscreteMeasure random_measure(std::mt19937_64& rng, std::size_t k) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Point> atoms;
    while (atoms.size() < k) {
        const double x = 2.0 * u(rng) - 1.0, y = 2.0 * u(rng) - 1.0;
        if (x * x + y * y <= 1.0) atoms.push_back(Point::planar(x, y));
    }
    return DiscreteMeasure::counting(std::move(atoms));
}

} // namespace fixtures
