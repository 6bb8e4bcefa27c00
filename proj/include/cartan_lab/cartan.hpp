#pragma once

#include "cartan_lab/functions.hpp"
#include "cartan_lab/point.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cartan_lab {

// Power majorant phi(t) = (p t)^d.
struct Majorant {
    double p = 1.0;
    double d = 1.0;

    static Majorant power(double p, double d);

    double operator()(double t) const { return std::pow(p * t, d); }
    double inverse(double v) const { return std::pow(v, 1.0 / d) / p; }
    // lim_{t -> inf} phi(t)
    double limit() const;
};

struct Ball {
    Point center;
    double radius = 0.0;
};

struct GorinParams {
    double alpha = 0.999;
    double beta = 2.001;
    double gamma = 0.49;
};

struct BallCover {
    std::vector<Ball> balls;
    // tau(x_k) for each selected centre; B(x_k, tau_k) are pairwise disjoint.
    std::vector<double> taus;
    double d_exponent = 1.0;
    double budget_used = 0.0;   // sum r_j^d
    double budget_limit = 0.0;
    double majorant_sum = 0.0;  // sum phi(gamma t_k), bounded by the total mass
    double mass = 0.0;
    GorinParams params;
    // True when each tau_k is the sup of tau over the whole uncovered space
    // (planar arrangement greedy), false for the finite candidate greedy.
    bool exact_sup = false;

    bool within_budget() const { return budget_used <= budget_limit * (1.0 + 1e-12); }
    bool contains(const Point& z) const;
};

// Evaluation points for post-hoc verification. Rectangular grids remember their shape.
struct GridSpec {
    std::vector<Point> points;
    std::string description;
    std::size_t nx = 0, ny = 0;  // nonzero for rectangular grids, row-major in y then x

    static GridSpec rectangle(double xmin, double xmax, double ymin, double ymax, std::size_t n);
    // Parses "xmin,xmax,ymin,ymax,n".
    static GridSpec parse(const std::string& spec);
    static GridSpec ball_cloud(const Point& center, double radius, std::size_t count, std::uint64_t seed);

    bool rectangular() const { return nx > 0 && ny > 0; }
};

struct CartanReport {
    BallCover cover;
    double H = 0.0;
    double k = 0.0;
    double bound = 0.0;
    double min_off_cover = 0.0;  // +inf when the off-cover grid is empty
    bool empty_off_cover = false;
    std::size_t grid_size = 0;
    std::size_t off_cover_count = 0;
    std::string grid;
    std::vector<Point> violations;

    bool success() const { return violations.empty() && cover.within_budget(); }
};

// sup{t : mu(B(x,t)) >= phi(t)}, exact for atomic mu.
double tau(const Point& x, const DiscreteMeasure& mu, const Majorant& phi);

// Centres for the finite candidate greedy used when the exact planar greedy
// does not apply: atoms plus midpoints of atom pairs closer than 2 phi^{-1}(mu(X)).
std::vector<Point> candidate_centers(const DiscreteMeasure& mu, const Majorant& phi);

BallCover gorin_cover(const DiscreteMeasure& mu, const Majorant& phi, const GorinParams& params = {});

// Cover with budget sum r_j^d <= (2H)^d / d off which the potential is >= k log(H/e).
BallCover cartan_cover(const DiscreteMeasure& mu, double H, double d);

CartanReport verify_cartan(const Function& f, const BallCover& cover, double bound, const GridSpec& grid,
                           double tolerance = 1e-9);

// Off-cover grid points z with mu(B(z,t)) >= phi(t) for some listed t.
std::vector<Point> irregular_off_cover(const DiscreteMeasure& mu, const Majorant& phi, const BallCover& cover,
                                       const GridSpec& grid, const std::vector<double>& scales);

// Pairwise disjointness of the closed balls B(x_k, tau_k).
bool tau_balls_disjoint(const BallCover& cover);

struct LocalCoverInput {
    Point x;
    double t = 0.0;
    double r = 0.0;
    double H = 0.0;
    double d = 1.0;
    double c_hat = 0.0;
    double M1 = 0.0;
    double M2 = 0.0;
};

// Checks the local Cartan estimate in D(x,t): the sublevel set
// {f < sup_{D(x,t)} f + c_hat (M1 - M2) log(H/e)} on the grid must admit a
// greedy ball cover of budget (2tH/r)^d / d.
CartanReport local_cover_check(const Function& f, const LocalCoverInput& in, const GridSpec& grid);

} // namespace cartan_lab
