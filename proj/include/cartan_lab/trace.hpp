#pragma once

#include "cartan_lab/functions.hpp"
#include "cartan_lab/geometry.hpp"

#include <limits>
#include <optional>
#include <vector>

namespace cartan_lab {

// One Remez-type gap measurement: lhs = sup_{D(x,t)} f - sup_omega f against
// log_term = log(4 e t a^{1/d} / (r (d eps)^{1/d})).
struct RemezExperiment {
    Point x;
    double t = 0.0;
    double r = 0.0;
    Point omega_center;
    double omega_radius = 0.0;
    double epsilon = 0.0;
    double sup_ball = 0.0;
    double sup_omega = 0.0;
    double lhs = 0.0;
    double log_term = 0.0;
    double M1 = 0.0;
    double M2 = 0.0;
    // Multiplier of log_term in the model lhs ~ c * slope_scale * log_term:
    // M1 - M2 in the plane, the zero count k for log|F|.
    double slope_scale = 0.0;

    double regressor() const { return slope_scale * log_term; }
};

struct RemezFit {
    double c_hat = 0.0;
    double intercept = 0.0;
    // Least-squares constant of the model without intercept, for reference.
    double c_through_origin = 0.0;
    std::size_t used = 0;
    std::vector<double> residuals;  // lhs - (c_hat x + intercept), per used experiment
};

// Remez gap for f on the d-set. omega is a sub-cloud of the set; its natural
// measure weight plays the role of eps. The set must carry a certified a.
RemezExperiment remez_gap(const Function& f, const DSet& set, const Point& x, double t, double r, const DSet& omega,
                          std::size_t sup_resolution = 1024);

// Affine least-squares fit lhs ~ c_hat * regressor + intercept over experiments with lhs > 0.
RemezFit fit_constant_c(const std::vector<RemezExperiment>& experiments);

// lhs <= c * regressor, with a relative slack for rounding.
bool remez_holds(const RemezExperiment& e, double c, double rel_tol = 1e-12);

constexpr double kClampValue = -1e6;

struct MeanOscillation {
    double mass = 0.0;
    double mean = 0.0;
    double oscillation = 0.0;
    bool clamped = false;
};

// Weighted mean and mean oscillation of a value list; -inf entries are clamped.
MeanOscillation mean_oscillation(const std::vector<double>& values, const std::vector<double>& weights);

struct BmoBall {
    Point center;
    double radius = 0.0;
    double mass = 0.0;
    double mean = 0.0;
    double oscillation = 0.0;
    bool clamped = false;
};

struct BmoReport {
    std::vector<BmoBall> balls;
    double bmo_norm = 0.0;
    bool clamped = false;
};

// Mean oscillation on each ball center x radius; every ball must carry positive weight.
BmoReport bmo_norm(const Function& f, const DSet& set, const std::vector<Point>& centers,
                   const std::vector<double>& radii);

// Default ball family: given centres with radii diameter * 2^-j down to the set resolution.
std::vector<double> dyadic_radii(const DSet& set);

constexpr double kInfinityP = std::numeric_limits<double>::infinity();

struct ReverseHolderRow {
    double p = 1.0;
    double log_lhs = 0.0;  // log of ((1/mu) int e^{pf})^{1/p}
    double lhs = 0.0;
    double ratio = 1.0;
};

struct ReverseHolderReport {
    Point x;
    double t = 0.0;
    double mass = 0.0;
    double log_rhs_base = 0.0;
    double rhs_base = 0.0;
    std::vector<ReverseHolderRow> rows;
    double sup_ratio = 1.0;
};

// p = kInfinityP selects the sample maximum of e^f.
ReverseHolderReport reverse_holder(const Function& f, const DSet& set, const Point& x, double t,
                                   const std::vector<double>& p_list);

// Right-hand constant (1 + s/d) ((4e)^d a / (r^d d b))^{s/d} with s = c (M1 - M2).
double reverse_holder_bound(double s, double d, double a, double b, double r);

struct DistributionParams {
    double r = 2.0 / 3.0;
    double a = 1.0;
    double d = 1.0;
    double M1 = 0.0;
    double M2 = 0.0;
    double c_hat = 1.0;
};

struct DistributionReport {
    Point x;
    double t = 0.0;
    double sup_ball = 0.0;
    double mass = 0.0;  // mu(K_{x,t})
    std::vector<double> lambda_grid;
    std::vector<double> D_values;
    std::vector<double> bound_curve;
    std::size_t bound_exceedances = 0;
    double fitted_slope = 0.0;
    std::size_t fit_points = 0;
    double bound_slope = 0.0;  // -d / (c_hat (M1 - M2))
    // (1/mu) int f' dmu against (1/mu) int_0^inf D dlambda (trapezoid on the grid)
    double mean_f_prime = 0.0;
    double layer_cake = 0.0;
    double layer_cake_tolerance = 0.0;
};

DistributionReport distribution_check(const Function& f, const DSet& set, const Point& x, double t,
                                      const std::vector<double>& lambda_grid, const DistributionParams& params);

struct BernsteinWalshResult {
    bool holds = false;
    double lhs = 0.0;  // sup over D(x, qt)
    double rhs = 0.0;  // log q + sup over D(x, t)
};

// sup_{D(x,qt)} f <= log q + sup_{D(x,t)} f + 1e-9 for f = log|p| (divided by deg p when normalising).
BernsteinWalshResult bernstein_walsh(const std::vector<cplx>& roots, bool degree_normalize, cplx x, double t, double q);
bool bernstein_walsh_check(const std::vector<cplx>& roots, bool degree_normalize, cplx x, double t, double q);

struct SharpnessRow {
    double t = 0.0;
    double max_ratio = 0.0;  // sup_x eps_t / t^d
    Point argmax;
    double max_L = -std::numeric_limits<double>::infinity();
};

struct SharpnessReport {
    double d = 1.0;
    double C = 1.0;
    std::vector<SharpnessRow> rows;  // scales in decreasing order
    double max_ratio = 0.0;
    // max_ratio at the smallest scale over max_ratio five rows earlier (or the first row)
    double growth = 1.0;
    bool divergent = false;
    std::optional<double> certified_a;
};

// Density ratios eps_t / t^d over the set's points and, with f_x = log|z - x|,
// L(x,t) = sup_{D(x,t)} f_x - sup_{K_{x,t}} f_x - C log(t / eps_t^{1/d}).
SharpnessReport sharpness_experiment(const DSet& set, double d, std::vector<double> scales, double C = 1.0,
                                     std::size_t max_centers = 4096);

} // namespace cartan_lab
