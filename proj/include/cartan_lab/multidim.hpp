#pragma once

#include "cartan_lab/cartan.hpp"
#include "cartan_lab/functions.hpp"
#include "cartan_lab/geometry.hpp"
#include "cartan_lab/trace.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cartan_lab {

struct KnownZero {
    Point point;
    int multiplicity = 1;
};

// Polynomial map F = (f_1, ..., f_n) on C^n with its zeros in B_{1/2} supplied analytically.
struct HolomorphicMapSample {
    std::string name;
    std::size_t n = 2;
    std::vector<Polynomial> components;
    std::vector<KnownZero> known_zeros;
    // inf_{|z| = 1/2} log|F| >= -M
    double M = 0.0;

    int k() const;
    Function log_norm_function() const;
    // Checks arities, |F(zero)| < 1e-10 and that every zero lies in B_{1/2}.
    void validate() const;
    // Copy scaled by a positive constant so that sup_{B_r} log|F| <= 0; M is shifted to match.
    HolomorphicMapSample normalized(double r) const;
};

// 1/2 log sum |f_i(z)|^2, -inf at common zeros.
double log_norm(const HolomorphicMapSample& F, const Point& z);

namespace gallery {

HolomorphicMapSample identity();                       // (z1, z2)
HolomorphicMapSample quadratic(double c);              // (z1^2 - c, z2), 0 < c < 1/4
HolomorphicMapSample rotation();                       // (z1 + z2, z1 - z2)
HolomorphicMapSample product(double c1, double c2);    // (z1^2 - c1, z2^2 - c2)
HolomorphicMapSample cusp();                           // (z1, z2^2), a non-elliptic zero

std::vector<HolomorphicMapSample> all();
// "identity", "quadratic[:c]", "rotation", "product[:c1,c2]", "cusp".
HolomorphicMapSample by_name(const std::string& spec);

} // namespace gallery

struct EnvelopeReport {
    std::size_t grid_size = 0;
    std::size_t violations = 0;
    double worst_gap = 0.0;  // max of envelope - u over the grid (<= 1e-9 means pass)
    Point worst_point;
    bool success() const { return violations == 0; }
};

// -M + sum_i m_i log|z - xi_i| <= log|F(z)| at every grid point inside the closed ball B_{1/2}.
EnvelopeReport envelope_check(const HolomorphicMapSample& F, const GridSpec& grid);

// Default grid: count low-discrepancy points of B_{1/2} in C^n.
GridSpec half_ball_grid(std::size_t n, std::size_t count, std::uint64_t seed);

// Cover for the zero measure and check of log|F| >= -M + p log(H/e) off the cover in B_{1/2}.
// mass_p defaults to k; any p >= k rescales the zero masses by p/k.
CartanReport multidim_cartan(const HolomorphicMapSample& F, double H, double d, const GridSpec& grid,
                             std::optional<double> mass_p = std::nullopt, double tolerance = 1e-9);

enum class Verdict { elliptic, non_elliptic, inconclusive };
std::string to_string(Verdict v);

struct DirectionFit {
    Point direction;
    double exponent = 0.0;
    double coefficient = 0.0;
};

struct EllipticityProbeResult {
    Point zero;
    std::vector<DirectionFit> directions;
    double exponent_spread = 0.0;
    double min_coefficient = 0.0;
    Verdict verdict = Verdict::inconclusive;
};

struct EllipticityOptions {
    double spread_elliptic = 0.05;
    double spread_non_elliptic = 0.25;
    double coefficient_floor = 1e-6;
    std::uint64_t seed = 0;
};

// Fits log h(zero + t w) ~ e log t + log c with h = |F|^2 along the 2n real axis
// directions and n_directions low-discrepancy directions.
EllipticityProbeResult ellipticity_probe(const HolomorphicMapSample& F, const Point& zero, std::size_t n_directions,
                                         const std::vector<double>& t_grid, const EllipticityOptions& opts = {});

// Remez-type gap for log|F| with log_term = log(16 e r t a^{1/d} / (d eps)^{1/d}) and
// slope_scale = k. The unknown constant c(r, F) enters additively and is absorbed by the
// fit intercept. M1, M2 hold sup log|F| over B(x, 4 r^2 t) and B(x, t).
RemezExperiment mcol1_gap(const HolomorphicMapSample& F, const DSet& set, const Point& x, double t, double r,
                          const DSet& omega, std::size_t sup_resolution = 4096);

} // namespace cartan_lab
