#include "cartan_lab/multidim.hpp"

#include "cartan_lab/error.hpp"
#include "cartan_lab/lowdisc.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cartan_lab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

Polynomial poly2(std::vector<std::pair<cplx, std::vector<int>>> terms) {
    Polynomial p;
    p.nvars = 2;
    for (auto& [c, e] : terms) p.terms.push_back({c, e});
    return p;
}

} // namespace

int HolomorphicMapSample::k() const {
    int s = 0;
    for (const auto& z : known_zeros) s += z.multiplicity;
    return s;
}

Function HolomorphicMapSample::log_norm_function() const { return Function(LogNormMap{components}); }

void HolomorphicMapSample::validate() const {
    if (n < 2) throw InvalidInput("map sample: n must be at least 2");
    if (components.size() != n) throw DimensionMismatch("map sample: need n components");
    for (const auto& c : components)
        if (c.nvars != n) throw DimensionMismatch("map sample: component arity differs from n");
    if (!(M >= 0.0) || !std::isfinite(M)) throw InvalidInput("map sample: M must be finite and nonnegative");
    const Function u = log_norm_function();  // validates degrees and exponent lengths
    for (const auto& z : known_zeros) {
        if (z.point.dim() != n) throw DimensionMismatch("map sample: zero has wrong dimension");
        if (z.multiplicity < 1) throw InvalidInput("map sample: multiplicity must be >= 1");
        if (!(norm(z.point) < 0.5)) throw InvalidInput("map sample: zero outside B_{1/2}");
        double s = 0.0;
        for (const auto& c : components) s += std::norm(c(z.point));
        if (!(std::sqrt(s) < 1e-10)) throw InvalidInput("map sample: |F| does not vanish at a listed zero");
    }
}

HolomorphicMapSample HolomorphicMapSample::normalized(double r) const {
    if (!(r > 0.5)) throw InvalidInput("normalized: r must exceed 1/2");
    const double sup = sup_on_ball(log_norm_function(), Point::origin(n), r, 4096).value;
    HolomorphicMapSample out = *this;
    if (sup > 0.0) {
        // small margin for the sampled sup being a lower estimate
        const double shift = sup + 1e-9;
        const double s = std::exp(-shift);
        for (auto& c : out.components)
            for (auto& t : c.terms) t.coeff *= s;
        out.M = M + shift;
    }
    return out;
}

double log_norm(const HolomorphicMapSample& F, const Point& z) {
    if (z.dim() != F.n) throw DimensionMismatch("log_norm: point dimension mismatch");
    double s = 0.0;
    for (const auto& c : F.components) s += std::norm(c(z));
    return s == 0.0 ? kNegInf : 0.5 * std::log(s);
}

namespace gallery {

HolomorphicMapSample identity() {
    HolomorphicMapSample F;
    F.name = "identity";
    F.components = {poly2({{1.0, {1, 0}}}), poly2({{1.0, {0, 1}}})};
    F.known_zeros = {{Point{0.0, 0.0}, 1}};
    F.M = std::log(2.0);
    return F;
}

HolomorphicMapSample quadratic(double c) {
    if (!(c > 0.0 && c < 0.25)) throw InvalidInput("quadratic map: c must lie in (0, 1/4)");
    HolomorphicMapSample F;
    std::ostringstream nm;
    nm << "quadratic:" << c;
    F.name = nm.str();
    F.components = {poly2({{1.0, {2, 0}}, {-c, {0, 0}}}), poly2({{1.0, {0, 1}}})};
    const double s = std::sqrt(c);
    F.known_zeros = {{Point{s, 0.0}, 1}, {Point{-s, 0.0}, 1}};
    // on |z| = 1/2 with s = |z1|^2: |F|^2 >= (s - c)^2 + 1/4 - s, decreasing in s
    F.M = -std::log(0.25 - c);
    return F;
}

HolomorphicMapSample rotation() {
    HolomorphicMapSample F;
    F.name = "rotation";
    F.components = {poly2({{1.0, {1, 0}}, {1.0, {0, 1}}}), poly2({{1.0, {1, 0}}, {-1.0, {0, 1}}})};
    F.known_zeros = {{Point{0.0, 0.0}, 1}};
    // |F|^2 = 2 |z|^2
    F.M = 0.5 * std::log(2.0);
    return F;
}

HolomorphicMapSample product(double c1, double c2) {
    if (!(c1 > 0.0 && c2 > 0.0 && c1 + c2 < 0.25)) throw InvalidInput("product map: need c1, c2 > 0 and c1 + c2 < 1/4");
    HolomorphicMapSample F;
    std::ostringstream nm;
    nm << "product:" << c1 << "," << c2;
    F.name = nm.str();
    F.components = {poly2({{1.0, {2, 0}}, {-c1, {0, 0}}}), poly2({{1.0, {0, 2}}, {-c2, {0, 0}}})};
    const double s1 = std::sqrt(c1), s2 = std::sqrt(c2);
    for (double a : {s1, -s1})
        for (double b : {s2, -s2}) F.known_zeros.push_back({Point{a, b}, 1});
    // minimise (x - c1)^2 + (1/4 - x - c2)^2 over x = |z1|^2 in [0, 1/4]
    const double x = std::clamp((c1 + 0.25 - c2) / 2.0, 0.0, 0.25);
    const double m = (x - c1) * (x - c1) + (0.25 - x - c2) * (0.25 - x - c2);
    F.M = -0.5 * std::log(m);
    return F;
}

HolomorphicMapSample cusp() {
    HolomorphicMapSample F;
    F.name = "cusp";
    F.components = {poly2({{1.0, {1, 0}}}), poly2({{1.0, {0, 2}}})};
    F.known_zeros = {{Point{0.0, 0.0}, 2}};
    // |z1|^2 + |z2|^4 on |z| = 1/2 is smallest at z1 = 0: 1/16
    F.M = std::log(4.0);
    return F;
}

std::vector<HolomorphicMapSample> all() {
    return {identity(), quadratic(0.01), rotation(), product(0.01, 0.02), cusp()};
}

HolomorphicMapSample by_name(const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string head = spec.substr(0, colon);
    std::vector<double> args;
    if (colon != std::string::npos) {
        std::stringstream ss(spec.substr(colon + 1));
        std::string item;
        while (std::getline(ss, item, ',')) {
            try {
                args.push_back(std::stod(item));
            } catch (const std::logic_error&) {
                throw InvalidInput("map gallery: bad number '" + item + "'");
            }
        }
    }
    auto want = [&](std::size_t count) {
        if (args.size() != count && !args.empty()) throw InvalidInput("map gallery: wrong argument count for " + head);
    };
    if (head == "identity") return want(0), identity();
    if (head == "rotation") return want(0), rotation();
    if (head == "cusp") return want(0), cusp();
    if (head == "quadratic") return want(1), quadratic(args.empty() ? 0.01 : args[0]);
    if (head == "product") return want(2), product(args.empty() ? 0.01 : args[0], args.empty() ? 0.02 : args[1]);
    throw InvalidInput("map gallery: unknown map '" + head + "'");
}

} // namespace gallery

GridSpec half_ball_grid(std::size_t n, std::size_t count, std::uint64_t seed) {
    return GridSpec::ball_cloud(Point::origin(n), 0.5, count, seed);
}

EnvelopeReport envelope_check(const HolomorphicMapSample& F, const GridSpec& grid) {
    F.validate();
    EnvelopeReport rep;
    for (const auto& z : grid.points) {
        if (z.dim() != F.n) throw DimensionMismatch("envelope_check: grid dimension mismatch");
        if (norm(z) > 0.5 * (1.0 + 1e-12)) continue;
        ++rep.grid_size;
        double env = -F.M;
        for (const auto& zero : F.known_zeros) env += zero.multiplicity * std::log(distance(z, zero.point));
        const double u = log_norm(F, z);
        if (env == kNegInf) continue;
        const double gap = env - u;
        if (rep.grid_size == 1 || gap > rep.worst_gap) {
            rep.worst_gap = gap;
            rep.worst_point = z;
        }
        if (gap > 1e-9) ++rep.violations;
    }
    return rep;
}

CartanReport multidim_cartan(const HolomorphicMapSample& F, double H, double d, const GridSpec& grid,
                             std::optional<double> mass_p, double tolerance) {
    F.validate();
    if (!(H > 0.0) || !(d > 0.0)) throw InvalidInput("multidim_cartan: H and d must be positive");
    const int k = F.k();
    const double p = mass_p.value_or(static_cast<double>(k));
    if (p < k) throw InvalidInput("multidim_cartan: mass parameter must be >= k");

    std::vector<Point> atoms;
    std::vector<double> masses;
    for (const auto& z : F.known_zeros) {
        atoms.push_back(z.point);
        masses.push_back(z.multiplicity * p / k);
    }
    const DiscreteMeasure mu = atoms.empty() ? DiscreteMeasure{} : DiscreteMeasure(atoms, masses);
    const BallCover cover = cartan_cover(mu, H, d);

    GridSpec inside;
    inside.description = grid.description + " ∩ B_{1/2}";
    for (const auto& z : grid.points) {
        if (z.dim() != F.n) throw DimensionMismatch("multidim_cartan: grid dimension mismatch");
        if (norm(z) <= 0.5 * (1.0 + 1e-12)) inside.points.push_back(z);
    }
    const double bound = -F.M + (k == 0 ? 0.0 : p * std::log(H / M_E));
    CartanReport rep = verify_cartan(F.log_norm_function(), cover, bound, inside, tolerance);
    rep.k = p;
    return rep;
}

std::string to_string(Verdict v) {
    switch (v) {
    case Verdict::elliptic: return "elliptic";
    case Verdict::non_elliptic: return "non-elliptic";
    case Verdict::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

EllipticityProbeResult ellipticity_probe(const HolomorphicMapSample& F, const Point& zero, std::size_t n_directions,
                                         const std::vector<double>& t_grid, const EllipticityOptions& opts) {
    F.validate();
    if (zero.dim() != F.n) throw DimensionMismatch("ellipticity_probe: zero dimension mismatch");
    if (t_grid.size() < 2) throw InvalidInput("ellipticity_probe: need at least two t values");
    for (double t : t_grid)
        if (!(t > 0.0)) throw InvalidInput("ellipticity_probe: t values must be positive");
    const double tmax = *std::max_element(t_grid.begin(), t_grid.end());

    bool listed = false;
    for (const auto& z : F.known_zeros) {
        if (distance(z.point, zero) <= 1e-12) {
            listed = true;
        } else if (distance(z.point, zero) <= tmax) {
            throw GeometryError("ellipticity_probe: t grid reaches another zero");
        }
    }
    if (!listed) throw InvalidInput("ellipticity_probe: point is not a listed zero");

    std::vector<Point> dirs;
    for (std::size_t j = 0; j < F.n; ++j) {
        for (cplx unit : {cplx{1.0, 0.0}, cplx{0.0, 1.0}}) {
            Point w = Point::origin(F.n);
            w.z[j] = unit;
            dirs.push_back(w);
        }
    }
    for (auto& w : sphere_directions(F.n, n_directions, opts.seed)) dirs.push_back(std::move(w));

    EllipticityProbeResult res;
    res.zero = zero;
    double emin = std::numeric_limits<double>::infinity(), emax = -emin;
    res.min_coefficient = std::numeric_limits<double>::infinity();
    for (const auto& w : dirs) {
        DirectionFit fit;
        fit.direction = w;
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        bool vanishes = false;
        for (double t : t_grid) {
            const double lh = 2.0 * log_norm(F, zero + t * w);
            if (lh == kNegInf) {
                vanishes = true;
                break;
            }
            const double lt = std::log(t);
            sx += lt;
            sy += lh;
            sxx += lt * lt;
            sxy += lt * lh;
        }
        if (vanishes) {
            fit.exponent = std::numeric_limits<double>::infinity();
            fit.coefficient = 0.0;
        } else {
            const double m = static_cast<double>(t_grid.size());
            const double den = m * sxx - sx * sx;
            if (!(std::abs(den) > 0.0)) throw InvalidInput("ellipticity_probe: t grid has no spread");
            fit.exponent = (m * sxy - sx * sy) / den;
            fit.coefficient = std::exp((sy - fit.exponent * sx) / m);
        }
        emin = std::min(emin, fit.exponent);
        emax = std::max(emax, fit.exponent);
        res.min_coefficient = std::min(res.min_coefficient, fit.coefficient);
        res.directions.push_back(fit);
    }
    res.exponent_spread = emax - emin;
    if (res.exponent_spread > opts.spread_non_elliptic || res.min_coefficient < opts.coefficient_floor)
        res.verdict = Verdict::non_elliptic;
    else if (res.exponent_spread <= opts.spread_elliptic)
        res.verdict = Verdict::elliptic;
    else
        res.verdict = Verdict::inconclusive;
    return res;
}

RemezExperiment mcol1_gap(const HolomorphicMapSample& F, const DSet& set, const Point& x, double t, double r,
                          const DSet& omega, std::size_t sup_resolution) {
    F.validate();
    if (!(r > 0.5 && r <= 1.0)) throw InvalidInput("mcol1_gap: r must lie in (1/2, 1]");
    if (!(t > 0.0)) throw InvalidInput("mcol1_gap: t must be positive");
    if (x.dim() != F.n || set.ambient_n() != F.n) throw DimensionMismatch("mcol1_gap: dimension mismatch");
    if (!set.reg_a) throw InvalidInput("mcol1_gap: set carries no certified regularity constant a");
    if (norm(x) + 4.0 * r * r * t > 0.5 * (1.0 + 1e-12))
        throw GeometryError("mcol1_gap: B(x, 4 r^2 t) is not contained in B_{1/2}");
    const double eps = omega.total_mass();
    if (omega.empty() || !(eps > 0.0)) throw InvalidInput("mcol1_gap: omega has zero weight");

    const Function u = F.log_norm_function();
    double sup_omega = kNegInf;
    for (const auto& p : omega.points) {
        if (!in_closed_ball(p, x, t)) throw GeometryError("mcol1_gap: omega is not contained in B(x,t)");
        sup_omega = std::max(sup_omega, u(p));
    }
    if (sup_omega == kNegInf) throw DegenerateError("mcol1_gap: log|F| is -inf on every point of omega");

    const double d = set.dimension_d;
    RemezExperiment e;
    e.x = x;
    e.t = t;
    e.r = r;
    e.epsilon = eps;
    e.sup_ball = sup_on_ball(u, x, t, sup_resolution).value;
    e.sup_omega = sup_omega;
    e.lhs = e.sup_ball - sup_omega;
    e.log_term = std::log(16.0 * M_E * r * t * std::pow(*set.reg_a, 1.0 / d) / std::pow(d * eps, 1.0 / d));
    if (!std::isfinite(e.log_term)) throw DegenerateError("mcol1_gap: log term is not finite");
    e.M1 = sup_on_ball(u, x, 4.0 * r * r * t, sup_resolution).value;
    e.M2 = e.sup_ball;
    e.slope_scale = F.k();

    Point c = Point::origin(F.n);
    for (std::size_t i = 0; i < omega.size(); ++i) c = c + omega.weights[i] * omega.points[i];
    e.omega_center = (1.0 / eps) * c;
    for (const auto& p : omega.points) e.omega_radius = std::max(e.omega_radius, distance(p, e.omega_center));
    return e;
}

} // namespace cartan_lab
