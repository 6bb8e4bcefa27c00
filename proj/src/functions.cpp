#include "cartan_lab/functions.hpp"

#include "cartan_lab/error.hpp"
#include "cartan_lab/lowdisc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace cartan_lab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// 1/2 * sum_i log(d2_i), one log per block of squared distances.
template <class SqDist>
double half_log_product(std::size_t count, SqDist&& sqdist) {
    double acc = 0.0, prod = 1.0;
    for (std::size_t i = 0; i < count; ++i) {
        const double d2 = sqdist(i);
        if (d2 == 0.0) return kNegInf;
        if (d2 < 1e-100 || d2 > 1e100) {
            acc += std::log(d2);
            continue;
        }
        prod *= d2;
        if (prod < 1e-150 || prod > 1e150) {
            acc += std::log(prod);
            prod = 1.0;
        }
    }
    return 0.5 * (acc + std::log(prod));
}

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

} // namespace

DiscreteMeasure::DiscreteMeasure(std::vector<Point> atoms_, std::vector<double> masses_)
    : atoms(std::move(atoms_)), masses(std::move(masses_)) {
    if (atoms.size() != masses.size()) throw InvalidInput("DiscreteMeasure: atoms and masses differ in length");
    for (double m : masses)
        if (!(m > 0.0) || !std::isfinite(m)) throw InvalidInput("DiscreteMeasure: masses must be positive and finite");
    for (const auto& a : atoms) {
        if (a.dim() != atoms.front().dim()) throw DimensionMismatch("DiscreteMeasure: atoms of mixed dimension");
        if (!a.finite()) throw InvalidInput("DiscreteMeasure: non-finite atom");
    }
}

DiscreteMeasure DiscreteMeasure::counting(std::vector<Point> atoms_) {
    std::vector<double> ones(atoms_.size(), 1.0);
    return DiscreteMeasure(std::move(atoms_), std::move(ones));
}

double DiscreteMeasure::total() const { return std::accumulate(masses.begin(), masses.end(), 0.0); }

int Polynomial::degree() const {
    int deg = 0;
    for (const auto& t : terms) deg = std::max(deg, std::accumulate(t.exponents.begin(), t.exponents.end(), 0));
    return deg;
}

cplx Polynomial::operator()(const Point& z) const {
    if (z.dim() != nvars) throw DimensionMismatch("Polynomial: point dimension does not match variable count");
    cplx s{0.0, 0.0};
    for (const auto& t : terms) {
        cplx m = t.coeff;
        for (std::size_t k = 0; k < nvars; ++k)
            for (int e = 0; e < t.exponents[k]; ++e) m *= z.z[k];
        s += m;
    }
    return s;
}

double log_abs_product(cplx z, const std::vector<cplx>& roots) {
    return half_log_product(roots.size(), [&](std::size_t i) { return std::norm(z - roots[i]); });
}

Function::Function(Potential p) : v_(std::move(p)) {}

Function::Function(LogAbsPolynomial p) : v_(std::move(p)) {
    for (const auto& r : std::get<LogAbsPolynomial>(v_).roots)
        if (!std::isfinite(r.real()) || !std::isfinite(r.imag())) throw InvalidInput("LogAbsPolynomial: non-finite root");
}

Function::Function(LogNormMap m) : v_(std::move(m)) {
    const auto& comps = std::get<LogNormMap>(v_).components;
    if (comps.empty()) throw InvalidInput("LogNormMap: no components");
    for (const auto& c : comps) {
        if (c.nvars != comps.front().nvars) throw DimensionMismatch("LogNormMap: components of mixed arity");
        if (c.degree() > Polynomial::max_degree) throw InvalidInput("LogNormMap: component degree exceeds 8");
        for (const auto& t : c.terms)
            if (t.exponents.size() != c.nvars) throw InvalidInput("LogNormMap: exponent vector has wrong length");
    }
}

Function::Function(MaxOf m) : v_(std::move(m)) {
    if (std::get<MaxOf>(v_).parts.empty()) throw InvalidInput("MaxOf: empty list");
}

Function::Function(Shifted s) : v_(std::move(s)) {
    if (!std::get<Shifted>(v_).base) throw InvalidInput("Shifted: null base");
    if (!std::isfinite(std::get<Shifted>(v_).offset)) throw InvalidInput("Shifted: offset must be finite");
}

Function Function::shifted(Function base, double offset) {
    return Function(Shifted{std::make_shared<const Function>(std::move(base)), offset});
}

Function Function::log_distance(cplx x) { return Function(LogAbsPolynomial{{x}, 0.0}); }

std::optional<std::size_t> Function::ambient_dim() const {
    return std::visit(overloaded{
                          [](const Potential& p) -> std::optional<std::size_t> {
                              if (p.measure.empty()) return std::nullopt;
                              return p.measure.dim();
                          },
                          [](const LogAbsPolynomial&) -> std::optional<std::size_t> { return 1; },
                          [](const LogNormMap& m) -> std::optional<std::size_t> { return m.components.front().nvars; },
                          [](const Constant&) -> std::optional<std::size_t> { return std::nullopt; },
                          [](const MaxOf& m) -> std::optional<std::size_t> {
                              for (const auto& f : m.parts)
                                  if (auto d = f.ambient_dim()) return d;
                              return std::nullopt;
                          },
                          [](const Shifted& s) -> std::optional<std::size_t> { return s.base->ambient_dim(); },
                      },
                      v_);
}

double Function::operator()(const Point& z) const {
    return std::visit(
        overloaded{
            [&](const Potential& p) -> double {
                const auto& mu = p.measure;
                if (mu.empty()) return 0.0;
                if (z.dim() != mu.dim()) throw DimensionMismatch("Potential: point dimension mismatch");
                const bool unit = std::all_of(mu.masses.begin(), mu.masses.end(), [](double m) { return m == 1.0; });
                if (unit && z.dim() == 1) {
                    // same operation sequence as LogAbsPolynomial with log_leading = 0
                    return 0.0 + half_log_product(mu.size(), [&](std::size_t i) { return std::norm(z.z[0] - mu.atoms[i].z[0]); });
                }
                if (unit) return half_log_product(mu.size(), [&](std::size_t i) { return distance_sq(z, mu.atoms[i]); });
                double s = 0.0;
                for (std::size_t i = 0; i < mu.size(); ++i) {
                    const double d2 = distance_sq(z, mu.atoms[i]);
                    if (d2 == 0.0) return kNegInf;
                    s += 0.5 * mu.masses[i] * std::log(d2);
                }
                return s;
            },
            [&](const LogAbsPolynomial& p) -> double {
                if (z.dim() != 1) throw DimensionMismatch("LogAbsPolynomial: expects a point of C");
                return p.log_leading + log_abs_product(z.z[0], p.roots);
            },
            [&](const LogNormMap& m) -> double {
                double s = 0.0;
                for (const auto& c : m.components) s += std::norm(c(z));
                return s == 0.0 ? kNegInf : 0.5 * std::log(s);
            },
            [&](const Constant& c) -> double { return c.value; },
            [&](const MaxOf& m) -> double {
                double best = kNegInf;
                for (const auto& f : m.parts) best = std::max(best, f(z));
                return best;
            },
            [&](const Shifted& s) -> double { return (*s.base)(z) + s.offset; },
        },
        v_);
}

double evaluate(const Function& f, const Point& z) {
    if (auto d = f.ambient_dim(); d && *d != z.dim())
        throw DimensionMismatch("evaluate: point has dimension " + std::to_string(z.dim()) + ", function expects " +
                                std::to_string(*d));
    return f(z);
}

namespace {

// Lipschitz constant of the function along the sphere |z - c| = R, from the
// distance of each log singularity to the sphere. nullopt when unknown or when
// a singularity sits within `guard` of the sphere.
std::optional<double> boundary_lipschitz(const Function& f, const Point& c, double R, double guard) {
    return std::visit(
        overloaded{
            [&](const Potential& p) -> std::optional<double> {
                double L = 0.0;
                for (std::size_t i = 0; i < p.measure.size(); ++i) {
                    const double delta = std::abs(distance(p.measure.atoms[i], c) - R);
                    if (delta <= guard) return std::nullopt;
                    L += p.measure.masses[i] / (delta - guard);
                }
                return L;
            },
            [&](const LogAbsPolynomial& p) -> std::optional<double> {
                double L = 0.0;
                for (const auto& r : p.roots) {
                    const double delta = std::abs(std::abs(r - c.z[0]) - R);
                    if (delta <= guard) return std::nullopt;
                    L += 1.0 / (delta - guard);
                }
                return L;
            },
            [&](const LogNormMap&) -> std::optional<double> { return std::nullopt; },
            [&](const Constant&) -> std::optional<double> { return 0.0; },
            [&](const MaxOf& m) -> std::optional<double> {
                double L = 0.0;
                for (const auto& part : m.parts) {
                    auto l = boundary_lipschitz(part, c, R, guard);
                    if (!l) return std::nullopt;
                    L = std::max(L, *l);
                }
                return L;
            },
            [&](const Shifted& s) -> std::optional<double> { return boundary_lipschitz(*s.base, c, R, guard); },
        },
        f.variant());
}

SupEstimate sup_planar(const Function& f, const Point& center, double radius, std::size_t resolution) {
    const cplx c = center.z[0];
    const double h = 2.0 * M_PI / static_cast<double>(resolution);
    auto at = [&](double theta) { return f(Point{c + std::polar(radius, theta)}); };

    std::vector<double> vals(resolution);
    for (std::size_t j = 0; j < resolution; ++j) vals[j] = at(h * static_cast<double>(j));

    std::size_t best_j = static_cast<std::size_t>(std::max_element(vals.begin(), vals.end()) - vals.begin());
    double best = vals[best_j];
    double best_theta = h * static_cast<double>(best_j);

    // Refine every discrete local maximum (capped to the 64 highest) by golden-section search.
    std::vector<std::size_t> peaks;
    for (std::size_t j = 0; j < resolution; ++j) {
        const double l = vals[(j + resolution - 1) % resolution], r = vals[(j + 1) % resolution];
        if (vals[j] >= l && vals[j] >= r && vals[j] > kNegInf) peaks.push_back(j);
    }
    std::sort(peaks.begin(), peaks.end(), [&](std::size_t a, std::size_t b) { return vals[a] > vals[b]; });
    if (peaks.size() > 64) peaks.resize(64);
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    for (std::size_t j : peaks) {
        double a = h * (static_cast<double>(j) - 1.0), b = h * (static_cast<double>(j) + 1.0);
        double x1 = b - g * (b - a), x2 = a + g * (b - a);
        double f1 = at(x1), f2 = at(x2);
        for (int it = 0; it < 80 && b - a > 1e-15; ++it) {
            if (f1 < f2) {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + g * (b - a);
                f2 = at(x2);
            } else {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - g * (b - a);
                f1 = at(x1);
            }
        }
        if (f1 > best) {
            best = f1;
            best_theta = x1;
        }
        if (f2 > best) {
            best = f2;
            best_theta = x2;
        }
    }

    SupEstimate est;
    est.value = best;
    est.argmax = Point{c + std::polar(radius, best_theta)};
    est.resolution = resolution;
    if (auto L = boundary_lipschitz(f, center, radius, h * radius)) est.error_bound = 0.5 * (*L) * h * radius;
    return est;
}

SupEstimate sup_sphere(const Function& f, const Point& center, double radius, std::size_t resolution) {
    const std::size_t n = center.dim();
    const auto dirs = sphere_directions(n, resolution, 0);
    SupEstimate est;
    est.value = kNegInf;
    est.argmax = center + radius * dirs.front();
    Point best_dir = dirs.front();
    for (const auto& w : dirs) {
        Point z = center + radius * w;
        const double v = f(z);
        if (v > est.value) {
            est.value = v;
            est.argmax = std::move(z);
            best_dir = w;
        }
    }
    // Local refinement: shrinking caps around the best direction.
    const std::size_t local = std::max<std::size_t>(16, resolution / 8);
    const auto perturb = sphere_directions(n, local, 0x9e3779b97f4a7c15ULL);
    double cap = M_PI * std::pow(static_cast<double>(resolution), -1.0 / static_cast<double>(2 * n - 1));
    for (int round = 0; round < 4; ++round, cap *= 0.25) {
        Point centre_dir = best_dir;
        for (const auto& v : perturb) {
            Point w = centre_dir + cap * v;
            const double nw = norm(w);
            if (nw == 0.0) continue;
            w = (1.0 / nw) * w;
            Point z = center + radius * w;
            const double val = f(z);
            if (val > est.value) {
                est.value = val;
                est.argmax = std::move(z);
                best_dir = w;
            }
        }
    }
    est.resolution = resolution;
    if (auto L = boundary_lipschitz(f, center, radius, cap * 4.0 * radius)) est.error_bound = (*L) * cap * 4.0 * radius;
    return est;
}

} // namespace

SupEstimate sup_on_ball(const Function& f, const Point& center, double radius, std::size_t resolution) {
    if (!(radius > 0.0) || !std::isfinite(radius)) throw InvalidInput("sup_on_ball: radius must be positive");
    if (resolution < 8) throw InvalidInput("sup_on_ball: resolution must be >= 8");
    if (auto d = f.ambient_dim(); d && *d != center.dim()) throw DimensionMismatch("sup_on_ball: dimension mismatch");

    if (const auto* c = std::get_if<Constant>(&f.variant())) {
        SupEstimate est;
        est.value = c->value;
        est.argmax = center;
        est.resolution = resolution;
        est.error_bound = 0.0;
        return est;
    }
    if (center.dim() == 1) return sup_planar(f, center, radius, resolution);
    return sup_sphere(f, center, radius, resolution);
}

M1M2 normalize_m1m2(const Function& f, double r, std::size_t resolution) {
    if (!(r > 0.0 && r < 1.0)) throw InvalidInput("normalize_m1m2: r must lie in (0,1)");
    const Point origin = Point::origin(f.ambient_dim().value_or(1));
    M1M2 out;
    out.M1 = sup_on_ball(f, origin, 1.0, resolution).value;
    out.M2 = sup_on_ball(f, origin, r, resolution).value;
    if (out.M2 == kNegInf) throw DegenerateError("normalize_m1m2: f is -inf on D_r");
    return out;
}

} // namespace cartan_lab
