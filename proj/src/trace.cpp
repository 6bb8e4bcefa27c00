#include "cartan_lab/trace.hpp"

#include "cartan_lab/error.hpp"

#include <algorithm>
#include <cmath>

namespace cartan_lab {

namespace {

// Weighted least squares of y on x with intercept; returns {slope, intercept}.
std::pair<double, double> affine_fit(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 1e-24 * std::max(1.0, mx * mx))) throw DegenerateError("fit: regressor values are all equal");
    const double slope = sxy / sxx;
    return {slope, my - slope * mx};
}

} // namespace

RemezExperiment remez_gap(const Function& f, const DSet& set, const Point& x, double t, double r, const DSet& omega,
                          std::size_t sup_resolution) {
    if (!(r > 0.0 && r < 1.0)) throw InvalidInput("remez_gap: r must lie in (0,1)");
    if (!(t > 0.0)) throw InvalidInput("remez_gap: t must be positive");
    if (x.dim() != 1) throw DimensionMismatch("remez_gap: planar experiment expects a point of C");
    if (!set.reg_a) throw InvalidInput("remez_gap: set carries no certified regularity constant a");
    if (norm(x) + t / r > r * (1.0 + 1e-12)) throw GeometryError("remez_gap: D(x, t/r) is not contained in D_r");

    const double eps = omega.total_mass();
    if (omega.empty() || !(eps > 0.0)) throw InvalidInput("remez_gap: omega has zero weight");

    double sup_omega = -std::numeric_limits<double>::infinity();
    for (const auto& p : omega.points) {
        if (!in_closed_ball(p, x, t)) throw GeometryError("remez_gap: omega is not contained in D(x,t)");
        sup_omega = std::max(sup_omega, evaluate(f, p));
    }
    if (sup_omega == -std::numeric_limits<double>::infinity())
        throw DegenerateError("remez_gap: f is -inf on every point of omega");

    const double d = set.dimension_d;
    const double a = *set.reg_a;
    RemezExperiment e;
    e.x = x;
    e.t = t;
    e.r = r;
    e.epsilon = eps;
    e.sup_ball = sup_on_ball(f, x, t, sup_resolution).value;
    e.sup_omega = sup_omega;
    e.lhs = e.sup_ball - sup_omega;
    e.log_term = std::log(4.0 * M_E * t * std::pow(a, 1.0 / d) / (r * std::pow(d * eps, 1.0 / d)));
    if (!std::isfinite(e.log_term)) throw DegenerateError("remez_gap: log term is not finite");
    const auto m = normalize_m1m2(f, r);
    e.M1 = m.M1;
    e.M2 = m.M2;
    e.slope_scale = m.M1 - m.M2;

    // record the smallest ball around the omega barycentre holding omega
    cplx c{0.0, 0.0};
    for (std::size_t i = 0; i < omega.size(); ++i) c += omega.weights[i] * omega.points[i].z[0];
    e.omega_center = Point{c / eps};
    for (const auto& p : omega.points) e.omega_radius = std::max(e.omega_radius, distance(p, e.omega_center));
    return e;
}

RemezFit fit_constant_c(const std::vector<RemezExperiment>& experiments) {
    if (experiments.size() < 10) throw InvalidInput("fit_constant_c: need at least 10 experiments");
    double emin = std::numeric_limits<double>::infinity(), emax = 0.0;
    for (const auto& e : experiments) {
        emin = std::min(emin, e.epsilon);
        emax = std::max(emax, e.epsilon);
    }
    if (!(emax >= 8.0 * emin)) throw InvalidInput("fit_constant_c: epsilon must span at least a factor 8");

    std::vector<double> xs, ys;
    for (const auto& e : experiments) {
        if (e.lhs > 0.0) {
            xs.push_back(e.regressor());
            ys.push_back(e.lhs);
        }
    }
    RemezFit fit;
    fit.used = xs.size();
    if (xs.empty()) return fit;  // nothing to explain: c_hat = 0
    if (xs.size() < 2) throw DegenerateError("fit_constant_c: fewer than two experiments with positive gap");

    const auto [slope, icpt] = affine_fit(xs, ys);
    fit.c_hat = slope;
    fit.intercept = icpt;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += xs[i] * ys[i];
        sxx += xs[i] * xs[i];
        fit.residuals.push_back(ys[i] - (slope * xs[i] + icpt));
    }
    fit.c_through_origin = sxx > 0.0 ? sxy / sxx : 0.0;
    return fit;
}

bool remez_holds(const RemezExperiment& e, double c, double rel_tol) {
    const double rhs = c * e.regressor();
    return e.lhs <= rhs + rel_tol * std::max({1.0, std::abs(rhs), std::abs(e.sup_ball)});
}

MeanOscillation mean_oscillation(const std::vector<double>& values, const std::vector<double>& weights) {
    if (values.size() != weights.size()) throw InvalidInput("mean_oscillation: size mismatch");
    MeanOscillation out;
    std::vector<double> v(values);
    std::size_t ref = values.size();
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (std::isnan(v[i]) || v[i] == std::numeric_limits<double>::infinity())
            throw InvalidInput("mean_oscillation: values must be finite or -inf");
        if (v[i] == -std::numeric_limits<double>::infinity()) {
            v[i] = kClampValue;
            out.clamped = true;
        }
        if (weights[i] > 0.0) {
            out.mass += weights[i];
            if (ref == values.size()) ref = i;
        }
    }
    if (!(out.mass > 0.0)) throw InvalidInput("mean_oscillation: zero total weight");
    if (ref == values.size() || (out.clamped && std::all_of(values.begin(), values.end(), [](double x) {
                                     return x == -std::numeric_limits<double>::infinity();
                                 })))
        throw DegenerateError("mean_oscillation: every value is -inf");

    // Work with differences from one sample so constants give exact zeros.
    const double base = v[ref];
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (weights[i] > 0.0) s += weights[i] * (v[i] - base);
    const double shift = s / out.mass;
    out.mean = base + shift;
    double osc = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (weights[i] > 0.0) osc += weights[i] * std::abs((v[i] - base) - shift);
    out.oscillation = osc / out.mass;
    return out;
}

std::vector<double> dyadic_radii(const DSet& set) {
    if (!(set.diameter > 0.0)) throw ResolutionError("dyadic_radii: set has zero diameter");
    std::vector<double> out;
    for (double r = set.diameter; r >= set.resolution && out.size() < 64; r *= 0.5) out.push_back(r);
    return out;
}

BmoReport bmo_norm(const Function& f, const DSet& set, const std::vector<Point>& centers,
                   const std::vector<double>& radii) {
    if (set.empty()) throw InvalidInput("bmo_norm: empty set");
    if (centers.empty() || radii.empty()) throw InvalidInput("bmo_norm: need at least one centre and radius");
    for (double r : radii)
        if (!(r > 0.0)) throw InvalidInput("bmo_norm: radii must be positive");

    std::vector<double> fv(set.size());
    for (std::size_t i = 0; i < set.size(); ++i) fv[i] = evaluate(f, set.points[i]);

    PointIndex index(set.points);
    BmoReport rep;
    std::vector<double> vals, ws;
    for (const auto& c : centers) {
        if (c.dim() != set.ambient_n()) throw DimensionMismatch("bmo_norm: centre dimension mismatch");
        for (double r : radii) {
            vals.clear();
            ws.clear();
            index.for_each_in_ball(c, r, [&](std::size_t i) {
                vals.push_back(fv[i]);
                ws.push_back(set.weights[i]);
            });
            double mass = 0.0;
            for (double w : ws) mass += w;
            if (!(mass > 0.0)) throw InvalidInput("bmo_norm: a tested ball carries no weight");
            const auto mo = mean_oscillation(vals, ws);
            rep.balls.push_back({c, r, mo.mass, mo.mean, mo.oscillation, mo.clamped});
            rep.bmo_norm = std::max(rep.bmo_norm, mo.oscillation);
            rep.clamped = rep.clamped || mo.clamped;
        }
    }
    return rep;
}

ReverseHolderReport reverse_holder(const Function& f, const DSet& set, const Point& x, double t,
                                   const std::vector<double>& p_list) {
    if (!(t > 0.0)) throw InvalidInput("reverse_holder: t must be positive");
    if (p_list.empty()) throw InvalidInput("reverse_holder: empty p list");
    for (double p : p_list)
        if (!(p >= 1.0)) throw InvalidInput("reverse_holder: p must lie in [1, inf]");

    std::vector<double> vals, ws;
    double mass = 0.0;
    for (std::size_t i = 0; i < set.size(); ++i) {
        if (set.weights[i] > 0.0 && in_closed_ball(set.points[i], x, t)) {
            vals.push_back(evaluate(f, set.points[i]));
            ws.push_back(set.weights[i]);
            mass += set.weights[i];
        }
    }
    if (!(mass > 0.0)) throw InvalidInput("reverse_holder: empty ball");
    const double m = *std::max_element(vals.begin(), vals.end());
    if (m == -std::numeric_limits<double>::infinity()) throw DegenerateError("reverse_holder: e^f vanishes on the ball");

    // mean of e^{p (f - m)}, with e^{-inf} = 0
    auto scaled_mean = [&](double p) {
        double s = 0.0;
        for (std::size_t i = 0; i < vals.size(); ++i) s += ws[i] * std::exp(p * (vals[i] - m));
        return s / mass;
    };

    ReverseHolderReport rep;
    rep.x = x;
    rep.t = t;
    rep.mass = mass;
    const double base = scaled_mean(1.0);
    rep.log_rhs_base = m + std::log(base);
    rep.rhs_base = std::exp(rep.log_rhs_base);
    for (double p : p_list) {
        ReverseHolderRow row;
        row.p = p;
        const double lifted = std::isinf(p) ? 1.0 : std::pow(scaled_mean(p), 1.0 / p);
        row.ratio = lifted / base;
        row.log_lhs = m + std::log(lifted);
        row.lhs = std::exp(row.log_lhs);
        rep.sup_ratio = std::max(rep.sup_ratio, row.ratio);
        rep.rows.push_back(row);
    }
    return rep;
}

double reverse_holder_bound(double s, double d, double a, double b, double r) {
    if (!(d > 0.0 && a > 0.0 && b > 0.0 && r > 0.0)) throw InvalidInput("reverse_holder_bound: bad parameters");
    return (1.0 + s / d) * std::pow(std::pow(4.0 * M_E, d) * a / (std::pow(r, d) * d * b), s / d);
}

DistributionReport distribution_check(const Function& f, const DSet& set, const Point& x, double t,
                                      const std::vector<double>& lambda_grid, const DistributionParams& params) {
    if (!(t > 0.0)) throw InvalidInput("distribution_check: t must be positive");
    if (lambda_grid.size() < 2) throw InvalidInput("distribution_check: need at least two lambda values");
    for (std::size_t i = 1; i < lambda_grid.size(); ++i)
        if (!(lambda_grid[i] > lambda_grid[i - 1])) throw InvalidInput("distribution_check: lambda grid must increase");

    DistributionReport rep;
    rep.x = x;
    rep.t = t;
    rep.lambda_grid = lambda_grid;
    rep.sup_ball = sup_on_ball(f, x, t).value;

    std::vector<double> fp, ws;
    for (std::size_t i = 0; i < set.size(); ++i) {
        if (set.weights[i] > 0.0 && in_closed_ball(set.points[i], x, t)) {
            fp.push_back(rep.sup_ball - evaluate(f, set.points[i]));
            ws.push_back(set.weights[i]);
            rep.mass += set.weights[i];
        }
    }
    if (!(rep.mass > 0.0)) throw InvalidInput("distribution_check: empty ball");

    // D(lambda) by sorting f' descending and accumulating weights
    std::vector<std::size_t> order(fp.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fp[a] > fp[b]; });
    std::vector<double> cum(order.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < order.size(); ++k) cum[k] = (acc += ws[order[k]]);

    const double s = params.c_hat * (params.M1 - params.M2);
    const double pref = std::pow(4.0 * M_E * t, params.d) * params.a / (std::pow(params.r, params.d) * params.d);
    rep.bound_slope = s > 0.0 ? -params.d / s : -std::numeric_limits<double>::infinity();
    for (double lam : lambda_grid) {
        auto it = std::partition_point(order.begin(), order.end(), [&](std::size_t i) { return fp[i] >= lam; });
        const auto cnt = static_cast<std::size_t>(it - order.begin());
        rep.D_values.push_back(cnt == 0 ? 0.0 : cum[cnt - 1]);
        const double bound = s > 0.0 ? pref * std::exp(-lam * params.d / s) : (lam > 0.0 ? 0.0 : pref);
        rep.bound_curve.push_back(bound);
        if (rep.D_values.back() > bound * (1.0 + 1e-12)) ++rep.bound_exceedances;
    }

    // layer cake on the nonnegative part of the grid
    double direct = 0.0;
    for (std::size_t i = 0; i < fp.size(); ++i) direct += ws[i] * std::max(0.0, fp[i]);
    rep.mean_f_prime = direct / rep.mass;
    double integral = 0.0, tol = 0.0;
    for (std::size_t i = 1; i < lambda_grid.size(); ++i) {
        const double l0 = std::max(0.0, lambda_grid[i - 1]), l1 = std::max(0.0, lambda_grid[i]);
        if (l1 <= l0) continue;
        integral += 0.5 * (l1 - l0) * (rep.D_values[i - 1] + rep.D_values[i]);
        tol += 0.5 * (l1 - l0) * (rep.D_values[i - 1] - rep.D_values[i]);
    }
    const double lmax = lambda_grid.back();
    if (lambda_grid.front() > 0.0) tol += lambda_grid.front() * rep.mass;
    // mass of f' beyond the grid is not seen by the trapezoid
    double tail = 0.0;
    for (std::size_t i = 0; i < fp.size(); ++i)
        if (fp[i] > lmax) tail += ws[i] * (fp[i] - lmax);
    rep.layer_cake = integral / rep.mass;
    rep.layer_cake_tolerance = (tol + tail) / rep.mass + 1e-12;

    // log-linear fit on the decaying range: below half the plateau, above 1e-3 of it
    std::vector<double> lx, ly;
    const double plateau = rep.D_values.front();
    for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
        const double D = rep.D_values[i];
        if (D > 0.0 && D <= 0.5 * plateau && D >= 1e-3 * plateau) {
            lx.push_back(lambda_grid[i]);
            ly.push_back(std::log(D));
        }
    }
    rep.fit_points = lx.size();
    if (lx.size() >= 2) rep.fitted_slope = affine_fit(lx, ly).first;
    return rep;
}

BernsteinWalshResult bernstein_walsh(const std::vector<cplx>& roots, bool degree_normalize, cplx x, double t, double q) {
    if (roots.empty()) throw InvalidInput("bernstein_walsh: empty root list");
    if (!(q >= 1.0)) throw InvalidInput("bernstein_walsh: q must be >= 1");
    if (!(t >= 0.0)) throw InvalidInput("bernstein_walsh: t must be nonnegative");
    const Function f(LogAbsPolynomial{roots, 0.0});
    const double scale = degree_normalize ? 1.0 / static_cast<double>(roots.size()) : 1.0;
    const Point c{x};
    auto sup = [&](double rad) { return rad == 0.0 ? evaluate(f, c) : sup_on_ball(f, c, rad).value; };
    BernsteinWalshResult res;
    res.lhs = scale * sup(q * t);
    res.rhs = std::log(q) + scale * sup(t);
    res.holds = res.lhs <= res.rhs + 1e-9;
    return res;
}

bool bernstein_walsh_check(const std::vector<cplx>& roots, bool degree_normalize, cplx x, double t, double q) {
    return bernstein_walsh(roots, degree_normalize, x, t, q).holds;
}

SharpnessReport sharpness_experiment(const DSet& set, double d, std::vector<double> scales, double C,
                                     std::size_t max_centers) {
    if (set.size() < 2 || !(set.diameter > 0.0)) throw ResolutionError("sharpness_experiment: set has no resolvable scales");
    if (!(d > 0.0)) throw InvalidInput("sharpness_experiment: d must be positive");
    if (scales.empty()) throw InvalidInput("sharpness_experiment: empty scale list");
    std::sort(scales.begin(), scales.end(), std::greater<>());
    for (double t : scales) {
        if (!(t > 0.0)) throw InvalidInput("sharpness_experiment: scales must be positive");
        if (t < set.resolution * (1.0 - 1e-12)) throw ResolutionError("sharpness_experiment: scale below set resolution");
    }

    const std::size_t stride = std::max<std::size_t>(1, (set.size() + max_centers - 1) / std::max<std::size_t>(1, max_centers));
    PointIndex index(set.points);
    SharpnessReport rep;
    rep.d = d;
    rep.C = C;
    rep.certified_a = set.reg_a;
    for (double t : scales) {
        SharpnessRow row;
        row.t = t;
        for (std::size_t ci = 0; ci < set.size(); ci += stride) {
            const Point& x = set.points[ci];
            double eps = 0.0, far = -std::numeric_limits<double>::infinity();
            index.for_each_in_ball(x, t, [&](std::size_t i) {
                eps += set.weights[i];
                if (set.weights[i] > 0.0) far = std::max(far, distance(set.points[i], x));
            });
            const double ratio = eps / std::pow(t, d);
            if (ratio > row.max_ratio) {
                row.max_ratio = ratio;
                row.argmax = x;
            }
            if (eps > 0.0 && far > 0.0) {
                const double L = std::log(t) - std::log(far) - C * std::log(t / std::pow(eps, 1.0 / d));
                row.max_L = std::max(row.max_L, L);
            }
        }
        rep.max_ratio = std::max(rep.max_ratio, row.max_ratio);
        rep.rows.push_back(row);
    }
    const std::size_t last = rep.rows.size() - 1;
    const std::size_t first = last >= 5 ? last - 5 : 0;
    const double r0 = rep.rows[first].max_ratio;
    rep.growth = r0 > 0.0 ? rep.rows[last].max_ratio / r0 : std::numeric_limits<double>::infinity();
    rep.divergent = rep.growth > 10.0;
    return rep;
}

} // namespace cartan_lab
