#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cartan_lab/error.hpp"
#include "cartan_lab/trace.hpp"
#include "fixtures.hpp"

#include <cmath>
#include <random>

using namespace cartan_lab;

namespace {

constexpr double neg_inf = -std::numeric_limits<double>::infinity();

DSet small_set() {
    return certify(generate_ifs_set(builtin::transformed(builtin::cantor(), 0.6, {-0.3, 0.0}), 8),
                   geometric_scales(0.6, 1.0 / 3.0, 1, 7));
}

} // namespace

TEST_CASE("mean oscillation against a two-pass oracle") {
    std::mt19937_64 rng(41);
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> w(0.1, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<double> v(5 + trial), ws(v.size());
        for (auto& x : v) x = 3.0 * g(rng);
        for (auto& x : ws) x = w(rng);
        double mass = 0.0, mean = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) mass += ws[i], mean += ws[i] * v[i];
        mean /= mass;
        double osc = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) osc += ws[i] * std::abs(v[i] - mean);
        osc /= mass;
        const auto mo = mean_oscillation(v, ws);
        CHECK(mo.mass == doctest::Approx(mass).epsilon(1e-14));
        CHECK(mo.mean == doctest::Approx(mean).epsilon(1e-12));
        CHECK(mo.oscillation == doctest::Approx(osc).epsilon(1e-12));
        CHECK(!mo.clamped);
    }
}

TEST_CASE("mean oscillation of a constant is exactly zero") {
    for (double c : {0.0, 3.7, -1e5, 0.1}) {
        const std::vector<double> v(17, c), w{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 0.1, 0.1, 0.1, 0.3, 0.3,
                                             0.3, 0.01};
        CHECK(mean_oscillation(v, w).oscillation == 0.0);
    }
}

TEST_CASE("minus infinity is clamped and flagged") {
    const auto mo = mean_oscillation({0.0, neg_inf}, {1.0, 1.0});
    CHECK(mo.clamped);
    CHECK(mo.mean == doctest::Approx(0.5 * kClampValue));
    CHECK(mo.oscillation == doctest::Approx(-0.5 * kClampValue));
    CHECK_THROWS_AS(mean_oscillation({neg_inf}, {1.0}), DegenerateError);
    CHECK_THROWS_AS(mean_oscillation({1.0}, {1.0, 2.0}), InvalidInput);
    CHECK_THROWS_AS(mean_oscillation({std::nan("")}, {1.0}), InvalidInput);
    CHECK_THROWS_AS(mean_oscillation({1.0}, {0.0}), InvalidInput);
}

TEST_CASE("bmo norm: constants, shifts and scaling") {
    const auto set = small_set();
    const std::vector<Point> centers(set.points.begin(), set.points.begin() + 16);
    const auto radii = dyadic_radii(set);
    CHECK(!radii.empty());
    CHECK(bmo_norm(Function::constant(3.7), set, centers, radii).bmo_norm == 0.0);

    const Function f = Function::log_distance({0.05, 0.02});
    const auto base = bmo_norm(f, set, centers, radii);
    CHECK(base.bmo_norm > 0.0);
    const auto shifted = bmo_norm(Function::shifted(f, 5.25), set, centers, radii);
    CHECK(std::abs(shifted.bmo_norm - base.bmo_norm) <= 1e-12);
    CHECK(shifted.balls.size() == base.balls.size());

    // 2 log|z - a| as a two-root polynomial is 2 f exactly in binary arithmetic
    const Function doubled(LogAbsPolynomial{{cplx{0.05, 0.02}, cplx{0.05, 0.02}}, 0.0});
    CHECK(bmo_norm(doubled, set, centers, radii).bmo_norm == doctest::Approx(2.0 * base.bmo_norm).epsilon(1e-12));
}

TEST_CASE("bmo guards") {
    const auto set = small_set();
    const std::vector<Point> centers{set.points.front()};
    CHECK_THROWS_AS(bmo_norm(Function::constant(0), set, {}, {0.1}), InvalidInput);
    CHECK_THROWS_AS(bmo_norm(Function::constant(0), set, centers, {-0.1}), InvalidInput);
    CHECK_THROWS_AS(bmo_norm(Function::constant(0), set, {Point::planar(5, 5)}, {0.1}), InvalidInput);
    CHECK_THROWS_AS(bmo_norm(Function::constant(0), set, {Point::origin(2)}, {0.1}), DimensionMismatch);
    const auto at_sample = bmo_norm(Function::log_distance(set.points.front().z[0]), set, centers, {0.05});
    CHECK(at_sample.clamped);
}

TEST_CASE("reverse Hoelder ratios against a direct oracle") {
    const auto set = small_set();
    const Function f = Function::log_distance({0.31, 0.0});
    const Point x = set.points[set.size() / 3];
    const double t = 0.08;
    const std::vector<double> ps{1.0, 2.0, 3.5, 8.0, kInfinityP};
    const auto rep = reverse_holder(f, set, x, t, ps);

    double mass = 0.0, m1 = 0.0, mx = 0.0;
    std::vector<double> mp(ps.size(), 0.0);
    for (std::size_t i = 0; i < set.size(); ++i) {
        if (distance(set.points[i], x) > t) continue;
        const double e = std::exp(evaluate(f, set.points[i]));
        mass += set.weights[i];
        m1 += set.weights[i] * e;
        mx = std::max(mx, e);
        for (std::size_t k = 0; k + 1 < ps.size(); ++k) mp[k] += set.weights[i] * std::pow(e, ps[k]);
    }
    m1 /= mass;
    CHECK(rep.mass == doctest::Approx(mass).epsilon(1e-14));
    CHECK(rep.rhs_base == doctest::Approx(m1).epsilon(1e-12));
    REQUIRE(rep.rows.size() == ps.size());
    CHECK(rep.rows[0].ratio == 1.0);
    for (std::size_t k = 0; k + 1 < ps.size(); ++k)
        CHECK(rep.rows[k].ratio == doctest::Approx(std::pow(mp[k] / mass, 1.0 / ps[k]) / m1).epsilon(1e-12));
    CHECK(rep.rows.back().ratio == doctest::Approx(mx / m1).epsilon(1e-12));
    for (std::size_t k = 1; k < rep.rows.size(); ++k) CHECK(rep.rows[k].ratio >= rep.rows[k - 1].ratio * (1 - 1e-12));
    CHECK(rep.sup_ratio == rep.rows.back().ratio);

    CHECK_THROWS_AS(reverse_holder(f, set, x, t, {0.5}), InvalidInput);
    CHECK_THROWS_AS(reverse_holder(f, set, x, t, {}), InvalidInput);
    CHECK_THROWS_AS(reverse_holder(f, set, Point::planar(3, 3), t, {1.0}), InvalidInput);
}

TEST_CASE("reverse Hoelder bound") {
    CHECK(reverse_holder_bound(0.0, 0.63, 1.3, 0.7, 0.5) == 1.0);
    const double s = 0.8, d = 1.0, a = 1.5, b = 0.5, r = 0.6;
    CHECK(reverse_holder_bound(s, d, a, b, r) ==
          doctest::Approx((1 + s) * std::pow(4 * M_E * a / (r * b), s)).epsilon(1e-14));
    CHECK_THROWS_AS(reverse_holder_bound(1.0, 1.0, 0.0, 1.0, 0.5), InvalidInput);
}

TEST_CASE("distribution function against counting and layer cake") {
    const auto set = small_set();
    const Function f = Function::log_distance({0.3, 0.0});
    const Point x = set.points[fixtures::nearest_index(set, Point::planar(0.3, 0))];
    const double t = 0.1;
    std::vector<double> grid;
    for (int i = 0; i <= 400; ++i) grid.push_back(0.05 * i);
    DistributionParams params;
    params.a = *set.reg_a;
    params.d = set.dimension_d;
    const auto m = normalize_m1m2(f, params.r);
    params.M1 = m.M1;
    params.M2 = m.M2;
    params.c_hat = 2.0;
    const auto rep = distribution_check(f, set, x, t, grid, params);

    const double sup = std::log(std::abs(x.z[0] - 0.3) + t);
    CHECK(rep.sup_ball == doctest::Approx(sup).epsilon(1e-9));
    for (std::size_t k = 0; k < grid.size(); k += 37) {
        double D = 0.0;
        for (std::size_t i = 0; i < set.size(); ++i)
            if (distance(set.points[i], x) <= t && rep.sup_ball - evaluate(f, set.points[i]) >= grid[k])
                D += set.weights[i];
        CHECK(rep.D_values[k] == doctest::Approx(D).epsilon(1e-12));
    }
    for (std::size_t k = 1; k < grid.size(); ++k) CHECK(rep.D_values[k] <= rep.D_values[k - 1]);
    CHECK(std::abs(rep.layer_cake - rep.mean_f_prime) <= rep.layer_cake_tolerance);
    CHECK(rep.bound_slope == doctest::Approx(-params.d / (2.0 * (m.M1 - m.M2))));
    CHECK(rep.fit_points >= 2);
    CHECK(rep.fitted_slope < 0.0);

    CHECK_THROWS_AS(distribution_check(f, set, x, t, {1.0}, params), InvalidInput);
    CHECK_THROWS_AS(distribution_check(f, set, x, t, {1.0, 0.5}, params), InvalidInput);
    CHECK_THROWS_AS(distribution_check(f, set, x, 0.0, grid, params), InvalidInput);
}

TEST_CASE("Bernstein-Walsh inequality on closed forms") {
    // one root at distance delta: log(delta + q t) <= log q + log(delta + t)
    const auto one = bernstein_walsh({cplx{0.2, 0.0}}, false, {0.0, 0.0}, 0.1, 3.0);
    CHECK(one.lhs == doctest::Approx(std::log(0.5)).epsilon(1e-9));
    CHECK(one.rhs == doctest::Approx(std::log(3.0) + std::log(0.3)).epsilon(1e-9));
    CHECK(one.holds);
    const auto centered = bernstein_walsh({cplx{0.0, 0.0}}, false, {0.0, 0.0}, 0.1, 4.0);
    CHECK(centered.lhs == doctest::Approx(centered.rhs).epsilon(1e-9));
    CHECK(centered.holds);

    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<cplx> roots(1 + trial % 8);
        for (auto& z : roots) z = {u(rng), u(rng)};
        CHECK(bernstein_walsh_check(roots, true, {u(rng), u(rng)}, 0.05 + 0.2 * (u(rng) + 1), 2.0 + (u(rng) + 1)));
    }
    CHECK_THROWS_AS(bernstein_walsh({}, true, {0, 0}, 0.1, 2.0), InvalidInput);
    CHECK_THROWS_AS(bernstein_walsh({cplx{0, 0}}, true, {0, 0}, 0.1, 0.5), InvalidInput);
    CHECK_THROWS_AS(bernstein_walsh({cplx{0, 0}}, true, {0, 0}, -0.1, 2.0), InvalidInput);
}

TEST_CASE("remez gap preconditions") {
    const auto set = small_set();
    const Function f = Function::log_distance({0.3, 0.0});
    const Point x = set.points[set.size() / 2];
    const auto omega = ball_restrict(set, x, 0.01).set;
    CHECK_THROWS_AS(remez_gap(f, set, x, 0.05, 1.0, omega), InvalidInput);
    CHECK_THROWS_AS(remez_gap(f, set, x, 0.0, 0.5, omega), InvalidInput);
    CHECK_THROWS_AS(remez_gap(f, set, x, 0.05, 0.5, DSet{}), InvalidInput);
    CHECK_THROWS_AS(remez_gap(f, set, x, 0.3, 0.5, omega), GeometryError);
    CHECK_THROWS_AS(remez_gap(f, set, x, 0.001, 0.5, omega), GeometryError);
    CHECK_THROWS_AS(remez_gap(f, set, Point::origin(2), 0.05, 0.5, omega), DimensionMismatch);
    auto uncertified = set;
    uncertified.reg_a.reset();
    CHECK_THROWS_AS(remez_gap(f, uncertified, x, 0.05, 0.5, omega), InvalidInput);
}

TEST_CASE("remez gap values against direct computation") {
    const auto set = small_set();
    const cplx root{0.3, 0.0};
    const Function f = Function::log_distance(root);
    const Point x = set.points[set.size() / 2];
    const double t = 0.05, r = 0.5;
    const auto omega = ball_restrict(set, x, 0.01).set;
    const auto e = remez_gap(f, set, x, t, r, omega);
    double sup_omega = neg_inf;
    for (const auto& p : omega.points) sup_omega = std::max(sup_omega, std::log(std::abs(p.z[0] - root)));
    const double sup_ball = std::log(std::abs(x.z[0] - root) + t);
    const double d = set.dimension_d, a = *set.reg_a, eps = omega.total_mass();
    CHECK(e.epsilon == doctest::Approx(eps).epsilon(1e-14));
    CHECK(e.sup_omega == doctest::Approx(sup_omega).epsilon(1e-14));
    CHECK(e.lhs == doctest::Approx(sup_ball - sup_omega).epsilon(1e-8));
    CHECK(e.log_term ==
          doctest::Approx(std::log(4 * M_E * t * std::pow(a, 1 / d) / (r * std::pow(d * eps, 1 / d)))).epsilon(1e-13));
    CHECK(e.M1 == doctest::Approx(std::log(1.3)).epsilon(1e-10));
    CHECK(e.M2 == doctest::Approx(std::log(0.8)).epsilon(1e-10));
    CHECK(e.regressor() == doctest::Approx(e.slope_scale * e.log_term));
    CHECK(remez_holds(e, 1e6));
    CHECK(!remez_holds(e, 0.0) == (e.lhs > 1e-12 * std::max(1.0, std::abs(e.sup_ball))));
}

TEST_CASE("constant fit recovers a planted slope") {
    std::vector<RemezExperiment> exps;
    std::mt19937_64 rng(43);
    std::normal_distribution<double> noise(0.0, 1e-3);
    for (int i = 0; i < 24; ++i) {
        RemezExperiment e;
        e.epsilon = std::pow(2.0, -i % 12);
        e.log_term = 1.0 + 0.25 * i;
        e.slope_scale = 0.5;
        e.lhs = 0.7 * e.regressor() + 0.1 + noise(rng);
        exps.push_back(e);
    }
    const auto fit = fit_constant_c(exps);
    CHECK(fit.c_hat == doctest::Approx(0.7).epsilon(1e-2));
    CHECK(fit.intercept == doctest::Approx(0.1).epsilon(5e-2));
    CHECK(fit.used == 24);
    CHECK(fit.residuals.size() == 24);

    std::vector<RemezExperiment> few(exps.begin(), exps.begin() + 9);
    CHECK_THROWS_AS(fit_constant_c(few), InvalidInput);
    auto narrow = exps;
    for (auto& e : narrow) e.epsilon = 0.5;
    CHECK_THROWS_AS(fit_constant_c(narrow), InvalidInput);
    auto flat = exps;
    for (auto& e : flat) e.lhs = -1.0;
    CHECK(fit_constant_c(flat).c_hat == 0.0);
}

TEST_CASE("sharpness separates a regular set from a non-regular one") {
    const auto cantor = small_set();
    const auto reg = sharpness_experiment(cantor, cantor.dimension_d, geometric_scales(0.6, 1.0 / 3.0, 1, 7));
    CHECK(!reg.divergent);
    CHECK(reg.growth < 2.0);
    for (std::size_t i = 1; i < reg.rows.size(); ++i) CHECK(reg.rows[i].t < reg.rows[i - 1].t);

    const auto dyadic = builtin::dyadic_sequence(30);
    std::vector<double> scales;
    for (int j = 1; j <= 16; ++j) scales.push_back(std::ldexp(1.0, -j));
    const auto bad = sharpness_experiment(dyadic, 2.0, scales);
    CHECK(bad.divergent);
    CHECK(bad.growth > 100.0);

    CHECK_THROWS_AS(sharpness_experiment(cantor, 1.0, {}), InvalidInput);
    CHECK_THROWS_AS(sharpness_experiment(cantor, 1.0, {1e-9}), ResolutionError);
    CHECK_THROWS_AS(sharpness_experiment(cantor, 0.0, {0.1}), InvalidInput);
}
