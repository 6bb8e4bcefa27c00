#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cartan_lab/error.hpp"
#include "cartan_lab/functions.hpp"

#include <cmath>
#include <limits>
#include <random>

using namespace cartan_lab;

namespace {

constexpr double neg_inf = -std::numeric_limits<double>::infinity();

Polynomial linear_coordinate(std::size_t nvars, std::size_t k) {
    Polynomial p;
    p.nvars = nvars;
    std::vector<int> e(nvars, 0);
    e[k] = 1;
    p.terms.push_back({cplx{1.0, 0.0}, e});
    return p;
}

} // namespace

TEST_CASE("potential matches a direct sum of logarithms") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-1.0, 1.0), w(0.1, 3.0);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<Point> atoms;
        std::vector<double> masses;
        for (int i = 0; i < 12; ++i) {
            atoms.push_back(Point{cplx{u(rng), u(rng)}, cplx{u(rng), u(rng)}});
            masses.push_back(trial % 2 ? 1.0 : w(rng));
        }
        const Function f(Potential{DiscreteMeasure(atoms, masses)});
        for (int q = 0; q < 10; ++q) {
            const Point z{cplx{u(rng), u(rng)}, cplx{u(rng), u(rng)}};
            double want = 0.0;
            for (std::size_t i = 0; i < atoms.size(); ++i) want += masses[i] * std::log(distance(z, atoms[i]));
            CHECK(evaluate(f, z) == doctest::Approx(want).epsilon(1e-12));
        }
    }
}

TEST_CASE("log singularities evaluate to minus infinity") {
    const Function pot(Potential{DiscreteMeasure::counting({Point::planar(0.2, 0.1), Point::planar(-1, 0)})});
    CHECK(evaluate(pot, Point::planar(0.2, 0.1)) == neg_inf);
    const Function weighted(Potential{DiscreteMeasure({Point::planar(0.5, 0)}, {2.5})});
    CHECK(evaluate(weighted, Point::planar(0.5, 0)) == neg_inf);
    const Function lp(LogAbsPolynomial{{cplx{0.3, 0.0}, cplx{-0.3, 0.0}}, 0.0});
    CHECK(evaluate(lp, Point::planar(-0.3, 0)) == neg_inf);
    const Function map(LogNormMap{{linear_coordinate(2, 0), linear_coordinate(2, 1)}});
    CHECK(evaluate(map, Point::origin(2)) == neg_inf);
}

TEST_CASE("log of a polynomial through its roots") {
    const Function lp(LogAbsPolynomial{{cplx{1.0, 0.0}, cplx{0.0, 2.0}}, std::log(3.0)});
    const Point z = Point::planar(0.5, -0.5);
    const cplx zz = z.z[0];
    CHECK(evaluate(lp, z) == doctest::Approx(std::log(3.0 * std::abs((zz - 1.0) * (zz - cplx{0, 2})))).epsilon(1e-14));
    CHECK(evaluate(Function::log_distance({0.3, 0.0}), Point::planar(1.3, 0)) == doctest::Approx(0.0));
}

TEST_CASE("polynomials and log-norm maps") {
    Polynomial p;
    p.nvars = 2;
    p.terms = {{cplx{2.0, 1.0}, {2, 1}}, {cplx{-1.0, 0.0}, {0, 0}}};
    CHECK(p.degree() == 3);
    const Point z{cplx{0.5, 0.5}, cplx{1.0, -2.0}};
    const cplx want = cplx{2.0, 1.0} * z.z[0] * z.z[0] * z.z[1] - 1.0;
    CHECK(std::abs(p(z) - want) < 1e-14);
    CHECK_THROWS_AS(p(Point::planar(0, 0)), DimensionMismatch);

    const Function map(LogNormMap{{p, linear_coordinate(2, 0)}});
    const double expect = 0.5 * std::log(std::norm(want) + std::norm(z.z[0]));
    CHECK(evaluate(map, z) == doctest::Approx(expect).epsilon(1e-14));

    Polynomial high;
    high.nvars = 1;
    high.terms = {{cplx{1.0, 0.0}, {9}}};
    CHECK_THROWS_AS(Function(LogNormMap{{high}}), InvalidInput);
    CHECK_THROWS_AS(Function(LogNormMap{{linear_coordinate(2, 0), linear_coordinate(3, 0)}}), DimensionMismatch);
    CHECK_THROWS_AS(Function(LogNormMap{}), InvalidInput);
}

TEST_CASE("max, shifted and constant combinators") {
    const Function a = Function::log_distance({0.0, 0.0});
    const Function b = Function::constant(-1.0);
    const Function m(MaxOf{{a, b}});
    CHECK(evaluate(m, Point::planar(0.1, 0)) == -1.0);
    CHECK(evaluate(m, Point::planar(2.0, 0)) == doctest::Approx(std::log(2.0)));
    CHECK(evaluate(m, Point::planar(0, 0)) == -1.0);

    const Function s = Function::shifted(a, 5.25);
    CHECK(evaluate(s, Point::planar(2.0, 0)) == std::log(2.0) + 5.25);
    CHECK(evaluate(Function::constant(3.7), Point::origin(4)) == 3.7);
    CHECK(!Function::constant(1.0).ambient_dim());
    CHECK(*s.ambient_dim() == 1);

    CHECK_THROWS_AS(Function(MaxOf{}), InvalidInput);
    CHECK_THROWS_AS(Function::shifted(a, std::numeric_limits<double>::infinity()), InvalidInput);
}

TEST_CASE("evaluation checks dimensions") {
    const Function pot(Potential{DiscreteMeasure::counting({Point{cplx{0, 0}, cplx{1, 0}}})});
    CHECK_THROWS_AS(evaluate(pot, Point::planar(0, 0)), DimensionMismatch);
    CHECK_THROWS_AS(evaluate(Function::log_distance({0, 0}), Point::origin(2)), DimensionMismatch);
    CHECK_THROWS_AS(sup_on_ball(Function::log_distance({0, 0}), Point::origin(2), 1.0), DimensionMismatch);
}

TEST_CASE("measure validation") {
    CHECK_THROWS_AS(DiscreteMeasure({Point::planar(0, 0)}, {0.0}), InvalidInput);
    CHECK_THROWS_AS(DiscreteMeasure({Point::planar(0, 0)}, {-1.0}), InvalidInput);
    CHECK_THROWS_AS(DiscreteMeasure({Point::planar(0, 0)}, {1.0, 2.0}), InvalidInput);
    CHECK_THROWS_AS(DiscreteMeasure({Point::planar(0, 0), Point::origin(2)}, {1.0, 1.0}), DimensionMismatch);
    CHECK_THROWS_AS(DiscreteMeasure::counting({Point::planar(std::nan(""), 0)}), InvalidInput);
    CHECK(DiscreteMeasure({Point::planar(0, 0), Point::planar(1, 0)}, {0.5, 2.0}).total() == 2.5);
}

TEST_CASE("sup on a disc of log distance has a closed form") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1.0, 1.0), rad(0.05, 1.0);
    for (int trial = 0; trial < 40; ++trial) {
        const cplx a{u(rng), u(rng)};
        const Point c = Point::planar(u(rng), u(rng));
        const double R = rad(rng);
        const auto est = sup_on_ball(Function::log_distance(a), c, R, 512);
        const double exact = std::log(std::abs(c.z[0] - a) + R);
        CHECK(est.value <= exact + 1e-12);
        CHECK(est.value == doctest::Approx(exact).epsilon(1e-9));
        CHECK(std::abs(distance(est.argmax, c) - R) < 1e-12);
        if (est.error_bound) CHECK(exact - est.value <= *est.error_bound + 1e-12);
    }
}

TEST_CASE("sup on a ball in C^2 of log |z|") {
    const Function map(LogNormMap{{linear_coordinate(2, 0), linear_coordinate(2, 1)}});
    const Point c{cplx{0.3, 0.1}, cplx{-0.2, 0.4}};
    const auto est = sup_on_ball(map, c, 0.5, 4096);
    const double exact = std::log(norm(c) + 0.5);
    CHECK(est.value <= exact + 1e-12);
    CHECK(est.value == doctest::Approx(exact).epsilon(1e-5));
}

TEST_CASE("sup guards") {
    const Function f = Function::log_distance({0, 0});
    CHECK_THROWS_AS(sup_on_ball(f, Point::planar(0, 0), 0.0), InvalidInput);
    CHECK_THROWS_AS(sup_on_ball(f, Point::planar(0, 0), 1.0, 4), InvalidInput);
    const auto k = sup_on_ball(Function::constant(2.0), Point::origin(3), 1.0);
    CHECK(k.value == 2.0);
    CHECK(*k.error_bound == 0.0);
}

TEST_CASE("normalization constants of log distance") {
    for (double a : {0.0, 0.3, 0.7}) {
        for (double r : {0.2, 0.5, 0.9}) {
            const auto m = normalize_m1m2(Function::log_distance({a, 0.0}), r);
            CHECK(m.M1 == doctest::Approx(std::log(1.0 + a)).epsilon(1e-10));
            CHECK(m.M2 == doctest::Approx(std::log(r + a)).epsilon(1e-10));
            CHECK(m.M1 > m.M2);
        }
    }
    CHECK_THROWS_AS(normalize_m1m2(Function::log_distance({0, 0}), 1.0), InvalidInput);
    CHECK_THROWS_AS(normalize_m1m2(Function::log_distance({0, 0}), 0.0), InvalidInput);
}

TEST_CASE("log product stays finite where the raw product would not") {
    std::vector<cplx> far(400, cplx{10.0, 0.0});
    CHECK(log_abs_product({0.0, 0.0}, far) == doctest::Approx(400.0 * std::log(10.0)).epsilon(1e-13));
    std::vector<cplx> near(400, cplx{1e-3, 0.0});
    CHECK(log_abs_product({0.0, 0.0}, near) == doctest::Approx(400.0 * std::log(1e-3)).epsilon(1e-13));
    std::vector<cplx> mixed;
    for (int i = 0; i < 300; ++i) mixed.push_back(i % 2 ? cplx{1e5, 0} : cplx{1e-5, 0});
    CHECK(std::abs(log_abs_product({0.0, 0.0}, mixed)) < 1e-9);
    CHECK(log_abs_product({1.0, 1.0}, {}) == 0.0);
}

TEST_CASE("sup of the two-atom potential on the unit disc by dense sampling") {
    const Function f(Potential{DiscreteMeasure::counting({Point::planar(-0.5, 0), Point::planar(0.5, 0)})});
    double brute = neg_inf;
    const int n = 1000000;
    for (int j = 0; j < n; ++j) brute = std::max(brute, evaluate(f, Point{std::polar(1.0, 2.0 * M_PI * j / n)}));
    const auto est = sup_on_ball(f, Point::planar(0, 0), 1.0, 4096);
    // the maximum sits at z = +-i, where |z^2 - 1/4| = 5/4
    CHECK(est.value == doctest::Approx(std::log(1.25)).epsilon(1e-12));
    CHECK(std::abs(est.value - brute) < 1e-6);
    CHECK(std::abs(std::abs(est.argmax.z[0].imag()) - 1.0) < 1e-6);
}

TEST_CASE("sup is monotone in radius and resolution") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<Point> atoms;
        for (int i = 0; i < 6; ++i) atoms.push_back(Point::planar(u(rng), u(rng)));
        const Function f(Potential{DiscreteMeasure::counting(atoms)});
        const Point c = Point::planar(u(rng), u(rng));
        double prev = neg_inf;
        for (double R = 0.05; R < 1.0; R *= 1.5) {
            const double v = sup_on_ball(f, c, R).value;
            CHECK(v >= prev - 1e-12);
            prev = v;
        }
        prev = neg_inf;
        for (std::size_t res = 16; res <= 4096; res *= 2) {
            const double v = sup_on_ball(f, c, 0.3, res).value;
            CHECK(v >= prev - 1e-12);
            prev = v;
        }
    }
}
