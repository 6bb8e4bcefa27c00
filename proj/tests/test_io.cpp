#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cartan_lab/error.hpp"
#include "cartan_lab/io.hpp"
#include "fixtures.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <random>

using namespace cartan_lab;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("cartan_lab_io_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Values of a function at a few probe points; enough to tell two functions apart.
std::vector<double> probe(const Function& f, std::size_t n) {
    std::vector<double> out;
    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 8; ++i) {
        Point z = Point::origin(n);
        for (auto& c : z.z) c = {u(rng), u(rng)};
        out.push_back(evaluate(f, z));
    }
    return out;
}

} // namespace

TEST_CASE("extended reals") {
    CHECK(io::real(1.5) == 1.5);
    CHECK(io::real(INFINITY) == "inf");
    CHECK(io::real(-INFINITY) == "-inf");
    CHECK(std::isinf(io::to_real("inf")));
    CHECK(io::to_real("-inf") < 0);
    CHECK(io::to_real(io::json(2)) == 2.0);
    CHECK_THROWS_AS(io::to_real("infinity and beyond"), InvalidInput);
    CHECK_THROWS_AS(io::to_real(io::json::array()), InvalidInput);
}

TEST_CASE("point and set round trips") {
    const Point p{cplx{0.1, -0.2}, cplx{3.0, 4.0}};
    CHECK(io::to_json(p).dump() == "[0.1,-0.2,3.0,4.0]");
    CHECK(io::point_from_json(io::to_json(p)) == p);
    CHECK_THROWS_AS(io::point_from_json(io::json::parse("[1,2,3]")), InvalidInput);
    CHECK_THROWS_AS(io::point_from_json(io::json::parse("[1,\"x\"]")), InvalidInput);

    const auto set = fixtures::remez_set();
    const auto back = io::dset_from_json(io::json::parse(io::to_json(set).dump()));
    CHECK(back.points == set.points);
    CHECK(back.weights == set.weights);
    CHECK(back.dimension_d == set.dimension_d);
    CHECK(back.diameter == set.diameter);
    CHECK(back.resolution == set.resolution);
    CHECK(back.depth == set.depth);
    CHECK(*back.reg_a == *set.reg_a);
    CHECK(*back.reg_b == *set.reg_b);

    auto j = io::to_json(set);
    j["weights"].erase(j["weights"].begin());
    CHECK_THROWS_AS(io::dset_from_json(j), InvalidInput);
    CHECK_THROWS_AS(io::dset_from_json(io::json::object()), InvalidInput);
}

TEST_CASE("function round trips preserve values") {
    const Function pot(Potential{DiscreteMeasure({Point::planar(0.1, 0), Point::planar(-0.4, 0.2)}, {1.0, 2.5})});
    const Function lp(LogAbsPolynomial{{cplx{0.3, 0.0}, cplx{-0.3, 0.1}}, 0.25});
    const Function lnm = gallery::product(0.01, 0.04).log_norm_function();
    const Function combo(MaxOf{{Function::shifted(lp, -1.5), Function::constant(-2.0)}});
    for (const auto& [f, n] : std::vector<std::pair<Function, std::size_t>>{{pot, 1}, {lp, 1}, {lnm, 2}, {combo, 1}}) {
        const auto text = io::to_json(f).dump();
        const auto back = io::function_from_json(io::json::parse(text));
        CHECK(probe(back, n) == probe(f, n));
        CHECK(io::to_json(back).dump() == text);
    }
    const auto c = io::function_from_json(io::json::parse(R"({"type":"constant","value":3.7})"));
    CHECK(evaluate(c, Point::planar(1, 1)) == 3.7);
    const auto alias = io::function_from_json(io::json::parse(R"({"type":"log_abs_polynomial","roots":[0.5]})"));
    CHECK(evaluate(alias, Point::planar(1.5, 0)) == 0.0);
    CHECK_THROWS_AS(io::function_from_json(io::json::parse(R"({"type":"spline"})")), InvalidInput);
    CHECK_THROWS_AS(io::function_from_json(io::json::parse(R"({"value":1})")), InvalidInput);
    CHECK_THROWS_AS(io::function_from_json(io::json::parse(R"({"type":"constant","value":"x"})")), InvalidInput);
}

TEST_CASE("measure and polynomial json") {
    const auto m = io::measure_from_json(io::json::parse(R"({"atoms":[[0,0],[1,0]]})"));
    CHECK(m.masses == std::vector<double>{1.0, 1.0});
    const auto back = io::measure_from_json(io::to_json(DiscreteMeasure({Point::planar(0, 1)}, {0.5})));
    CHECK(back.masses.front() == 0.5);
    CHECK_THROWS_AS(io::measure_from_json(io::json::parse(R"({"atoms":[[0,0]],"masses":[-1]})")), InvalidInput);

    Polynomial p;
    p.nvars = 2;
    p.terms = {{cplx{1.0, -2.0}, {1, 2}}};
    const auto q = io::polynomial_from_json(io::to_json(p), 2);
    REQUIRE(q.terms.size() == 1);
    CHECK(q.terms[0].coeff == p.terms[0].coeff);
    CHECK(q.terms[0].exponents == p.terms[0].exponents);
}

TEST_CASE("cover round trip") {
    std::mt19937_64 rng(62);
    const auto mu = fixtures::random_measure(rng, 9);
    const auto cover = gorin_cover(mu, Majorant::power(3.0, 1.0));
    const auto back = io::cover_from_json(io::json::parse(io::to_json(cover).dump()));
    REQUIRE(back.balls.size() == cover.balls.size());
    for (std::size_t i = 0; i < back.balls.size(); ++i) {
        CHECK(back.balls[i].center == cover.balls[i].center);
        CHECK(back.balls[i].radius == cover.balls[i].radius);
        CHECK(back.taus[i] == cover.taus[i]);
    }
    CHECK(back.budget_used == doctest::Approx(cover.budget_used).epsilon(1e-15));
    CHECK(back.d_exponent == cover.d_exponent);
    CHECK(back.exact_sup == cover.exact_sup);
    CHECK(back.params.gamma == cover.params.gamma);
}

TEST_CASE("map json: explicit and gallery forms") {
    const auto F = gallery::quadratic(0.04);
    const auto back = io::map_from_json(io::json::parse(io::to_json(F).dump()));
    CHECK(back.name == F.name);
    CHECK(back.M == F.M);
    CHECK(back.k() == F.k());
    CHECK(back.known_zeros.front().point == F.known_zeros.front().point);
    const Point z{cplx{0.1, 0.2}, cplx{-0.3, 0.05}};
    CHECK(log_norm(back, z) == log_norm(F, z));
    CHECK(io::map_from_json(io::json::parse(R"({"gallery":"cusp"})")).k() == 2);
    auto bad = io::to_json(F);
    bad["zeros"][0]["point"] = io::json::parse("[0.1,0,0,0]");
    CHECK_THROWS_AS(io::map_from_json(bad), InvalidInput);
}

TEST_CASE("remez experiment round trip") {
    const auto set = fixtures::remez_set();
    const Point x = set.points[set.size() / 2];
    const auto e = remez_gap(Function::log_distance({0.3, 0}), set, x, 0.05, 0.5, ball_restrict(set, x, 0.01).set);
    const auto back = io::remez_from_json(io::json::parse(io::to_json(e).dump()));
    CHECK(back.lhs == e.lhs);
    CHECK(back.log_term == e.log_term);
    CHECK(back.epsilon == e.epsilon);
    CHECK(back.regressor() == e.regressor());
}

TEST_CASE("report writers produce the advertised fields") {
    const auto set = fixtures::remez_set();
    const auto j = io::to_json(regularity_constants(set, geometric_scales(0.6, 1.0 / 3.0, 1, 5)));
    CHECK(j.contains("a"));
    CHECK(j.contains("b"));
    CHECK(j["scales"].size() == 5);
    const auto rh = io::to_json(reverse_holder(Function::log_distance({0.5, 0}), set, set.points.front(), 0.1,
                                               {1.0, kInfinityP}));
    CHECK(rh["rows"].size() == 2);
    CHECK(rh["rows"][1]["p"] == "inf");
}

TEST_CASE("csv quoting and layout") {
    CHECK(io::csv_field("plain") == "plain");
    CHECK(io::csv_field("a,b") == "\"a,b\"");
    CHECK(io::csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(io::csv_field("two\nlines") == "\"two\nlines\"");
    const auto text = io::to_csv({"t", "value, scaled"}, {{0.5, 1.0}, {0.25, -INFINITY}});
    CHECK(text == "t,\"value, scaled\"\r\n0.5,1\r\n0.25,-inf\r\n");
    CHECK_THROWS_AS(io::to_csv({"a", "b"}, {{1.0}}), InvalidInput);
}

TEST_CASE("format_double round trips") {
    std::mt19937_64 rng(63);
    std::uniform_real_distribution<double> e(-300.0, 300.0);
    std::normal_distribution<double> g;
    for (int i = 0; i < 2000; ++i) {
        const double v = g(rng) * std::pow(10.0, e(rng));
        const auto s = io::format_double(v);
        double back = 0.0;
        std::from_chars(s.data(), s.data() + s.size(), back);
        CHECK(back == v);
    }
    CHECK(io::format_double(0.1) == "0.1");
    CHECK(io::format_double(std::nan("")) == "nan");
    CHECK(io::format_double(INFINITY) == "inf");
}

TEST_CASE("atomic writes and json files") {
    const auto dir = scratch_dir("atomic");
    const auto path = dir / "nested" / "out.json";
    io::write_json(path, io::json{{"x", 1}});
    CHECK(slurp(path) == "{\n  \"x\": 1\n}\n");
    io::write_text_atomic(path, "{\"x\": 2}");
    CHECK(io::read_json(path)["x"] == 2);
    std::size_t files = 0;
    for (const auto& entry : fs::directory_iterator(path.parent_path())) {
        ++files;
        CHECK(entry.path().extension() != ".tmp");
    }
    CHECK(files == 1);

    std::ofstream(dir / "broken.json") << "{not json";
    CHECK_THROWS_AS(io::read_json(dir / "broken.json"), InvalidInput);
    CHECK_THROWS_AS(io::read_json(dir / "missing.json"), InvalidInput);
    fs::remove_all(dir);
}
