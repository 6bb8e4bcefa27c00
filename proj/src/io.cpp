#include "cartan_lab/io.hpp"

#include "cartan_lab/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace cartan_lab::io {

namespace {

const json& field(const json& j, const char* key) {
    if (!j.is_object()) throw InvalidInput(std::string("json: expected an object holding '") + key + "'");
    auto it = j.find(key);
    if (it == j.end()) throw InvalidInput(std::string("json: missing key '") + key + "'");
    return *it;
}

double number(const json& j, const char* what) {
    if (!j.is_number()) throw InvalidInput(std::string("json: '") + what + "' must be a number");
    return j.get<double>();
}

const json& array(const json& j, const char* what) {
    if (!j.is_array()) throw InvalidInput(std::string("json: '") + what + "' must be an array");
    return j;
}

std::vector<double> numbers(const json& j, const char* what) {
    std::vector<double> out;
    for (const auto& v : array(j, what)) out.push_back(number(v, what));
    return out;
}

json points_json(const std::vector<Point>& pts) {
    json a = json::array();
    for (const auto& p : pts) a.push_back(to_json(p));
    return a;
}

std::vector<Point> points_from(const json& j, const char* what) {
    std::vector<Point> out;
    for (const auto& p : array(j, what)) out.push_back(point_from_json(p));
    return out;
}

json cplx_json(cplx c) { return json::array({c.real(), c.imag()}); }

cplx cplx_from(const json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    const auto v = numbers(j, "complex");
    if (v.size() != 2) throw InvalidInput("json: complex numbers are [re, im]");
    return {v[0], v[1]};
}

json reals_json(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(real(x));
    return a;
}

} // namespace

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

json real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

double to_real(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
    }
    throw InvalidInput("json: expected a number, \"inf\" or \"-inf\"");
}

json to_json(const Point& p) {
    json a = json::array();
    for (const auto& c : p.z) {
        a.push_back(c.real());
        a.push_back(c.imag());
    }
    return a;
}

Point point_from_json(const json& j) {
    const auto v = numbers(j, "point");
    if (v.empty() || v.size() % 2 != 0) throw InvalidInput("json: a point needs an even, nonzero number of coordinates");
    Point p;
    for (std::size_t i = 0; i < v.size(); i += 2) p.z.emplace_back(v[i], v[i + 1]);
    if (!p.finite()) throw InvalidInput("json: non-finite point coordinate");
    return p;
}

json to_json(const DSet& s) {
    json j;
    j["dimension_d"] = s.dimension_d;
    j["diameter"] = s.diameter;
    j["depth"] = s.depth;
    j["resolution"] = s.resolution;
    j["reg_a"] = s.reg_a ? json(*s.reg_a) : json(nullptr);
    j["reg_b"] = s.reg_b ? json(*s.reg_b) : json(nullptr);
    j["points"] = points_json(s.points);
    j["weights"] = s.weights;
    return j;
}

DSet dset_from_json(const json& j) {
    DSet s;
    s.points = points_from(field(j, "points"), "points");
    s.weights = numbers(field(j, "weights"), "weights");
    if (s.points.size() != s.weights.size()) throw InvalidInput("set: points and weights differ in length");
    for (const auto& p : s.points)
        if (p.dim() != s.points.front().dim()) throw DimensionMismatch("set: points of mixed dimension");
    for (double w : s.weights)
        if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidInput("set: weights must be nonnegative");
    s.dimension_d = number(field(j, "dimension_d"), "dimension_d");
    if (!(s.dimension_d > 0.0)) throw InvalidInput("set: dimension_d must be positive");
    s.diameter = j.contains("diameter") ? number(j["diameter"], "diameter") : cloud_diameter(s.points);
    s.depth = j.contains("depth") ? j["depth"].get<int>() : 0;
    s.resolution = j.contains("resolution") ? number(j["resolution"], "resolution") : 0.0;
    if (j.contains("reg_a") && !j["reg_a"].is_null()) s.reg_a = number(j["reg_a"], "reg_a");
    if (j.contains("reg_b") && !j["reg_b"].is_null()) s.reg_b = number(j["reg_b"], "reg_b");
    return s;
}

json to_json(const DiscreteMeasure& m) {
    json j;
    j["atoms"] = points_json(m.atoms);
    j["masses"] = m.masses;
    return j;
}

DiscreteMeasure measure_from_json(const json& j) {
    auto atoms = points_from(field(j, "atoms"), "atoms");
    std::vector<double> masses =
        j.contains("masses") ? numbers(j["masses"], "masses") : std::vector<double>(atoms.size(), 1.0);
    if (atoms.empty()) return DiscreteMeasure{};
    return DiscreteMeasure(std::move(atoms), std::move(masses));
}

json to_json(const Polynomial& p) {
    json terms = json::array();
    for (const auto& t : p.terms) terms.push_back({{"coeff", cplx_json(t.coeff)}, {"exponents", t.exponents}});
    return {{"nvars", p.nvars}, {"terms", terms}};
}

Polynomial polynomial_from_json(const json& j, std::size_t nvars) {
    Polynomial p;
    p.nvars = j.contains("nvars") ? j["nvars"].get<std::size_t>() : nvars;
    if (p.nvars != nvars) throw DimensionMismatch("polynomial: nvars does not match the map dimension");
    for (const auto& t : array(field(j, "terms"), "terms")) {
        Polynomial::Term term;
        term.coeff = cplx_from(field(t, "coeff"));
        for (const auto& e : array(field(t, "exponents"), "exponents")) {
            if (!e.is_number_integer() || e.get<int>() < 0) throw InvalidInput("polynomial: exponents are nonnegative integers");
            term.exponents.push_back(e.get<int>());
        }
        if (term.exponents.size() != p.nvars) throw InvalidInput("polynomial: exponent vector has wrong length");
        p.terms.push_back(std::move(term));
    }
    return p;
}

json to_json(const Function& f) {
    return std::visit(
        [](const auto& v) -> json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Potential>) {
                return {{"type", "potential"}, {"measure", to_json(v.measure)}};
            } else if constexpr (std::is_same_v<T, LogAbsPolynomial>) {
                json roots = json::array();
                for (auto r : v.roots) roots.push_back(cplx_json(r));
                return {{"type", "logpoly"}, {"roots", roots}, {"log_leading", v.log_leading}};
            } else if constexpr (std::is_same_v<T, LogNormMap>) {
                json comps = json::array();
                for (const auto& c : v.components) comps.push_back(to_json(c));
                return {{"type", "lognormmap"}, {"components", comps}};
            } else if constexpr (std::is_same_v<T, Constant>) {
                return {{"type", "constant"}, {"value", v.value}};
            } else if constexpr (std::is_same_v<T, MaxOf>) {
                json parts = json::array();
                for (const auto& p : v.parts) parts.push_back(to_json(p));
                return {{"type", "max"}, {"parts", parts}};
            } else {
                return {{"type", "shifted"}, {"base", to_json(*v.base)}, {"offset", v.offset}};
            }
        },
        f.variant());
}

Function function_from_json(const json& j) {
    const auto& tj = field(j, "type");
    if (!tj.is_string()) throw InvalidInput("function: 'type' must be a string");
    const auto type = tj.get<std::string>();
    if (type == "potential") return Function(Potential{measure_from_json(field(j, "measure"))});
    if (type == "logpoly" || type == "log_abs_polynomial") {
        LogAbsPolynomial p;
        for (const auto& r : array(field(j, "roots"), "roots")) p.roots.push_back(cplx_from(r));
        if (j.contains("log_leading")) p.log_leading = number(j["log_leading"], "log_leading");
        return Function(p);
    }
    if (type == "lognormmap" || type == "log_norm_map") {
        LogNormMap m;
        const auto& comps = array(field(j, "components"), "components");
        if (comps.empty()) throw InvalidInput("function: log_norm_map needs components");
        const std::size_t n = comps.front().contains("nvars") ? comps.front()["nvars"].get<std::size_t>() : comps.size();
        for (const auto& c : comps) m.components.push_back(polynomial_from_json(c, n));
        return Function(m);
    }
    if (type == "constant") return Function::constant(number(field(j, "value"), "value"));
    if (type == "max") {
        MaxOf m;
        for (const auto& p : array(field(j, "parts"), "parts")) m.parts.push_back(function_from_json(p));
        return Function(m);
    }
    if (type == "shifted") return Function::shifted(function_from_json(field(j, "base")), number(field(j, "offset"), "offset"));
    throw InvalidInput("function: unknown type '" + type + "'");
}

json to_json(const BallCover& c) {
    json balls = json::array();
    for (std::size_t i = 0; i < c.balls.size(); ++i) {
        json b;
        b["center"] = to_json(c.balls[i].center);
        b["radius"] = c.balls[i].radius;
        if (i < c.taus.size()) b["tau"] = c.taus[i];
        balls.push_back(b);
    }
    json j;
    j["balls"] = balls;
    j["d"] = c.d_exponent;
    j["budget_used"] = c.budget_used;
    j["budget_limit"] = c.budget_limit;
    j["within_budget"] = c.within_budget();
    j["majorant_sum"] = c.majorant_sum;
    j["mass"] = c.mass;
    j["alpha"] = c.params.alpha;
    j["beta"] = c.params.beta;
    j["gamma"] = c.params.gamma;
    j["exact_sup"] = c.exact_sup;
    return j;
}

BallCover cover_from_json(const json& j) {
    BallCover c;
    for (const auto& b : array(field(j, "balls"), "balls")) {
        Ball ball{point_from_json(field(b, "center")), number(field(b, "radius"), "radius")};
        if (!(ball.radius >= 0.0)) throw InvalidInput("cover: radii must be nonnegative");
        c.balls.push_back(std::move(ball));
        if (b.contains("tau")) c.taus.push_back(number(b["tau"], "tau"));
    }
    if (j.contains("d")) c.d_exponent = number(j["d"], "d");
    c.budget_limit = j.contains("budget_limit") ? number(j["budget_limit"], "budget_limit")
                                                : std::numeric_limits<double>::infinity();
    if (j.contains("mass")) c.mass = number(j["mass"], "mass");
    if (j.contains("alpha")) c.params.alpha = number(j["alpha"], "alpha");
    if (j.contains("beta")) c.params.beta = number(j["beta"], "beta");
    if (j.contains("gamma")) c.params.gamma = number(j["gamma"], "gamma");
    if (j.contains("exact_sup")) c.exact_sup = j["exact_sup"].get<bool>();
    // recomputed rather than trusted
    for (const auto& b : c.balls) c.budget_used += std::pow(b.radius, c.d_exponent);
    if (j.contains("majorant_sum")) c.majorant_sum = number(j["majorant_sum"], "majorant_sum");
    return c;
}

json to_json(const HolomorphicMapSample& F) {
    json comps = json::array();
    for (const auto& c : F.components) comps.push_back(to_json(c));
    json zeros = json::array();
    for (const auto& z : F.known_zeros) zeros.push_back({{"point", to_json(z.point)}, {"mult", z.multiplicity}});
    json j;
    j["name"] = F.name;
    j["n"] = F.n;
    j["components"] = comps;
    j["zeros"] = zeros;
    j["M"] = F.M;
    return j;
}

HolomorphicMapSample map_from_json(const json& j) {
    if (j.is_object() && j.contains("gallery")) {
        if (!j["gallery"].is_string()) throw InvalidInput("map: 'gallery' must be a string");
        return gallery::by_name(j["gallery"].get<std::string>());
    }
    HolomorphicMapSample F;
    const auto& nj = field(j, "n");
    if (!nj.is_number_integer() || nj.get<long>() < 2) throw InvalidInput("map: n must be an integer >= 2");
    F.n = nj.get<std::size_t>();
    if (j.contains("name")) F.name = j["name"].get<std::string>();
    for (const auto& c : array(field(j, "components"), "components")) F.components.push_back(polynomial_from_json(c, F.n));
    if (j.contains("zeros")) {
        for (const auto& z : array(j["zeros"], "zeros")) {
            KnownZero kz{point_from_json(field(z, "point")), 1};
            if (z.contains("mult")) kz.multiplicity = z["mult"].get<int>();
            F.known_zeros.push_back(std::move(kz));
        }
    }
    F.M = number(field(j, "M"), "M");
    F.validate();
    return F;
}

json to_json(const RegularityReport& r) {
    json rows = json::array();
    for (std::size_t i = 0; i < r.scales.size(); ++i)
        rows.push_back({{"scale", r.scales[i]}, {"upper", r.upper[i]}, {"lower", r.lower[i]}});
    return {{"a", r.a}, {"b", r.b}, {"scales", rows}};
}

json to_json(const CartanReport& r) {
    json j;
    j["success"] = r.success();
    j["H"] = r.H;
    j["k"] = r.k;
    j["bound"] = real(r.bound);
    j["min_off_cover"] = real(r.min_off_cover);
    j["empty_off_cover"] = r.empty_off_cover;
    j["grid"] = r.grid;
    j["grid_size"] = r.grid_size;
    j["off_cover_count"] = r.off_cover_count;
    j["violation_count"] = r.violations.size();
    j["violations"] = points_json(r.violations);
    j["cover"] = to_json(r.cover);
    return j;
}

json to_json(const RemezExperiment& e) {
    json j;
    j["x"] = to_json(e.x);
    j["t"] = e.t;
    j["r"] = e.r;
    j["omega_center"] = to_json(e.omega_center);
    j["omega_radius"] = e.omega_radius;
    j["epsilon"] = e.epsilon;
    j["sup_ball"] = real(e.sup_ball);
    j["sup_omega"] = real(e.sup_omega);
    j["lhs"] = real(e.lhs);
    j["log_term"] = e.log_term;
    j["M1"] = real(e.M1);
    j["M2"] = real(e.M2);
    j["slope_scale"] = e.slope_scale;
    return j;
}

RemezExperiment remez_from_json(const json& j) {
    RemezExperiment e;
    e.x = point_from_json(field(j, "x"));
    e.t = number(field(j, "t"), "t");
    e.r = number(field(j, "r"), "r");
    if (j.contains("omega_center")) e.omega_center = point_from_json(j["omega_center"]);
    if (j.contains("omega_radius")) e.omega_radius = number(j["omega_radius"], "omega_radius");
    e.epsilon = number(field(j, "epsilon"), "epsilon");
    e.sup_ball = to_real(field(j, "sup_ball"));
    e.sup_omega = to_real(field(j, "sup_omega"));
    e.lhs = to_real(field(j, "lhs"));
    e.log_term = number(field(j, "log_term"), "log_term");
    e.M1 = to_real(field(j, "M1"));
    e.M2 = to_real(field(j, "M2"));
    e.slope_scale = number(field(j, "slope_scale"), "slope_scale");
    return e;
}

json to_json(const RemezFit& f) {
    return {{"c_hat", f.c_hat},
            {"intercept", f.intercept},
            {"c_through_origin", f.c_through_origin},
            {"used", f.used},
            {"residuals", f.residuals}};
}

json to_json(const BmoReport& r) {
    json balls = json::array();
    for (const auto& b : r.balls)
        balls.push_back({{"center", to_json(b.center)},
                         {"radius", b.radius},
                         {"mass", b.mass},
                         {"mean", b.mean},
                         {"oscillation", b.oscillation},
                         {"clamped", b.clamped}});
    return {{"bmo_norm", r.bmo_norm}, {"clamped", r.clamped}, {"clamp_value", kClampValue}, {"balls", balls}};
}

json to_json(const ReverseHolderReport& r) {
    json rows = json::array();
    for (const auto& row : r.rows)
        rows.push_back({{"p", real(row.p)}, {"lhs", real(row.lhs)}, {"log_lhs", real(row.log_lhs)}, {"ratio", row.ratio}});
    return {{"x", to_json(r.x)},
            {"t", r.t},
            {"mass", r.mass},
            {"rhs_base", real(r.rhs_base)},
            {"log_rhs_base", real(r.log_rhs_base)},
            {"sup_ratio", r.sup_ratio},
            {"rows", rows}};
}

json to_json(const DistributionReport& r) {
    json j;
    j["x"] = to_json(r.x);
    j["t"] = r.t;
    j["sup_ball"] = real(r.sup_ball);
    j["mass"] = r.mass;
    j["fitted_slope"] = r.fitted_slope;
    j["fit_points"] = r.fit_points;
    j["bound_slope"] = real(r.bound_slope);
    j["bound_exceedances"] = r.bound_exceedances;
    j["mean_f_prime"] = r.mean_f_prime;
    j["layer_cake"] = r.layer_cake;
    j["layer_cake_tolerance"] = r.layer_cake_tolerance;
    j["lambda"] = reals_json(r.lambda_grid);
    j["D"] = reals_json(r.D_values);
    j["bound"] = reals_json(r.bound_curve);
    return j;
}

json to_json(const SharpnessReport& r) {
    json rows = json::array();
    for (const auto& row : r.rows)
        rows.push_back({{"t", row.t}, {"max_ratio", row.max_ratio}, {"argmax", to_json(row.argmax)}, {"max_L", real(row.max_L)}});
    json j;
    j["d"] = r.d;
    j["C"] = r.C;
    j["max_ratio"] = r.max_ratio;
    j["growth"] = real(r.growth);
    j["divergent"] = r.divergent;
    j["certified_a"] = r.certified_a ? json(*r.certified_a) : json(nullptr);
    j["rows"] = rows;
    return j;
}

json to_json(const EnvelopeReport& r) {
    return {{"success", r.success()},
            {"grid_size", r.grid_size},
            {"violations", r.violations},
            {"worst_gap", real(r.worst_gap)},
            {"worst_point", r.worst_point.dim() ? to_json(r.worst_point) : json::array()}};
}

json to_json(const EllipticityProbeResult& r) {
    json dirs = json::array();
    for (const auto& d : r.directions)
        dirs.push_back({{"direction", to_json(d.direction)}, {"exponent", real(d.exponent)}, {"coefficient", d.coefficient}});
    return {{"zero", to_json(r.zero)},
            {"verdict", to_string(r.verdict)},
            {"exponent_spread", real(r.exponent_spread)},
            {"min_coefficient", r.min_coefficient},
            {"directions", dirs}};
}

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open '" + path.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InvalidInput("'" + path.string() + "' is not valid JSON: " + e.what());
    }
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write '" + tmp.string() + "'");
        out << text;
        out.flush();
        if (!out) throw Error("write failed for '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, path);
}

void write_json(const std::filesystem::path& path, const json& j) { write_text_atomic(path, j.dump(2) + "\n"); }

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string to_csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
    std::ostringstream out;
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << csv_field(header[i]);
    out << "\r\n";
    for (const auto& row : rows) {
        if (row.size() != header.size()) throw InvalidInput("csv: row width differs from header");
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
        out << "\r\n";
    }
    return out.str();
}

} // namespace cartan_lab::io
