#include "internal.hpp"

#include "cartan_lab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace cartan_lab::cli {

namespace {

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_real(const std::string& raw, const std::string& what) {
    const std::string s = trim(raw);
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::logic_error&) {
        throw InvalidInput(what + ": '" + s + "' is not a number");
    }
    if (used != s.size() || std::isnan(v)) throw InvalidInput(what + ": '" + s + "' is not a number");
    return v;
}

std::string fmt(double v) { return io::format_double(v); }

void require_set_regularity(const DSet& set, const std::string& who) {
    if (!set.reg_a || !set.reg_b)
        throw InvalidInput(who + ": the set carries no certified regularity constants (run regularity --write-set true)");
}

std::vector<double> scales_for(const Context& ctx, double diameter) {
    if (ctx.has("scales")) return ctx.list("scales");
    if (!ctx.has("ratio") || !ctx.has("m-max"))
        throw InvalidInput(ctx.command() + ": give --scales or --ratio with --m-min/--m-max");
    return geometric_scales(diameter, ctx.real("ratio"), static_cast<int>(ctx.integer("m-min")),
                            static_cast<int>(ctx.integer("m-max")));
}

// ---- gen-set / regularity ----

Outcome gen_set(Context& ctx) {
    const auto maps = builtin::parse_ifs(ctx.str("ifs"));
    GenerateOptions opts;
    opts.max_points = ctx.count("max-points");
    const auto base = ctx.str("base");
    if (base == "barycenter") opts.base = BasePoint::barycenter;
    else if (base == "first-fixed-point") opts.base = BasePoint::first_fixed_point;
    else throw InvalidInput("gen-set: --base must be barycenter or first-fixed-point");
    const int depth = static_cast<int>(ctx.integer("depth"));
    DSet set = ctx.timed("generate_ifs_set",
                         [&] { return generate_ifs_set(maps, depth, ctx.count("ambient-n"), opts); });
    if (ctx.has("ratio") || ctx.has("scales")) set = ctx.timed("certify", [&] { return certify(set, scales_for(ctx, set.diameter)); });
    Outcome out;
    out.report = io::to_json(set);
    return out;
}

Outcome regularity(Context& ctx) {
    DSet set = ctx.set();
    const auto scales = scales_for(ctx, set.diameter);
    const auto rep = ctx.timed("regularity_constants", [&] { return regularity_constants(set, scales); });
    Outcome out;
    out.report = io::to_json(rep);
    auto& curve = out.curves.emplace_back(CsvCurve{"regularity.csv", {"scale", "upper", "lower"}, {}});
    for (std::size_t i = 0; i < rep.scales.size(); ++i) {
        curve.rows.push_back({rep.scales[i], rep.upper[i], rep.lower[i]});
        if (rep.upper[i] < rep.lower[i]) out.failures.push_back("upper < lower at scale " + fmt(rep.scales[i]));
    }
    if (!(rep.b > 0.0)) out.failures.push_back("lower regularity constant b is not positive");
    if (ctx.flag("write-set")) {
        set.reg_a = rep.a;
        set.reg_b = rep.b;
        out.extra_json.emplace_back("certified_set.json", io::to_json(set));
    }
    return out;
}

// ---- cover / verify ----

Majorant parse_majorant(const std::string& spec) {
    const std::string prefix = "power:";
    if (spec.rfind(prefix, 0) != 0) throw InvalidInput("cover: --majorant must look like power:p,d");
    const auto v = parse_reals(spec.substr(prefix.size()), "majorant");
    if (v.size() != 2) throw InvalidInput("cover: --majorant must look like power:p,d");
    return Majorant::power(v[0], v[1]);
}

Outcome cover(Context& ctx) {
    const auto mu = io::measure_from_json(ctx.json_input("measure"));
    BallCover c;
    if (ctx.has("H")) {
        if (ctx.has("majorant")) throw InvalidInput("cover: --H and --majorant are exclusive");
        // the H cover fixes its own parameters
        if (ctx.str("alpha") != "0.999" || ctx.str("beta") != "2.001" || ctx.str("gamma") != "0.49")
            throw InvalidInput("cover: --alpha/--beta/--gamma apply to --majorant only");
        const double H = ctx.real("H"), d = ctx.real("d");
        c = ctx.timed("cartan_cover", [&] { return cartan_cover(mu, H, d); });
    } else {
        if (!ctx.has("majorant")) throw InvalidInput("cover: give --majorant power:p,d or --H");
        const auto phi = parse_majorant(ctx.str("majorant"));
        GorinParams gp{ctx.real("alpha"), ctx.real("beta"), ctx.real("gamma")};
        c = ctx.timed("gorin_cover", [&] { return gorin_cover(mu, phi, gp); });
    }
    Outcome out;
    out.report = io::to_json(c);
    const bool budget = c.within_budget();
    const bool majorant = c.majorant_sum <= c.mass * (1.0 + 1e-12);
    const bool disjoint = tau_balls_disjoint(c);
    out.report["invariants"] = {{"budget", budget}, {"majorant_sum", majorant}, {"tau_balls_disjoint", disjoint}};
    if (!budget) out.failures.push_back("budget_used " + fmt(c.budget_used) + " exceeds " + fmt(c.budget_limit));
    if (!majorant) out.failures.push_back("majorant sum " + fmt(c.majorant_sum) + " exceeds mass " + fmt(c.mass));
    if (!disjoint) out.failures.push_back("tau balls overlap");
    return out;
}

void cartan_failures(const CartanReport& rep, Outcome& out) {
    if (!rep.violations.empty()) {
        out.failures.push_back(std::to_string(rep.violations.size()) + " grid points fall below the bound " +
                               fmt(rep.bound));
        for (std::size_t i = 0; i < std::min<std::size_t>(rep.violations.size(), 10); ++i)
            out.failures.push_back("  at " + io::to_json(rep.violations[i]).dump());
    }
    if (!rep.cover.within_budget())
        out.failures.push_back("budget_used " + fmt(rep.cover.budget_used) + " exceeds " + fmt(rep.cover.budget_limit));
}

Outcome verify(Context& ctx) {
    const auto f = ctx.function();
    const auto c = io::cover_from_json(ctx.json_input("cover"));
    const auto grid = GridSpec::parse(ctx.str("grid"));
    const double bound = ctx.real("bound"), tol = ctx.real("tolerance");
    const auto rep = ctx.timed("verify_cartan", [&] { return verify_cartan(f, c, bound, grid, tol); });
    Outcome out;
    out.report = io::to_json(rep);
    cartan_failures(rep, out);
    return out;
}

// ---- remez / mcol1 ----

Outcome remez_like(Context& ctx, bool mdim) {
    const DSet set = ctx.set();
    const Point x = ctx.point("x");
    const double t = ctx.real("t"), r = ctx.real("r");
    const Point oc = ctx.has("omega-center") ? ctx.point("omega-center") : x;
    const auto radii = ctx.list("omega-radii");
    const std::size_t res = ctx.count("sup-resolution");
    std::optional<HolomorphicMapSample> F;
    std::optional<Function> f;
    if (mdim) F = ctx.map();
    else f = ctx.function();

    Outcome out;
    for (double rad : radii) {
        const auto om = ball_restrict(set, oc, rad).set;
        if (om.empty()) throw InvalidInput(ctx.command() + ": omega ball of radius " + fmt(rad) + " holds no sample");
        out.experiments.push_back(ctx.timed("gap", [&] {
            return mdim ? mcol1_gap(*F, set, x, t, r, om, res) : remez_gap(*f, set, x, t, r, om, res);
        }));
    }

    // Shrinking omega about a fixed centre can only lower sup over omega.
    std::vector<std::size_t> order(radii.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return radii[a] > radii[b]; });
    for (std::size_t k = 1; k < order.size(); ++k) {
        const auto& big = out.experiments[order[k - 1]];
        const auto& small = out.experiments[order[k]];
        if (small.lhs < big.lhs - 1e-12 * (1.0 + std::abs(big.lhs)))
            out.failures.push_back("lhs decreased when omega shrank from " + fmt(radii[order[k - 1]]) + " to " +
                                   fmt(radii[order[k]]));
    }

    json exps = json::array();
    auto& curve = out.curves.emplace_back(
        CsvCurve{ctx.command() + ".csv", {"omega_radius", "epsilon", "sup_omega", "lhs", "log_term", "regressor"}, {}});
    std::optional<double> c;
    if (ctx.has("c")) c = ctx.real("c");
    for (std::size_t i = 0; i < radii.size(); ++i) {
        const auto& e = out.experiments[i];
        auto j = io::to_json(e);
        j["regressor"] = e.regressor();
        if (c) {
            const bool ok = remez_holds(e, *c);
            j["holds"] = ok;
            if (!ok)
                out.failures.push_back("inequality fails for omega radius " + fmt(radii[i]) + ": lhs " + fmt(e.lhs) +
                                       " > c * regressor " + fmt(*c * e.regressor()));
        }
        exps.push_back(std::move(j));
        curve.rows.push_back({radii[i], e.epsilon, e.sup_omega, e.lhs, e.log_term, e.regressor()});
    }
    out.report["x"] = io::to_json(x);
    out.report["t"] = t;
    out.report["r"] = r;
    out.report["c"] = c ? json(*c) : json(nullptr);
    if (F) out.report["map"] = F->name;
    out.report["experiments"] = std::move(exps);
    return out;
}

Outcome remez(Context& ctx) { return remez_like(ctx, false); }
Outcome mcol1(Context& ctx) { return remez_like(ctx, true); }

// ---- bmo / revholder / distcheck / sharpness ----

Outcome bmo(Context& ctx) {
    const DSet set = ctx.set();
    const auto f = ctx.function();
    std::vector<Point> centers;
    if (ctx.str("centers") == "set") centers = set.points;
    else centers = io::dset_from_json(ctx.json_input("centers")).points;
    const std::size_t cap = ctx.count("max-centers");
    if (cap > 0 && centers.size() > cap) {
        const std::size_t stride = (centers.size() + cap - 1) / cap;
        std::vector<Point> kept;
        for (std::size_t i = 0; i < centers.size(); i += stride) kept.push_back(centers[i]);
        centers = std::move(kept);
    }
    const auto radii = ctx.has("radii") ? ctx.list("radii") : dyadic_radii(set);
    const auto rep = ctx.timed("bmo_norm", [&] { return bmo_norm(f, set, centers, radii); });

    Outcome out;
    out.report = io::to_json(rep);
    if (!ctx.flag("list-balls")) out.report.erase("balls");
    out.report["centers"] = centers.size();
    auto& curve = out.curves.emplace_back(CsvCurve{"bmo.csv", {"radius", "max_oscillation", "balls"}, {}});
    for (double rad : radii) {
        double worst = 0.0;
        std::size_t n = 0;
        for (const auto& b : rep.balls)
            if (b.radius == rad) worst = std::max(worst, b.oscillation), ++n;
        if (n > 0) curve.rows.push_back({rad, worst, static_cast<double>(n)});
    }
    if (!std::isfinite(rep.bmo_norm) || rep.bmo_norm < 0.0) out.failures.push_back("bmo_norm is not finite");
    if (rep.clamped) out.warnings.push_back("-inf samples were clamped to " + fmt(kClampValue));
    return out;
}

Outcome revholder(Context& ctx) {
    const DSet set = ctx.set();
    const auto f = ctx.function();
    const Point x = ctx.point("x");
    const double t = ctx.real("t");
    auto ps = ctx.list("p-list");
    std::sort(ps.begin(), ps.end());
    const auto rep = ctx.timed("reverse_holder", [&] { return reverse_holder(f, set, x, t, ps); });

    Outcome out;
    out.report = io::to_json(rep);
    auto& curve = out.curves.emplace_back(CsvCurve{"revholder.csv", {"p", "ratio"}, {}});
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
        const auto& row = rep.rows[i];
        curve.rows.push_back({row.p, row.ratio});
        if (row.p == 1.0 && row.ratio != 1.0) out.failures.push_back("ratio at p = 1 is " + fmt(row.ratio) + ", not 1");
        if (i > 0 && row.ratio < rep.rows[i - 1].ratio * (1.0 - 1e-12))
            out.failures.push_back("ratio decreases between p = " + fmt(rep.rows[i - 1].p) + " and p = " + fmt(row.p));
    }
    if (ctx.has("c-hat")) {
        require_set_regularity(set, "revholder");
        const double r = ctx.real("r");
        const auto m = ctx.timed("normalize_m1m2", [&] { return normalize_m1m2(f, r); });
        const double s = ctx.real("c-hat") * (m.M1 - m.M2);
        const double bound = reverse_holder_bound(s, set.dimension_d, *set.reg_a, *set.reg_b, r);
        out.report["bound"] = {{"c_hat", ctx.real("c-hat")}, {"M1", m.M1}, {"M2", m.M2}, {"s", s}, {"value", io::real(bound)}};
        if (!(rep.sup_ratio <= bound))
            out.failures.push_back("sup ratio " + fmt(rep.sup_ratio) + " exceeds the bound " + fmt(bound));
    }
    return out;
}

Outcome distcheck(Context& ctx) {
    const DSet set = ctx.set();
    const auto f = ctx.function();
    require_set_regularity(set, "distcheck");
    DistributionParams p;
    p.r = ctx.real("r");
    p.a = *set.reg_a;
    p.d = set.dimension_d;
    p.c_hat = ctx.real("c-hat");
    const auto m = ctx.timed("normalize_m1m2", [&] { return normalize_m1m2(f, p.r); });
    p.M1 = m.M1;
    p.M2 = m.M2;
    const Point x = ctx.point("x");
    const double t = ctx.real("t");
    const auto lambda = ctx.list("lambda");
    const auto rep = ctx.timed("distribution_check", [&] { return distribution_check(f, set, x, t, lambda, p); });

    Outcome out;
    out.report = io::to_json(rep);
    out.report["M1"] = m.M1;
    out.report["M2"] = m.M2;
    out.report["c_hat"] = p.c_hat;
    auto& curve = out.curves.emplace_back(CsvCurve{"distribution.csv", {"lambda", "D", "bound"}, {}});
    for (std::size_t i = 0; i < rep.lambda_grid.size(); ++i) {
        curve.rows.push_back({rep.lambda_grid[i], rep.D_values[i], rep.bound_curve[i]});
        if (i > 0 && rep.D_values[i] > rep.D_values[i - 1])
            out.failures.push_back("D increases at lambda = " + fmt(rep.lambda_grid[i]));
    }
    if (!(std::abs(rep.mean_f_prime - rep.layer_cake) <= rep.layer_cake_tolerance))
        out.failures.push_back("layer-cake mismatch: " + fmt(rep.mean_f_prime) + " vs " + fmt(rep.layer_cake) +
                               " (tolerance " + fmt(rep.layer_cake_tolerance) + ")");
    return out;
}

Outcome sharpness(Context& ctx) {
    const DSet set = ctx.set();
    const double d = ctx.has("d") ? ctx.real("d") : set.dimension_d;
    const auto scales = scales_for(ctx, set.diameter);
    const auto rep = ctx.timed("sharpness_experiment", [&] {
        return sharpness_experiment(set, d, scales, ctx.real("C"), ctx.count("max-centers"));
    });
    Outcome out;
    out.report = io::to_json(rep);
    auto& curve = out.curves.emplace_back(CsvCurve{"sharpness.csv", {"t", "max_ratio"}, {}});
    for (const auto& row : rep.rows) curve.rows.push_back({row.t, row.max_ratio});
    if (ctx.has("expect")) {
        const auto want = ctx.str("expect");
        if (want != "bounded" && want != "divergent") throw InvalidInput("sharpness: --expect is bounded or divergent");
        if ((want == "divergent") != rep.divergent)
            out.failures.push_back("expected " + want + " but growth is " + fmt(rep.growth));
    }
    return out;
}

// ---- multidim ----

Outcome envelope(Context& ctx) {
    const auto F = ctx.map();
    const auto grid = half_ball_grid(F.n, ctx.count("points"), ctx.seed());
    const auto rep = ctx.timed("envelope_check", [&] { return envelope_check(F, grid); });
    Outcome out;
    out.report = io::to_json(rep);
    out.report["map"] = F.name;
    out.report["grid"] = grid.description;
    if (rep.violations) out.failures.push_back(std::to_string(rep.violations) + " grid points violate the envelope");
    return out;
}

Outcome mdim_cartan(Context& ctx) {
    const auto F = ctx.map();
    const auto grid = half_ball_grid(F.n, ctx.count("points"), ctx.seed());
    std::optional<double> p;
    if (ctx.has("p")) p = ctx.real("p");
    const double H = ctx.real("H"), d = ctx.real("d"), tol = ctx.real("tolerance");
    const auto rep = ctx.timed("multidim_cartan", [&] { return multidim_cartan(F, H, d, grid, p, tol); });
    Outcome out;
    out.report = io::to_json(rep);
    out.report["map"] = F.name;
    cartan_failures(rep, out);
    return out;
}

Outcome ellipticity(Context& ctx) {
    const auto F = ctx.map();
    std::vector<Point> zeros;
    if (ctx.has("zero")) zeros.push_back(ctx.point("zero"));
    else
        for (const auto& z : F.known_zeros) zeros.push_back(z.point);
    EllipticityOptions opts;
    opts.seed = ctx.seed();
    const auto tg = ctx.list("t-grid");
    const std::size_t dirs = ctx.count("directions");
    Outcome out;
    json probes = json::array();
    for (const auto& z : zeros) {
        const auto res = ctx.timed("ellipticity_probe", [&] { return ellipticity_probe(F, z, dirs, tg, opts); });
        probes.push_back(io::to_json(res));
        if (ctx.has("expect") && to_string(res.verdict) != ctx.str("expect"))
            out.failures.push_back("zero " + io::to_json(z).dump() + " classified " + to_string(res.verdict) +
                                   ", expected " + ctx.str("expect"));
    }
    out.report["map"] = F.name;
    out.report["probes"] = std::move(probes);
    return out;
}

const OptionSpec kSet{"set", "sample set JSON", std::nullopt, true, true};
const OptionSpec kFunction{"function", "function spec JSON (file or inline)", std::nullopt, true, true};
const OptionSpec kMap{"map", "map spec JSON or gallery name", std::nullopt, true, true};
const OptionSpec kX{"x", "ball centre, comma-separated real coordinates", std::nullopt, true};
const OptionSpec kT{"t", "ball radius", std::nullopt, true};
const OptionSpec kRatio{"ratio", "geometric scale ratio"};
const OptionSpec kMMin{"m-min", "first scale exponent", "1"};
const OptionSpec kMMax{"m-max", "last scale exponent"};
const OptionSpec kScales{"scales", "explicit comma-separated scales"};
const OptionSpec kPoints{"points", "low-discrepancy points in B_{1/2}", "100000"};

std::vector<CommandSpec> build() {
    const std::string two_thirds = io::format_double(2.0 / 3.0);
    return {
        {"gen-set", "generate an IFS sample set",
         {{"ifs", "cantor | segment | four-corner | triangle-dust | custom:r,angle,tx,ty;... [@scale,sx,sy]", std::nullopt, true},
          {"depth", "IFS depth", std::nullopt, true},
          {"ambient-n", "complex dimension of the ambient space", "1"},
          {"base", "barycenter | first-fixed-point", "barycenter"},
          {"max-points", "sample size cap", "1048576"},
          kRatio, kMMin, kMMax, kScales},
         gen_set},
        {"regularity", "certify upper/lower regularity constants",
         {kSet, kRatio, kMMin, kMMax, kScales, {"write-set", "also write certified_set.json", "false"}},
         regularity},
        {"cover", "greedy ball cover of an atomic measure",
         {{"measure", "measure JSON {atoms, masses}", std::nullopt, true, true},
          {"majorant", "power:p,d"},
          {"H", "Cartan parameter (replaces --majorant)"},
          {"d", "exponent for --H", "1"},
          {"alpha", "cover alpha", "0.999"},
          {"beta", "cover beta", "2.001"},
          {"gamma", "cover gamma", "0.49"}},
         cover},
        {"verify", "check f >= bound off a cover on a rectangular grid",
         {kFunction,
          {"cover", "cover JSON", std::nullopt, true, true},
          {"bound", "lower bound", std::nullopt, true},
          {"grid", "xmin,xmax,ymin,ymax,n", "-2,2,-2,2,200"},
          {"tolerance", "absolute tolerance", "1e-9"}},
         verify},
        {"remez", "Remez gaps for nested omega balls",
         {kSet, kFunction, kX, kT,
          {"r", "normalisation radius", two_thirds},
          {"omega-center", "centre of the omega balls (default x)"},
          {"omega-radii", "comma-separated omega radii", std::nullopt, true},
          {"sup-resolution", "samples for the sup over the disc", "1024"},
          {"c", "assert lhs <= c * regressor"}},
         remez},
        {"bmo", "BMO norm over sample-centred balls",
         {kSet, kFunction,
          {"centers", "'set' or a set JSON holding the centres", "set", false, true},
          {"max-centers", "keep every k-th centre so at most this many remain (0 = all)", "0"},
          {"radii", "comma-separated radii (default dyadic)"},
          {"list-balls", "include every ball in the report", "false"}},
         bmo},
        {"revholder", "reverse Hoelder ratios",
         {kSet, kFunction, kX, kT,
          {"p-list", "exponents, inf allowed", "1,2,4,8,16,32,inf"},
          {"c-hat", "fitted constant; enables the bound check"},
          {"r", "normalisation radius", two_thirds}},
         revholder},
        {"distcheck", "distribution function of f' against its bound",
         {kSet, kFunction, kX, kT,
          {"lambda", "start:stop:step or a list", "0:20:0.05"},
          {"c-hat", "fitted constant", std::nullopt, true},
          {"r", "normalisation radius", two_thirds}},
         distcheck},
        {"sharpness", "eps_t / t^d across scales",
         {kSet, kRatio, kMMin, kMMax, kScales,
          {"d", "exponent (default: the set's dimension)"},
          {"C", "constant", "1"},
          {"max-centers", "centres per scale", "4096"},
          {"expect", "bounded | divergent"}},
         sharpness},
        {"envelope", "lower envelope of log|F| on B_{1/2}", {kMap, kPoints}, envelope},
        {"mdim-cartan", "Cartan bound for log|F| off the zero cover",
         {kMap, kPoints,
          {"H", "Cartan parameter", std::nullopt, true},
          {"d", "exponent", "2"},
          {"p", "mass per zero (>= k)"},
          {"tolerance", "absolute tolerance", "1e-9"}},
         mdim_cartan},
        {"ellipticity", "direction exponents of |F|^2 at its zeros",
         {kMap,
          {"zero", "probe this zero only"},
          {"directions", "low-discrepancy directions besides the axes", "32"},
          {"t-grid", "radii for the log-log fit", "1e-6,2e-6,4e-6,8e-6,1.6e-5,3.2e-5,6.4e-5,1.28e-4"},
          {"expect", "elliptic | non-elliptic | inconclusive"}},
         ellipticity},
        {"mcol1", "Remez gaps for log|F| on a set in C^n",
         {kSet, kMap, kX, kT,
          {"r", "normalisation radius in (1/2, 1]", "0.6"},
          {"omega-center", "centre of the omega balls (default x)"},
          {"omega-radii", "comma-separated omega radii", std::nullopt, true},
          {"sup-resolution", "samples for the sup over the ball", "4096"},
          {"c", "assert lhs <= c * regressor"}},
         mcol1},
    };
}

} // namespace

std::vector<double> parse_reals(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_real(item, what));
    if (out.empty()) throw InvalidInput(what + ": empty list");
    return out;
}

bool Context::has(const std::string& key) const { return params_.count(key) > 0; }

std::string Context::str(const std::string& key) const {
    auto it = params_.find(key);
    if (it == params_.end()) throw InvalidInput(command_ + ": missing --" + key);
    return it->second;
}

double Context::real(const std::string& key) const {
    const double v = parse_real(str(key), "--" + key);
    if (!std::isfinite(v)) throw InvalidInput("--" + key + " must be finite");
    return v;
}

long Context::integer(const std::string& key) const {
    const std::string s = trim(str(key));
    std::size_t used = 0;
    long v = 0;
    try {
        v = std::stol(s, &used);
    } catch (const std::logic_error&) {
        used = 0;
    }
    if (used == 0 || used != s.size()) throw InvalidInput("--" + key + ": '" + s + "' is not an integer");
    return v;
}

std::size_t Context::count(const std::string& key) const {
    const long v = integer(key);
    if (v < 0) throw InvalidInput("--" + key + " must be nonnegative");
    return static_cast<std::size_t>(v);
}

bool Context::flag(const std::string& key) const {
    const auto s = trim(str(key));
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw InvalidInput("--" + key + " must be true or false");
}

Point Context::point(const std::string& key) const {
    const auto v = parse_reals(str(key), "--" + key);
    if (v.size() == 1) return Point::planar(v[0], 0.0);
    if (v.size() % 2 != 0) throw InvalidInput("--" + key + ": a point needs (re, im) pairs");
    Point p;
    for (std::size_t i = 0; i < v.size(); i += 2) p.z.emplace_back(v[i], v[i + 1]);
    if (!p.finite()) throw InvalidInput("--" + key + ": coordinates must be finite");
    return p;
}

std::vector<double> Context::list(const std::string& key) const {
    const auto s = str(key);
    if (s.find(':') == std::string::npos) return parse_reals(s, "--" + key);
    std::vector<double> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(parse_real(item, "--" + key));
    if (parts.size() != 3 || !(parts[2] > 0.0) || !(parts[1] >= parts[0]) || !std::isfinite(parts[1]))
        throw InvalidInput("--" + key + ": expected start:stop:step with step > 0");
    const auto n = static_cast<std::size_t>(std::llround((parts[1] - parts[0]) / parts[2]));
    if (n > 10'000'000) throw InvalidInput("--" + key + ": range too long");
    std::vector<double> out;
    for (std::size_t i = 0; i <= n; ++i) out.push_back(parts[0] + static_cast<double>(i) * parts[2]);
    return out;
}

json Context::json_input(const std::string& key) const {
    const auto s = trim(str(key));
    if (!s.empty() && s.front() == '{') {
        try {
            return json::parse(s);
        } catch (const json::parse_error& e) {
            throw InvalidInput("--" + key + ": invalid inline JSON: " + e.what());
        }
    }
    return io::read_json(s);
}

DSet Context::set(const std::string& key) const { return io::dset_from_json(json_input(key)); }

Function Context::function(const std::string& key) const { return io::function_from_json(json_input(key)); }

HolomorphicMapSample Context::map(const std::string& key) const {
    const auto s = trim(str(key));
    if (!s.empty() && s.front() != '{' && !s.ends_with(".json")) return gallery::by_name(s);
    return io::map_from_json(json_input(key));
}

const std::vector<CommandSpec>& commands() {
    static const std::vector<CommandSpec> all = build();
    return all;
}

const CommandSpec* find_command(const std::string& name) {
    for (const auto& c : commands())
        if (c.name == name) return &c;
    return nullptr;
}

} // namespace cartan_lab::cli
