#include "cartan_lab/geometry.hpp"

#include "cartan_lab/error.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace cartan_lab {

double DSet::total_mass() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

double moran_dimension(std::span<const double> ratios, std::size_t ambient_n) {
    if (ratios.empty()) throw InvalidInput("moran_dimension: empty ratio list");
    for (double r : ratios)
        if (!(r > 0.0 && r < 1.0)) throw InvalidInput("moran_dimension: ratios must lie in (0,1)");
    if (ratios.size() == 1) throw DegenerateError("moran_dimension: a single map has no positive solution");

    auto excess = [&](double d) {
        double s = 0.0;
        for (double r : ratios) s += std::pow(r, d);
        return s - 1.0;
    };
    double lo = 0.0;
    double hi = 2.0 * static_cast<double>(ambient_n);
    if (excess(hi) > 0.0)
        throw InvalidInput("moran_dimension: similarity dimension exceeds the ambient dimension");
    // excess is strictly decreasing, positive at 0 (N >= 2 maps)
    while (hi - lo > 1e-14) {
        double mid = 0.5 * (lo + hi);
        if (excess(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

namespace {

struct Cross {
    double x, y;
};

double cross(const Cross& o, const Cross& a, const Cross& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool is_planar(std::span<const Point> points) {
    for (const auto& p : points)
        for (std::size_t k = 1; k < p.dim(); ++k)
            if (p.z[k] != points.front().z[k]) return false;
    return true;
}

} // namespace

double cloud_diameter(std::span<const Point> points) {
    if (points.size() < 2) return 0.0;
    if (!is_planar(points)) {
        double best = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i)
            for (std::size_t j = i + 1; j < points.size(); ++j) best = std::max(best, distance_sq(points[i], points[j]));
        return std::sqrt(best);
    }
    std::vector<Cross> pts;
    pts.reserve(points.size());
    for (const auto& p : points) pts.push_back({p.z[0].real(), p.z[0].imag()});
    std::sort(pts.begin(), pts.end(), [](const Cross& a, const Cross& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    // Andrew's monotone chain
    std::vector<Cross> hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k > 1 ? k - 1 : k);
    double best = 0.0;
    for (std::size_t i = 0; i < hull.size(); ++i)
        for (std::size_t j = i + 1; j < hull.size(); ++j) {
            double dx = hull[i].x - hull[j].x, dy = hull[i].y - hull[j].y;
            best = std::max(best, dx * dx + dy * dy);
        }
    if (hull.size() < 2) {
        // collinear degenerate input: fall back to the extremes of the sort
        double dx = pts.back().x - pts.front().x, dy = pts.back().y - pts.front().y;
        best = dx * dx + dy * dy;
    }
    return std::sqrt(best);
}

DSet generate_ifs_set(std::span<const Similarity> maps, int depth, std::size_t ambient_n,
                      const GenerateOptions& options) {
    if (maps.empty()) throw InvalidInput("generate_ifs_set: no maps");
    if (depth < 1) throw InvalidInput("generate_ifs_set: depth must be >= 1");
    if (ambient_n < 1) throw InvalidInput("generate_ifs_set: ambient dimension must be >= 1");

    std::vector<double> ratios;
    for (const auto& m : maps) ratios.push_back(m.ratio);
    const double d = moran_dimension(ratios, ambient_n);

    // overflow-safe size check
    double count = 1.0;
    for (int i = 0; i < depth; ++i) {
        count *= static_cast<double>(maps.size());
        if (count > static_cast<double>(options.max_points))
            throw ResourceError("generate_ifs_set: " + std::to_string(maps.size()) + "^" + std::to_string(depth) +
                                " points exceed the cap of " + std::to_string(options.max_points));
    }

    std::vector<double> w(maps.size());
    for (std::size_t i = 0; i < maps.size(); ++i) w[i] = std::pow(maps[i].ratio, d);

    cplx base{0.0, 0.0};
    if (options.base == BasePoint::barycenter) {
        // c = sum_i w_i S_i(c)
        cplx num{0.0, 0.0}, den{1.0, 0.0};
        for (std::size_t i = 0; i < maps.size(); ++i) {
            num += w[i] * maps[i].translation;
            den -= w[i] * maps[i].linear();
        }
        base = num / den;
    } else {
        base = maps[0].translation / (cplx{1.0, 0.0} - maps[0].linear());
    }

    std::vector<cplx> pts{base};
    std::vector<double> wts{1.0};
    for (int level = 0; level < depth; ++level) {
        std::vector<cplx> next;
        std::vector<double> next_w;
        next.reserve(pts.size() * maps.size());
        next_w.reserve(pts.size() * maps.size());
        for (std::size_t i = 0; i < maps.size(); ++i)
            for (std::size_t j = 0; j < pts.size(); ++j) {
                next.push_back(maps[i].apply(pts[j]));
                next_w.push_back(wts[j] * w[i]);
            }
        pts = std::move(next);
        wts = std::move(next_w);
    }

    // Renormalise so the total mass is 1 to rounding.
    const double total = std::accumulate(wts.begin(), wts.end(), 0.0);
    for (auto& x : wts) x /= total;

    DSet set;
    set.points.reserve(pts.size());
    for (const auto& c : pts) {
        Point p = Point::origin(ambient_n);
        p.z[0] = c;
        set.points.push_back(std::move(p));
    }
    set.weights = std::move(wts);
    set.dimension_d = d;
    set.depth = depth;

    // Attractor lies in B(base, R) with R = max_i |S_i(base) - base| / (1 - rho).
    double rho = 0.0, spread = 0.0;
    for (const auto& m : maps) {
        rho = std::max(rho, m.ratio);
        spread = std::max(spread, std::abs(m.apply(base) - base));
    }
    const double outer = spread / (1.0 - rho);
    const double cell = std::pow(rho, depth);
    const double dc = cloud_diameter(set.points);
    // every point of K is within cell * diam(K) <= cell * 2R of its representative
    set.diameter = std::min(2.0 * outer, dc + 4.0 * cell * outer);
    set.resolution = cell * set.diameter;
    return set;
}

std::vector<double> geometric_scales(double diameter, double ratio, int m_min, int m_max) {
    std::vector<double> out;
    for (int m = m_min; m <= m_max; ++m) out.push_back(diameter * std::pow(ratio, m));
    return out;
}

PointIndex::PointIndex(std::span<const Point> points) : points_(points), order_(points.size()) {
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
        return points[a].z[0].real() < points[b].z[0].real();
    });
    keys_.reserve(order_.size());
    for (auto i : order_) keys_.push_back(points[i].z[0].real());
}

std::vector<std::size_t> PointIndex::query(const Point& center, double radius) const {
    std::vector<std::size_t> out;
    for_each_in_ball(center, radius, [&](std::size_t i) { out.push_back(i); });
    std::sort(out.begin(), out.end());
    return out;
}

RegularityReport regularity_constants(const DSet& set, std::span<const double> scales) {
    if (set.empty()) throw DegenerateError("regularity_constants: empty set");
    if (!(set.diameter > 0.0))
        throw ResolutionError("regularity_constants: set has zero diameter, no scale is resolvable");
    if (scales.empty()) throw InvalidInput("regularity_constants: no scales");

    std::vector<double> ts(scales.begin(), scales.end());
    std::sort(ts.begin(), ts.end(), std::greater<>());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    for (double t : ts) {
        if (!(t > 0.0) || t > set.diameter * (1.0 + 1e-12))
            throw InvalidInput("regularity_constants: scale outside (0, diam]");
        if (t < set.resolution * (1.0 - 1e-12)) {
            std::ostringstream msg;
            msg << "regularity_constants: scale " << t << " is finer than the sampling resolution " << set.resolution;
            throw ResolutionError(msg.str());
        }
    }

    const PointIndex index(set.points);
    RegularityReport rep;
    rep.scales = ts;
    rep.a = 0.0;
    rep.b = std::numeric_limits<double>::infinity();
    for (double t : ts) {
        const double td = std::pow(t, set.dimension_d);
        double hi = 0.0, lo = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < set.size(); ++i) {
            if (set.weights[i] <= 0.0) continue;  // centres must lie in the support
            double m = 0.0;
            index.for_each_in_ball(set.points[i], t, [&](std::size_t j) { m += set.weights[j]; });
            hi = std::max(hi, m / td);
            lo = std::min(lo, m / td);
        }
        rep.upper.push_back(hi);
        rep.lower.push_back(lo);
        rep.a = std::max(rep.a, hi);
        rep.b = std::min(rep.b, lo);
    }
    return rep;
}

DSet certify(DSet set, std::span<const double> scales) {
    auto rep = regularity_constants(set, scales);
    set.reg_a = rep.a;
    set.reg_b = rep.b;
    return set;
}

BallRestriction ball_restrict(const DSet& set, const Point& center, double radius) {
    if (!(radius > 0.0)) throw InvalidInput("ball_restrict: radius must be positive");
    BallRestriction out;
    out.set.dimension_d = set.dimension_d;
    out.set.depth = set.depth;
    out.set.resolution = set.resolution;
    out.set.reg_a = set.reg_a;  // upper regularity passes to subsets; lower does not
    for (std::size_t i = 0; i < set.size(); ++i) {
        if (in_closed_ball(set.points[i], center, radius)) {
            out.set.points.push_back(set.points[i]);
            out.set.weights.push_back(set.weights[i]);
            out.mass += set.weights[i];
        }
    }
    out.set.diameter = std::min(set.diameter, 2.0 * radius);
    return out;
}

double ball_mass(const DSet& set, const Point& center, double radius) {
    double m = 0.0;
    for (std::size_t i = 0; i < set.size(); ++i)
        if (in_closed_ball(set.points[i], center, radius)) m += set.weights[i];
    return m;
}

namespace builtin {

std::vector<Similarity> cantor() { return {{1.0 / 3.0, 0.0, {0.0, 0.0}}, {1.0 / 3.0, 0.0, {2.0 / 3.0, 0.0}}}; }

std::vector<Similarity> segment() { return {{0.5, 0.0, {0.0, 0.0}}, {0.5, 0.0, {0.5, 0.0}}}; }

std::vector<Similarity> four_corner() {
    const double r = 0.25, s = 0.75;
    return {{r, 0.0, {0.0, 0.0}}, {r, 0.0, {s, 0.0}}, {r, 0.0, {0.0, s}}, {r, 0.0, {s, s}}};
}

std::vector<Similarity> triangle_dust() {
    const double r = 1.0 / 3.0;
    return {{r, 0.0, {0.0, 0.0}}, {r, 0.0, {2.0 / 3.0, 0.0}}, {r, 0.0, {1.0 / 3.0, std::sqrt(3.0) / 3.0}}};
}

std::vector<Similarity> transformed(std::vector<Similarity> maps, double scale, cplx shift) {
    // conjugate by T(z) = scale*z + shift: T S T^{-1}(z) = a z + scale*b + shift - a*shift
    for (auto& m : maps) m.translation = scale * m.translation + shift - m.linear() * shift;
    return maps;
}

namespace {

std::vector<double> split_numbers(const std::string& s, char sep) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size() && item.find_first_not_of(" \t", used) != std::string::npos)
                throw InvalidInput("bad number '" + item + "'");
        } catch (const std::logic_error&) {
            throw InvalidInput("bad number '" + item + "'");
        }
    }
    return out;
}

} // namespace

std::vector<Similarity> parse_ifs(const std::string& spec) {
    std::string body = spec, transform;
    if (auto at = spec.find('@'); at != std::string::npos) {
        body = spec.substr(0, at);
        transform = spec.substr(at + 1);
    }
    std::vector<Similarity> maps;
    if (body == "cantor")
        maps = cantor();
    else if (body == "segment")
        maps = segment();
    else if (body == "four-corner")
        maps = four_corner();
    else if (body == "triangle-dust")
        maps = triangle_dust();
    else if (body.rfind("custom:", 0) == 0) {
        std::stringstream ss(body.substr(7));
        std::string item;
        while (std::getline(ss, item, ';')) {
            auto v = split_numbers(item, ',');
            if (v.size() != 4) throw InvalidInput("parse_ifs: each map needs ratio,angle,tx,ty");
            if (!(v[0] > 0.0 && v[0] < 1.0)) throw InvalidInput("parse_ifs: ratio must lie in (0,1)");
            maps.push_back({v[0], v[1], {v[2], v[3]}});
        }
        if (maps.empty()) throw InvalidInput("parse_ifs: empty custom map list");
    } else {
        throw InvalidInput("parse_ifs: unknown generator '" + body + "'");
    }
    if (!transform.empty()) {
        auto v = split_numbers(transform, ',');
        if (v.size() != 3 || !(v[0] > 0.0)) throw InvalidInput("parse_ifs: transform must be scale,sx,sy");
        maps = transformed(std::move(maps), v[0], {v[1], v[2]});
    }
    return maps;
}

DSet circle_arc(cplx center, double radius, double angle0, double angle1, int depth) {
    if (!(radius > 0.0) || !(angle1 > angle0)) throw InvalidInput("circle_arc: need radius > 0 and angle1 > angle0");
    if (depth < 1 || depth > 20) throw InvalidInput("circle_arc: depth must lie in [1, 20]");
    const std::size_t count = std::size_t{1} << depth;
    const double step = (angle1 - angle0) / static_cast<double>(count);
    DSet set;
    for (std::size_t i = 0; i < count; ++i) {
        // midpoint of each sub-arc, one per "cylinder"
        set.points.push_back(Point{center + std::polar(radius, angle0 + (static_cast<double>(i) + 0.5) * step)});
        set.weights.push_back(1.0 / static_cast<double>(count));
    }
    set.dimension_d = 1.0;
    set.depth = depth;
    const double span = angle1 - angle0;
    set.diameter = span >= M_PI ? 2.0 * radius : 2.0 * radius * std::sin(0.5 * span);
    set.resolution = radius * step;
    return set;
}

DSet dyadic_sequence(int count) {
    if (count < 2 || count > 60) throw InvalidInput("dyadic_sequence: count must lie in [2, 60]");
    DSet set;
    double total = 0.0;
    for (int k = 0; k < count; ++k) total += std::ldexp(1.0, -k);
    for (int k = 0; k < count; ++k) {
        set.points.push_back(Point::planar(std::ldexp(1.0, -k), 0.0));
        set.weights.push_back(std::ldexp(1.0, -k) / total);
    }
    set.points.push_back(Point::planar(0.0, 0.0));
    set.weights.push_back(0.0);
    set.dimension_d = 1.0;
    set.depth = count;
    set.diameter = 1.0;
    set.resolution = std::ldexp(1.0, -(count - 1));
    return set;
}

} // namespace builtin

} // namespace cartan_lab
