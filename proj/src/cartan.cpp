#include "cartan_lab/cartan.hpp"

#include "cartan_lab/error.hpp"
#include "cartan_lab/lowdisc.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <sstream>

namespace cartan_lab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

Majorant Majorant::power(double p, double d) {
    if (!(p > 0.0) || !(d > 0.0) || !std::isfinite(p) || !std::isfinite(d))
        throw InvalidInput("Majorant::power: p and d must be positive and finite");
    return Majorant{p, d};
}

double Majorant::limit() const { return kInf; }

bool BallCover::contains(const Point& z) const {
    for (const auto& b : balls)
        if (distance_sq(z, b.center) <= b.radius * b.radius) return true;
    return false;
}

GridSpec GridSpec::rectangle(double xmin, double xmax, double ymin, double ymax, std::size_t n) {
    if (n < 2 || !(xmax > xmin) || !(ymax > ymin)) throw InvalidInput("GridSpec: need n >= 2 and a nonempty rectangle");
    GridSpec g;
    g.nx = g.ny = n;
    g.points.reserve(n * n);
    for (std::size_t j = 0; j < n; ++j) {
        const double y = ymin + (ymax - ymin) * static_cast<double>(j) / static_cast<double>(n - 1);
        for (std::size_t i = 0; i < n; ++i) {
            const double x = xmin + (xmax - xmin) * static_cast<double>(i) / static_cast<double>(n - 1);
            g.points.push_back(Point::planar(x, y));
        }
    }
    std::ostringstream d;
    d << "rect:" << xmin << "," << xmax << "," << ymin << "," << ymax << "," << n;
    g.description = d.str();
    return g;
}

GridSpec GridSpec::parse(const std::string& spec) {
    std::vector<double> v;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            v.push_back(std::stod(item));
        } catch (const std::logic_error&) {
            throw InvalidInput("GridSpec: bad number '" + item + "'");
        }
    }
    if (v.size() != 5 || v[4] < 2 || v[4] != std::floor(v[4]))
        throw InvalidInput("GridSpec: expected xmin,xmax,ymin,ymax,n");
    return rectangle(v[0], v[1], v[2], v[3], static_cast<std::size_t>(v[4]));
}

GridSpec GridSpec::ball_cloud(const Point& center, double radius, std::size_t count, std::uint64_t seed) {
    GridSpec g;
    g.points = ball_points(center, radius, count, seed);
    std::ostringstream d;
    d << "halton-ball:n=" << center.dim() << ",radius=" << radius << ",count=" << count << ",seed=" << seed;
    g.description = d.str();
    return g;
}

double tau(const Point& x, const DiscreteMeasure& mu, const Majorant& phi) {
    if (!(phi.limit() > mu.total())) throw InvalidInput("tau: majorant must eventually exceed the total mass");
    if (mu.empty()) return 0.0;
    if (x.dim() != mu.dim()) throw DimensionMismatch("tau: point dimension mismatch");

    std::vector<std::pair<double, double>> ev(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) ev[i] = {distance(x, mu.atoms[i]), mu.masses[i]};
    std::sort(ev.begin(), ev.end());

    // mu(B(x,t)) is the step function C_j on [s_j, s_{j+1}); the crossing with
    // phi on a qualifying step sits at phi^{-1}(C_j).
    double best = 0.0, cum = 0.0;
    for (std::size_t j = 0; j < ev.size(); ++j) {
        cum += ev[j].second;
        if (j + 1 < ev.size() && ev[j + 1].first == ev[j].first) continue;
        if (phi(ev[j].first) <= cum) best = std::max(best, std::max(ev[j].first, phi.inverse(cum)));
    }
    return best;
}

std::vector<Point> candidate_centers(const DiscreteMeasure& mu, const Majorant& phi) {
    std::vector<Point> out = mu.atoms;
    const double reach = 2.0 * phi.inverse(mu.total());
    for (std::size_t i = 0; i < mu.size(); ++i)
        for (std::size_t j = i + 1; j < mu.size(); ++j)
            if (distance(mu.atoms[i], mu.atoms[j]) <= reach) out.push_back(midpoint(mu.atoms[i], mu.atoms[j]));
    return out;
}

namespace {

void finish_cover(BallCover& cover, const Majorant& phi) {
    cover.budget_used = 0.0;
    cover.majorant_sum = 0.0;
    for (const auto& b : cover.balls) {
        cover.budget_used += std::pow(b.radius, phi.d);
        cover.majorant_sum += phi(cover.params.gamma * b.radius);
    }
}

// Greedy over a fixed finite candidate set (atoms and pair midpoints).
void candidate_greedy(const DiscreteMeasure& mu, const Majorant& phi, BallCover& cover) {
    const auto cands = candidate_centers(mu, phi);
    std::vector<double> taus(cands.size());
    for (std::size_t i = 0; i < cands.size(); ++i) taus[i] = tau(cands[i], mu, phi);

    std::vector<std::size_t> order(cands.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return taus[a] > taus[b]; });

    std::vector<char> covered(cands.size(), 0);
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        const std::size_t k = order[pos];
        if (covered[k]) continue;
        // order is descending, so this is sup tau over the uncovered candidates
        const double tau_k = taus[k];
        if (tau_k <= 0.0) break;
        const double t_k = cover.params.beta * tau_k;
        cover.balls.push_back({cands[k], t_k});
        cover.taus.push_back(tau_k);
        for (std::size_t i = 0; i < cands.size(); ++i)
            if (!covered[i] && distance(cands[i], cands[k]) <= t_k) covered[i] = 1;
    }
}

// Integer multiplicities w_i with m_i = w_i * unit, when the masses are commensurable.
std::optional<std::vector<long>> integer_weights(const DiscreteMeasure& mu, double& unit) {
    unit = *std::min_element(mu.masses.begin(), mu.masses.end());
    std::vector<long> w;
    for (double m : mu.masses) {
        const double q = m / unit;
        const double r = std::round(q);
        if (std::abs(q - r) > 1e-9 * r || r > 1e6) return std::nullopt;
        w.push_back(static_cast<long>(r));
    }
    return w;
}

struct Circle {
    cplx c;
    double r;
    long owner;  // atom index, or -1 for a cover ball
};

// Exact greedy for planar measures with commensurable masses.
//
// With levels m_j = j * unit and radii T_j = phi^{-1}(m_j), tau(x) = max{T_j : mu(B(x,T_j)) >= m_j}.
// Within a cell of the arrangement formed by the level-j circles around the
// atoms and the current cover circles, membership in {mu(B(., T_j)) >= m_j}
// and coverage are constant, so probing every cell decides whether an
// uncovered point of level j exists. Levels are processed in decreasing order,
// which reproduces sup tau over the uncovered plane at every step.
void arrangement_greedy(const DiscreteMeasure& mu, const Majorant& phi, const std::vector<long>& w, double unit,
                        BallCover& cover) {
    const std::size_t k = mu.size();
    std::vector<cplx> at(k);
    for (std::size_t i = 0; i < k; ++i) at[i] = mu.atoms[i].z[0];
    long total = 0;
    for (long x : w) total += x;

    const double rot = 2.0 * M_PI * 0.6180339887498949;
    const cplx e0 = std::polar(1.0, rot);

    for (long j = total; j >= 1; --j) {
        const double T = phi.inverse(static_cast<double>(j) * unit);
        const double delta = 1e-9 * T;

        // atoms that can belong to a level-j ball: mass within 2T reaches j
        std::vector<std::size_t> part;
        for (std::size_t a = 0; a < k; ++a) {
            long m = 0;
            for (std::size_t b = 0; b < k; ++b)
                if (std::abs(at[a] - at[b]) <= 2.0 * T) m += w[b];
            if (m >= j) part.push_back(a);
        }
        long part_mass = 0;
        for (auto a : part) part_mass += w[a];
        if (part_mass < j) continue;

        // weight inside B(p, T), skipping the owners of the circles p sits on
        auto level_weight = [&](cplx p, long skip1, long skip2) {
            long m = 0;
            for (auto a : part)
                if (static_cast<long>(a) != skip1 && static_cast<long>(a) != skip2 && std::abs(p - at[a]) <= T) m += w[a];
            return m;
        };
        auto covered = [&](cplx p) {
            for (const auto& b : cover.balls)
                if (std::abs(p - b.center.z[0]) <= b.radius) return true;
            return false;
        };
        auto inside = [&](const Circle& c, cplx p) { return std::abs(p - c.c) <= c.r; };

        for (;;) {
            std::vector<Circle> circles;
            for (auto a : part) circles.push_back({at[a], T, static_cast<long>(a)});
            for (const auto& b : cover.balls) {
                bool near = false;
                for (auto a : part)
                    if (std::abs(b.center.z[0] - at[a]) <= T + b.radius) near = true;
                if (near) circles.push_back({b.center.z[0], b.radius, -1});
            }

            std::optional<cplx> found;
            auto consider = [&](cplx p, long base_weight, const Circle* c1, const Circle* c2) {
                long m = base_weight;
                if (c1 && c1->owner >= 0 && inside(*c1, p)) m += w[static_cast<std::size_t>(c1->owner)];
                if (c2 && c2->owner >= 0 && inside(*c2, p)) m += w[static_cast<std::size_t>(c2->owner)];
                if (m >= j && !covered(p)) found = p;
            };

            for (auto a : part) {
                consider(at[a], level_weight(at[a], -1, -1), nullptr, nullptr);
                if (found) break;
            }
            for (std::size_t ci = 0; ci < circles.size() && !found; ++ci) {
                const Circle& c = circles[ci];
                for (double s : {-1.0, 1.0}) {
                    const cplx p = c.c + (c.r + s * delta) * e0;
                    consider(p, level_weight(p, c.owner, -1), &c, nullptr);
                    if (found) break;
                }
            }
            for (std::size_t ci = 0; ci < circles.size() && !found; ++ci) {
                for (std::size_t cj = ci + 1; cj < circles.size() && !found; ++cj) {
                    const Circle& c1 = circles[ci];
                    const Circle& c2 = circles[cj];
                    const cplx dv = c2.c - c1.c;
                    const double d = std::abs(dv);
                    if (d == 0.0 || d > c1.r + c2.r || d < std::abs(c1.r - c2.r)) continue;
                    const double a = (c1.r * c1.r - c2.r * c2.r + d * d) / (2.0 * d);
                    const double h = std::sqrt(std::max(0.0, c1.r * c1.r - a * a));
                    const cplx u = dv / d;
                    for (double sg : {-1.0, 1.0}) {
                        const cplx v = c1.c + a * u + sg * h * cplx{0.0, 1.0} * u;
                        const long base = level_weight(v, c1.owner, c2.owner);
                        // cheap reject: even with both owners inside the level is not reached
                        long best = base + (c1.owner >= 0 ? w[static_cast<std::size_t>(c1.owner)] : 0) +
                                    (c2.owner >= 0 ? w[static_cast<std::size_t>(c2.owner)] : 0);
                        if (best < j) continue;
                        const cplx n1 = (v - c1.c) / c1.r, n2 = (v - c2.c) / c2.r;
                        const double det = n1.real() * n2.imag() - n1.imag() * n2.real();
                        for (double s1 : {-1.0, 1.0})
                            for (double s2 : {-1.0, 1.0}) {
                                cplx dir;
                                if (std::abs(det) > 1e-12) {
                                    // solve <n1,dir> = s1, <n2,dir> = s2
                                    dir = cplx{(s1 * n2.imag() - s2 * n1.imag()) / det, (s2 * n1.real() - s1 * n2.real()) / det};
                                } else {
                                    dir = s1 * n1 + s2 * n2;
                                }
                                const double ad = std::abs(dir);
                                if (ad == 0.0) continue;
                                consider(v + (delta / ad) * dir, base, &c1, &c2);
                                if (found) break;
                            }
                        if (found) break;
                    }
                }
            }
            if (!found) break;

            const Point x = Point{*found};
            const double tau_k = tau(x, mu, phi);
            cover.balls.push_back({x, cover.params.beta * tau_k});
            cover.taus.push_back(tau_k);
        }
    }
}

BallCover greedy_cover(const DiscreteMeasure& mu, const Majorant& phi, const GorinParams& params) {
    BallCover cover;
    cover.d_exponent = phi.d;
    cover.mass = mu.total();
    cover.params = params;
    cover.budget_limit = cover.mass / std::pow(phi.p * params.gamma, phi.d);
    if (mu.empty()) return cover;

    double unit = 0.0;
    auto w = integer_weights(mu, unit);
    if (mu.dim() == 1 && w) {
        arrangement_greedy(mu, phi, *w, unit, cover);
        cover.exact_sup = true;
    } else {
        candidate_greedy(mu, phi, cover);
    }
    finish_cover(cover, phi);
    return cover;
}

} // namespace

BallCover gorin_cover(const DiscreteMeasure& mu, const Majorant& phi, const GorinParams& params) {
    if (!(params.alpha > 0.0 && params.alpha < 1.0)) throw InvalidInput("gorin_cover: alpha must lie in (0,1)");
    if (!(params.beta > 2.0)) throw InvalidInput("gorin_cover: beta must exceed 2");
    if (!(params.gamma > 0.0 && params.gamma < params.alpha / params.beta))
        throw InvalidInput("gorin_cover: gamma must lie in (0, alpha/beta)");
    return greedy_cover(mu, phi, params);
}

BallCover cartan_cover(const DiscreteMeasure& mu, double H, double d) {
    if (!(H > 0.0) || !(d > 0.0)) throw InvalidInput("cartan_cover: H and d must be positive");
    const double k = mu.total();
    if (mu.empty() || !(k > 0.0)) {
        BallCover cover;
        cover.d_exponent = d;
        cover.budget_limit = std::pow(2.0 * H, d) / d;
        cover.params = {1.0, 2.0, 0.5};
        return cover;
    }
    const auto phi = Majorant::power(std::pow(k * d, 1.0 / d) / H, d);
    // The greedy attains sup tau exactly on its candidate set, so the
    // locally compact parameters alpha = 1, beta = 2, gamma = 1/2 apply.
    BallCover cover = greedy_cover(mu, phi, GorinParams{1.0, 2.0, 0.5});
    cover.budget_limit = std::pow(2.0 * H, d) / d;
    return cover;
}

CartanReport verify_cartan(const Function& f, const BallCover& cover, double bound, const GridSpec& grid,
                           double tolerance) {
    CartanReport rep;
    rep.cover = cover;
    rep.bound = bound;
    rep.grid = grid.description;
    rep.grid_size = grid.points.size();
    rep.min_off_cover = kInf;
    for (const auto& z : grid.points) {
        if (cover.contains(z)) continue;
        ++rep.off_cover_count;
        const double v = evaluate(f, z);
        rep.min_off_cover = std::min(rep.min_off_cover, v);
        if (v < bound - tolerance) rep.violations.push_back(z);
    }
    rep.empty_off_cover = rep.off_cover_count == 0;
    return rep;
}

std::vector<Point> irregular_off_cover(const DiscreteMeasure& mu, const Majorant& phi, const BallCover& cover,
                                       const GridSpec& grid, const std::vector<double>& scales) {
    std::vector<double> ts = scales;
    std::sort(ts.begin(), ts.end());
    const double total = mu.total();
    const double reach = phi.inverse(total);
    std::vector<Point> bad;
    std::vector<std::pair<double, double>> ev(mu.size());
    for (const auto& z : grid.points) {
        if (cover.contains(z)) continue;
        for (std::size_t i = 0; i < mu.size(); ++i) ev[i] = {distance(z, mu.atoms[i]), mu.masses[i]};
        std::sort(ev.begin(), ev.end());
        if (ev.empty() || ev.front().first > reach) continue;  // mass <= total < phi(t) for t beyond reach
        std::size_t j = 0;
        double cum = 0.0;
        for (double t : ts) {
            while (j < ev.size() && ev[j].first <= t) cum += ev[j++].second;
            if (cum >= phi(t)) {
                bad.push_back(z);
                break;
            }
        }
    }
    return bad;
}

bool tau_balls_disjoint(const BallCover& cover) {
    for (std::size_t i = 0; i < cover.balls.size(); ++i)
        for (std::size_t j = i + 1; j < cover.balls.size(); ++j)
            if (distance(cover.balls[i].center, cover.balls[j].center) <= cover.taus[i] + cover.taus[j]) return false;
    return true;
}

CartanReport local_cover_check(const Function& f, const LocalCoverInput& in, const GridSpec& grid) {
    if (in.x.dim() != 1) throw DimensionMismatch("local_cover_check: planar only");
    if (!(in.t > 0.0) || !(in.r > 0.0 && in.r < 1.0) || !(in.H > 0.0) || !(in.d > 0.0) || !(in.c_hat > 0.0))
        throw InvalidInput("local_cover_check: need t > 0, 0 < r < 1, H > 0, d > 0, c_hat > 0");
    if (norm(in.x) + in.t / in.r > in.r * (1.0 + 1e-12))
        throw GeometryError("local_cover_check: D(x, t/r) is not contained in D_r");
    if (!grid.rectangular()) throw InvalidInput("local_cover_check: needs a rectangular grid");

    const double sup = sup_on_ball(f, in.x, in.t, 2048).value;
    const double threshold = sup + in.c_hat * (in.M1 - in.M2) * std::log(in.H / M_E);

    // sublevel points of grid ∩ D(x,t)
    const std::size_t nx = grid.nx, ny = grid.ny;
    std::vector<char> low(grid.points.size(), 0);
    std::vector<double> vals(grid.points.size(), kInf);
    for (std::size_t i = 0; i < grid.points.size(); ++i) {
        if (distance(grid.points[i], in.x) >= in.t) continue;
        vals[i] = evaluate(f, grid.points[i]);
        if (vals[i] < threshold) low[i] = 1;
    }
    const double hx = std::abs(grid.points[1].z[0].real() - grid.points[0].z[0].real());
    const double hy = std::abs(grid.points[nx].z[0].imag() - grid.points[0].z[0].imag());
    const double cell = 0.5 * std::hypot(hx, hy);

    CartanReport rep;
    rep.H = in.H;
    rep.bound = threshold;
    rep.grid = grid.description;
    rep.grid_size = grid.points.size();
    rep.cover.d_exponent = in.d;
    rep.cover.budget_limit = std::pow(2.0 * in.t * in.H / in.r, in.d) / in.d;
    rep.cover.params = {1.0, 2.0, 0.5};

    // 8-connected components of the sublevel set, each covered by one ball
    std::vector<char> seen(grid.points.size(), 0);
    for (std::size_t s = 0; s < grid.points.size(); ++s) {
        if (!low[s] || seen[s]) continue;
        std::vector<std::size_t> comp, stack{s};
        seen[s] = 1;
        while (!stack.empty()) {
            const std::size_t c = stack.back();
            stack.pop_back();
            comp.push_back(c);
            const long ci = static_cast<long>(c % nx), cj = static_cast<long>(c / nx);
            for (long dj = -1; dj <= 1; ++dj)
                for (long di = -1; di <= 1; ++di) {
                    const long ii = ci + di, jj = cj + dj;
                    if (ii < 0 || jj < 0 || ii >= static_cast<long>(nx) || jj >= static_cast<long>(ny)) continue;
                    const std::size_t q = static_cast<std::size_t>(jj) * nx + static_cast<std::size_t>(ii);
                    if (low[q] && !seen[q]) {
                        seen[q] = 1;
                        stack.push_back(q);
                    }
                }
        }
        double xmin = kInf, xmax = -kInf, ymin = kInf, ymax = -kInf;
        for (auto q : comp) {
            const cplx z = grid.points[q].z[0];
            xmin = std::min(xmin, z.real());
            xmax = std::max(xmax, z.real());
            ymin = std::min(ymin, z.imag());
            ymax = std::max(ymax, z.imag());
        }
        const Point centre = Point::planar(0.5 * (xmin + xmax), 0.5 * (ymin + ymax));
        double rad = 0.0;
        for (auto q : comp) rad = std::max(rad, distance(grid.points[q], centre));
        rep.cover.balls.push_back({centre, rad + cell});
        rep.cover.taus.push_back(0.0);
    }
    for (const auto& b : rep.cover.balls) rep.cover.budget_used += std::pow(b.radius, in.d);

    rep.min_off_cover = kInf;
    for (std::size_t i = 0; i < grid.points.size(); ++i) {
        if (vals[i] == kInf || rep.cover.contains(grid.points[i])) continue;
        ++rep.off_cover_count;
        rep.min_off_cover = std::min(rep.min_off_cover, vals[i]);
        if (vals[i] < threshold - 1e-9) rep.violations.push_back(grid.points[i]);
    }
    rep.empty_off_cover = rep.off_cover_count == 0;
    return rep;
}

} // namespace cartan_lab
