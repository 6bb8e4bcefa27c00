#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

namespace cartan_lab {

using cplx = std::complex<double>;

// A point of C^n, stored as n complex coordinates (2n reals).
struct Point {
    std::vector<cplx> z;

    Point() = default;
    Point(std::initializer_list<cplx> coords) : z(coords) {}
    explicit Point(std::vector<cplx> coords) : z(std::move(coords)) {}

    static Point planar(double x, double y) { return Point{cplx{x, y}}; }
    static Point origin(std::size_t n) { return Point(std::vector<cplx>(n)); }

    std::size_t dim() const { return z.size(); }
    const cplx& operator[](std::size_t i) const { return z[i]; }
    cplx& operator[](std::size_t i) { return z[i]; }

    bool finite() const {
        for (const auto& c : z)
            if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
        return true;
    }

    bool operator==(const Point& o) const { return z == o.z; }
};

inline double distance_sq(const Point& a, const Point& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.z.size(); ++i) s += std::norm(a.z[i] - b.z[i]);
    return s;
}

inline double distance(const Point& a, const Point& b) { return std::sqrt(distance_sq(a, b)); }

inline double norm(const Point& a) {
    double s = 0.0;
    for (const auto& c : a.z) s += std::norm(c);
    return std::sqrt(s);
}

inline Point operator+(const Point& a, const Point& b) {
    Point r = a;
    for (std::size_t i = 0; i < r.z.size(); ++i) r.z[i] += b.z[i];
    return r;
}

inline Point operator-(const Point& a, const Point& b) {
    Point r = a;
    for (std::size_t i = 0; i < r.z.size(); ++i) r.z[i] -= b.z[i];
    return r;
}

inline Point operator*(double s, const Point& a) {
    Point r = a;
    for (auto& c : r.z) c *= s;
    return r;
}

inline Point midpoint(const Point& a, const Point& b) { return 0.5 * (a + b); }

// Real coordinate view: index 2i is Re z_i, 2i+1 is Im z_i.
inline double real_coord(const Point& p, std::size_t k) {
    const cplx& c = p.z[k / 2];
    return (k % 2 == 0) ? c.real() : c.imag();
}

inline void set_real_coord(Point& p, std::size_t k, double v) {
    cplx& c = p.z[k / 2];
    c = (k % 2 == 0) ? cplx{v, c.imag()} : cplx{c.real(), v};
}

// Closed-ball membership with a relative slack for rounding on the sphere.
inline bool in_closed_ball(const Point& p, const Point& center, double radius) {
    return distance(p, center) <= radius * (1.0 + 1e-12);
}

} // namespace cartan_lab
