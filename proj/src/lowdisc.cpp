#include "cartan_lab/lowdisc.hpp"

#include "cartan_lab/error.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <cmath>
#include <random>

namespace cartan_lab {

namespace {

std::vector<unsigned> first_primes(std::size_t count) {
    std::vector<unsigned> primes;
    for (unsigned c = 2; primes.size() < count; ++c) {
        bool prime = true;
        for (unsigned p : primes) {
            if (p * p > c) break;
            if (c % p == 0) {
                prime = false;
                break;
            }
        }
        if (prime) primes.push_back(c);
    }
    return primes;
}

double radical_inverse(std::uint64_t i, unsigned base) {
    const double inv = 1.0 / base;
    double f = inv, r = 0.0;
    while (i > 0) {
        r += f * static_cast<double>(i % base);
        i /= base;
        f *= inv;
    }
    return r;
}

} // namespace

Halton::Halton(std::size_t dim, std::uint64_t seed) : bases_(first_primes(dim)), shift_(dim, 0.0) {
    if (seed != 0) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (auto& s : shift_) s = u(rng);
    }
}

void Halton::point(std::uint64_t index, std::vector<double>& out) const {
    out.resize(bases_.size());
    for (std::size_t k = 0; k < bases_.size(); ++k) {
        double v = radical_inverse(index + 1, bases_[k]) + shift_[k];
        out[k] = v - std::floor(v);
    }
}

std::vector<Point> sphere_directions(std::size_t n, std::size_t count, std::uint64_t seed) {
    if (n == 0) throw InvalidInput("sphere_directions: dimension must be positive");
    const std::size_t dim = 2 * n;
    Halton h(dim, seed);
    std::vector<Point> out;
    out.reserve(count);
    std::vector<double> u;
    for (std::uint64_t i = 0; out.size() < count; ++i) {
        h.point(i, u);
        Point p = Point::origin(n);
        double s = 0.0;
        bool ok = true;
        for (std::size_t k = 0; k < dim; ++k) {
            // Gaussian coordinates through the inverse normal CDF give an
            // isotropic direction after normalisation.
            double x = 2.0 * u[k] - 1.0;
            if (std::abs(x) >= 1.0) {
                ok = false;
                break;
            }
            double g = std::sqrt(2.0) * boost::math::erf_inv(x);
            set_real_coord(p, k, g);
            s += g * g;
        }
        if (!ok || s < 1e-24) continue;
        out.push_back((1.0 / std::sqrt(s)) * p);
    }
    return out;
}

std::vector<Point> ball_points(const Point& center, double radius, std::size_t count, std::uint64_t seed) {
    const std::size_t n = center.dim();
    const std::size_t dim = 2 * n;
    Halton h(dim, seed);
    std::vector<Point> out;
    out.reserve(count);
    std::vector<double> u;
    for (std::uint64_t i = 0; out.size() < count; ++i) {
        h.point(i, u);
        Point p = Point::origin(n);
        double s = 0.0;
        for (std::size_t k = 0; k < dim; ++k) {
            double x = 2.0 * u[k] - 1.0;
            set_real_coord(p, k, x);
            s += x * x;
        }
        if (s > 1.0) continue;
        out.push_back(center + radius * p);
    }
    return out;
}

} // namespace cartan_lab
