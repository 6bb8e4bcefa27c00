#pragma once

#include "cartan_lab/point.hpp"

#include <memory>
#include <optional>
#include <variant>
#include <vector>

namespace cartan_lab {

// Finite atomic measure sum_i m_i delta_{xi_i}.
struct DiscreteMeasure {
    std::vector<Point> atoms;
    std::vector<double> masses;

    DiscreteMeasure() = default;
    DiscreteMeasure(std::vector<Point> atoms_, std::vector<double> masses_);

    static DiscreteMeasure counting(std::vector<Point> atoms_);

    std::size_t size() const { return atoms.size(); }
    bool empty() const { return atoms.empty(); }
    std::size_t dim() const { return atoms.empty() ? 0 : atoms.front().dim(); }
    double total() const;
};

// Polynomial in n complex variables: sum_k c_k z^{alpha_k}.
struct Polynomial {
    struct Term {
        cplx coeff;
        std::vector<int> exponents;
    };

    std::size_t nvars = 1;
    std::vector<Term> terms;

    static constexpr int max_degree = 8;

    int degree() const;
    cplx operator()(const Point& z) const;
};

class Function;

struct Potential {
    DiscreteMeasure measure;
};

// log_leading + sum_i log|z - root_i| on C.
struct LogAbsPolynomial {
    std::vector<cplx> roots;
    double log_leading = 0.0;
};

// (1/2) log sum_i |f_i(z)|^2.
struct LogNormMap {
    std::vector<Polynomial> components;
};

struct Constant {
    double value = 0.0;
};

struct MaxOf {
    std::vector<Function> parts;
};

struct Shifted {
    std::shared_ptr<const Function> base;
    double offset = 0.0;
};

// Extended-real-valued test function on C^n. Evaluation never returns +inf;
// -inf marks logarithmic singularities.
class Function {
public:
    using Variant = std::variant<Potential, LogAbsPolynomial, LogNormMap, Constant, MaxOf, Shifted>;

    Function() : v_(Constant{0.0}) {}
    Function(Potential p);
    Function(LogAbsPolynomial p);
    Function(LogNormMap m);
    Function(Constant c) : v_(c) {}
    Function(MaxOf m);
    Function(Shifted s);

    static Function constant(double c) { return Function(Constant{c}); }
    static Function shifted(Function base, double offset);
    // log|z - x| on C.
    static Function log_distance(cplx x);

    const Variant& variant() const { return v_; }

    // Complex dimension of the domain; nullopt when the function accepts any (constants).
    std::optional<std::size_t> ambient_dim() const;

    double operator()(const Point& z) const;

private:
    Variant v_;
};

double evaluate(const Function& f, const Point& z);

struct SupEstimate {
    double value = 0.0;
    Point argmax;
    std::size_t resolution = 0;
    // First-order Lipschitz bound on (true sup - value); absent near singularities.
    std::optional<double> error_bound;
};

// Supremum over the closed ball via the boundary sphere (maximum principle).
SupEstimate sup_on_ball(const Function& f, const Point& center, double radius, std::size_t resolution = 1024);

struct M1M2 {
    double M1 = 0.0;
    double M2 = 0.0;
};

// Tightest (M1, M2) with sup_{D_1} f <= M1 and sup_{D_r} f >= M2.
M1M2 normalize_m1m2(const Function& f, double r, std::size_t resolution = 2048);

// Sum of log|z - root| computed through blocked products (one log per block).
double log_abs_product(cplx z, const std::vector<cplx>& roots);

} // namespace cartan_lab
