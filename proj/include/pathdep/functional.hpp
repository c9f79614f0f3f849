#pragma once

#include "pathdep/grid.hpp"

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pathdep {

struct Shape {
    std::size_t rows = 1;
    std::size_t cols = 1;
    std::size_t count() const { return rows * cols; }
    bool operator==(const Shape&) const = default;
};

// Constants a coefficient declares about itself; condition checks test the
// corresponding inequalities against sampled paths. Absent fields mean the
// coefficient makes no claim there.
struct DeclaredBounds {
    std::optional<double> sup_bound;       // |F(t,x)| <= sup_bound
    std::optional<double> growth_c;        // |F(t,x)| <= c (1 + ||x||^kappa)
    double growth_kappa = 1.0;
    std::optional<double> lip_sup;         // |F(t,x)-F(t,y)| <= l ||x-y||_inf
    std::optional<double> lip_dinf;        // |F(t,x)-F(s,y)| <= l d_inf
    std::optional<double> vderiv_bound;    // Frobenius bound on the vertical derivative
    std::optional<double> vderiv_lip_dinf; // d_inf-Lipschitz constant of it
    std::optional<double> deriv_growth_c;  // |d_t F| + |d_xx F| <= c (1 + ||x||^eta)
    double deriv_growth_eta = 0.0;
};

// A non-anticipative coefficient: (t, x) -> matrix, where the value depends
// on the path only up to time t. Analytic derivatives are optional; the free
// functions below fall back to finite differences on the grid where the
// family is smooth enough for that to make sense.
class CoefficientFunctional {
public:
    virtual ~CoefficientFunctional() = default;

    Shape shape() const { return shape_; }
    const std::string& name() const { return name_; }
    const DeclaredBounds& bounds() const { return bounds_; }

    void evaluate(double t, const PathView& x, std::span<double> out) const;
    std::vector<double> evaluate(double t, const PathView& x) const;

    bool has_analytic_vertical() const { return analytic_vertical_; }
    bool has_analytic_horizontal() const { return analytic_horizontal_; }
    bool has_analytic_second_vertical() const { return analytic_second_vertical_; }
    // Whether finite-difference differentiation is admissible at all.
    bool vertical_fd_ok() const { return vertical_fd_ok_; }
    bool horizontal_fd_ok() const { return horizontal_fd_ok_; }

    bool vertical_capable() const { return analytic_vertical_ || vertical_fd_ok_; }

    // Analytic derivatives; only called when the corresponding flag is set.
    virtual void vertical_derivative(double t, const PathView& x, std::size_t k,
                                     std::size_t l, std::span<double> out) const;
    virtual void horizontal_derivative(double t, const PathView& x,
                                       std::span<double> out) const;
    virtual void second_vertical(double t, const PathView& x, std::size_t k,
                                 std::size_t l, std::span<double> out) const;

protected:
    CoefficientFunctional(Shape shape, std::string name) : shape_(shape), name_(std::move(name)) {}

    virtual void eval_impl(double t, const PathView& x, std::span<double> out) const = 0;

    Shape shape_;
    std::string name_;
    DeclaredBounds bounds_;
    bool analytic_vertical_ = false;
    bool analytic_horizontal_ = false;
    bool analytic_second_vertical_ = false;
    bool vertical_fd_ok_ = true;
    bool horizontal_fd_ok_ = true;
};

using FunctionalPtr = std::shared_ptr<const CoefficientFunctional>;

// Vertical derivative of the (k,l) entry: 1 x m row vector. Falls back to a
// central difference of a path bumped on [t,T] when no analytic derivative
// is available. Throws at t = T and for families that cannot be bumped.
void vertical_derivative(const CoefficientFunctional& f, double t, const PathView& x,
                         std::size_t k, std::size_t l, std::span<double> out);

// Horizontal derivative (time derivative along the stopped path), full shape.
void horizontal_derivative(const CoefficientFunctional& f, double t, const PathView& x,
                           std::span<double> out);

// Second vertical derivative of the (k,l) entry: m x m matrix.
void second_vertical(const CoefficientFunctional& f, double t, const PathView& x,
                     std::size_t k, std::size_t l, std::span<double> out);

// Finite-difference versions, usable regardless of analytic capability; the
// free functions above fall back to these. Exposed for cross-checks of the
// analytic formulas.
void vertical_derivative_fd(const CoefficientFunctional& f, double t, const PathView& x,
                            std::size_t k, std::size_t l, std::span<double> out);
void horizontal_derivative_fd(const CoefficientFunctional& f, double t,
                              const PathView& x, std::span<double> out);
void second_vertical_fd(const CoefficientFunctional& f, double t, const PathView& x,
                        std::size_t k, std::size_t l, std::span<double> out);

// Stratonovich-type correction rho_k = sum_l d_x sigma_{k,l} (sigma e_l);
// zero at t = T by convention.
void correction_rho(const CoefficientFunctional& sigma, double t, const PathView& x,
                    std::span<double> out);

// Coefficients of the generalized sequence/limit pair. b_under drives dt,
// b_h multiplies the driver rate, b_bar multiplies the interpolated-noise
// rate, sigma drives dW.
struct RoleAssignment {
    FunctionalPtr b_under;  // R^m
    FunctionalPtr b_h;      // R^{m x d}
    FunctionalPtr b_bar;    // R^{m x d}, vertical-derivative capable
    FunctionalPtr sigma;    // R^{m x d}
    std::size_t m = 1;
    std::size_t d = 1;

    struct C8Scalars {
        double b0 = 0.0;
        double bbar = 0.0;  // constant-in-time multiplier
    };
    std::optional<C8Scalars> c8;
};

// Remainder R_k = sum_l d_x bbar_{k,l} ((1/2) bbar + sigma)(t,x) e_l; zero
// at t = T.
void remainder_term(const RoleAssignment& roles, double t, const PathView& x,
                    std::span<double> out);

// Wrapper: factor * F with derivatives scaled accordingly.
FunctionalPtr scale_functional(FunctionalPtr f, double factor);
// Constant zero of a given shape.
FunctionalPtr zero_functional(Shape shape);
// Drift with correction folded in: b - (1/2) rho(sigma).
FunctionalPtr drift_minus_half_rho(FunctionalPtr b, FunctionalPtr sigma);

}  // namespace pathdep
