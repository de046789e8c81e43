#pragma once

#include <array>
#include <memory>
#include <span>
#include <vector>

#include "spgs/linalg.hpp"

namespace spgs {

class RadialGrid;
using GridPtr = std::shared_ptr<const RadialGrid>;

/// Midpoint derivative u'((k+1/2)h) as a combination of at most four nodal values.
struct GradientStencil {
    int count = 0;
    std::array<int, 4> node{};
    std::array<double, 4> coeff{};
};

/// Uniform discretization r_i = i*h of [0, R] for radial functions on R^3.
///
/// Node weights integrate against 4*pi*r^2 dr: composite trapezoid, which is
/// spectrally accurate at the origin for even integrands, plus a Gregory end
/// correction at r = R so that polynomials up to degree two in r are exact.
/// The kinetic form uses fourth-order staggered differences evaluated at cell
/// midpoints with an even reflection at r = 0 and cubic extrapolation past R.
///
/// Instances are immutable; share them through GridPtr.
class RadialGrid {
public:
    static GridPtr make(double R, int n);

    double radius() const noexcept { return R_; }
    int size() const noexcept { return n_; }
    int last() const noexcept { return n_ - 1; }
    double spacing() const noexcept { return h_; }

    std::span<const double> nodes() const noexcept { return nodes_; }
    std::span<const double> weights() const noexcept { return weights_; }
    std::span<const double> midpoint_weights() const noexcept { return midpoint_weights_; }
    std::span<const GradientStencil> gradient_stencils() const noexcept { return stencils_; }

    /// Stiffness matrix of the quadratic form grad_norm_sq over all n nodes.
    const linalg::BandMatrix& stiffness() const noexcept { return stiffness_; }

    /// H^1 Riesz map on Dirichlet fields (value at R pinned to zero). Input and
    /// output have length n; the last component of the result is zero.
    std::vector<double> h1_riesz(std::span<const double> dual) const;

    /// sup over Dirichlet fields v with ||v||_{H^1} = 1 of <dual, v>.
    double dual_norm(std::span<const double> dual) const;

private:
    RadialGrid(double R, int n);

    double R_;
    int n_;
    double h_;
    std::vector<double> nodes_;
    std::vector<double> weights_;
    std::vector<double> midpoint_weights_;
    std::vector<GradientStencil> stencils_;
    linalg::BandMatrix stiffness_;
    linalg::BandCholesky h1_factor_;
};

/// Samples of a radial field on a grid.
class RadialFunction {
public:
    RadialFunction(GridPtr grid, std::vector<double> values);

    static RadialFunction zeros(GridPtr grid);

    template <class Fn>
    static RadialFunction sample(GridPtr grid, Fn&& fn) {
        std::vector<double> v(grid->size());
        const auto r = grid->nodes();
        for (int i = 0; i < grid->size(); ++i) v[i] = fn(r[i]);
        return RadialFunction(std::move(grid), std::move(v));
    }

    const GridPtr& grid_ptr() const noexcept { return grid_; }
    const RadialGrid& grid() const noexcept { return *grid_; }
    std::span<const double> values() const noexcept { return values_; }
    int size() const noexcept { return static_cast<int>(values_.size()); }
    double operator[](int i) const { return values_[i]; }
    double back() const { return values_.back(); }

    /// Same grid, new samples.
    RadialFunction with_values(std::vector<double> values) const;

    bool same_grid(const RadialFunction& other) const noexcept;

private:
    GridPtr grid_;
    std::vector<double> values_;
};

RadialFunction operator+(const RadialFunction& a, const RadialFunction& b);
RadialFunction operator-(const RadialFunction& a, const RadialFunction& b);
RadialFunction operator*(double s, const RadialFunction& a);

/// Sum of w_i g(r_i): the integral over R^3 of the radial extension of g.
double integrate(const RadialFunction& g);
double integrate(const RadialGrid& grid, std::span<const double> g);

/// 4*pi * int_0^R u'(r)^2 r^2 dr.
double grad_norm_sq(const RadialFunction& u);
double grad_norm_sq(const RadialGrid& grid, std::span<const double> u);

std::vector<double> midpoint_gradient(const RadialGrid& grid, std::span<const double> u);

double l2_norm_sq(const RadialFunction& u);
double norm_lq(const RadialFunction& u, double q);
double h1_norm_sq(const RadialFunction& u);

/// Fraction of the L^2 mass carried by the outer tenth of [0, R].
double tail_mass_fraction(const RadialFunction& u);

/// r -> u(r/t) on the same grid by monotone cubic Hermite interpolation; zero
/// where r/t falls beyond R.
RadialFunction dilate(const RadialFunction& u, double t);

} // namespace spgs
