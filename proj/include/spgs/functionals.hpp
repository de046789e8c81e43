#pragma once

#include <vector>

#include "spgs/nonlinearity.hpp"
#include "spgs/poisson.hpp"
#include "spgs/radial_grid.hpp"

namespace spgs {

struct EnergyBreakdown {
    double kinetic = 0.0;    // (1/2) ||grad u||^2
    double mass = 0.0;       // (1/2) ||u||_2^2
    double nonlocal = 0.0;   // (lambda/4) int phi_u u^2
    double potential = 0.0;  // int F(u)
    double I_value = 0.0;
    double Gamma_value = 0.0;
};

EnergyBreakdown energy(const RadialFunction& u, const Nonlinearity& nl, double lambda);
/// Variant reusing an already computed potential.
EnergyBreakdown energy(const RadialFunction& u, const Nonlinearity& nl, const PoissonSolution& poisson);

/// Residual of -Laplace(u) + u + lambda phi_u u - f(u).
///
/// `weak` is the exact gradient of the discrete Gamma_lambda with respect to the
/// nodal values, so <weak, v> is the discrete weak form. `strong` divides by
/// the node weights and uses the limit 3u''(0) of the radial Laplacian at the
/// origin; it is zero at the Dirichlet node. `dual_norm` is the H^1 dual norm
/// of `weak` over Dirichlet test fields.
struct ResidualField {
    RadialFunction strong;
    std::vector<double> weak;
    double dual_norm = 0.0;

    double pairing(const RadialFunction& v) const;
};

ResidualField gradient_residual(const RadialFunction& u, const Nonlinearity& nl, double lambda);
ResidualField gradient_residual(const RadialFunction& u, const Nonlinearity& nl, const PoissonSolution& poisson);

/// Nodal gradient of (1/2)||grad u||^2, i.e. the stiffness matrix times u.
std::vector<double> kinetic_gradient(const RadialFunction& u);

double T0_value(const RadialFunction& u);
double V_value(const RadialFunction& u, const Nonlinearity& nl);

/// ||grad u||^2 - 6 int G(u).
double pohozaev_P(const RadialFunction& u, const Nonlinearity& nl);

struct PohozaevLambda {
    double residual = 0.0;
    /// Sum of the magnitudes of the four terms; residual / scale is the relative residual.
    double scale = 0.0;
    double relative() const { return scale > 0.0 ? residual / scale : 0.0; }
};

/// (1/2)||grad u||^2 + (3/2)||u||^2 + (5 lambda/4) int phi u^2 - 3 int F(u),
/// which is d/dt Gamma_lambda(u(./t)) at t = 1.
PohozaevLambda pohozaev_residual_lambda(const RadialFunction& u, const Nonlinearity& nl, double lambda);

/// Numerical t-derivative of Gamma_lambda(dilate(u, t)) at t = 1 by central differences.
double dilation_derivative(const RadialFunction& u, const Nonlinearity& nl, double lambda, double dt = 1e-3);

} // namespace spgs
