#pragma once

#include <span>
#include <vector>

#include "spgs/radial_grid.hpp"

namespace spgs {

/// phi_u for -Laplace(phi) = lambda u^2. phi carries one factor of lambda, so
/// the coupling term lambda/4 * int phi u^2 in the energy is quadratic in lambda.
struct PoissonSolution {
    RadialFunction phi;
    double lambda = 0.0;
    /// ||grad phi||_2^2 over R^3, from lambda * int u^2 phi.
    double dirichlet_energy = 0.0;
    /// Same quantity from 4 pi int_0^R phi'^2 r^2 dr plus the exterior
    /// point-charge contribution 4 pi R phi(R)^2.
    double dirichlet_energy_direct = 0.0;
    /// int phi u^2.
    double coupling = 0.0;
};

/// Newton potential of a radial density without the lambda prefactor:
/// K[rho](r_i) = sum_j w_j rho_j / (4 pi max(r_i, r_j)), evaluated in O(n) by
/// prefix sums. w_i K_ij is symmetric, which makes the discrete coupling energy
/// variationally consistent with lambda * phi * u in the residual.
std::vector<double> newton_potential(const RadialGrid& grid, std::span<const double> rho);

PoissonSolution solve_phi(const RadialFunction& u, double lambda);

/// T(u) = (1/4) int phi_u u^2 (one power of lambda).
double T_value(const RadialFunction& u, double lambda);

/// coupling(dilate(u, t)) / coupling(u); lambda cancels, the ratio should be t^5.
double coupling_scaling_check(const RadialFunction& u, double lambda, double t);

} // namespace spgs
