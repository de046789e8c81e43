#include "spgs/poisson.hpp"

#include <cmath>
#include <numbers>

#include "spgs/error.hpp"

namespace spgs {

std::vector<double> newton_potential(const RadialGrid& grid, std::span<const double> rho) {
    const int n = grid.size();
    require(static_cast<int>(rho.size()) == n, "newton_potential: density length mismatch");
    const auto w = grid.weights();
    const auto r = grid.nodes();
    const double inv_four_pi = 1.0 / (4.0 * std::numbers::pi);

    // interior[i] = sum_{j<i} w_j rho_j, exterior[i] = sum_{j>=i} w_j rho_j / r_j.
    std::vector<double> phi(n);
    std::vector<double> exterior(n + 1, 0.0);
    for (int j = n - 1; j >= 1; --j) exterior[j] = exterior[j + 1] + w[j] * rho[j] / r[j];
    exterior[0] = exterior[1];
    double interior = 0.0;
    for (int i = 0; i < n; ++i) {
        const double inner = i == 0 ? 0.0 : interior / r[i];
        phi[i] = inv_four_pi * (inner + exterior[i]);
        interior += w[i] * rho[i];
    }
    return phi;
}

PoissonSolution solve_phi(const RadialFunction& u, double lambda) {
    if (!std::isfinite(lambda) || lambda < 0.0) fail(ErrorCode::invalid_argument, "lambda must be >= 0");
    const RadialGrid& g = u.grid();
    const int n = g.size();
    std::vector<double> rho(n);
    for (int i = 0; i < n; ++i) rho[i] = u[i] * u[i];

    std::vector<double> phi(n, 0.0);
    if (lambda > 0.0) {
        phi = newton_potential(g, rho);
        for (double& p : phi) p *= lambda;
    }

    PoissonSolution out{u.with_values(phi), lambda, 0.0, 0.0, 0.0};
    std::vector<double> density(n);
    for (int i = 0; i < n; ++i) density[i] = phi[i] * rho[i];
    out.coupling = integrate(g, density);
    out.dirichlet_energy = lambda * out.coupling;
    out.dirichlet_energy_direct =
        grad_norm_sq(g, phi) + 4.0 * std::numbers::pi * g.radius() * phi.back() * phi.back();
    return out;
}

double T_value(const RadialFunction& u, double lambda) { return 0.25 * solve_phi(u, lambda).coupling; }

double coupling_scaling_check(const RadialFunction& u, double lambda, double t) {
    if (!std::isfinite(lambda) || lambda < 0.0) fail(ErrorCode::invalid_argument, "lambda must be >= 0");
    require(std::isfinite(t) && t > 0.0, "dilation factor must be positive");
    // The ratio does not depend on lambda; evaluate the kernel directly so lambda = 0 is harmless.
    const double base = solve_phi(u, 1.0).coupling;
    require(base > 0.0, "coupling of the reference field vanishes");
    return solve_phi(dilate(u, t), 1.0).coupling / base;
}

} // namespace spgs
