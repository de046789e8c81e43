#include "spgs/functionals.hpp"

#include <cmath>

#include "spgs/error.hpp"

namespace spgs {

namespace {

double integrate_primitive(const RadialFunction& u, const Nonlinearity& nl) {
    const auto w = u.grid().weights();
    double s = 0.0;
    for (int i = 0; i < u.size(); ++i) s += w[i] * nl.F(u[i]);
    return s;
}

void check_lambda(double lambda) {
    if (!std::isfinite(lambda) || lambda < 0.0) fail(ErrorCode::invalid_argument, "lambda must be >= 0");
}

} // namespace

EnergyBreakdown energy(const RadialFunction& u, const Nonlinearity& nl, const PoissonSolution& poisson) {
    EnergyBreakdown e;
    e.kinetic = 0.5 * grad_norm_sq(u);
    e.mass = 0.5 * l2_norm_sq(u);
    e.nonlocal = 0.25 * poisson.lambda * poisson.coupling;
    e.potential = integrate_primitive(u, nl);
    e.I_value = e.kinetic + e.mass - e.potential;
    e.Gamma_value = e.I_value + e.nonlocal;
    return e;
}

EnergyBreakdown energy(const RadialFunction& u, const Nonlinearity& nl, double lambda) {
    check_lambda(lambda);
    return energy(u, nl, solve_phi(u, lambda));
}

std::vector<double> kinetic_gradient(const RadialFunction& u) { return u.grid().stiffness().multiply(u.values()); }

ResidualField gradient_residual(const RadialFunction& u, const Nonlinearity& nl, const PoissonSolution& poisson) {
    const RadialGrid& g = u.grid();
    const int n = g.size();
    const auto w = g.weights();
    const auto& phi = poisson.phi;
    const double lambda = poisson.lambda;

    std::vector<double> weak = kinetic_gradient(u);
    std::vector<double> strong(n, 0.0);
    for (int i = 0; i < n; ++i) {
        const double local = u[i] + lambda * phi[i] * u[i] - nl.f(u[i]);
        weak[i] += w[i] * local;
        if (i > 0 && i < n - 1) strong[i] = weak[i] / w[i];
    }
    const double h = g.spacing();
    const double u_rr0 = (-2.0 * u[2] + 32.0 * u[1] - 30.0 * u[0]) / (12.0 * h * h);
    strong[0] = -3.0 * u_rr0 + u[0] + lambda * phi[0] * u[0] - nl.f(u[0]);

    ResidualField out{u.with_values(std::move(strong)), std::move(weak), 0.0};
    out.dual_norm = g.dual_norm(out.weak);
    return out;
}

ResidualField gradient_residual(const RadialFunction& u, const Nonlinearity& nl, double lambda) {
    check_lambda(lambda);
    return gradient_residual(u, nl, solve_phi(u, lambda));
}

double ResidualField::pairing(const RadialFunction& v) const {
    require(static_cast<int>(weak.size()) == v.size(), "pairing: length mismatch");
    return linalg::dot(weak, v.values());
}

double T0_value(const RadialFunction& u) { return 0.5 * grad_norm_sq(u); }

double V_value(const RadialFunction& u, const Nonlinearity& nl) {
    const auto w = u.grid().weights();
    double s = 0.0;
    for (int i = 0; i < u.size(); ++i) s += w[i] * nl.G(u[i]);
    return s;
}

double pohozaev_P(const RadialFunction& u, const Nonlinearity& nl) {
    return grad_norm_sq(u) - 6.0 * V_value(u, nl);
}

PohozaevLambda pohozaev_residual_lambda(const RadialFunction& u, const Nonlinearity& nl, double lambda) {
    check_lambda(lambda);
    const double grad = grad_norm_sq(u);
    const double l2 = l2_norm_sq(u);
    const double coupling = solve_phi(u, lambda).coupling;
    const double prim = integrate_primitive(u, nl);
    PohozaevLambda out;
    out.residual = 0.5 * grad + 1.5 * l2 + 1.25 * lambda * coupling - 3.0 * prim;
    out.scale = 0.5 * grad + 1.5 * l2 + 1.25 * lambda * coupling + 3.0 * std::abs(prim);
    return out;
}

double dilation_derivative(const RadialFunction& u, const Nonlinearity& nl, double lambda, double dt) {
    check_lambda(lambda);
    require(dt > 0.0 && dt < 0.25, "dilation_derivative step must lie in (0, 0.25)");
    auto gamma_at = [&](double t) { return energy(dilate(u, t), nl, lambda).Gamma_value; };
    // Fourth-order central stencil.
    const double d1 = gamma_at(1.0 + dt) - gamma_at(1.0 - dt);
    const double d2 = gamma_at(1.0 + 2.0 * dt) - gamma_at(1.0 - 2.0 * dt);
    return (8.0 * d1 - d2) / (12.0 * dt);
}

} // namespace spgs
