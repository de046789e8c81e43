#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "spgs/constants.hpp"
#include "spgs/functionals.hpp"

using namespace spgs;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Plain Newton on the weak residual with a dense finite-difference Jacobian.
std::vector<double> dense_newton(const RadialFunction& start, const Nonlinearity& nl, double lambda) {
    std::vector<double> u(start.values().begin(), start.values().end());
    const int m = start.size() - 1;
    u.back() = 0.0;  // Dirichlet node
    for (int it = 0; it < 30; ++it) {
        const ResidualField res = gradient_residual(start.with_values(u), nl, lambda);
        if (res.dual_norm < 1e-12) break;
        Eigen::MatrixXd J(m, m);
        for (int j = 0; j < m; ++j) {
            const double h = 1e-6 * std::max(1.0, std::abs(u[j]));
            std::vector<double> up = u, um = u;
            up[j] += h;
            um[j] -= h;
            const auto rp = gradient_residual(start.with_values(up), nl, lambda).weak;
            const auto rm = gradient_residual(start.with_values(um), nl, lambda).weak;
            for (int i = 0; i < m; ++i) J(i, j) = (rp[i] - rm[i]) / (2 * h);
        }
        Eigen::VectorXd r(m);
        for (int i = 0; i < m; ++i) r[i] = res.weak[i];
        const Eigen::VectorXd dx = J.partialPivLu().solve(-r);
        for (int i = 0; i < m; ++i) u[i] += dx[i];
    }
    return u;
}

}

TEST_SUITE("sp_solver") {

TEST_CASE("solver agrees with dense Newton") {
    const GridPtr g = RadialGrid::make(15.0, 240);
    const Nonlinearity& nl = fixture::cubic();
    const LimitGroundState gs = minimize_on_M(nl, g);
    for (double lambda : {0.05, 0.5}) {
        const std::vector<double> ref = dense_newton(gs.omega, nl, lambda);
        for (bool force : {false, true}) {
            SolveOptions o;
            o.force_dense = force;
            o.tol = 1e-11;
            const BranchPoint p = solve_at_lambda(gs.omega, nl, lambda, o);
            double worst = 0.0;
            for (int i = 0; i < p.u.size(); ++i) worst = std::max(worst, std::abs(p.u[i] - ref[i]));
            CHECK(worst <= 1e-8 * ref[0]);
            CHECK(p.grad_residual_norm <= 1e-11);
        }
    }
}

TEST_CASE("lambda zero returns omega") {
    const SolutionBranch& br = fixture::cubic_branch();
    const BranchPoint z = solve_at_lambda(br.omega_ref, fixture::cubic(), 0.0);
    CHECK(z.iterations <= 2);
    CHECK(z.h1_dist_to_omega == 0.0);
    CHECK(rel(z.gamma_energy, br.b_ref) <= 1e-12);
    CHECK(rel(path_max_D(br.omega_ref, fixture::cubic(), 0.0, br.t0.t0).D, br.b_ref) <= 1e-6);
}

TEST_CASE("branch points") {
    const SolutionBranch& br = fixture::cubic_branch();
    REQUIRE(br.points.size() == 6);
    for (std::size_t k = 0; k < br.points.size(); ++k) {
        const BranchPoint& p = br.points[k];
        if (k > 0) CHECK(p.lambda < br.points[k - 1].lambda);
        CHECK(p.grad_residual_norm <= 1e-8);
        CHECK(std::abs(p.pohozaev_res) <= 1e-3);
        CHECK(std::abs(p.pohozaev_res - p.dilation_slope) <= 1e-3);
        CHECK(p.gamma_energy <= p.D_lambda);
        CHECK(p.D_lambda >= br.b_ref);
        CHECK(p.gamma_energy > p.i_energy);
        for (int i = 0; i < p.u.size(); ++i) {
            CHECK(p.u[i] >= 0.0);
            CHECK(p.phi[i] >= 0.0);
        }
        // Independent recomputation of the stored energy.
        CHECK(rel(energy(p.u, fixture::cubic(), p.lambda).Gamma_value, p.gamma_energy) <= 1e-13);
    }
}

TEST_CASE("t0 and lambda_1") {
    const SolutionBranch& br = fixture::cubic_branch();
    const Nonlinearity& nl = fixture::cubic();
    CHECK(br.t0.t0 == doctest::Approx(1.05 * br.t0.t_cross).epsilon(1e-14));
    CHECK(br.t0.I_at_t0 < -2.0);
    CHECK(energy(dilate(br.omega_ref, br.t0.t_cross), nl, 0.0).I_value < -2.0);
    CHECK(br.t0.monotone);
    // Closed form: Gamma at t0 is quadratic in lambda.
    const double l1 = gamma_below_minus_two_limit(br.omega_ref, nl, br.t0.t0);
    CHECK(l1 == br.lambda_1);
    const RadialFunction w = dilate(br.omega_ref, br.t0.t0);
    CHECK(energy(w, nl, l1).Gamma_value == doctest::Approx(-2.0).epsilon(1e-9));
    CHECK(energy(w, nl, 0.9 * l1).Gamma_value < -2.0);
}

TEST_CASE("asymptotic rates") {
    const SolutionBranch& br = fixture::cubic_branch();
    const AsymptoticsReport rep = asymptotics_report(br, fixture::cubic(), sobolev_S_exact());
    CHECK(rep.h1_monotone);
    CHECK(rep.phi_fit.slope >= 0.8);
    CHECK(rep.phi_fit.slope <= 1.2);
    CHECK(rep.gamma_fit.slope >= 1.8);
    CHECK(rep.gamma_fit.slope <= 2.2);
    CHECK(rep.D_fit.slope >= 1.8);
    CHECK(rep.D_fit.slope <= 2.2);
    CHECK(rep.energy_ordering);
    CHECK(rep.d_budget > 0.0);
}

TEST_CASE("power-law fit") {
    const std::vector<double> l{0.1, 0.2, 0.4, 0.8};
    std::vector<double> y;
    for (double x : l) y.push_back(3.0 * x * x);
    const PowerFit f = fit_power_law(l, y);
    CHECK(f.valid);
    CHECK(f.slope == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(f.prefactor == doctest::Approx(3.0).epsilon(1e-12));
    CHECK_FALSE(fit_power_law({0.1}, {1.0}).valid);
}

TEST_CASE("preconditions") {
    const SolutionBranch& br = fixture::cubic_branch();
    CHECK(oracle::error_code_of([&] { solve_at_lambda(br.omega_ref, fixture::cubic(), -0.1); }) ==
          ErrorCode::invalid_argument);
    CHECK(oracle::error_code_of([&] {
              continuation(fixture::cubic(), fixture::default_grid(), {0.1, 0.2});
          }) == ErrorCode::invalid_argument);
}

}
