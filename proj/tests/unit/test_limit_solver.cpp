#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "spgs/functionals.hpp"

using namespace spgs;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

oracle::ShotGroundState shot_power(double q) {
    return oracle::shoot([q](double s) { return std::pow(s, q - 1); }, [q](double s) { return std::pow(s, q) / q; },
                         1.0 + 1e-9, 20.0);
}

}

TEST_SUITE("limit_solver") {

TEST_CASE("shooting oracle frozen values") {
    // Central value of the cubic ground state in R^3 and the energies of the power family.
    const oracle::ShotGroundState s4 = shot_power(4.0);
    CHECK(s4.central_value == doctest::Approx(4.33738768).epsilon(1e-8));
    CHECK(s4.I == doctest::Approx(18.8972513).epsilon(1e-7));
    // Pohozaev on the ground state: I = ||grad w||^2 / 3.
    CHECK(s4.I == doctest::Approx(s4.grad_sq / 3.0).epsilon(1e-7));
    CHECK(shot_power(3.0).I == doctest::Approx(43.6602367).epsilon(1e-7));
    CHECK(shot_power(5.0).I == doctest::Approx(9.58259009).epsilon(1e-7));
}

TEST_CASE("ground state identities") {
    const LimitGroundState& gs = fixture::cubic_branch().ground;
    CHECK(std::abs(gs.V_of_u - 1.0) <= 1e-8);
    CHECK(rel(gs.p_value, 2.0 * std::sqrt(3.0) / 9.0 * std::pow(gs.M_value, 1.5)) <= 1e-6);
    CHECK(rel(gs.b_value, grad_norm_sq(gs.omega) / 3.0) <= 1e-4);
    CHECK(std::abs(gs.pohozaev_relative) <= 1e-4);
    CHECK(std::abs(gs.b_argmax - 1.0) <= 1e-3);
    CHECK(gs.method == GroundStateMethod::constrained_flow);
    CHECK(T0_value(gs.u) == doctest::Approx(gs.M_value).epsilon(1e-14));
    for (int i = 1; i < gs.omega.size(); ++i) CHECK(gs.omega[i] <= gs.omega[i - 1]);
}

TEST_CASE("flow agrees with the independent shooting oracle") {
    const GridPtr& g = fixture::default_grid();
    for (double q : {3.0, 4.0, 5.0}) {
        const Nonlinearity nl = Nonlinearity::canonical(1.0, q, 0.0);
        const LimitGroundState gs = minimize_on_M(nl, g);
        const oracle::ShotGroundState s = shot_power(q);
        CHECK(rel(gs.p_value, s.I) <= 1e-4);
        CHECK(rel(gs.omega[0], s.central_value) <= 1e-3);
    }
}

TEST_CASE("library shooting agrees with the flow") {
    const GridPtr& g = fixture::default_grid();
    const Nonlinearity& nl = fixture::cubic();
    double a = 0.0;
    const RadialFunction w = shoot_ground_state(nl, g, shooting_bracket(nl, g->radius()), {}, &a);
    CHECK(a == doctest::Approx(4.33738768).epsilon(1e-6));
    CHECK(rel(energy(w, nl, 0.0).I_value, fixture::cubic_branch().ground.p_value) <= 1e-3);
    CHECK(classify_shot(nl, 0.9 * a, g->radius()).outcome == ShotOutcome::undershoot);
    CHECK(classify_shot(nl, 1.1 * a, g->radius()).outcome == ShotOutcome::overshoot);
}

TEST_CASE("dilation path through omega") {
    const LimitGroundState& gs = fixture::cubic_branch().ground;
    const Nonlinearity& nl = fixture::cubic();
    const double A = grad_norm_sq(gs.omega);
    for (double t = 0.25; t <= 2.0; t += 0.25)
        CHECK(std::abs(energy(dilate(gs.omega, t), nl, 0.0).I_value - (t / 2 - t * t * t / 6) * A) <= 1e-4 * gs.b_value);
    const MountainPassLevel mp = mountain_pass_b(gs.omega, nl);
    CHECK(rel(mp.b, gs.b_value) <= 1e-10);
    const auto [omega2, t] = cgm_rescale(gs.u, nl);
    CHECK(t == doctest::Approx(std::sqrt(grad_norm_sq(gs.u) / 6.0)).epsilon(1e-14));
    CHECK(rel(T0_value(omega2), t * gs.M_value) <= 1e-6);
}

TEST_CASE("restarts reach the same level") {
    const GridPtr& g = fixture::default_grid();
    const double M = fixture::cubic_branch().ground.M_value;
    for (unsigned seed : {1u, 2u, 77u}) {
        FlowOptions o;
        o.seed = seed;
        CHECK(rel(minimize_on_M(fixture::cubic(), g, o).M_value, M) <= 1e-6);
    }
}

TEST_CASE("critical case stays below the Sobolev level") {
    const GridPtr& g = fixture::default_grid();
    const LimitGroundState gs = minimize_on_M(Nonlinearity::canonical(5.0, 4.0, 1.0), g);
    CHECK(rel(gs.p_value, 2.0 * std::sqrt(3.0) / 9.0 * std::pow(gs.M_value, 1.5)) <= 1e-6);
    CHECK(gs.omega[0] > 0.0);
}

}
