#include "spgs/limit_solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <sstream>

#include "spgs/error.hpp"
#include "spgs/functionals.hpp"
#include "spgs/optimize.hpp"

namespace spgs {

const char* to_string(GroundStateMethod method) noexcept {
    switch (method) {
    case GroundStateMethod::constrained_flow: return "constrained_flow";
    case GroundStateMethod::shooting: return "shooting";
    }
    return "unknown";
}

namespace {

std::vector<double> constraint_gradient(const RadialFunction& u, const Nonlinearity& nl) {
    const auto w = u.grid().weights();
    std::vector<double> g(u.size());
    for (int i = 0; i < u.size(); ++i) g[i] = w[i] * (nl.f(u[i]) - u[i]);
    return g;
}

// Dilation onto {V = 1}. A second pass absorbs the interpolation error.
std::optional<RadialFunction> retract(const RadialFunction& v, const Nonlinearity& nl) {
    RadialFunction out = v;
    for (int pass = 0; pass < 3; ++pass) {
        const double V = V_value(out, nl);
        if (!(V > 0.0) || !std::isfinite(V)) return std::nullopt;
        if (std::abs(V - 1.0) < 1e-13) break;
        out = dilate(out, std::pow(V, -1.0 / 3.0));
    }
    return out;
}

struct ProjectedGradient {
    std::vector<double> step;  // Riesz representative of T0' - k V'
    double multiplier = 0.0;
    double norm = 0.0;         // dual norm of T0' - k V'
};

ProjectedGradient projected_gradient(const RadialFunction& u, const Nonlinearity& nl) {
    const RadialGrid& g = u.grid();
    const std::vector<double> gT = g.stiffness().multiply(u.values());
    const std::vector<double> gV = constraint_gradient(u, nl);
    const std::vector<double> sT = g.h1_riesz(gT);
    const std::vector<double> sV = g.h1_riesz(gV);
    ProjectedGradient out;
    out.multiplier = linalg::dot(gT, sV) / linalg::dot(gV, sV);
    out.step.resize(sT.size());
    double n2 = 0.0;
    for (std::size_t i = 0; i < sT.size(); ++i) {
        out.step[i] = sT[i] - out.multiplier * sV[i];
        n2 += (gT[i] - out.multiplier * gV[i]) * out.step[i];
    }
    out.norm = std::sqrt(std::max(n2, 0.0));
    return out;
}

// One Newton step on A u - k V'(u) = 0, V(u) = 1 over the Dirichlet nodes,
// eliminating the multiplier through the bordered system.
RadialFunction newton_on_M(const RadialFunction& u, const Nonlinearity& nl, double k) {
    const RadialGrid& g = u.grid();
    const int m = g.last();
    const auto w = g.weights();
    linalg::BandMatrix J = g.stiffness().leading(m);
    const std::vector<double> Au = g.stiffness().multiply(u.values());
    const std::vector<double> gV = constraint_gradient(u, nl);
    std::vector<double> diag(m), F1(m), b(gV.begin(), gV.begin() + m);
    for (int i = 0; i < m; ++i) {
        diag[i] = -k * w[i] * (nl.fprime(u[i]) - 1.0);
        F1[i] = Au[i] - k * gV[i];
    }
    J.add_diagonal(diag);
    const double F2 = V_value(u, nl) - 1.0;
    const std::vector<double> x = J.solve(F1);
    const std::vector<double> y = J.solve(b);
    const double dk = (linalg::dot(b, x) - F2) / linalg::dot(b, y);
    std::vector<double> v(u.values().begin(), u.values().end());
    for (int i = 0; i < m; ++i) v[i] += -x[i] + dk * y[i];
    return u.with_values(std::move(v));
}

RadialFunction default_start(const Nonlinearity& nl, const GridPtr& grid, unsigned seed) {
    double xi0 = 0.0;
    for (int k = 0; k <= 120; ++k) {
        const double s = 1e-3 * std::pow(10.0, k / 20.0);
        if (nl.G(s) > 0.0) {
            xi0 = s;
            break;
        }
    }
    if (xi0 == 0.0) fail(ErrorCode::initialization_failure, "G(s) <= 0 on [1e-3, 1e3]: no admissible starting bump");
    const double rho = std::min(2.0, 0.25 * grid->radius());
    std::array<double, 3> c{};
    if (seed != 0) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> U(-0.3, 0.3);
        for (double& ck : c) ck = U(rng);
    }
    double height = 2.0 * xi0;
    for (int attempt = 0; attempt < 30; ++attempt, height *= 1.5) {
        auto bump = RadialFunction::sample(grid, [&](double r) {
            const double x = r / rho;
            if (x >= 1.0) return 0.0;
            double shape = 1.0;
            for (int k = 0; k < 3; ++k) shape += c[k] * std::cos((k + 1) * 3.141592653589793 * x);
            return height * (1.0 - x * x) * (1.0 - x * x) * shape;
        });
        if (V_value(bump, nl) > 0.0) {
            if (auto u = retract(bump, nl)) return *u;
        }
    }
    fail(ErrorCode::initialization_failure, "could not build a starting bump with V > 0");
}

void fill_levels(LimitGroundState& gs, const Nonlinearity& nl) {
    gs.M_value = T0_value(gs.u);
    gs.V_of_u = V_value(gs.u, nl);
    auto [omega, t] = cgm_rescale(gs.u, nl);
    gs.omega = std::move(omega);
    gs.t0_dilation = t;
    gs.p_value = energy(gs.omega, nl, 0.0).I_value;
    const double grad = grad_norm_sq(gs.omega);
    gs.pohozaev_relative = pohozaev_P(gs.omega, nl) / grad;
    const MountainPassLevel mp = mountain_pass_b(gs.omega, nl);
    gs.b_value = mp.b;
    gs.b_argmax = mp.t_star;
}

} // namespace

LimitGroundState minimize_on_M(const Nonlinearity& nl, const GridPtr& grid, const FlowOptions& opts,
                               const std::optional<RadialFunction>& initial) {
    require(grid != nullptr, "minimize_on_M: null grid");
    require(opts.tol > 0.0 && opts.max_iter > 0, "minimize_on_M: tol and max_iter must be positive");

    RadialFunction u = RadialFunction::zeros(grid);
    if (initial) {
        require(initial->grid_ptr() == grid, "minimize_on_M: initial guess lives on another grid");
        const double V0 = V_value(*initial, nl);
        if (!(V0 > 0.0))
            fail(ErrorCode::initialization_failure, "initial guess has V(u) <= 0 and cannot be dilated onto M");
        auto r = retract(*initial, nl);
        if (!r) fail(ErrorCode::initialization_failure, "initial guess could not be dilated onto M");
        u = *r;
    } else {
        u = default_start(nl, grid, opts.seed);
    }

    // Energy descent stalls once the decrease per step reaches rounding in T0
    // (around pg^2 ~ 1e-14 T0); below the hand-off level Newton finishes.
    const double handoff = std::max(opts.tol, 1e-5);
    double T = T0_value(u);
    double eta = 1.0;
    ProjectedGradient pg = projected_gradient(u, nl);
    int it = 0;
    for (; pg.norm > handoff; ++it) {
        if (it >= opts.max_iter) {
            std::ostringstream msg;
            msg << "constrained flow did not converge in " << opts.max_iter << " iterations (projected gradient "
                << pg.norm << ")";
            fail(ErrorCode::stagnation, msg.str());
        }
        bool accepted = false;
        for (int bt = 0; bt < 60 && !accepted; ++bt, eta *= 0.5) {
            std::vector<double> trial(u.values().begin(), u.values().end());
            for (std::size_t i = 0; i < trial.size(); ++i) trial[i] -= eta * pg.step[i];
            auto next = retract(u.with_values(std::move(trial)), nl);
            if (!next) continue;
            const double Tn = T0_value(*next);
            if (Tn <= T - 1e-4 * eta * pg.norm * pg.norm) {
                u = std::move(*next);
                T = Tn;
                accepted = true;
            }
        }
        if (!accepted) break;
        eta = std::min(eta * 3.0, 4.0);
        pg = projected_gradient(u, nl);
    }

    for (int k = 0; pg.norm > opts.tol; ++k) {
        if (k >= 20) {
            std::ostringstream msg;
            msg << "constrained flow stalled at projected gradient " << pg.norm;
            fail(ErrorCode::stagnation, msg.str());
        }
        u = newton_on_M(u, nl, pg.multiplier);
        pg = projected_gradient(u, nl);
        ++it;
    }
    const double pnorm = pg.norm;

    LimitGroundState gs{u, u, 0, 0, 0, 0, 0, 0, 0, pnorm, it, GroundStateMethod::constrained_flow};
    fill_levels(gs, nl);
    return gs;
}

std::pair<RadialFunction, double> cgm_rescale(const RadialFunction& u0, const Nonlinearity& nl) {
    const double V = V_value(u0, nl);
    if (std::abs(V - 1.0) > 1e-6) {
        std::ostringstream msg;
        msg << "cgm_rescale expects V(u0) = 1, got " << V;
        fail(ErrorCode::invalid_argument, msg.str());
    }
    const double t = std::sqrt(grad_norm_sq(u0)) / std::sqrt(6.0);
    require(t > 0.0, "cgm_rescale: u0 has no gradient");
    return {dilate(u0, t), t};
}

MountainPassLevel mountain_pass_b(const RadialFunction& omega, const Nonlinearity& nl, double t_lo, double t_hi) {
    require(t_lo > 0.0 && t_hi > t_lo, "mountain_pass_b: need 0 < t_lo < t_hi");
    auto I_at = [&](double t) { return energy(dilate(omega, t), nl, 0.0).I_value; };
    const ScalarExtremum m = golden_section_max(I_at, t_lo, t_hi, 1e-9);
    // The peak of the golden search is at a dilated copy; t = 1 is exact when omega lies on P.
    const double at_one = I_at(1.0);
    if (at_one >= m.value) return {at_one, 1.0};
    return {m.value, m.x};
}

// ---- shooting ----

namespace {

using State = std::array<double, 2>;

State rhs(const Nonlinearity& nl, double r, const State& y) {
    const double src = y[0] - nl.f(y[0]);
    if (r == 0.0) return {y[1], src / 3.0};
    return {y[1], src - 2.0 * y[1] / r};
}

State rk4(const Nonlinearity& nl, double r, const State& y, double h) {
    const State k1 = rhs(nl, r, y);
    const State k2 = rhs(nl, r + 0.5 * h, {y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]});
    const State k3 = rhs(nl, r + 0.5 * h, {y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]});
    const State k4 = rhs(nl, r + h, {y[0] + h * k3[0], y[1] + h * k3[1]});
    return {y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])};
}

struct Trajectory {
    Shot shot;
    bool event = false;
    std::vector<double> samples;  // u at r_i = i * dr, up to the event
};

// Adaptive RK4 with step doubling, stopping at grid nodes r_i = i * dr.
Trajectory integrate_shot(const Nonlinearity& nl, double a, double r_max, double dr, const ShootingOptions& opts,
                          bool record) {
    Trajectory out;
    State y{a, 0.0};
    double r = 0.0;
    double h = std::min(dr, 1e-2);
    const int nodes = static_cast<int>(std::lround(r_max / dr));
    if (record) out.samples.push_back(a);
    for (int i = 1; i <= nodes; ++i) {
        const double target = i * dr;
        while (r < target) {
            const double hs = std::min(h, target - r);
            const State full = rk4(nl, r, y, hs);
            const State half = rk4(nl, r, y, 0.5 * hs);
            const State two = rk4(nl, r + 0.5 * hs, half, 0.5 * hs);
            const double scale = std::abs(two[0]) + std::abs(two[1]) + 1e-300;
            const double err = (std::abs(two[0] - full[0]) + std::abs(two[1] - full[1])) / 15.0 / scale;
            if (err > opts.ode_tol && hs > opts.min_step) {
                h = std::max(0.5 * hs * std::pow(opts.ode_tol / err, 0.2), 0.1 * hs);
                continue;
            }
            if (err > opts.ode_tol) fail(ErrorCode::stiffness_failure, "shooting step size underflow");
            r += hs;
            y = {two[0] + (two[0] - full[0]) / 15.0, two[1] + (two[1] - full[1]) / 15.0};
            if (!std::isfinite(y[0]) || !std::isfinite(y[1]))
                fail(ErrorCode::stiffness_failure, "shooting trajectory became non-finite");
            const double grow = err > 0.0 ? 0.9 * std::pow(opts.ode_tol / err, 0.2) : 4.0;
            if (hs == h) h = hs * std::clamp(grow, 0.2, 4.0);
            if (y[0] < 0.0) {
                out.shot = {ShotOutcome::overshoot, r};
                out.event = true;
                return out;
            }
            if (y[1] > 0.0) {
                out.shot = {ShotOutcome::undershoot, r};
                out.event = true;
                return out;
            }
        }
        if (record) out.samples.push_back(y[0]);
    }
    out.shot = {y[0] + y[1] > 0.0 ? ShotOutcome::undershoot : ShotOutcome::overshoot, r};
    return out;
}

} // namespace

Shot classify_shot(const Nonlinearity& nl, double a, double r_max, const ShootingOptions& opts) {
    require(a > 0.0 && std::isfinite(a), "classify_shot: central value must be positive");
    require(r_max > 0.0, "classify_shot: r_max must be positive");
    return integrate_shot(nl, a, r_max, r_max / 1000.0, opts, false).shot;
}

std::pair<double, double> shooting_bracket(const Nonlinearity& nl, double r_max, const ShootingOptions& opts) {
    double lo = 0.0;
    for (int k = 0; k <= 160; ++k) {
        const double s = 1e-4 * std::pow(10.0, k / 20.0);
        if (nl.f(s) > s) {
            lo = s;
            break;
        }
    }
    if (lo == 0.0) fail(ErrorCode::bracket_failure, "f(s) <= s on [1e-4, 1e4]: no positive solution to bracket");
    int tries = 0;
    while (classify_shot(nl, lo, r_max, opts).outcome != ShotOutcome::undershoot) {
        lo *= 0.5;
        if (++tries > 40) fail(ErrorCode::bracket_failure, "no undershooting central value found");
    }
    double hi = 2.0 * lo;
    tries = 0;
    while (classify_shot(nl, hi, r_max, opts).outcome != ShotOutcome::overshoot) {
        lo = hi;
        hi *= 2.0;
        if (++tries > 40 || !std::isfinite(hi))
            fail(ErrorCode::bracket_failure, "no overshooting central value found");
    }
    return {lo, hi};
}

RadialFunction shoot_ground_state(const Nonlinearity& nl, const GridPtr& grid, std::pair<double, double> bracket,
                                  const ShootingOptions& opts, double* central_value) {
    require(grid != nullptr, "shoot_ground_state: null grid");
    auto [lo, hi] = bracket;
    if (!(lo > 0.0 && hi > lo)) fail(ErrorCode::bracket_failure, "shooting bracket must satisfy 0 < lo < hi");
    const double R = grid->radius();
    if (classify_shot(nl, lo, R, opts).outcome != ShotOutcome::undershoot)
        fail(ErrorCode::bracket_failure, "lower end of the bracket does not undershoot");
    if (classify_shot(nl, hi, R, opts).outcome != ShotOutcome::overshoot)
        fail(ErrorCode::bracket_failure, "upper end of the bracket does not overshoot");
    for (int it = 0; it < 200 && hi - lo > opts.tol * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (classify_shot(nl, mid, R, opts).outcome == ShotOutcome::undershoot ? lo : hi) = mid;
    }
    if (central_value) *central_value = lo;
    Trajectory t = integrate_shot(nl, lo, R, grid->spacing(), opts, true);
    std::vector<double> v(grid->size(), 0.0);
    const int m = std::min<int>(static_cast<int>(t.samples.size()), grid->size() - 1);
    for (int i = 0; i < m; ++i) v[i] = std::max(t.samples[i], 0.0);
    return RadialFunction(grid, std::move(v));
}

} // namespace spgs
