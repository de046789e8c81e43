#include "spgs/constants.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "spgs/error.hpp"
#include "spgs/limit_solver.hpp"
#include "spgs/nonlinearity.hpp"
#include "spgs/optimize.hpp"
#include "spgs/sp_solver.hpp"

namespace spgs {

namespace {

double sum_power(const RadialFunction& u, double p) {
    const auto w = u.grid().weights();
    double s = 0.0;
    for (int i = 0; i < u.size(); ++i) s += w[i] * std::pow(std::abs(u[i]), p);
    return s;
}

// Nodal gradient of v'Hv / (sum w |v|^p)^(2/p), given Hv and v'Hv. Returns the quotient.
double quotient_gradient(const RadialFunction& v, double p, const std::vector<double>& num_grad, double num,
                         std::vector<double>& grad) {
    const auto w = v.grid().weights();
    const double sp = sum_power(v, p);
    const double D = std::pow(sp, 2.0 / p);
    const double Q = num / D;
    grad.assign(v.size(), 0.0);
    for (int i = 0; i < v.size(); ++i) {
        const double dD = 2.0 * D / sp * w[i] * std::pow(std::abs(v[i]), p - 2.0) * v[i];
        grad[i] = (2.0 * num_grad[i] - Q * dD) / D;
    }
    return Q;
}

// Preconditioned descent on a homogeneous quotient. `eval` fills the nodal
// gradient and returns the quotient value.
template <class Eval>
RadialFunction descend(RadialFunction v, Eval&& eval, int max_steps, double rel_tol, int& steps_taken, double& value) {
    const RadialGrid& g = v.grid();
    std::vector<double> grad;
    double Q = eval(v, grad);
    double eta = 1.0;
    steps_taken = 0;
    for (int k = 0; k < max_steps; ++k) {
        std::vector<double> s = g.h1_riesz(grad);
        const double slope = linalg::dot(grad, s);
        if (!(slope > 0.0)) break;
        // Steps are measured relative to ||v||_{H^1} so eta is scale free.
        const double scale = std::sqrt(h1_norm_sq(v) / slope);
        bool accepted = false;
        std::vector<double> g_next;
        for (int bt = 0; bt < 40; ++bt, eta *= 0.5) {
            std::vector<double> x(v.values().begin(), v.values().end());
            for (std::size_t i = 0; i < x.size(); ++i) x[i] -= eta * scale * s[i];
            RadialFunction trial = v.with_values(std::move(x));
            const double Qn = eval(trial, g_next);
            if (Qn <= Q - 1e-4 * eta * scale * slope) {
                const double change = (Q - Qn) / Q;
                v = std::move(trial);
                Q = Qn;
                grad = std::move(g_next);
                accepted = true;
                ++steps_taken;
                if (change < rel_tol) k = max_steps;
                break;
            }
        }
        if (!accepted) break;
        eta = std::min(2.0 * eta, 1.0);
    }
    value = Q;
    return v;
}

void check_q(double q) {
    if (!(q > 2.0 && q < 6.0)) {
        std::ostringstream msg;
        msg << "q = " << q << " must lie in (2, 6)";
        fail(ErrorCode::invalid_argument, msg.str());
    }
}

} // namespace

double sobolev_S_exact() { return 3.0 * std::numbers::pi * std::pow(std::sqrt(std::numbers::pi) / 4.0, 2.0 / 3.0); }

double sobolev_quotient(const RadialFunction& u) {
    const double L6 = std::pow(sum_power(u, 6.0), 1.0 / 3.0);
    require(L6 > 0.0, "sobolev_quotient: u vanishes");
    return grad_norm_sq(u) / L6;
}

SobolevResult sobolev_S(const GridPtr& grid, int polish_steps) {
    require(grid != nullptr, "sobolev_S: null grid");
    require(polish_steps >= 0, "sobolev_S: polish_steps must be >= 0");
    const double R = grid->radius();
    SobolevResult out;
    out.eps_lo = 4.0 * grid->spacing();
    out.eps_hi = 0.25 * R;
    auto bubble = [&](double eps) {
        const double tail = std::sqrt(eps / (eps * eps + R * R));
        return RadialFunction::sample(grid, [&](double r) { return std::sqrt(eps / (eps * eps + r * r)) - tail; });
    };
    auto neg_quotient = [&](double log_eps) { return -sobolev_quotient(bubble(std::exp(log_eps))); };

    // Coarse scan, then golden section around the best sample.
    const int samples = 40;
    const double a = std::log(out.eps_lo), b = std::log(out.eps_hi);
    int best = 0;
    double best_val = -1e300;
    for (int k = 0; k < samples; ++k) {
        const double v = neg_quotient(a + (b - a) * k / (samples - 1));
        if (v > best_val) {
            best_val = v;
            best = k;
        }
    }
    const double step = (b - a) / (samples - 1);
    const double lo = std::max(a, a + (best - 1) * step), hi = std::min(b, a + (best + 1) * step);
    const ScalarExtremum m = golden_section_max(neg_quotient, lo, hi, 1e-8);
    out.epsilon = std::exp(m.x);
    out.S_scan = -m.value;
    if (out.epsilon < 1.1 * out.eps_lo || out.epsilon > 0.9 * out.eps_hi) {
        std::ostringstream msg;
        msg << "minimizing bubble width " << out.epsilon << " is within 10% of the resolvable range [" << out.eps_lo
            << ", " << out.eps_hi << "]; truncation of the 1/r tail biases S upward";
        out.warning = msg.str();
    }

    const linalg::BandMatrix& A = grid->stiffness();
    auto eval = [&](const RadialFunction& v, std::vector<double>& g) {
        const std::vector<double> Av = A.multiply(v.values());
        return quotient_gradient(v, 6.0, Av, linalg::dot(Av, v.values()), g);
    };
    double value = out.S_scan;
    descend(bubble(out.epsilon), eval, polish_steps, 0.0, out.polish_steps, value);
    out.S = std::min(value, out.S_scan);
    return out;
}

double cq_quotient(const RadialFunction& v, double q) {
    check_q(q);
    const double Lq2 = std::pow(sum_power(v, q), 2.0 / q);
    require(Lq2 > 0.0, "cq_quotient: v vanishes");
    return h1_norm_sq(v) / Lq2;
}

CqResult best_Cq(double q, const GridPtr& grid, int max_descent) {
    check_q(q);
    require(grid != nullptr, "best_Cq: null grid");
    const Nonlinearity nl = Nonlinearity::canonical(1.0, q, 0.0);
    const LimitGroundState gs = minimize_on_M(nl, grid);
    RadialFunction w = solve_at_lambda(gs.omega, nl, 0.0).u;

    CqResult out{q, 0.0, std::pow(sum_power(w, q), (q - 2.0) / q), 0.0, 0, w};

    const auto wts = grid->weights();
    const linalg::BandMatrix& A = grid->stiffness();
    auto eval = [&](const RadialFunction& v, std::vector<double>& g) {
        std::vector<double> Hv = A.multiply(v.values());
        for (int i = 0; i < v.size(); ++i) Hv[i] += wts[i] * v[i];
        return quotient_gradient(v, q, Hv, linalg::dot(Hv, v.values()), g);
    };
    auto gauss = RadialFunction::sample(grid, [](double r) { return std::exp(-0.5 * r * r); });
    double value = 0.0;
    descend(gauss, eval, max_descent, 1e-14, out.descent_iterations, value);
    out.from_descent = value;
    out.Cq = std::min(out.from_identity, out.from_descent);
    return out;
}

double mu_threshold(double q, double S, double Cq) {
    check_q(q);
    if (!(S > 0.0) || !(Cq > 0.0)) fail(ErrorCode::invalid_argument, "mu_threshold needs S > 0 and Cq > 0");
    return std::pow((3.0 * q - 6.0) / (2.0 * q * std::pow(S, 1.5)), 0.5 * (q - 2.0)) * std::pow(Cq, 0.5 * q);
}

double b_upper_bound(double q, double mu, double Cq) {
    check_q(q);
    if (!(mu > 0.0) || !(Cq > 0.0)) fail(ErrorCode::invalid_argument, "b_upper_bound needs mu > 0 and Cq > 0");
    return (q - 2.0) / (2.0 * q) * std::pow(mu, -2.0 / (q - 2.0)) * std::pow(Cq, q / (q - 2.0));
}

} // namespace spgs
