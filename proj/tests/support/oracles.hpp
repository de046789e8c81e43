#pragma once
// Reference computations that share no code with the library.

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/numeric/odeint.hpp>

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "spgs/error.hpp"

namespace oracle {

inline constexpr double pi = std::numbers::pi;

/// Newton potential of a Gaussian density exp(-r^2), lambda = 1: (sqrt(pi)/4) erf(r)/r.
inline double gaussian_phi(double r) {
    return r > 1e-8 ? std::sqrt(pi) / 4.0 * std::erf(r) / r : 0.5 - r * r / 3.0;
}

/// pi^(3/2) / (2 sqrt 2): int phi u^2 for u = exp(-r^2/2).
inline double gaussian_coupling() { return std::pow(pi, 1.5) / (2.0 * std::sqrt(2.0)); }

/// 4 pi int_0^R g(r) r^2 dr by adaptive Gauss-Kronrod.
inline double radial_integral(const std::function<double(double)>& g, double R) {
    return 4.0 * pi *
           boost::math::quadrature::gauss_kronrod<double, 61>::integrate([&](double r) { return g(r) * r * r; }, 0.0,
                                                                         R, 12, 1e-14);
}

/// Newton's theorem for a radial source rho = u^2: lambda [ (1/r) int_0^r rho s^2 ds + int_r^R rho s ds ].
inline double newton_theorem_phi(const std::function<double(double)>& rho, double R, double r, double lambda) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    const double inner = r > 0.0 ? GK::integrate([&](double s) { return rho(s) * s * s; }, 0.0, r, 12, 1e-14) / r : 0.0;
    const double outer = GK::integrate([&](double s) { return rho(s) * s; }, r, R, 12, 1e-14);
    return lambda * (inner + outer);
}

/// O(n^2) dense kernel phi_i = lambda sum_j w_j rho_j / (4 pi max(r_i, r_j)).
inline std::vector<double> dense_kernel_phi(std::span<const double> r, std::span<const double> w,
                                            std::span<const double> rho, double lambda) {
    const std::size_t n = r.size();
    std::vector<double> phi(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double m = std::max(r[i], r[j]);
            if (m > 0.0) s += w[j] * rho[j] / m;
        }
        phi[i] = lambda * s / (4.0 * pi);
    }
    return phi;
}

/// Radial ground state of -u'' - (2/r) u' + u = f(u) by dopri5 shooting and bisection on u(0).
/// I is accumulated along the trajectory up to the last radius where the shot still tracks the
/// decaying solution; the exponentially small remainder is dropped.
struct ShotGroundState {
    double central_value = 0.0;
    double I = 0.0;
    double grad_sq = 0.0;
    double r_end = 0.0;
};

inline ShotGroundState shoot(const std::function<double(double)>& f, const std::function<double(double)>& F, double lo,
                             double hi, double r_max = 30.0) {
    using State = std::array<double, 5>;  // u, u', int 4pi r^2 u'^2, int 4pi r^2 u^2, int 4pi r^2 F(u)
    namespace ode = boost::numeric::odeint;
    enum class Kind { under, over };
    auto run = [&](double a, double& r_stop, State& at_stop) {
        // Series start at r0 avoids the 2/r singularity.
        const double r0 = 1e-6;
        const double c = (a - f(a)) / 6.0;
        State x{a + c * r0 * r0, 2.0 * c * r0, 0.0, 0.0, 0.0};
        auto rhs = [&](const State& s, State& d, double r) {
            d[0] = s[1];
            d[1] = s[0] - f(std::max(s[0], 0.0)) - 2.0 / r * s[1];
            d[2] = 4.0 * pi * r * r * s[1] * s[1];
            d[3] = 4.0 * pi * r * r * s[0] * s[0];
            d[4] = 4.0 * pi * r * r * F(std::max(s[0], 0.0));
        };
        auto stepper = ode::make_dense_output(1e-13, 1e-13, ode::runge_kutta_dopri5<State>());
        stepper.initialize(x, r0, 1e-4);
        Kind kind = Kind::under;
        r_stop = r_max;
        at_stop = x;
        while (stepper.current_time() < r_max) {
            stepper.do_step(rhs);
            const State& s = stepper.current_state();
            if (s[0] < 0.0) {
                kind = Kind::over;
                r_stop = stepper.current_time();
                break;
            }
            if (s[1] > 0.0) {
                kind = Kind::under;
                r_stop = stepper.current_time();
                break;
            }
            at_stop = s;
        }
        return kind;
    };
    State s{};
    double r_stop = 0.0;
    if (run(lo, r_stop, s) != Kind::under || run(hi, r_stop, s) != Kind::over) throw std::runtime_error("bad bracket");
    for (int k = 0; k < 200 && hi - lo > 1e-15 * hi; ++k) {
        const double mid = 0.5 * (lo + hi);
        (run(mid, r_stop, s) == Kind::under ? lo : hi) = mid;
    }
    State last{};
    ShotGroundState out;
    run(lo, out.r_end, last);
    out.central_value = lo;
    out.grad_sq = last[2];
    out.I = 0.5 * last[2] + 0.5 * last[3] - last[4];
    return out;
}

/// Smooth positive random profile a (exp(-(r/s)^2/2) + m exp(-(r-c)^2/2)).
struct RandomProfile {
    double a, s, c, m;
    double operator()(double r) const {
        const double x = r / s;
        return a * (std::exp(-0.5 * x * x) + m * std::exp(-0.5 * (r - c) * (r - c)));
    }
};

inline RandomProfile random_profile(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> amp(0.3, 1.5), width(0.8, 2.5), shift(0.0, 3.0), mix(0.0, 0.5);
    return {amp(rng), width(rng), shift(rng), mix(rng)};
}

template <class Fn>
spgs::ErrorCode error_code_of(Fn&& fn) {
    try {
        fn();
    } catch (const spgs::Error& e) {
        return e.code();
    }
    throw std::runtime_error("expected an spgs::Error");
}

} // namespace oracle
