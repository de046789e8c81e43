#pragma once

#include <cmath>
#include <utility>

namespace spgs {

struct ScalarExtremum {
    double x = 0.0;
    double value = 0.0;
    int evaluations = 0;
};

/// Golden-section search for the maximum of a unimodal function on [a, b].
template <class Fn>
ScalarExtremum golden_section_max(Fn&& fn, double a, double b, double x_tol = 1e-10, int max_eval = 200) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = fn(c);
    double fd = fn(d);
    int evals = 2;
    while (std::abs(b - a) > x_tol * (1.0 + std::abs(c) + std::abs(d)) && evals < max_eval) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = fn(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = fn(d);
        }
        ++evals;
    }
    return fc > fd ? ScalarExtremum{c, fc, evals} : ScalarExtremum{d, fd, evals};
}

} // namespace spgs
