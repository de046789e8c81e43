#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spgs/radial_grid.hpp"

namespace spgs {

/// 3 pi (sqrt(pi)/4)^(2/3), the best constant of D^{1,2}(R^3) -> L^6.
double sobolev_S_exact();

/// ||grad u||^2 / ||u||_6^2.
double sobolev_quotient(const RadialFunction& u);

struct SobolevResult {
    double S = 0.0;          // after polishing
    double S_scan = 0.0;     // best value over the bubble family
    double epsilon = 0.0;    // bubble width at the scan minimum
    double eps_lo = 0.0, eps_hi = 0.0;
    int polish_steps = 0;
    std::optional<std::string> warning;
};

/// Scans the Aubin-Talenti family sqrt(eps / (eps^2 + r^2)), shifted to vanish at
/// R, over eps in [eps_lo, eps_hi], then takes a few preconditioned descent steps
/// on the quotient.
SobolevResult sobolev_S(const GridPtr& grid, int polish_steps = 10);

/// ||v||_{H^1}^2 / ||v||_q^2.
double cq_quotient(const RadialFunction& v, double q);

struct CqResult {
    double q = 0.0;
    double Cq = 0.0;            // min of the two estimates
    double from_identity = 0.0; // ||w||_q^(q-2) at the ground state of -Lap w + w = w^(q-1)
    double from_descent = 0.0;  // direct quotient minimization from a Gaussian
    int descent_iterations = 0;
    RadialFunction ground_state;
};

CqResult best_Cq(double q, const GridPtr& grid, int max_descent = 600);

/// [(3q - 6) / (2 q S^(3/2))]^((q-2)/2) * Cq^(q/2).
double mu_threshold(double q, double S, double Cq);

/// (q-2)/(2q) mu^(-2/(q-2)) Cq^(q/(q-2)), the upper bound for b.
double b_upper_bound(double q, double mu, double Cq);

} // namespace spgs
