#include "spgs/radial_grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "spgs/error.hpp"

namespace spgs {

namespace {

constexpr double four_pi = 4.0 * std::numbers::pi;

void add_term(GradientStencil& s, int node, double coeff) {
    for (int k = 0; k < s.count; ++k) {
        if (s.node[k] == node) {
            s.coeff[k] += coeff;
            return;
        }
    }
    s.node[s.count] = node;
    s.coeff[s.count] = coeff;
    ++s.count;
}

// Folds a reference to node j (possibly a ghost) into real nodes.
void add_folded(GradientStencil& s, int j, double coeff, int last) {
    if (j < 0) {
        add_term(s, -j, coeff);
    } else if (j > last) {
        // Cubic extrapolation through the last four nodes.
        add_term(s, last, 4.0 * coeff);
        add_term(s, last - 1, -6.0 * coeff);
        add_term(s, last - 2, 4.0 * coeff);
        add_term(s, last - 3, -1.0 * coeff);
    } else {
        add_term(s, j, coeff);
    }
}

} // namespace

GridPtr RadialGrid::make(double R, int n) {
    if (!std::isfinite(R) || R <= 0.0) {
        fail(ErrorCode::invalid_argument, "grid radius must be finite and positive, got " + std::to_string(R));
    }
    if (n < 16) fail(ErrorCode::invalid_argument, "grid needs at least 16 nodes, got " + std::to_string(n));
    return GridPtr(new RadialGrid(R, n));
}

RadialGrid::RadialGrid(double R, int n) : R_(R), n_(n), h_(R / (n - 1)) {
    const int N = n - 1;
    nodes_.resize(n);
    for (int i = 0; i < n; ++i) nodes_[i] = R * static_cast<double>(i) / N;
    nodes_[N] = R;

    weights_.resize(n);
    for (int i = 0; i < n; ++i) weights_[i] = four_pi * h_ * nodes_[i] * nodes_[i];
    weights_[0] *= 0.5;
    weights_[N] *= 0.5;
    // Gregory correction at the outer end: -h/12 nabla f_N - h/24 nabla^2 f_N.
    weights_[N] -= four_pi * nodes_[N] * nodes_[N] * h_ / 8.0;
    weights_[N - 1] += four_pi * nodes_[N - 1] * nodes_[N - 1] * h_ / 6.0;
    weights_[N - 2] -= four_pi * nodes_[N - 2] * nodes_[N - 2] * h_ / 24.0;

    midpoint_weights_.resize(N);
    stencils_.resize(N);
    const double c = 1.0 / (24.0 * h_);
    for (int k = 0; k < N; ++k) {
        const double m = (k + 0.5) * h_;
        midpoint_weights_[k] = four_pi * m * m * h_;
        GradientStencil& s = stencils_[k];
        add_folded(s, k - 1, c, N);
        add_folded(s, k, -27.0 * c, N);
        add_folded(s, k + 1, 27.0 * c, N);
        add_folded(s, k + 2, -1.0 * c, N);
    }

    stiffness_ = linalg::BandMatrix(n, 3, 3);
    for (int k = 0; k < N; ++k) {
        const GradientStencil& s = stencils_[k];
        for (int a = 0; a < s.count; ++a) {
            for (int b = 0; b < s.count; ++b) {
                stiffness_.add(s.node[a], s.node[b], midpoint_weights_[k] * s.coeff[a] * s.coeff[b]);
            }
        }
    }

    linalg::BandMatrix gram = stiffness_.leading(N);
    gram.add_diagonal(std::span<const double>(weights_).first(N));
    h1_factor_ = linalg::BandCholesky(gram);
}

std::vector<double> RadialGrid::h1_riesz(std::span<const double> dual) const {
    require(static_cast<int>(dual.size()) == n_, "h1_riesz: field length does not match the grid");
    std::vector<double> s = h1_factor_.solve(dual.first(n_ - 1));
    s.push_back(0.0);
    return s;
}

double RadialGrid::dual_norm(std::span<const double> dual) const {
    const std::vector<double> s = h1_riesz(dual);
    return std::sqrt(std::max(0.0, linalg::dot(dual.first(n_ - 1), std::span<const double>(s).first(n_ - 1))));
}

RadialFunction::RadialFunction(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    require(grid_ != nullptr, "radial function needs a grid");
    require(static_cast<int>(values_.size()) == grid_->size(),
            "radial function has " + std::to_string(values_.size()) + " samples for a grid of " +
                std::to_string(grid_->size()));
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            fail(ErrorCode::invalid_argument, "non-finite sample at node " + std::to_string(i));
        }
    }
}

RadialFunction RadialFunction::zeros(GridPtr grid) {
    const int n = grid->size();
    return RadialFunction(std::move(grid), std::vector<double>(n, 0.0));
}

RadialFunction RadialFunction::with_values(std::vector<double> values) const {
    return RadialFunction(grid_, std::move(values));
}

bool RadialFunction::same_grid(const RadialFunction& other) const noexcept {
    return grid_ == other.grid_ ||
           (grid_->size() == other.grid_->size() && grid_->radius() == other.grid_->radius());
}

namespace {

RadialFunction combine(const RadialFunction& a, const RadialFunction& b, double sb) {
    require(a.same_grid(b), "radial functions live on different grids");
    std::vector<double> v(a.size());
    for (int i = 0; i < a.size(); ++i) v[i] = a[i] + sb * b[i];
    return a.with_values(std::move(v));
}

} // namespace

RadialFunction operator+(const RadialFunction& a, const RadialFunction& b) { return combine(a, b, 1.0); }
RadialFunction operator-(const RadialFunction& a, const RadialFunction& b) { return combine(a, b, -1.0); }

RadialFunction operator*(double s, const RadialFunction& a) {
    std::vector<double> v(a.values().begin(), a.values().end());
    for (double& x : v) x *= s;
    return a.with_values(std::move(v));
}

double integrate(const RadialGrid& grid, std::span<const double> g) {
    require(static_cast<int>(g.size()) == grid.size(), "integrate: length mismatch");
    return linalg::dot(grid.weights(), g);
}

double integrate(const RadialFunction& g) { return integrate(g.grid(), g.values()); }

std::vector<double> midpoint_gradient(const RadialGrid& grid, std::span<const double> u) {
    const auto stencils = grid.gradient_stencils();
    std::vector<double> du(stencils.size());
    for (std::size_t k = 0; k < stencils.size(); ++k) {
        const GradientStencil& s = stencils[k];
        double d = 0.0;
        for (int a = 0; a < s.count; ++a) d += s.coeff[a] * u[s.node[a]];
        du[k] = d;
    }
    return du;
}

double grad_norm_sq(const RadialGrid& grid, std::span<const double> u) {
    require(static_cast<int>(u.size()) == grid.size(), "grad_norm_sq: length mismatch");
    const std::vector<double> du = midpoint_gradient(grid, u);
    const auto mw = grid.midpoint_weights();
    double s = 0.0;
    for (std::size_t k = 0; k < du.size(); ++k) s += mw[k] * du[k] * du[k];
    return s;
}

double grad_norm_sq(const RadialFunction& u) { return grad_norm_sq(u.grid(), u.values()); }

double l2_norm_sq(const RadialFunction& u) {
    const auto w = u.grid().weights();
    double s = 0.0;
    for (int i = 0; i < u.size(); ++i) s += w[i] * u[i] * u[i];
    return s;
}

double norm_lq(const RadialFunction& u, double q) {
    require(std::isfinite(q) && q >= 1.0, "norm_lq needs q >= 1");
    const auto w = u.grid().weights();
    double s = 0.0;
    for (int i = 0; i < u.size(); ++i) s += w[i] * std::pow(std::abs(u[i]), q);
    return std::pow(s, 1.0 / q);
}

double h1_norm_sq(const RadialFunction& u) { return grad_norm_sq(u) + l2_norm_sq(u); }

double tail_mass_fraction(const RadialFunction& u) {
    const auto w = u.grid().weights();
    const auto r = u.grid().nodes();
    const double cut = 0.9 * u.grid().radius();
    double total = 0.0;
    double tail = 0.0;
    for (int i = 0; i < u.size(); ++i) {
        const double m = w[i] * u[i] * u[i];
        total += m;
        if (r[i] >= cut) tail += m;
    }
    return total > 0.0 ? tail / total : 0.0;
}

namespace {

// Fourth-order nodal slopes, even reflection at the origin, limited per
// Fritsch-Carlson so the Hermite interpolant is monotone on monotone data.
std::vector<double> monotone_slopes(std::span<const double> u, double h) {
    const int n = static_cast<int>(u.size());
    const int N = n - 1;
    auto at = [&](int j) { return u[j < 0 ? -j : j]; };
    std::vector<double> d(n);
    for (int i = 0; i <= N - 2; ++i) {
        d[i] = (at(i - 2) - 8.0 * at(i - 1) + 8.0 * at(i + 1) - at(i + 2)) / (12.0 * h);
    }
    d[N - 1] = (3.0 * u[N] + 10.0 * u[N - 1] - 18.0 * u[N - 2] + 6.0 * u[N - 3] - u[N - 4]) / (12.0 * h);
    d[N] = (25.0 * u[N] - 48.0 * u[N - 1] + 36.0 * u[N - 2] - 16.0 * u[N - 3] + 3.0 * u[N - 4]) / (12.0 * h);
    d[0] = 0.0;

    std::vector<double> delta(N);
    for (int k = 0; k < N; ++k) delta[k] = (u[k + 1] - u[k]) / h;

    for (int i = 1; i < N; ++i) {
        if (delta[i - 1] * delta[i] <= 0.0) {
            d[i] = 0.0;
        } else if (d[i] * delta[i] < 0.0) {
            d[i] = 0.0;
        }
    }
    if (d[N] * delta[N - 1] < 0.0) d[N] = 0.0;

    for (int k = 0; k < N; ++k) {
        if (delta[k] == 0.0) {
            d[k] = 0.0;
            d[k + 1] = 0.0;
            continue;
        }
        const double a = d[k] / delta[k];
        const double b = d[k + 1] / delta[k];
        const double s = a * a + b * b;
        if (s > 9.0) {
            const double tau = 3.0 / std::sqrt(s);
            d[k] = tau * a * delta[k];
            d[k + 1] = tau * b * delta[k];
        }
    }
    return d;
}

} // namespace

RadialFunction dilate(const RadialFunction& u, double t) {
    if (!std::isfinite(t) || t <= 0.0) fail(ErrorCode::invalid_argument, "dilation factor must be positive");
    if (t == 1.0) return u;
    const RadialGrid& g = u.grid();
    const int N = g.last();
    const double h = g.spacing();
    const auto v = u.values();
    const std::vector<double> d = monotone_slopes(v, h);
    const auto r = g.nodes();
    std::vector<double> out(g.size(), 0.0);
    for (int j = 0; j <= N; ++j) {
        const double x = r[j] / t;
        if (x > g.radius()) continue;
        int k = std::min(static_cast<int>(x / h), N - 1);
        const double s = (x - r[k]) / h;
        const double s2 = s * s;
        const double s3 = s2 * s;
        const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        const double h10 = s3 - 2.0 * s2 + s;
        const double h01 = -2.0 * s3 + 3.0 * s2;
        const double h11 = s3 - s2;
        out[j] = h00 * v[k] + h10 * h * d[k] + h01 * v[k + 1] + h11 * h * d[k + 1];
    }
    return u.with_values(std::move(out));
}

} // namespace spgs
