#include "spgs/linalg.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <string>

#include "spgs/error.hpp"

namespace spgs::linalg {

namespace {

using Sparse = Eigen::SparseMatrix<double>;

Sparse to_sparse(const BandMatrix& a) {
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(static_cast<std::size_t>(a.size()) * (a.lower() + a.upper() + 1));
    for (int j = 0; j < a.size(); ++j) {
        for (int i = std::max(0, j - a.upper()); i <= std::min(a.size() - 1, j + a.lower()); ++i) {
            const double v = a(i, j);
            if (v != 0.0) t.emplace_back(i, j, v);
        }
    }
    Sparse m(a.size(), a.size());
    m.setFromTriplets(t.begin(), t.end());
    m.makeCompressed();
    return m;
}

Eigen::Map<const Eigen::VectorXd> as_vector(std::span<const double> b) {
    return {b.data(), static_cast<Eigen::Index>(b.size())};
}

std::vector<double> to_std(const Eigen::VectorXd& x) { return {x.data(), x.data() + x.size()}; }

} // namespace

BandMatrix::BandMatrix(int n, int kl, int ku)
    : n_(n), kl_(kl), ku_(ku), ld_(kl + ku + 1),
      ab_(static_cast<std::size_t>(ld_) * static_cast<std::size_t>(std::max(n, 0)), 0.0) {
    require(n > 0 && kl >= 0 && ku >= 0, "band matrix needs positive order and nonnegative bandwidths");
}

double BandMatrix::operator()(int i, int j) const {
    if (j - i > ku_ || i - j > kl_) return 0.0;
    return ab_[static_cast<std::size_t>(ku_ + i - j) + static_cast<std::size_t>(j) * ld_];
}

void BandMatrix::add(int i, int j, double value) {
    if (j - i > ku_ || i - j > kl_) {
        fail(ErrorCode::internal, "band matrix entry (" + std::to_string(i) + "," + std::to_string(j) +
                                      ") outside the band");
    }
    ab_[static_cast<std::size_t>(ku_ + i - j) + static_cast<std::size_t>(j) * ld_] += value;
}

void BandMatrix::add_diagonal(std::span<const double> d) {
    for (int i = 0; i < n_ && i < static_cast<int>(d.size()); ++i) add(i, i, d[i]);
}

std::vector<double> BandMatrix::multiply(std::span<const double> x) const {
    std::vector<double> y(n_, 0.0);
    for (int j = 0; j < n_; ++j) {
        const int lo = std::max(0, j - ku_);
        const int hi = std::min(n_ - 1, j + kl_);
        for (int i = lo; i <= hi; ++i) y[i] += (*this)(i, j) * x[j];
    }
    return y;
}

BandMatrix BandMatrix::leading(int m) const {
    require(m > 0 && m <= n_, "leading block order out of range");
    BandMatrix out(m, kl_, ku_);
    for (int j = 0; j < m; ++j) {
        const int lo = std::max(0, j - ku_);
        const int hi = std::min(m - 1, j + kl_);
        for (int i = lo; i <= hi; ++i) out.add(i, j, (*this)(i, j));
    }
    return out;
}

std::vector<double> BandMatrix::solve(std::span<const double> b) const {
    require(static_cast<int>(b.size()) == n_, "band solve: right-hand side has the wrong length");
    // Natural ordering keeps the factor inside the band.
    Eigen::SparseLU<Sparse, Eigen::NaturalOrdering<int>> lu;
    lu.compute(to_sparse(*this));
    if (lu.info() != Eigen::Success) fail(ErrorCode::non_convergence, "band LU failed: " + lu.lastErrorMessage());
    Eigen::VectorXd x = lu.solve(as_vector(b));
    if (lu.info() != Eigen::Success || !x.allFinite()) fail(ErrorCode::non_convergence, "band LU solve failed");
    return to_std(x);
}

struct BandCholesky::Factor {
    Eigen::SimplicialLLT<Sparse, Eigen::Lower, Eigen::NaturalOrdering<int>> llt;
};

BandCholesky::BandCholesky(const BandMatrix& a) : n_(a.size()) {
    auto f = std::make_shared<Factor>();
    f->llt.compute(to_sparse(a));
    if (f->llt.info() != Eigen::Success) fail(ErrorCode::internal, "band Cholesky failed: matrix not positive definite");
    factor_ = std::move(f);
}

std::vector<double> BandCholesky::solve(std::span<const double> b) const {
    require(factor_ != nullptr, "Cholesky solve on an empty factor");
    require(static_cast<int>(b.size()) == n_, "Cholesky solve: right-hand side has the wrong length");
    return to_std(factor_->llt.solve(as_vector(b)));
}

std::vector<double> sparse_solve(int n, std::span<const Entry> entries, std::span<const double> b) {
    require(n > 0 && static_cast<int>(b.size()) == n, "sparse solve: dimension mismatch");
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(entries.size());
    for (const Entry& e : entries) {
        require(e.row >= 0 && e.row < n && e.col >= 0 && e.col < n, "sparse solve: entry out of range");
        t.emplace_back(e.row, e.col, e.value);
    }
    Sparse m(n, n);
    m.setFromTriplets(t.begin(), t.end());
    m.makeCompressed();
    Eigen::SparseLU<Sparse, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(m);
    if (lu.info() != Eigen::Success) fail(ErrorCode::non_convergence, "sparse LU failed: " + lu.lastErrorMessage());
    Eigen::VectorXd x = lu.solve(as_vector(b));
    if (lu.info() != Eigen::Success || !x.allFinite()) fail(ErrorCode::non_convergence, "sparse LU solve failed");
    return to_std(x);
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

} // namespace spgs::linalg
