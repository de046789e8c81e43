#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace spgs::linalg {

/// Square band matrix, column-major band storage.
class BandMatrix {
public:
    BandMatrix() = default;
    BandMatrix(int n, int kl, int ku);

    int size() const noexcept { return n_; }
    int lower() const noexcept { return kl_; }
    int upper() const noexcept { return ku_; }

    double operator()(int i, int j) const;
    void add(int i, int j, double value);
    void add_diagonal(std::span<const double> d);

    std::vector<double> multiply(std::span<const double> x) const;

    /// Leading principal block of order m.
    BandMatrix leading(int m) const;

    /// Sparse LU solve of A x = b. Throws non_convergence on a singular factor.
    std::vector<double> solve(std::span<const double> b) const;

private:
    int n_ = 0;
    int kl_ = 0;
    int ku_ = 0;
    int ld_ = 0;
    std::vector<double> ab_;
};

/// Cholesky factor of a symmetric positive definite band matrix, reusable across solves.
class BandCholesky {
public:
    BandCholesky() = default;
    explicit BandCholesky(const BandMatrix& a);

    int size() const noexcept { return n_; }
    std::vector<double> solve(std::span<const double> b) const;

private:
    struct Factor;
    int n_ = 0;
    std::shared_ptr<const Factor> factor_;
};

struct Entry {
    int row = 0;
    int col = 0;
    double value = 0.0;
};

/// General sparse LU (fill-reducing column ordering). Duplicate entries are summed.
std::vector<double> sparse_solve(int n, std::span<const Entry> entries, std::span<const double> b);

double dot(std::span<const double> a, std::span<const double> b);

} // namespace spgs::linalg
