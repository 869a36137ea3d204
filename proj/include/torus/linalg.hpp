#pragma once

#include <cstddef>
#include <vector>

namespace torus {

// Dense row-major matrix. Sizes in this project are small (measurements x
// grid knots), so everything below is plain O(n^3) with deterministic
// operation order.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> a;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
};

std::vector<double> matvec(const Matrix& m, const std::vector<double>& x);
// m^T x
std::vector<double> matvec_t(const Matrix& m, const std::vector<double>& x);

// Solves a x = b by LU with partial pivoting. Throws on (numerically)
// singular systems.
std::vector<double> lu_solve(Matrix a, std::vector<double> b);

// Minimizes ||a x - b||_2 via Householder QR. Requires rows >= cols and
// full column rank.
std::vector<double> least_squares(Matrix a, std::vector<double> b);

// Singular values of a (descending), one-sided Jacobi on a^T a.
std::vector<double> singular_values(const Matrix& a);

// Orthonormal basis of the null space of a (columns of the result),
// singular vectors with sigma <= tol * sigma_max.
Matrix null_space_basis(const Matrix& a, double tol = 1e-10);

// Largest eigenvalue estimate of s^T s for the stacked operator s, by
// power iteration with a fixed all-ones start and a fixed iteration count.
double power_iteration_sq_norm(const Matrix& s, int iterations);

}  // namespace torus
