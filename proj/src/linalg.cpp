#include "torus/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace torus {

std::vector<double> matvec(const Matrix& m, const std::vector<double>& x) {
    if (x.size() != m.cols) throw std::invalid_argument("matvec: size mismatch");
    std::vector<double> y(m.rows, 0.0);
    for (std::size_t i = 0; i < m.rows; ++i) {
        double s = 0.0;
        const double* row = m.a.data() + i * m.cols;
        for (std::size_t j = 0; j < m.cols; ++j) s += row[j] * x[j];
        y[i] = s;
    }
    return y;
}

std::vector<double> matvec_t(const Matrix& m, const std::vector<double>& x) {
    if (x.size() != m.rows) throw std::invalid_argument("matvec_t: size mismatch");
    std::vector<double> y(m.cols, 0.0);
    for (std::size_t i = 0; i < m.rows; ++i) {
        const double* row = m.a.data() + i * m.cols;
        const double xi = x[i];
        for (std::size_t j = 0; j < m.cols; ++j) y[j] += row[j] * xi;
    }
    return y;
}

std::vector<double> lu_solve(Matrix a, std::vector<double> b) {
    if (a.rows != a.cols || b.size() != a.rows)
        throw std::invalid_argument("lu_solve: shape mismatch");
    const std::size_t n = a.rows;
    std::vector<std::size_t> piv(n);
    for (std::size_t i = 0; i < n; ++i) piv[i] = i;

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        double best = std::fabs(a(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            const double v = std::fabs(a(i, k));
            if (v > best) {
                best = v;
                p = i;
            }
        }
        if (best == 0.0 || !std::isfinite(best))
            throw std::runtime_error("lu_solve: singular system");
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
            std::swap(b[k], b[p]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = a(i, k) / a(k, k);
            a(i, k) = f;
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
            b[i] -= f * b[k];
        }
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t j = ii + 1; j < n; ++j) s -= a(ii, j) * x[j];
        x[ii] = s / a(ii, ii);
    }
    return x;
}

std::vector<double> least_squares(Matrix a, std::vector<double> b) {
    if (a.rows < a.cols || b.size() != a.rows)
        throw std::invalid_argument("least_squares: shape mismatch");
    const std::size_t m = a.rows, n = a.cols;
    // Householder QR applied to [a | b].
    for (std::size_t k = 0; k < n; ++k) {
        double norm = 0.0;
        for (std::size_t i = k; i < m; ++i) norm += a(i, k) * a(i, k);
        norm = std::sqrt(norm);
        if (norm == 0.0) throw std::runtime_error("least_squares: rank deficient");
        double alpha = (a(k, k) >= 0) ? -norm : norm;
        std::vector<double> v(m - k, 0.0);
        v[0] = a(k, k) - alpha;
        for (std::size_t i = k + 1; i < m; ++i) v[i - k] = a(i, k);
        double vtv = 0.0;
        for (double vi : v) vtv += vi * vi;
        if (vtv == 0.0) continue;
        for (std::size_t j = k; j < n; ++j) {
            double dot = 0.0;
            for (std::size_t i = k; i < m; ++i) dot += v[i - k] * a(i, j);
            const double f = 2.0 * dot / vtv;
            for (std::size_t i = k; i < m; ++i) a(i, j) -= f * v[i - k];
        }
        double dotb = 0.0;
        for (std::size_t i = k; i < m; ++i) dotb += v[i - k] * b[i];
        const double fb = 2.0 * dotb / vtv;
        for (std::size_t i = k; i < m; ++i) b[i] -= fb * v[i - k];
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t j = ii + 1; j < n; ++j) s -= a(ii, j) * x[j];
        if (a(ii, ii) == 0.0) throw std::runtime_error("least_squares: rank deficient");
        x[ii] = s / a(ii, ii);
    }
    return x;
}

namespace {

// One-sided Jacobi orthogonalization of the columns of a; on return the
// column norms are the singular values and v holds the right singular
// vectors (when requested).
void jacobi_columns(Matrix& a, Matrix* v) {
    const std::size_t n = a.cols;
    if (v) {
        *v = Matrix(n, n);
        for (std::size_t i = 0; i < n; ++i) (*v)(i, i) = 1.0;
    }
    const int max_sweeps = 60;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double app = 0.0, aqq = 0.0, apq = 0.0;
                for (std::size_t i = 0; i < a.rows; ++i) {
                    app += a(i, p) * a(i, p);
                    aqq += a(i, q) * a(i, q);
                    apq += a(i, p) * a(i, q);
                }
                off = std::max(off, std::fabs(apq) / std::max(1e-300, std::sqrt(app * aqq)));
                if (std::fabs(apq) < 1e-300) continue;
                const double zeta = (aqq - app) / (2.0 * apq);
                const double t = (zeta >= 0 ? 1.0 : -1.0) /
                                 (std::fabs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t i = 0; i < a.rows; ++i) {
                    const double ap = a(i, p), aq = a(i, q);
                    a(i, p) = c * ap - s * aq;
                    a(i, q) = s * ap + c * aq;
                }
                if (v) {
                    for (std::size_t i = 0; i < n; ++i) {
                        const double vp = (*v)(i, p), vq = (*v)(i, q);
                        (*v)(i, p) = c * vp - s * vq;
                        (*v)(i, q) = s * vp + c * vq;
                    }
                }
            }
        }
        if (off < 1e-14) break;
    }
}

}  // namespace

std::vector<double> singular_values(const Matrix& a) {
    if (a.rows == 0 || a.cols == 0) return {};
    Matrix w = a;
    jacobi_columns(w, nullptr);
    std::vector<double> sv(a.cols, 0.0);
    for (std::size_t j = 0; j < a.cols; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.rows; ++i) s += w(i, j) * w(i, j);
        sv[j] = std::sqrt(s);
    }
    std::sort(sv.begin(), sv.end(), std::greater<double>());
    return sv;
}

Matrix null_space_basis(const Matrix& a, double tol) {
    if (a.cols == 0) return Matrix(0, 0);
    if (a.rows == 0) {
        // No constraints: identity basis.
        Matrix z(a.cols, a.cols);
        for (std::size_t i = 0; i < a.cols; ++i) z(i, i) = 1.0;
        return z;
    }
    Matrix w = a;
    Matrix v;
    jacobi_columns(w, &v);
    std::vector<double> sv(a.cols, 0.0);
    double smax = 0.0;
    for (std::size_t j = 0; j < a.cols; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.rows; ++i) s += w(i, j) * w(i, j);
        sv[j] = std::sqrt(s);
        smax = std::max(smax, sv[j]);
    }
    std::vector<std::size_t> keep;
    for (std::size_t j = 0; j < a.cols; ++j)
        if (sv[j] <= tol * std::max(smax, 1e-300)) keep.push_back(j);
    Matrix z(a.cols, keep.size());
    for (std::size_t jj = 0; jj < keep.size(); ++jj)
        for (std::size_t i = 0; i < a.cols; ++i) z(i, jj) = v(i, keep[jj]);
    return z;
}

double power_iteration_sq_norm(const Matrix& s, int iterations) {
    if (s.cols == 0 || s.rows == 0) return 0.0;
    std::vector<double> v(s.cols, 1.0 / std::sqrt(static_cast<double>(s.cols)));
    double lambda = 0.0;
    for (int it = 0; it < iterations; ++it) {
        std::vector<double> w = matvec_t(s, matvec(s, v));
        double norm = 0.0;
        for (double wi : w) norm += wi * wi;
        norm = std::sqrt(norm);
        if (norm == 0.0) return 0.0;
        lambda = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) lambda += v[i] * w[i];
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = w[i] / norm;
    }
    return lambda;
}

}  // namespace torus
