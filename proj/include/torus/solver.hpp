#pragma once

#include <vector>

#include "torus/linalg.hpp"
#include "torus/measurement.hpp"

namespace torus {

// Reconstruction problem: recover f from y ~ nu(f) by
//   min_f ||y - nu(f)||_2^2 + lambda ||L f||_M
// discretized over candidate knots t_i = 2pi i / N per axis.
struct ReconProblem {
    Operator op;
    std::vector<Functional> functionals;
    std::vector<double> y;
    double lambda = 0.0;
    int grid_knots = 0;  // N per axis
    int bandwidth = 0;   // K
};

struct SolverConfig {
    int max_iterations = 50000;
    double rel_tolerance = 1e-9;  // on objective decrease
    double null_penalty = 1e6;    // rho
    int power_iterations = 50;
    double step_safety = 0.95;
    bool accelerated = true;  // plain proximal gradient when false
    bool record_trace = false;
};

struct SolverDiagnostics {
    double objective = 0.0;  // data_fit + lambda * reg_value
    double data_fit = 0.0;
    double reg_value = 0.0;       // ||a||_1
    double null_penalty_value = 0.0;  // rho ||M_real a||^2, reported separately
    double null_residual = 0.0;       // ||M a||_inf
    int iterations = 0;
    bool converged = false;
    std::vector<double> trace;  // recorded objective sequence (optional)
};

struct Solution {
    std::vector<double> weights;      // grid weights a, length N^d
    std::vector<double> null_coeffs;  // real null basis coefficients
    SolverDiagnostics diagnostics;
};

// The discretized measurement operator: A[m,i] = <nu_m, g_L(. - t_i)>,
// B[m,n] = <nu_m, b_n> over the real null basis, and the real/imag
// expansion of the innovation matrix over the grid knots.
struct LinearSystem {
    Matrix a;
    Matrix b;
    Matrix m_real;
    std::vector<Knot> knots;
    std::vector<NullBasisElement> basis;
    bool sampling_warning = false;
};

// Enforces the problem invariants (M >= dim N_L, injectivity on the null
// space); spatial functionals on a non-sampling-admissible operator are
// refused, an indeterminate verdict sets sampling_warning.
LinearSystem build_system(const ReconProblem& problem);

// Smallest lambda for which a = 0: ||2 A^T (y - B c*)||_inf at the
// null-space-only least-squares fit c*.
double lambda_max(const ReconProblem& problem, const LinearSystem& system);
double lambda_max(const ReconProblem& problem);

struct ObjectiveParts {
    double objective = 0.0;
    double data_fit = 0.0;
    double reg_value = 0.0;
};

ObjectiveParts objective(const ReconProblem& problem, const LinearSystem& system,
                         const std::vector<double>& weights, const std::vector<double>& null_coeffs);

// Accelerated proximal gradient on
//   F(a,c) = ||y - A a - B c||^2 + lambda ||a||_1 + rho ||M_real a||^2
// with soft-thresholding on a only, monotone restart, and a power-iteration
// step size. Deterministic.
Solution solve_tv(const ReconProblem& problem, const LinearSystem& system,
                  const SolverConfig& config = {});
Solution solve_tv(const ReconProblem& problem, const SolverConfig& config = {});

struct TikhonovSolution {
    std::vector<double> coeffs;       // kernel weights a_m, length M
    std::vector<double> null_coeffs;  // real null basis coefficients
    SymbolTable table;                // fhat over the truncated lattice
    double data_fit = 0.0;
    double reg_value = 0.0;  // ||L f||_2^2 over the band
    double objective = 0.0;
};

// Quadratic baseline min ||y - nu(f)||^2 + lambda ||L f||_2^2 over the
// truncated band: the unique solution is a kernel expansion
// f = sum_m a_m (h_L * nu_m) + null part with hhat = |Lhat|^-2 off N_L.
// Solved through the (M + N0') x (M + N0') block system
// [G + lambda I, B; B^T, 0].
TikhonovSolution solve_tikhonov(const ReconProblem& problem);

// Sparsifies a grid solution toward the extreme-point form: keeps weights
// above threshold * ||a||_inf, merges adjacent active cells by weighted
// circular centroid, and re-fits weights and null coefficients by least
// squares with M a = 0 imposed exactly via null-space elimination.
Spline extract_spline(const ReconProblem& problem, const LinearSystem& system,
                      const Solution& solution, double threshold = 1e-4);

}  // namespace torus
