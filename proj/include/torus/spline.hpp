#pragma once

#include <array>
#include <vector>

#include "torus/operators.hpp"

namespace torus {

using Knot = std::array<double, 3>;  // first dim entries used, radians in [0, 2pi)

// Knot/weight pairs (x_k, a_k) of a periodic L-spline. Knots must be
// pairwise distinct on the torus and weights nonzero.
struct Innovations {
    int dim = 1;
    std::vector<Knot> knots;
    std::vector<double> weights;

    std::size_t count() const { return knots.size(); }
};

// ||a||_1 of the innovation weights; equals the TV norm of the innovation
// measure sum_k a_k Sha(. - x_k).
double tv_norm(const Innovations& innov);

struct CMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<cplx> a;

    CMatrix() = default;
    CMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, cplx(0, 0)) {}
    cplx& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    cplx operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
};

// M[n,k] = e^{-i <k_n, x_k>} over the null frequencies k_n and knots x_k.
// A weight vector is admissible iff M a = 0.
CMatrix innovation_matrix(const std::vector<Knot>& knots, const std::vector<FreqIndex>& null_freqs,
                          int dim);

struct ValidationResult {
    bool valid = false;
    double residual = 0.0;  // ||M a||_inf
};

// Valid iff ||M a||_inf <= 1e-9 ||a||_1. Duplicate knots (torus distance
// below 2pi * 1e-9) and zero weights are rejected up front.
ValidationResult validate_innovations(const Operator& op, const Innovations& innov);

// A periodic L-spline: f = sum_k a_k g_L(. - x_k) + p with p spanned by
// the null frequencies. Null coefficients are stored hermitian-paired so
// real null components round-trip exactly.
struct Spline {
    Operator op;
    Innovations innov;
    std::vector<std::pair<FreqIndex, cplx>> null_coeffs;  // lex-sorted keys

    cplx null_coeff(const FreqIndex& k) const;
    // Writes v at k and conj(v) at -k; k must be a null frequency of op.
    void set_null_coeff(const FreqIndex& k, cplx v);
};

// Validates the innovations against the operator's annihilation system.
Spline make_spline(Operator op, Innovations innov);

// Truncated coefficients of the spline:
// fhat[k] = phat[k] sum_j a_j e^{-i<k, x_j>} + nullCoeffs[k].
SymbolTable spline_table(const Spline& s, int bandwidth);

// Per-frequency product (L f)hat[k] = Lhat[k] fhat[k].
SymbolTable apply_operator(const Operator& op, const SymbolTable& table);

// max over 0 < |k|_inf <= K of |Lhat[k] fhat[k] - sum_j a_j e^{-i<k,x_j>}|,
// i.e. how far L f is from the pure Dirac stream of the innovations.
double annihilation_check(const Operator& op, const Spline& s, int bandwidth);

}  // namespace torus
