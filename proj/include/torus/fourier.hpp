#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

namespace torus {

// Functions live on the d-torus [0, 2pi)^d, d in {1,2,3}, with the
// conventions
//
//   f(x)    = sum_k fhat[k] e^{i<k,x>}
//   fhat[k] = (2pi)^-d \int f(x) e^{-i<k,x>} dx
//   <f, g>  = (2pi)^-d \int f(x) g(x) dx = sum_k fhat[k] ghat[-k]
//
// i.e. the bilinear Schwartz pairing, under which the Dirac comb has the
// all-ones coefficient sequence.

using cplx = std::complex<double>;

struct FreqIndex {
    int dim = 1;
    std::array<int, 3> k{0, 0, 0};

    int operator[](int axis) const { return k[static_cast<std::size_t>(axis)]; }
    int& operator[](int axis) { return k[static_cast<std::size_t>(axis)]; }
    friend bool operator==(const FreqIndex&, const FreqIndex&) = default;
};

FreqIndex freq(int k0);
FreqIndex freq(int k0, int k1);
FreqIndex freq(int k0, int k1, int k2);
FreqIndex negate(const FreqIndex& f);
long long norm_sq(const FreqIndex& f);
int norm_inf(const FreqIndex& f);
bool lex_less(const FreqIndex& a, const FreqIndex& b);
// True when the first nonzero component is positive (k=0 excluded).
bool lex_positive(const FreqIndex& f);
std::string to_string(const FreqIndex& f);

// Dense table of Fourier coefficients over the lattice cube [-K, K]^d.
// Storage is row-major with axis 0 outermost. A table flagged hermitian
// satisfies coeffs[-k] == conj(coeffs[k]) exactly; the builders below keep
// that true by mirroring rather than recomputation.
class SymbolTable {
public:
    SymbolTable() = default;
    SymbolTable(int dim, int bandwidth);

    int dim() const { return dim_; }
    int bandwidth() const { return bandwidth_; }
    bool hermitian() const { return hermitian_; }
    std::size_t size() const { return coeffs_.size(); }

    cplx at(const FreqIndex& f) const { return coeffs_[index(f)]; }
    // Raw write; the hermitian flag is dropped because pairing is no
    // longer guaranteed.
    void set(const FreqIndex& f, cplx v);
    // Writes v at f and conj(v) at -f; at f = 0 the imaginary part is
    // discarded. Keeps the hermitian flag.
    void set_pair(const FreqIndex& f, cplx v);

    std::size_t index(const FreqIndex& f) const;
    FreqIndex freq_at(std::size_t idx) const;

    template <class F>
    void for_each(F&& f) const {
        for (std::size_t i = 0; i < coeffs_.size(); ++i) f(freq_at(i), coeffs_[i]);
    }

    double max_abs() const;

    friend SymbolTable scaled_sum(cplx alpha, const SymbolTable& a, cplx beta,
                                  const SymbolTable& b);

private:
    int dim_ = 1;
    int bandwidth_ = 0;
    bool hermitian_ = true;
    std::vector<cplx> coeffs_;
};

// Builds a hermitian table from gen(k) evaluated on the lex-positive half
// lattice (and 0); the other half is the exact conjugate mirror.
template <class Gen>
SymbolTable make_hermitian_table(int dim, int bandwidth, Gen&& gen) {
    SymbolTable t(dim, bandwidth);
    t.for_each([&](const FreqIndex& f, cplx) {
        if (f == negate(f)) {
            t.set_pair(f, gen(f));
        } else if (lex_positive(f)) {
            t.set_pair(f, gen(f));
        }
    });
    return t;
}

struct GridFunction {
    int dim = 1;
    int samples_per_axis = 0;
    std::vector<double> values;  // n^d reals, row-major, axis 0 outermost

    std::size_t size() const { return values.size(); }
    // Grid node j_axis -> coordinate 2*pi*j/n.
    double coordinate(std::size_t flat, int axis) const;
};

enum class Smoothing { none, fejer };

// Truncated Fourier synthesis on the uniform n^d grid x_j = 2pi j / n via
// radix-2 FFTs, O(n^d log n). Requires a hermitian table, n a power of two
// and n >= 2K+2 so every retained mode lands in its own bin. Fejer
// smoothing applies the per-axis triangular weight (1 - |k_a|/(K+1)).
GridFunction synthesize(const SymbolTable& table, int samples_per_axis,
                        Smoothing smoothing);

// Forward transform: recovers the coefficients of a grid function for
// |k|_inf <= K (requires n >= 2K+2). Exact-hermitian by mirrored
// construction.
SymbolTable analyze(const GridFunction& grid, int bandwidth);

// Bilinear pairing sum_k fhat[k] ghat[-k]. Symmetric exactly: terms are
// grouped by {k, -k} so both argument orders run the identical float ops.
cplx pairing(const SymbolTable& f, const SymbolTable& g);

// ( sum_k (1 + ||k||^2)^tau |fhat[k]|^2 )^{1/2} over the retained lattice.
double sobolev_norm(const SymbolTable& table, double tau);

// In-place complex FFT, n a power of two:
//   out[j] = sum_m data[m] e^{sign * 2pi i * m j / n},  sign = +-1.
void fft_inplace(cplx* data, std::size_t n, int sign);

}  // namespace torus
