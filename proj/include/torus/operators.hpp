#pragma once

#include <optional>
#include <string>
#include <vector>

#include "torus/fourier.hpp"

namespace torus {

// Radial profile r >= 0 -> G(r) used to build operators from their Green's
// function g(x) = G(eps^-1 sqrt(2 - 2 cos x)) on the circle.
struct RadialProfile {
    enum class Kind { matern, compact_polynomial, tabulated };
    Kind kind = Kind::matern;
    double beta = 1.5;            // matern order parameter, > 1
    std::vector<double> poly;     // compact: coefficients of sum c_j r^j on [0,1)
    std::vector<double> samples;  // tabulated on the uniform grid [0, r_max]
    double r_max = 0.0;

    double operator()(double r) const;

    static RadialProfile matern(double beta);
    static RadialProfile compact_polynomial(std::vector<double> coeffs);
    // (1-r)_+^4 (4r+1): the compactly supported C^2 bump shipped as the
    // default compact profile.
    static RadialProfile compact_bump();
    static RadialProfile tabulated(std::vector<double> samples, double r_max);
};

// Matern function of order beta-1 normalized to 1 at the origin. Uses the
// exponential-times-polynomial closed form at half-integer beta and the
// modified Bessel function K_{beta-1} otherwise. Requires beta > 1.
double matern_radial(double beta, double r);

// Fourier coefficients of the circle restriction of a radial profile,
// ghat[k] = (1/2pi) \int g(x) e^{-ikx} dx, by trapezoidal quadrature at
// max(4K, 4096) nodes (compensated cosine sums; g is even so the result is
// real and symmetric). Every coefficient must come out strictly positive,
// otherwise construction fails.
SymbolTable radial_green_coeffs(const RadialProfile& profile, double epsilon, int bandwidth);

// A spline-admissible operator given by its Fourier symbol Lhat[k], with a
// finite null frequency set and the per-frequency pseudoinverse
// phat[k] = 1/Lhat[k] off the null set, 0 on it.
class Operator {
public:
    enum class Family {
        derivative_power,      // (i k)^N
        exponential_shift,     // (i k + alpha)^gamma
        modulated_derivative,  // i (k - k0)
        harmonic_pair,         // ||k0||^2 - ||k||^2
        fractional_derivative, // |k|^gamma e^{i pi gamma sign(k) / 2}
        fractional_laplacian,  // ||k||^gamma
        sobolev,               // (alpha^2 + ||k||^2)^{gamma/2}
        radial_green,          // 1 / ghat[k]
        separable,             // prod_i Lhat_i[k_i]
    };

    static Operator derivative_power(int n);
    static Operator exponential_shift(double alpha, double gamma);
    static Operator modulated_derivative(int k0);
    static Operator harmonic_pair(const FreqIndex& k0);
    static Operator fractional_derivative(double gamma);
    static Operator fractional_laplacian(double gamma, int dim = 1);
    static Operator sobolev(double alpha, double gamma, int dim = 1);
    static Operator radial_green(RadialProfile profile, double epsilon, int max_bandwidth = 512,
                                 std::optional<double> beta = std::nullopt);
    // Factors must all have empty null frequency sets, otherwise the
    // product null space would be infinite-dimensional.
    static Operator separable(std::vector<Operator> factors);

    // Defaults to the first derivative; normally built via the factories.
    Operator();

    Family family() const { return family_; }
    int dim() const { return dim_; }
    const std::string& description() const { return desc_; }

    cplx symbol(const FreqIndex& k) const;
    cplx pseudo_symbol(const FreqIndex& k) const;
    const std::vector<FreqIndex>& null_frequencies() const { return null_; }
    bool in_null_space(const FreqIndex& k) const;
    // Declared per family; absent when no ||k||^gamma envelope exists
    // (separable products are anisotropic).
    std::optional<double> spectral_growth() const;
    // True when Lhat[-k] = conj(Lhat[k]), i.e. the operator maps real
    // functions to real functions.
    bool real_symbol() const;
    // Largest |k| with a cached coefficient (radial_green only).
    int radial_bandwidth() const { return radial_bandwidth_; }
    const std::vector<Operator>& factors() const { return factors_; }
    const RadialProfile& profile() const { return profile_; }
    double epsilon() const { return epsilon_; }

private:
    struct Blank {};
    explicit Operator(Blank) {}

    Family family_ = Family::derivative_power;
    int dim_ = 1;
    double p1_ = 0.0;  // N / alpha / gamma, per family
    double p2_ = 0.0;  // gamma, per family
    FreqIndex k0_{};
    std::vector<FreqIndex> null_;
    std::vector<Operator> factors_;
    RadialProfile profile_;
    double epsilon_ = 1.0;
    std::optional<double> radial_beta_;
    int radial_bandwidth_ = 0;
    std::vector<double> ghat_;  // ghat_[|k|], radial_green cache
    std::string desc_;
};

// Deviations are scale-invariant: the first two relations are normalized
// per frequency by max(1, |Lhat|) and max(1, |phat|), the products
// Lhat phat are already dimensionless indicator values.
struct PseudoinverseReport {
    double lpl = 0.0;      // max |Lhat phat Lhat - Lhat| / max(1, |Lhat|)
    double plp = 0.0;      // max |phat Lhat phat - phat| / max(1, |phat|)
    double lp_imag = 0.0;  // max |Im(Lhat phat)|
    double pl_imag = 0.0;  // max |Im(phat Lhat)|
    double max() const;
};

// Checks the four Moore-Penrose relations as per-frequency scalar
// identities over [-K, K]^d.
PseudoinverseReport verify_pseudoinverse(const Operator& op, int bandwidth);
// Same, against a caller-supplied pseudo sequence (for forced failures).
template <class Pseudo>
PseudoinverseReport verify_pseudoinverse_with(const Operator& op, int bandwidth, Pseudo&& pseudo);

// Truncated coefficients of g_L = Ldagger applied to the Dirac comb.
SymbolTable green_table(const Operator& op, int bandwidth);

// Parses the CLI operator grammar `family:key=value,...` with families
// dpow, expshift, fracd, fraclap, sobolev, harmonic, matern, compact and
// sep(spec;spec;...). Keys are case-insensitive; unknown keys are
// rejected. `dim` constrains dimension-flexible families (0 = default).
Operator parse_operator(const std::string& spec, int dim = 0);

template <class Pseudo>
PseudoinverseReport verify_pseudoinverse_with(const Operator& op, int bandwidth, Pseudo&& pseudo) {
    PseudoinverseReport r;
    SymbolTable lattice(op.dim(), bandwidth);
    lattice.for_each([&](const FreqIndex& k, cplx) {
        const cplx L = op.symbol(k);
        const cplx p = pseudo(k);
        r.lpl = std::max(r.lpl, std::abs(L * p * L - L) / std::max(1.0, std::abs(L)));
        r.plp = std::max(r.plp, std::abs(p * L * p - p) / std::max(1.0, std::abs(p)));
        r.lp_imag = std::max(r.lp_imag, std::fabs((L * p).imag()));
        r.pl_imag = std::max(r.pl_imag, std::fabs((p * L).imag()));
    });
    return r;
}

}  // namespace torus
