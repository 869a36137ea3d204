#pragma once

#include <memory>
#include <string>
#include <vector>

#include "torus/spline.hpp"

namespace torus {

// A linear measurement functional: spatial sample at x0, real or imaginary
// part of a Fourier coefficient, or a gridded square-integrable profile.
class Functional {
public:
    enum class Kind { spatial, fourier, profile };

    static Functional spatial(const Knot& x0, int dim);
    static Functional fourier(const FreqIndex& k, bool real_part);
    static Functional profile(SymbolTable table);

    Kind kind() const { return kind_; }
    int dim() const { return dim_; }
    const Knot& x0() const { return x0_; }
    const FreqIndex& k() const { return k_; }
    bool real_part() const { return real_part_; }
    const SymbolTable& profile_table() const { return *prof_; }
    std::string description() const;

private:
    Functional() = default;
    Kind kind_ = Kind::spatial;
    int dim_ = 1;
    Knot x0_{0, 0, 0};
    FreqIndex k_{};
    bool real_part_ = true;
    std::shared_ptr<const SymbolTable> prof_;
};

// <nu, f> on a truncated table. Spatial: sum_k fhat[k] e^{i<k,x0>} (real
// part; the imaginary residue of a hermitian table is rounding-level).
// Fourier: Re/Im fhat[k]. Profile: pairing against the profile table.
double measure(const Functional& nu, const SymbolTable& table);

// The coefficient table of the functional itself, so that
// measure(nu, f) = pairing(functional_table(nu), f).
SymbolTable functional_table(const Functional& nu, int dim, int bandwidth);

struct AdmissibilityVerdict {
    enum class Status { yes, no, indeterminate };
    enum class Basis { ell1_criterion, ell2_criterion, growth_criterion, family_override };
    Status status = Status::indeterminate;
    Basis basis = Basis::ell1_criterion;
    std::string note;
};

std::string to_string(AdmissibilityVerdict::Status s);
std::string to_string(AdmissibilityVerdict::Basis b);

// Whether pointwise evaluation is a valid measurement, i.e. whether the
// Green's function is continuous. Decision order: family facts first
// (univariate fractional families iff gamma > 1; Matern/compact always;
// separable iff every factor; multivariate Laplacian/Sobolev yes when
// gamma > d, no when gamma <= d/2), then a numeric partial-sum test on the
// pseudoinverse symbol, else indeterminate.
AdmissibilityVerdict sampling_admissible(const Operator& op);

// Whether every square-integrable function is a valid measurement, i.e.
// whether the pseudoinverse symbol is square-summable.
AdmissibilityVerdict l2_admissible(const Operator& op);

// <nu, g_L(. - t)>: one column of the discretized measurement operator.
// Spatial functionals require a sampling-admissible operator; a verdict of
// No is refused, Indeterminate is allowed but flags *warn.
double measurement_column(const Functional& nu, const Operator& op, const Knot& t, int bandwidth,
                          bool* warn = nullptr);
// Same value without the admissibility gate; callers that assemble many
// columns run the gate once themselves.
double measurement_column_unchecked(const Functional& nu, const Operator& op, const Knot& t,
                                    int bandwidth);

// One element of the real trigonometric basis of the null space.
struct NullBasisElement {
    enum class Kind { constant, cosine, sine };
    Kind kind = Kind::constant;
    FreqIndex freq{};

    SymbolTable table(int dim, int bandwidth) const;
    std::string name() const;
};

// Real basis of the null space: the constant for k = 0 and cos/sin for
// each +-k pair, in lex order of the representative. Size equals the
// number of null frequencies.
std::vector<NullBasisElement> null_basis(const Operator& op);

// True iff the measurement map restricted to the null space has full rank
// (singular-value threshold 1e-10 relative).
bool nullspace_injectivity(const std::vector<Functional>& functionals, const Operator& op);

// Parses the functional grammar: `spatial:x=...[,y=...,z=...]` (radians),
// `fourier:k=...[,...],part=re|im`, `profile:file=...`.
Functional parse_functional(const std::string& spec, int dim, int bandwidth);

}  // namespace torus
