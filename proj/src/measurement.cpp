#include "torus/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kv_grammar.hpp"
#include "torus/formats.hpp"
#include "torus/linalg.hpp"
#include "torus/util.hpp"

namespace torus {

namespace {

cplx point_phase(const FreqIndex& k, const Knot& x, double sign) {
    double dot = 0.0;
    for (int a = 0; a < k.dim; ++a) dot += static_cast<double>(k[a]) * x[static_cast<std::size_t>(a)];
    return std::polar(1.0, sign * dot);
}

}  // namespace

Functional Functional::spatial(const Knot& x0, int dim) {
    Functional f;
    f.kind_ = Kind::spatial;
    f.dim_ = dim;
    for (int a = 0; a < dim; ++a) f.x0_[static_cast<std::size_t>(a)] = wrap_angle(x0[static_cast<std::size_t>(a)]);
    return f;
}

Functional Functional::fourier(const FreqIndex& k, bool real_part) {
    if (!real_part && norm_sq(k) == 0)
        throw std::invalid_argument("functional: Im fhat[0] is identically zero for real functions");
    Functional f;
    f.kind_ = Kind::fourier;
    f.dim_ = k.dim;
    f.k_ = k;
    f.real_part_ = real_part;
    return f;
}

Functional Functional::profile(SymbolTable table) {
    if (!table.hermitian()) throw std::invalid_argument("functional: profile table must be hermitian");
    Functional f;
    f.kind_ = Kind::profile;
    f.dim_ = table.dim();
    f.prof_ = std::make_shared<SymbolTable>(std::move(table));
    return f;
}

std::string Functional::description() const {
    switch (kind_) {
        case Kind::spatial: {
            std::string s = "spatial:x=" + std::to_string(x0_[0]);
            if (dim_ > 1) s += ",y=" + std::to_string(x0_[1]);
            if (dim_ > 2) s += ",z=" + std::to_string(x0_[2]);
            return s;
        }
        case Kind::fourier: {
            std::string s = "fourier:k=";
            for (int a = 0; a < dim_; ++a) s += (a ? "," : "") + std::to_string(k_[a]);
            return s + ",part=" + (real_part_ ? "re" : "im");
        }
        case Kind::profile:
            return "profile:bandwidth=" + std::to_string(prof_->bandwidth());
    }
    return {};
}

double measure(const Functional& nu, const SymbolTable& table) {
    if (nu.dim() != table.dim()) throw std::invalid_argument("measure: dimension mismatch");
    switch (nu.kind()) {
        case Functional::Kind::spatial: {
            if (table.hermitian()) {
                // Conjugate pairs sum to an exactly real contribution.
                double s = 0.0;
                table.for_each([&](const FreqIndex& k, cplx c) {
                    if (k == negate(k))
                        s += (c * point_phase(k, nu.x0(), +1.0)).real();
                    else if (lex_positive(k))
                        s += 2.0 * (c * point_phase(k, nu.x0(), +1.0)).real();
                });
                return s;
            }
            cplx s(0.0, 0.0);
            table.for_each([&](const FreqIndex& k, cplx c) { s += c * point_phase(k, nu.x0(), +1.0); });
            const double scale = table.max_abs();
            if (scale > 0.0 && std::fabs(s.imag()) > 1e-10 * scale)
                throw std::runtime_error("measure: imaginary residue of a spatial sample exceeds tolerance");
            return s.real();
        }
        case Functional::Kind::fourier: {
            if (norm_inf(nu.k()) > table.bandwidth()) return 0.0;  // outside the retained band
            const cplx c = table.at(nu.k());
            return nu.real_part() ? c.real() : c.imag();
        }
        case Functional::Kind::profile: {
            const SymbolTable& p = nu.profile_table();
            if (p.bandwidth() < table.bandwidth())
                throw std::invalid_argument("measure: profile bandwidth below table bandwidth");
            cplx s(0.0, 0.0);
            table.for_each([&](const FreqIndex& k, cplx) {
                if (k == negate(k)) {
                    s += p.at(k) * table.at(k);
                } else if (lex_positive(k)) {
                    const FreqIndex mk = negate(k);
                    s += p.at(k) * table.at(mk) + p.at(mk) * table.at(k);
                }
            });
            return s.real();
        }
    }
    return 0.0;
}

SymbolTable functional_table(const Functional& nu, int dim, int bandwidth) {
    if (nu.dim() != dim) throw std::invalid_argument("functional_table: dimension mismatch");
    switch (nu.kind()) {
        case Functional::Kind::spatial:
            // Shifted Dirac comb: all-ones sequence modulated by the shift.
            return make_hermitian_table(dim, bandwidth,
                                        [&](const FreqIndex& k) { return point_phase(k, nu.x0(), -1.0); });
        case Functional::Kind::fourier: {
            SymbolTable t(dim, bandwidth);
            if (norm_sq(nu.k()) == 0) {
                t.set_pair(nu.k(), cplx(1.0, 0.0));
            } else if (nu.real_part()) {
                t.set_pair(nu.k(), cplx(0.5, 0.0));
            } else {
                t.set_pair(nu.k(), cplx(0.0, 0.5));
            }
            return t;
        }
        case Functional::Kind::profile: {
            const SymbolTable& p = nu.profile_table();
            SymbolTable t(dim, bandwidth);
            t.for_each([&](const FreqIndex& k, cplx) {
                if (norm_inf(k) <= p.bandwidth() && (k == negate(k) || lex_positive(k)))
                    t.set_pair(k, p.at(k));
            });
            return t;
        }
    }
    return SymbolTable(dim, bandwidth);
}

std::string to_string(AdmissibilityVerdict::Status s) {
    switch (s) {
        case AdmissibilityVerdict::Status::yes: return "Yes";
        case AdmissibilityVerdict::Status::no: return "No";
        case AdmissibilityVerdict::Status::indeterminate: return "Indeterminate";
    }
    return {};
}

std::string to_string(AdmissibilityVerdict::Basis b) {
    switch (b) {
        case AdmissibilityVerdict::Basis::ell1_criterion: return "ell1-criterion";
        case AdmissibilityVerdict::Basis::ell2_criterion: return "ell2-criterion";
        case AdmissibilityVerdict::Basis::growth_criterion: return "growth-criterion";
        case AdmissibilityVerdict::Basis::family_override: return "family-override";
    }
    return {};
}

namespace {

using Status = AdmissibilityVerdict::Status;
using Basis = AdmissibilityVerdict::Basis;

AdmissibilityVerdict verdict(Status s, Basis b, std::string note = {}) {
    return AdmissibilityVerdict{s, b, std::move(note)};
}

int generic_test_bandwidth(const Operator& op) {
    int k = 0;
    switch (op.dim()) {
        case 1: k = 2048; break;
        case 2: k = 90; break;
        default: k = 20; break;
    }
    if (op.family() == Operator::Family::radial_green) k = std::min(k, op.radial_bandwidth() / 2);
    if (op.family() == Operator::Family::separable) {
        for (const Operator& f : op.factors())
            if (f.family() == Operator::Family::radial_green)
                k = std::min(k, f.radial_bandwidth() / 2);
    }
    return std::max(k, 2);
}

struct PartialSums {
    double s1_inner = 0.0, s1_outer = 0.0;
    double s2_inner = 0.0, s2_outer = 0.0;
};

PartialSums pseudo_partial_sums(const Operator& op, int k_test) {
    PartialSums ps;
    SymbolTable lattice(op.dim(), 2 * k_test);
    lattice.for_each([&](const FreqIndex& k, cplx) {
        const double a = std::abs(op.pseudo_symbol(k));
        ps.s1_outer += a;
        ps.s2_outer += a * a;
        if (norm_inf(k) <= k_test) {
            ps.s1_inner += a;
            ps.s2_inner += a * a;
        }
    });
    return ps;
}

// Tail-ratio heuristic on the partial sums at K and 2K, threshold 1.01:
// l1 settled -> continuous Green's function; l2 still growing -> not even
// square-integrable.
AdmissibilityVerdict generic_sampling(const Operator& op) {
    const int kt = generic_test_bandwidth(op);
    const PartialSums ps = pseudo_partial_sums(op, kt);
    if (ps.s1_inner > 0.0 && ps.s1_outer <= 1.01 * ps.s1_inner)
        return verdict(Status::yes, Basis::ell1_criterion,
                       "sum |phat| numerically convergent (tail ratio at K=" + std::to_string(kt) + ")");
    if (ps.s2_inner > 0.0 && ps.s2_outer > 1.01 * ps.s2_inner)
        return verdict(Status::no, Basis::ell2_criterion,
                       "sum |phat|^2 numerically divergent (tail ratio at K=" + std::to_string(kt) + ")");
    return verdict(Status::indeterminate, Basis::ell2_criterion,
                   "l1 sum still growing, l2 sum bounded: between the criteria");
}

AdmissibilityVerdict combine_factors(std::vector<AdmissibilityVerdict> vs, const char* what) {
    bool all_yes = true;
    for (const AdmissibilityVerdict& v : vs) {
        if (v.status == Status::no)
            return verdict(Status::no, Basis::family_override, std::string("a factor is not ") + what);
        if (v.status != Status::yes) all_yes = false;
    }
    if (all_yes)
        return verdict(Status::yes, Basis::family_override, std::string("every factor is ") + what);
    return verdict(Status::indeterminate, Basis::family_override, "a factor is undecided");
}

}  // namespace

AdmissibilityVerdict sampling_admissible(const Operator& op) {
    using Family = Operator::Family;
    const int d = op.dim();
    switch (op.family()) {
        case Family::derivative_power:
        case Family::fractional_derivative:
        case Family::exponential_shift: {
            const double g = *op.spectral_growth();
            return verdict(g > 1.0 ? Status::yes : Status::no, Basis::family_override,
                           "univariate fractional family: sampling-admissible iff gamma > 1");
        }
        case Family::fractional_laplacian:
        case Family::sobolev: {
            const double g = *op.spectral_growth();
            if (d == 1)
                return verdict(g > 1.0 ? Status::yes : Status::no, Basis::family_override,
                               "univariate fractional family: sampling-admissible iff gamma > 1");
            if (g > static_cast<double>(d))
                return verdict(Status::yes, Basis::growth_criterion, "spectral growth gamma > d");
            if (g <= static_cast<double>(d) / 2.0)
                return verdict(Status::no, Basis::growth_criterion, "spectral growth gamma <= d/2");
            return verdict(Status::indeterminate, Basis::growth_criterion,
                           "d/2 < gamma <= d: undecided (gamma > d conjectured necessary)");
        }
        case Family::radial_green:
            if (op.profile().kind != RadialProfile::Kind::tabulated)
                return verdict(Status::yes, Basis::family_override,
                               "Matern/compact radial operators are sampling-admissible for any parameters");
            return generic_sampling(op);
        case Family::separable: {
            std::vector<AdmissibilityVerdict> vs;
            for (const Operator& f : op.factors()) vs.push_back(sampling_admissible(f));
            return combine_factors(std::move(vs), "sampling-admissible");
        }
        case Family::modulated_derivative:
        case Family::harmonic_pair:
            return generic_sampling(op);
    }
    return generic_sampling(op);
}

AdmissibilityVerdict l2_admissible(const Operator& op) {
    using Family = Operator::Family;
    const int d = op.dim();
    switch (op.family()) {
        case Family::derivative_power:
        case Family::fractional_derivative:
        case Family::exponential_shift: {
            const double g = *op.spectral_growth();
            return verdict(g > 0.5 ? Status::yes : Status::no, Basis::family_override,
                           "univariate fractional family: L2-admissible iff gamma > 1/2");
        }
        case Family::fractional_laplacian:
        case Family::sobolev: {
            const double g = *op.spectral_growth();
            if (g > static_cast<double>(d) / 2.0)
                return verdict(Status::yes, Basis::family_override, "L2-admissible iff gamma > d/2");
            return verdict(Status::no, Basis::family_override,
                           g == static_cast<double>(d) / 2.0 ? "gamma = d/2: log-divergent l2 sum"
                                                             : "L2-admissible iff gamma > d/2");
        }
        case Family::radial_green:
            return verdict(Status::yes, Basis::family_override,
                           "radial Green's operators have square-summable coefficients");
        case Family::separable: {
            std::vector<AdmissibilityVerdict> vs;
            for (const Operator& f : op.factors()) vs.push_back(l2_admissible(f));
            return combine_factors(std::move(vs), "L2-admissible");
        }
        case Family::modulated_derivative:
        case Family::harmonic_pair: {
            const double g = *op.spectral_growth();
            if (g > static_cast<double>(d) / 2.0)
                return verdict(Status::yes, Basis::growth_criterion, "spectral growth gamma > d/2");
            return verdict(Status::no, Basis::growth_criterion, "spectral growth gamma <= d/2");
        }
    }
    return verdict(Status::indeterminate, Basis::growth_criterion, "no criterion fired");
}

double measurement_column(const Functional& nu, const Operator& op, const Knot& t, int bandwidth,
                          bool* warn) {
    if (nu.kind() == Functional::Kind::spatial) {
        const AdmissibilityVerdict v = sampling_admissible(op);
        if (v.status == AdmissibilityVerdict::Status::no)
            throw std::runtime_error("measurement_column: spatial sampling refused, operator is not "
                                     "sampling-admissible (" + to_string(v.basis) + ")");
        if (v.status == AdmissibilityVerdict::Status::indeterminate && warn) *warn = true;
    }
    return measurement_column_unchecked(nu, op, t, bandwidth);
}

double measurement_column_unchecked(const Functional& nu, const Operator& op, const Knot& t,
                                    int bandwidth) {
    if (nu.dim() != op.dim()) throw std::invalid_argument("measurement_column: dimension mismatch");
    if (nu.kind() == Functional::Kind::spatial) {
        // Truncated g_L(x0 - t).
        SymbolTable lattice(op.dim(), bandwidth);
        Knot diff{0, 0, 0};
        for (int a = 0; a < op.dim(); ++a)
            diff[static_cast<std::size_t>(a)] =
                nu.x0()[static_cast<std::size_t>(a)] - t[static_cast<std::size_t>(a)];
        if (op.real_symbol()) {
            double s = 0.0;
            lattice.for_each([&](const FreqIndex& k, cplx) {
                if (k == negate(k))
                    s += (op.pseudo_symbol(k) * point_phase(k, diff, +1.0)).real();
                else if (lex_positive(k))
                    s += 2.0 * (op.pseudo_symbol(k) * point_phase(k, diff, +1.0)).real();
            });
            return s;
        }
        cplx s(0.0, 0.0);
        lattice.for_each([&](const FreqIndex& k, cplx) {
            s += op.pseudo_symbol(k) * point_phase(k, diff, +1.0);
        });
        return s.real();
    }
    if (nu.kind() == Functional::Kind::fourier) {
        const cplx v = op.pseudo_symbol(nu.k()) * point_phase(nu.k(), t, -1.0);
        return nu.real_part() ? v.real() : v.imag();
    }
    // Profile: pair the profile against the shifted Green's table.
    const SymbolTable& p = nu.profile_table();
    if (p.bandwidth() < bandwidth)
        throw std::invalid_argument("measurement_column: profile bandwidth below operator bandwidth");
    cplx s(0.0, 0.0);
    SymbolTable lattice(op.dim(), bandwidth);
    lattice.for_each([&](const FreqIndex& k, cplx) {
        const FreqIndex mk = negate(k);
        s += p.at(k) * op.pseudo_symbol(mk) * point_phase(mk, t, -1.0);
    });
    return s.real();
}

SymbolTable NullBasisElement::table(int dim, int bandwidth) const {
    SymbolTable t(dim, bandwidth);
    switch (kind) {
        case Kind::constant:
            t.set_pair(freq, cplx(1.0, 0.0));
            break;
        case Kind::cosine:
            t.set_pair(freq, cplx(0.5, 0.0));
            break;
        case Kind::sine:
            t.set_pair(freq, cplx(0.0, -0.5));
            break;
    }
    return t;
}

std::string NullBasisElement::name() const {
    switch (kind) {
        case Kind::constant: return "const";
        case Kind::cosine: return "cos" + to_string(freq);
        case Kind::sine: return "sin" + to_string(freq);
    }
    return {};
}

std::vector<NullBasisElement> null_basis(const Operator& op) {
    std::vector<NullBasisElement> basis;
    for (const FreqIndex& f : op.null_frequencies()) {
        if (norm_sq(f) == 0) {
            basis.push_back({NullBasisElement::Kind::constant, f});
        } else if (lex_positive(f)) {
            basis.push_back({NullBasisElement::Kind::cosine, f});
            basis.push_back({NullBasisElement::Kind::sine, f});
        }
    }
    return basis;
}

bool nullspace_injectivity(const std::vector<Functional>& functionals, const Operator& op) {
    const std::vector<NullBasisElement> basis = null_basis(op);
    if (basis.empty()) return true;
    int kb = 1;
    for (const FreqIndex& f : op.null_frequencies()) kb = std::max(kb, norm_inf(f));
    Matrix b(functionals.size(), basis.size());
    for (std::size_t n = 0; n < basis.size(); ++n) {
        const SymbolTable bt = basis[n].table(op.dim(), kb);
        for (std::size_t m = 0; m < functionals.size(); ++m) b(m, n) = measure(functionals[m], bt);
    }
    const std::vector<double> sv = singular_values(b);
    if (sv.empty()) return false;
    const double smax = sv.front();
    std::size_t rank = 0;
    for (double s : sv)
        if (s > 1e-10 * smax) ++rank;
    return rank == basis.size();
}

Functional parse_functional(const std::string& spec, int dim, int bandwidth) {
    using namespace grammar;
    const std::size_t colon = spec.find(':');
    const std::string kind = lower(colon == std::string::npos ? spec : spec.substr(0, colon));
    const KvList kv = parse_kv(colon == std::string::npos ? "" : spec.substr(colon + 1));

    if (kind == "spatial") {
        kv.check_known({"x", "y", "z"}, kind);
        Knot x{0, 0, 0};
        const char* keys[3] = {"x", "y", "z"};
        for (int a = 0; a < dim; ++a) x[static_cast<std::size_t>(a)] = parse_double(kv.get(keys[a]));
        for (int a = dim; a < 3; ++a)
            if (kv.has(keys[a]))
                throw std::invalid_argument("functional grammar: component beyond dimension");
        return Functional::spatial(x, dim);
    }
    if (kind == "fourier") {
        kv.check_known({"k", "part"}, kind);
        const std::vector<int> comps = parse_int_list(kv.get("k"));
        if (static_cast<int>(comps.size()) != dim)
            throw std::invalid_argument("functional grammar: k component count does not match dim");
        FreqIndex k;
        k.dim = dim;
        for (std::size_t a = 0; a < comps.size(); ++a) k[static_cast<int>(a)] = comps[a];
        const std::string part = lower(kv.get("part"));
        if (part != "re" && part != "im")
            throw std::invalid_argument("functional grammar: part must be re or im");
        return Functional::fourier(k, part == "re");
    }
    if (kind == "profile") {
        kv.check_known({"file"}, kind);
        const GridFunction g = read_grid_file(kv.get("file"));
        if (g.dim != dim) throw std::invalid_argument("functional grammar: profile dimension mismatch");
        const int kprof = g.samples_per_axis / 2 - 1;
        if (kprof < bandwidth)
            throw std::invalid_argument("functional grammar: profile grid too coarse for the bandwidth");
        return Functional::profile(analyze(g, kprof));
    }
    throw std::invalid_argument("functional grammar: unknown kind '" + kind + "'");
}

}  // namespace torus
