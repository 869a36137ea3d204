#include "torus/operators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "kv_grammar.hpp"
#include "torus/util.hpp"

namespace torus {

namespace {

std::string fmt_param(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.15g", v);
    return buf;
}

double poly_eval(const std::vector<double>& c, double r) {
    double v = 0.0;
    for (std::size_t j = c.size(); j-- > 0;) v = v * r + c[j];
    return v;
}

}  // namespace

Operator::Operator() : Operator(Blank{}) { *this = derivative_power(1); }

double RadialProfile::operator()(double r) const {
    if (r < 0) throw std::invalid_argument("radial profile: r must be >= 0");
    switch (kind) {
        case Kind::matern:
            // Unit length-scale correlation form: matern_radial carries the
            // internal sqrt(2(beta-1)) argument factor, so it is divided
            // back out here. The nominal epsilon of the Green's
            // construction then matches the effective scale of the bump.
            return matern_radial(beta, r / std::sqrt(2.0 * (beta - 1.0)));
        case Kind::compact_polynomial:
            return r >= 1.0 ? 0.0 : poly_eval(poly, r);
        case Kind::tabulated: {
            if (samples.size() < 2 || r_max <= 0) return 0.0;
            if (r >= r_max) return 0.0;
            const double t = r / r_max * static_cast<double>(samples.size() - 1);
            const std::size_t j = std::min(samples.size() - 2, static_cast<std::size_t>(t));
            const double frac = t - static_cast<double>(j);
            return samples[j] * (1.0 - frac) + samples[j + 1] * frac;
        }
    }
    return 0.0;
}

RadialProfile RadialProfile::matern(double beta) {
    if (beta <= 1.0) throw std::invalid_argument("matern profile requires beta > 1");
    RadialProfile p;
    p.kind = Kind::matern;
    p.beta = beta;
    return p;
}

RadialProfile RadialProfile::compact_polynomial(std::vector<double> coeffs) {
    RadialProfile p;
    p.kind = Kind::compact_polynomial;
    p.poly = std::move(coeffs);
    if (p.poly.empty()) throw std::invalid_argument("compact profile needs coefficients");
    return p;
}

RadialProfile RadialProfile::compact_bump() {
    // (1-r)^4 (4r+1) expanded.
    return compact_polynomial({1.0, 0.0, -10.0, 20.0, -15.0, 4.0});
}

RadialProfile RadialProfile::tabulated(std::vector<double> samples, double r_max) {
    if (samples.size() < 2 || r_max <= 0)
        throw std::invalid_argument("tabulated profile needs >= 2 samples and r_max > 0");
    RadialProfile p;
    p.kind = Kind::tabulated;
    p.samples = std::move(samples);
    p.r_max = r_max;
    return p;
}

double matern_radial(double beta, double r) {
    if (beta <= 1.0) throw std::invalid_argument("matern_radial requires beta > 1");
    if (r < 0) throw std::invalid_argument("matern_radial requires r >= 0");
    const double m = std::round(beta - 0.5);
    if (std::fabs(beta - (m + 0.5)) < 1e-12 && m >= 1.0) {
        // beta = m + 1/2: exponential times polynomial, order kk = m - 1.
        const int kk = static_cast<int>(m) - 1;
        const double c = std::sqrt(2.0 * kk + 1.0);
        double fact_k = 1.0, fact_2k = 1.0;
        for (int i = 2; i <= kk; ++i) fact_k *= i;
        for (int i = 2; i <= 2 * kk; ++i) fact_2k *= i;
        double sum = 0.0;
        for (int i = 0; i <= kk; ++i) {
            double term = 1.0;
            for (int j = 1; j <= kk + i; ++j) term *= j;       // (k+i)!
            for (int j = 1; j <= i; ++j) term /= j;            // / i!
            for (int j = 1; j <= kk - i; ++j) term /= j;       // / (k-i)!
            sum += term * std::pow(2.0 * c * r, kk - i);
        }
        return std::exp(-c * r) * (fact_k / fact_2k) * sum;
    }
    const double nu = beta - 1.0;
    const double x = std::sqrt(2.0 * nu) * r;
    if (x < 1e-8) return 1.0;  // normalized limit at the origin
    return std::pow(2.0, 1.0 - nu) / std::tgamma(nu) * std::pow(x, nu) * std::cyl_bessel_k(nu, x);
}

SymbolTable radial_green_coeffs(const RadialProfile& profile, double epsilon, int bandwidth) {
    if (epsilon <= 0) throw std::invalid_argument("radial_green_coeffs: epsilon must be > 0");
    if (bandwidth < 1) throw std::invalid_argument("radial_green_coeffs: bandwidth must be >= 1");
    const std::size_t n = std::max<std::size_t>(4 * static_cast<std::size_t>(bandwidth), 4096);
    const std::size_t half = n / 2;
    std::vector<double> g(half + 1, 0.0);
    for (std::size_t j = 0; j <= half; ++j) {
        const double x = two_pi * static_cast<double>(j) / static_cast<double>(n);
        g[j] = profile(std::sqrt(std::max(0.0, 2.0 - 2.0 * std::cos(x))) / epsilon);
    }
    SymbolTable t(1, bandwidth);
    for (int k = 0; k <= bandwidth; ++k) {
        // g is even around 0 and pi, so the DFT reduces to a cosine sum.
        // Compensated summation: high coefficients are many orders below
        // the samples and plain accumulation would drown them.
        double s = g[0] + (k % 2 == 0 ? g[half] : -g[half]);
        double comp = 0.0;
        for (std::size_t j = 1; j < half; ++j) {
            const long long phase = (static_cast<long long>(k) * static_cast<long long>(j)) %
                                    static_cast<long long>(n);
            const double term =
                2.0 * g[j] * std::cos(two_pi * static_cast<double>(phase) / static_cast<double>(n));
            const double y = term - comp;
            const double snew = s + y;
            comp = (snew - s) - y;
            s = snew;
        }
        const double ghat = s / static_cast<double>(n);
        if (!(ghat > 0.0))
            throw std::runtime_error(
                "radial_green_coeffs: coefficient ghat[" + std::to_string(k) + "] = " +
                std::to_string(ghat) +
                " is not strictly positive (profile not positive definite at this epsilon/bandwidth)");
        t.set_pair(freq(k), ghat);
    }
    return t;
}

Operator Operator::derivative_power(int n) {
    if (n < 1) throw std::invalid_argument("derivative_power requires N >= 1");
    Operator op{Blank{}};
    op.family_ = Family::derivative_power;
    op.dim_ = 1;
    op.p1_ = n;
    op.null_ = {freq(0)};
    op.desc_ = "dpow:n=" + std::to_string(n);
    return op;
}

Operator Operator::exponential_shift(double alpha, double gamma) {
    if (alpha == 0.0)
        throw std::invalid_argument("exponential_shift requires alpha != 0 (use fracd for alpha = 0)");
    if (gamma <= 0.0) throw std::invalid_argument("exponential_shift requires gamma > 0");
    Operator op{Blank{}};
    op.family_ = Family::exponential_shift;
    op.dim_ = 1;
    op.p1_ = alpha;
    op.p2_ = gamma;
    op.desc_ = "expshift:alpha=" + fmt_param(alpha) + ",gamma=" + fmt_param(gamma);
    return op;
}

Operator Operator::modulated_derivative(int k0) {
    Operator op{Blank{}};
    op.family_ = Family::modulated_derivative;
    op.dim_ = 1;
    op.k0_ = freq(k0);
    op.null_ = {freq(k0)};
    op.desc_ = "modulated:k0=" + std::to_string(k0);
    return op;
}

Operator Operator::harmonic_pair(const FreqIndex& k0) {
    Operator op{Blank{}};
    op.family_ = Family::harmonic_pair;
    op.dim_ = k0.dim;
    op.k0_ = k0;
    const long long target = norm_sq(k0);
    const int radius = static_cast<int>(std::floor(std::sqrt(static_cast<double>(target)) + 0.5));
    // Exact enumeration of {k : ||k||^2 = ||k0||^2} inside the lattice ball.
    FreqIndex k;
    k.dim = k0.dim;
    std::vector<FreqIndex> null;
    const int lo = -radius, hi = radius;
    for (int a = lo; a <= hi; ++a) {
        k[0] = a;
        if (k0.dim == 1) {
            if (norm_sq(k) == target) null.push_back(k);
            continue;
        }
        for (int b = lo; b <= hi; ++b) {
            k[1] = b;
            if (k0.dim == 2) {
                if (norm_sq(k) == target) null.push_back(k);
                continue;
            }
            for (int c = lo; c <= hi; ++c) {
                k[2] = c;
                if (norm_sq(k) == target) null.push_back(k);
            }
        }
    }
    std::sort(null.begin(), null.end(), lex_less);
    op.null_ = std::move(null);
    std::string ks;
    for (int a = 0; a < k0.dim; ++a) ks += (a ? "," : "") + std::to_string(k0[a]);
    op.desc_ = "harmonic:k0=" + ks;
    return op;
}

Operator Operator::fractional_derivative(double gamma) {
    if (gamma <= 0.0) throw std::invalid_argument("fractional_derivative requires gamma > 0");
    Operator op{Blank{}};
    op.family_ = Family::fractional_derivative;
    op.dim_ = 1;
    op.p2_ = gamma;
    op.null_ = {freq(0)};
    op.desc_ = "fracd:gamma=" + fmt_param(gamma);
    return op;
}

Operator Operator::fractional_laplacian(double gamma, int dim) {
    if (gamma <= 0.0) throw std::invalid_argument("fractional_laplacian requires gamma > 0");
    if (dim < 1 || dim > 3) throw std::invalid_argument("dimension must be 1, 2 or 3");
    Operator op{Blank{}};
    op.family_ = Family::fractional_laplacian;
    op.dim_ = dim;
    op.p2_ = gamma;
    FreqIndex z;
    z.dim = dim;
    op.null_ = {z};
    op.desc_ = "fraclap:gamma=" + fmt_param(gamma);
    return op;
}

Operator Operator::sobolev(double alpha, double gamma, int dim) {
    if (alpha == 0.0) throw std::invalid_argument("sobolev requires alpha != 0");
    if (dim < 1 || dim > 3) throw std::invalid_argument("dimension must be 1, 2 or 3");
    Operator op{Blank{}};
    op.family_ = Family::sobolev;
    op.dim_ = dim;
    op.p1_ = alpha;
    op.p2_ = gamma;
    op.desc_ = "sobolev:alpha=" + fmt_param(alpha) + ",gamma=" + fmt_param(gamma);
    return op;
}

Operator Operator::radial_green(RadialProfile profile, double epsilon, int max_bandwidth,
                                std::optional<double> beta) {
    if (epsilon <= 0) throw std::invalid_argument("radial_green requires epsilon > 0");
    if (max_bandwidth < 1) throw std::invalid_argument("radial_green requires max_bandwidth >= 1");
    Operator op{Blank{}};
    op.family_ = Family::radial_green;
    op.dim_ = 1;
    op.epsilon_ = epsilon;
    op.radial_bandwidth_ = max_bandwidth;
    if (profile.kind == RadialProfile::Kind::matern)
        op.radial_beta_ = profile.beta;
    else
        op.radial_beta_ = beta;
    const SymbolTable g = radial_green_coeffs(profile, epsilon, max_bandwidth);
    op.ghat_.resize(static_cast<std::size_t>(max_bandwidth) + 1);
    for (int k = 0; k <= max_bandwidth; ++k)
        op.ghat_[static_cast<std::size_t>(k)] = g.at(freq(k)).real();
    switch (profile.kind) {
        case RadialProfile::Kind::matern:
            op.desc_ = "matern:beta=" + fmt_param(profile.beta) + ",eps=" + fmt_param(epsilon) +
                       ",kmax=" + std::to_string(max_bandwidth);
            break;
        case RadialProfile::Kind::compact_polynomial:
            op.desc_ = "compact:eps=" + fmt_param(epsilon) +
                       (beta ? ",beta=" + fmt_param(*beta) : std::string()) +
                       ",kmax=" + std::to_string(max_bandwidth);
            break;
        case RadialProfile::Kind::tabulated:
            op.desc_ = "tabulated:eps=" + fmt_param(epsilon) + ",kmax=" + std::to_string(max_bandwidth);
            break;
    }
    op.profile_ = std::move(profile);
    return op;
}

Operator Operator::separable(std::vector<Operator> factors) {
    if (factors.size() < 1 || factors.size() > 3)
        throw std::invalid_argument("separable takes 1, 2 or 3 factors");
    for (const Operator& f : factors) {
        if (f.dim() != 1) throw std::invalid_argument("separable factors must be univariate");
        if (!f.null_frequencies().empty())
            throw std::invalid_argument(
                "separable factors must have empty null frequency sets "
                "(the product null space would be infinite-dimensional)");
    }
    Operator op{Blank{}};
    op.family_ = Family::separable;
    op.dim_ = static_cast<int>(factors.size());
    std::string d = "sep(";
    for (std::size_t i = 0; i < factors.size(); ++i) d += (i ? ";" : "") + factors[i].description();
    op.desc_ = d + ")";
    op.factors_ = std::move(factors);
    return op;
}

cplx Operator::symbol(const FreqIndex& k) const {
    if (k.dim != dim_) throw std::invalid_argument("symbol: frequency dimension mismatch");
    switch (family_) {
        case Family::derivative_power: {
            const int n = static_cast<int>(p1_);
            cplx v(1.0, 0.0);
            const cplx ik(0.0, static_cast<double>(k[0]));
            for (int i = 0; i < n; ++i) v *= ik;
            return v;
        }
        case Family::exponential_shift: {
            const cplx base(p1_, static_cast<double>(k[0]));
            if (p2_ == std::round(p2_) && p2_ <= 64.0) {
                cplx v(1.0, 0.0);
                for (int i = 0; i < static_cast<int>(p2_); ++i) v *= base;
                return v;
            }
            return std::pow(base, p2_);
        }
        case Family::modulated_derivative:
            return cplx(0.0, static_cast<double>(k[0] - k0_[0]));
        case Family::harmonic_pair:
            return cplx(static_cast<double>(norm_sq(k0_) - norm_sq(k)), 0.0);
        case Family::fractional_derivative: {
            const int kk = k[0];
            if (kk == 0) return cplx(0.0, 0.0);
            const double sign = kk > 0 ? 1.0 : -1.0;
            // Principal branch of (i k)^gamma; reduces to (i k)^N at the
            // integers.
            return std::polar(std::pow(std::fabs(static_cast<double>(kk)), p2_),
                              pi * p2_ * sign / 2.0);
        }
        case Family::fractional_laplacian: {
            const long long n2 = norm_sq(k);
            if (n2 == 0) return cplx(0.0, 0.0);
            return cplx(std::pow(static_cast<double>(n2), p2_ / 2.0), 0.0);
        }
        case Family::sobolev:
            return cplx(std::pow(p1_ * p1_ + static_cast<double>(norm_sq(k)), p2_ / 2.0), 0.0);
        case Family::radial_green: {
            const int a = std::abs(k[0]);
            if (a > radial_bandwidth_)
                throw std::out_of_range("radial_green symbol: |k| exceeds the precomputed bandwidth");
            return cplx(1.0 / ghat_[static_cast<std::size_t>(a)], 0.0);
        }
        case Family::separable: {
            cplx v(1.0, 0.0);
            for (int a = 0; a < dim_; ++a) v *= factors_[static_cast<std::size_t>(a)].symbol(freq(k[a]));
            return v;
        }
    }
    return cplx(0.0, 0.0);
}

bool Operator::in_null_space(const FreqIndex& k) const {
    switch (family_) {
        case Family::derivative_power:
        case Family::fractional_derivative:
        case Family::fractional_laplacian:
            return norm_sq(k) == 0;
        case Family::modulated_derivative:
            return k == k0_;
        case Family::harmonic_pair:
            return norm_sq(k) == norm_sq(k0_);
        default:
            return false;
    }
}

cplx Operator::pseudo_symbol(const FreqIndex& k) const {
    if (in_null_space(k)) return cplx(0.0, 0.0);
    return 1.0 / symbol(k);
}

std::optional<double> Operator::spectral_growth() const {
    switch (family_) {
        case Family::derivative_power:
            return p1_;
        case Family::exponential_shift:
            return p2_;
        case Family::modulated_derivative:
            return 1.0;
        case Family::harmonic_pair:
            return 2.0;
        case Family::fractional_derivative:
        case Family::fractional_laplacian:
        case Family::sobolev:
            return p2_;
        case Family::radial_green:
            if (radial_beta_) return 2.0 * (*radial_beta_ - 0.5);
            return std::nullopt;
        case Family::separable:
            return std::nullopt;  // anisotropic: no ||k||^gamma envelope
    }
    return std::nullopt;
}

bool Operator::real_symbol() const {
    switch (family_) {
        case Family::derivative_power:
        case Family::harmonic_pair:
        case Family::fractional_derivative:
        case Family::fractional_laplacian:
        case Family::sobolev:
        case Family::radial_green:
            return true;
        case Family::exponential_shift:
            return p1_ > 0.0 || p2_ == std::round(p2_);
        case Family::modulated_derivative:
            return k0_[0] == 0;
        case Family::separable:
            for (const Operator& f : factors_)
                if (!f.real_symbol()) return false;
            return true;
    }
    return false;
}

double PseudoinverseReport::max() const {
    return std::max(std::max(lpl, plp), std::max(lp_imag, pl_imag));
}

PseudoinverseReport verify_pseudoinverse(const Operator& op, int bandwidth) {
    return verify_pseudoinverse_with(op, bandwidth,
                                     [&](const FreqIndex& k) { return op.pseudo_symbol(k); });
}

SymbolTable green_table(const Operator& op, int bandwidth) {
    if (op.real_symbol())
        return make_hermitian_table(op.dim(), bandwidth,
                                    [&](const FreqIndex& k) { return op.pseudo_symbol(k); });
    SymbolTable t(op.dim(), bandwidth);
    t.for_each([&](const FreqIndex& k, cplx) { t.set(k, op.pseudo_symbol(k)); });
    return t;
}

Operator parse_operator(const std::string& spec, int dim) {
    using namespace grammar;
    const std::string trimmed = spec;
    const std::string low = lower(trimmed);
    if (low.rfind("sep(", 0) == 0) {
        if (trimmed.back() != ')') throw std::invalid_argument("operator grammar: unbalanced sep(...)");
        const std::string inner = trimmed.substr(4, trimmed.size() - 5);
        std::vector<Operator> factors;
        std::size_t pos = 0;
        while (pos <= inner.size()) {
            std::size_t semi = inner.find(';', pos);
            if (semi == std::string::npos) semi = inner.size();
            const std::string part = inner.substr(pos, semi - pos);
            if (!part.empty()) factors.push_back(parse_operator(part, 1));
            pos = semi + 1;
            if (semi == inner.size()) break;
        }
        Operator op = Operator::separable(std::move(factors));
        if (dim != 0 && op.dim() != dim)
            throw std::invalid_argument("operator grammar: sep(...) factor count does not match dim");
        return op;
    }

    const std::size_t colon = trimmed.find(':');
    const std::string family = lower(colon == std::string::npos ? trimmed : trimmed.substr(0, colon));
    const KvList kv = parse_kv(colon == std::string::npos ? "" : trimmed.substr(colon + 1));

    auto check_dim1 = [&](const char* name) {
        if (dim > 1)
            throw std::invalid_argument(std::string("operator grammar: ") + name + " is univariate");
    };

    if (family == "dpow") {
        check_dim1("dpow");
        kv.check_known({"n"}, family);
        return Operator::derivative_power(parse_int(kv.get("n")));
    }
    if (family == "expshift") {
        check_dim1("expshift");
        kv.check_known({"alpha", "gamma"}, family);
        return Operator::exponential_shift(parse_double(kv.get("alpha")), parse_double(kv.get("gamma")));
    }
    if (family == "fracd") {
        check_dim1("fracd");
        kv.check_known({"gamma"}, family);
        return Operator::fractional_derivative(parse_double(kv.get("gamma")));
    }
    if (family == "fraclap") {
        kv.check_known({"gamma"}, family);
        return Operator::fractional_laplacian(parse_double(kv.get("gamma")), dim == 0 ? 1 : dim);
    }
    if (family == "sobolev") {
        kv.check_known({"alpha", "gamma"}, family);
        return Operator::sobolev(parse_double(kv.get("alpha")), parse_double(kv.get("gamma")),
                                 dim == 0 ? 1 : dim);
    }
    if (family == "harmonic") {
        kv.check_known({"k0"}, family);
        const std::vector<int> comps = parse_int_list(kv.get("k0"));
        if (comps.empty() || comps.size() > 3)
            throw std::invalid_argument("operator grammar: harmonic k0 takes 1-3 components");
        if (dim != 0 && static_cast<int>(comps.size()) != dim)
            throw std::invalid_argument("operator grammar: harmonic k0 component count does not match dim");
        FreqIndex k0;
        k0.dim = static_cast<int>(comps.size());
        for (std::size_t a = 0; a < comps.size(); ++a) k0[static_cast<int>(a)] = comps[a];
        return Operator::harmonic_pair(k0);
    }
    if (family == "matern") {
        check_dim1("matern");
        kv.check_known({"beta", "eps", "kmax"}, family);
        const int kmax = kv.has("kmax") ? parse_int(kv.get("kmax")) : 512;
        return Operator::radial_green(RadialProfile::matern(parse_double(kv.get("beta"))),
                                      parse_double(kv.get("eps")), kmax);
    }
    if (family == "compact") {
        check_dim1("compact");
        kv.check_known({"eps", "beta", "kmax"}, family);
        const int kmax = kv.has("kmax") ? parse_int(kv.get("kmax")) : 512;
        const double beta = kv.has("beta") ? parse_double(kv.get("beta")) : 2.5;
        return Operator::radial_green(RadialProfile::compact_bump(), parse_double(kv.get("eps")), kmax,
                                      beta);
    }
    throw std::invalid_argument("operator grammar: unknown family '" + family + "'");
}

}  // namespace torus
