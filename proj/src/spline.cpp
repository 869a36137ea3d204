#include "torus/spline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "torus/util.hpp"

namespace torus {

namespace {

double knot_distance(const Knot& a, const Knot& b, int dim) {
    double d = 0.0;
    for (int ax = 0; ax < dim; ++ax) d = std::max(d, torus_distance(a[static_cast<std::size_t>(ax)],
                                                                    b[static_cast<std::size_t>(ax)]));
    return d;
}

cplx knot_phase(const FreqIndex& k, const Knot& x) {
    double dot = 0.0;
    for (int a = 0; a < k.dim; ++a) dot += static_cast<double>(k[a]) * x[static_cast<std::size_t>(a)];
    return std::polar(1.0, -dot);
}

}  // namespace

double tv_norm(const Innovations& innov) {
    double s = 0.0;
    for (double w : innov.weights) s += std::fabs(w);
    return s;
}

CMatrix innovation_matrix(const std::vector<Knot>& knots, const std::vector<FreqIndex>& null_freqs,
                          int dim) {
    CMatrix m(null_freqs.size(), knots.size());
    for (std::size_t n = 0; n < null_freqs.size(); ++n) {
        if (null_freqs[n].dim != dim)
            throw std::invalid_argument("innovation_matrix: frequency dimension mismatch");
        for (std::size_t k = 0; k < knots.size(); ++k) m(n, k) = knot_phase(null_freqs[n], knots[k]);
    }
    return m;
}

ValidationResult validate_innovations(const Operator& op, const Innovations& innov) {
    if (innov.dim != op.dim()) throw std::invalid_argument("innovations: dimension mismatch");
    if (innov.knots.size() != innov.weights.size())
        throw std::invalid_argument("innovations: knot/weight count mismatch");
    for (double w : innov.weights)
        if (w == 0.0) throw std::invalid_argument("innovations: weights must be nonzero");
    for (std::size_t i = 0; i < innov.knots.size(); ++i)
        for (std::size_t j = i + 1; j < innov.knots.size(); ++j)
            if (knot_distance(innov.knots[i], innov.knots[j], innov.dim) < two_pi * 1e-9)
                throw std::invalid_argument("innovations: duplicate knots");

    const CMatrix m = innovation_matrix(innov.knots, op.null_frequencies(), innov.dim);
    double residual = 0.0;
    for (std::size_t n = 0; n < m.rows; ++n) {
        cplx s(0.0, 0.0);
        for (std::size_t k = 0; k < m.cols; ++k) s += m(n, k) * innov.weights[k];
        residual = std::max(residual, std::abs(s));
    }
    // Relative threshold: scaled weights validate identically.
    const bool valid = residual <= 1e-9 * tv_norm(innov);
    return {m.rows == 0 ? true : valid, residual};
}

cplx Spline::null_coeff(const FreqIndex& k) const {
    for (const auto& [f, v] : null_coeffs)
        if (f == k) return v;
    return cplx(0.0, 0.0);
}

void Spline::set_null_coeff(const FreqIndex& k, cplx v) {
    if (!op.in_null_space(k))
        throw std::invalid_argument("spline: " + to_string(k) + " is not a null frequency");
    auto put = [&](const FreqIndex& f, cplx val) {
        for (auto& [key, cur] : null_coeffs) {
            if (key == f) {
                cur = val;
                return;
            }
        }
        null_coeffs.emplace_back(f, val);
    };
    if (k == negate(k)) {
        put(k, cplx(v.real(), 0.0));
    } else {
        put(k, v);
        put(negate(k), std::conj(v));
    }
    std::sort(null_coeffs.begin(), null_coeffs.end(),
              [](const auto& a, const auto& b) { return lex_less(a.first, b.first); });
}

Spline make_spline(Operator op, Innovations innov) {
    if (!innov.knots.empty()) {
        const ValidationResult v = validate_innovations(op, innov);
        if (!v.valid)
            throw std::invalid_argument("spline: weights do not annihilate the null frequencies (||Ma||_inf = " +
                                        std::to_string(v.residual) + ")");
    }
    Spline s;
    s.op = std::move(op);
    s.innov = std::move(innov);
    return s;
}

SymbolTable spline_table(const Spline& s, int bandwidth) {
    if (!s.innov.knots.empty()) {
        const ValidationResult v = validate_innovations(s.op, s.innov);
        if (!v.valid) throw std::invalid_argument("spline_table: invalid spline");
    }
    auto gen = [&](const FreqIndex& k) {
        cplx inn(0.0, 0.0);
        for (std::size_t j = 0; j < s.innov.knots.size(); ++j)
            inn += s.innov.weights[j] * knot_phase(k, s.innov.knots[j]);
        return s.op.pseudo_symbol(k) * inn + s.null_coeff(k);
    };
    if (s.op.real_symbol()) return make_hermitian_table(s.op.dim(), bandwidth, gen);
    SymbolTable t(s.op.dim(), bandwidth);
    t.for_each([&](const FreqIndex& k, cplx) { t.set(k, gen(k)); });
    return t;
}

SymbolTable apply_operator(const Operator& op, const SymbolTable& table) {
    if (op.dim() != table.dim()) throw std::invalid_argument("apply_operator: dimension mismatch");
    if (table.hermitian() && op.real_symbol())
        return make_hermitian_table(table.dim(), table.bandwidth(),
                                    [&](const FreqIndex& k) { return op.symbol(k) * table.at(k); });
    SymbolTable t(table.dim(), table.bandwidth());
    t.for_each([&](const FreqIndex& k, cplx) { t.set(k, op.symbol(k) * table.at(k)); });
    return t;
}

double annihilation_check(const Operator& op, const Spline& s, int bandwidth) {
    const SymbolTable f = spline_table(s, bandwidth);
    double dev = 0.0;
    f.for_each([&](const FreqIndex& k, cplx fk) {
        if (norm_inf(k) == 0) return;
        cplx inn(0.0, 0.0);
        for (std::size_t j = 0; j < s.innov.knots.size(); ++j)
            inn += s.innov.weights[j] * knot_phase(k, s.innov.knots[j]);
        dev = std::max(dev, std::abs(op.symbol(k) * fk - inn));
    });
    return dev;
}

}  // namespace torus
