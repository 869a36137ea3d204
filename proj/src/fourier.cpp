#include "torus/fourier.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "torus/util.hpp"

namespace torus {

namespace {

void check_dim(int d) {
    if (d < 1 || d > 3) throw std::invalid_argument("dimension must be 1, 2 or 3");
}

std::size_t pow_size(std::size_t base, int exp) {
    std::size_t r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

}  // namespace

FreqIndex freq(int k0) { return FreqIndex{1, {k0, 0, 0}}; }
FreqIndex freq(int k0, int k1) { return FreqIndex{2, {k0, k1, 0}}; }
FreqIndex freq(int k0, int k1, int k2) { return FreqIndex{3, {k0, k1, k2}}; }

FreqIndex negate(const FreqIndex& f) {
    FreqIndex n = f;
    for (int a = 0; a < f.dim; ++a) n[a] = -f[a];
    return n;
}

long long norm_sq(const FreqIndex& f) {
    long long s = 0;
    for (int a = 0; a < f.dim; ++a) s += static_cast<long long>(f[a]) * f[a];
    return s;
}

int norm_inf(const FreqIndex& f) {
    int s = 0;
    for (int a = 0; a < f.dim; ++a) s = std::max(s, std::abs(f[a]));
    return s;
}

bool lex_less(const FreqIndex& a, const FreqIndex& b) {
    for (int i = 0; i < a.dim; ++i) {
        if (a[i] != b[i]) return a[i] < b[i];
    }
    return false;
}

bool lex_positive(const FreqIndex& f) {
    for (int a = 0; a < f.dim; ++a) {
        if (f[a] != 0) return f[a] > 0;
    }
    return false;
}

std::string to_string(const FreqIndex& f) {
    std::string s = "(";
    for (int a = 0; a < f.dim; ++a) {
        if (a) s += ",";
        s += std::to_string(f[a]);
    }
    return s + ")";
}

SymbolTable::SymbolTable(int dim, int bandwidth) : dim_(dim), bandwidth_(bandwidth) {
    check_dim(dim);
    if (bandwidth < 1) throw std::invalid_argument("bandwidth must be >= 1");
    coeffs_.assign(pow_size(2 * static_cast<std::size_t>(bandwidth) + 1, dim), cplx(0.0, 0.0));
}

std::size_t SymbolTable::index(const FreqIndex& f) const {
    if (f.dim != dim_) throw std::invalid_argument("frequency dimension mismatch");
    const std::size_t side = 2 * static_cast<std::size_t>(bandwidth_) + 1;
    std::size_t idx = 0;
    for (int a = 0; a < dim_; ++a) {
        const int c = f[a];
        if (c < -bandwidth_ || c > bandwidth_)
            throw std::out_of_range("frequency outside [-K,K]^d");
        idx = idx * side + static_cast<std::size_t>(c + bandwidth_);
    }
    return idx;
}

FreqIndex SymbolTable::freq_at(std::size_t idx) const {
    const std::size_t side = 2 * static_cast<std::size_t>(bandwidth_) + 1;
    FreqIndex f;
    f.dim = dim_;
    for (int a = dim_ - 1; a >= 0; --a) {
        f[a] = static_cast<int>(idx % side) - bandwidth_;
        idx /= side;
    }
    return f;
}

void SymbolTable::set(const FreqIndex& f, cplx v) {
    coeffs_[index(f)] = v;
    hermitian_ = false;
}

void SymbolTable::set_pair(const FreqIndex& f, cplx v) {
    if (f == negate(f)) {
        coeffs_[index(f)] = cplx(v.real(), 0.0);
    } else {
        coeffs_[index(f)] = v;
        coeffs_[index(negate(f))] = std::conj(v);
    }
}

double SymbolTable::max_abs() const {
    double m = 0.0;
    for (const cplx& c : coeffs_) m = std::max(m, std::abs(c));
    return m;
}

SymbolTable scaled_sum(cplx alpha, const SymbolTable& a, cplx beta, const SymbolTable& b) {
    if (a.dim_ != b.dim_ || a.bandwidth_ != b.bandwidth_)
        throw std::invalid_argument("scaled_sum: shape mismatch");
    SymbolTable r(a.dim_, a.bandwidth_);
    for (std::size_t i = 0; i < r.coeffs_.size(); ++i)
        r.coeffs_[i] = alpha * a.coeffs_[i] + beta * b.coeffs_[i];
    r.hermitian_ = a.hermitian_ && b.hermitian_ && alpha.imag() == 0.0 && beta.imag() == 0.0;
    return r;
}

double GridFunction::coordinate(std::size_t flat, int axis) const {
    const std::size_t n = static_cast<std::size_t>(samples_per_axis);
    std::size_t j = flat;
    for (int a = dim - 1; a > axis; --a) j /= n;
    j %= n;
    return two_pi * static_cast<double>(j) / static_cast<double>(n);
}

void fft_inplace(cplx* data, std::size_t n, int sign) {
    if (!is_pow2(n)) throw std::invalid_argument("fft length must be a power of two");
    // Bit-reversal permutation.
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = static_cast<double>(sign) * two_pi / static_cast<double>(len);
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t j = 0; j < len / 2; ++j) {
                // Twiddles from std::polar per butterfly keep rounding flat
                // across stages (sizes here are small enough).
                const cplx w = std::polar(1.0, ang * static_cast<double>(j));
                const cplx u = data[i + j];
                const cplx v = data[i + j + len / 2] * w;
                data[i + j] = u + v;
                data[i + j + len / 2] = u - v;
            }
        }
    }
}

namespace {

// Applies the 1-d FFT along `axis` of the dim-dimensional cube of side n.
void fft_axis(std::vector<cplx>& buf, int dim, std::size_t n, int axis, int sign) {
    std::size_t stride = 1;
    for (int a = dim - 1; a > axis; --a) stride *= n;
    const std::size_t lines = buf.size() / n;
    parallel_for(lines, [&](std::size_t line) {
        // Decompose the line index into (outer, inner) around the axis.
        const std::size_t inner = line % stride;
        const std::size_t outer = line / stride;
        const std::size_t base = outer * stride * n + inner;
        std::vector<cplx> tmp(n);
        for (std::size_t j = 0; j < n; ++j) tmp[j] = buf[base + j * stride];
        fft_inplace(tmp.data(), n, sign);
        for (std::size_t j = 0; j < n; ++j) buf[base + j * stride] = tmp[j];
    });
}

}  // namespace

GridFunction synthesize(const SymbolTable& table, int samples_per_axis, Smoothing smoothing) {
    const int K = table.bandwidth();
    const std::size_t n = static_cast<std::size_t>(samples_per_axis);
    if (!table.hermitian())
        throw std::invalid_argument("synthesize: real synthesis of a non-hermitian table is undefined");
    if (!is_pow2(n)) throw std::invalid_argument("synthesize: samples per axis must be a power of two");
    if (samples_per_axis < 2 * K + 2)
        throw std::invalid_argument("synthesize: need n >= 2K+2 to keep all retained modes");

    std::vector<cplx> buf(pow_size(n, table.dim()), cplx(0.0, 0.0));
    const std::size_t side = n;
    table.for_each([&](const FreqIndex& f, cplx c) {
        if (c == cplx(0.0, 0.0)) return;
        double w = 1.0;
        if (smoothing == Smoothing::fejer) {
            for (int a = 0; a < f.dim; ++a)
                w *= 1.0 - static_cast<double>(std::abs(f[a])) / static_cast<double>(K + 1);
        }
        std::size_t idx = 0;
        for (int a = 0; a < f.dim; ++a) {
            const std::size_t bin =
                static_cast<std::size_t>((f[a] % static_cast<int>(side) + static_cast<int>(side)) %
                                         static_cast<int>(side));
            idx = idx * side + bin;
        }
        buf[idx] = w * c;
    });

    for (int a = 0; a < table.dim(); ++a) fft_axis(buf, table.dim(), n, a, +1);

    const double scale = table.max_abs();
    double max_imag = 0.0;
    GridFunction g;
    g.dim = table.dim();
    g.samples_per_axis = samples_per_axis;
    g.values.resize(buf.size());
    for (std::size_t i = 0; i < buf.size(); ++i) {
        max_imag = std::max(max_imag, std::fabs(buf[i].imag()));
        g.values[i] = buf[i].real();
    }
    if (scale > 0.0 && max_imag > 1e-10 * scale)
        throw std::runtime_error("synthesize: imaginary residue exceeds tolerance");
    return g;
}

SymbolTable analyze(const GridFunction& grid, int bandwidth) {
    const std::size_t n = static_cast<std::size_t>(grid.samples_per_axis);
    if (!is_pow2(n)) throw std::invalid_argument("analyze: samples per axis must be a power of two");
    if (grid.samples_per_axis < 2 * bandwidth + 2)
        throw std::invalid_argument("analyze: need n >= 2K+2");
    if (grid.values.size() != pow_size(n, grid.dim))
        throw std::invalid_argument("analyze: value count does not match n^d");

    std::vector<cplx> buf(grid.values.begin(), grid.values.end());
    for (int a = 0; a < grid.dim; ++a) fft_axis(buf, grid.dim, n, a, -1);
    const double scale = 1.0 / static_cast<double>(buf.size());

    SymbolTable t(grid.dim, bandwidth);
    const std::size_t side = n;
    auto bin_of = [&](const FreqIndex& f) {
        std::size_t idx = 0;
        for (int a = 0; a < f.dim; ++a) {
            const std::size_t bin =
                static_cast<std::size_t>((f[a] % static_cast<int>(side) + static_cast<int>(side)) %
                                         static_cast<int>(side));
            idx = idx * side + bin;
        }
        return idx;
    };
    t.for_each([&](const FreqIndex& f, cplx) {
        if (f == negate(f) || lex_positive(f)) t.set_pair(f, buf[bin_of(f)] * scale);
    });
    return t;
}

cplx pairing(const SymbolTable& f, const SymbolTable& g) {
    if (f.dim() != g.dim() || f.bandwidth() != g.bandwidth())
        throw std::invalid_argument("pairing: shape mismatch");
    cplx total(0.0, 0.0);
    f.for_each([&](const FreqIndex& k, cplx) {
        if (k == negate(k)) {
            total += f.at(k) * g.at(k);
        } else if (lex_positive(k)) {
            const FreqIndex mk = negate(k);
            total += f.at(k) * g.at(mk) + f.at(mk) * g.at(k);
        }
    });
    return total;
}

double sobolev_norm(const SymbolTable& table, double tau) {
    double s = 0.0;
    table.for_each([&](const FreqIndex& k, cplx c) {
        const double w = std::pow(1.0 + static_cast<double>(norm_sq(k)), tau);
        s += w * std::norm(c);
    });
    return std::sqrt(s);
}

}  // namespace torus
