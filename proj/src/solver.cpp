#include "torus/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "torus/util.hpp"

namespace torus {

namespace {

std::size_t pow_size(std::size_t base, int exp) {
    std::size_t r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

Knot grid_knot(std::size_t flat, int dim, int n) {
    Knot t{0, 0, 0};
    for (int a = dim - 1; a >= 0; --a) {
        t[static_cast<std::size_t>(a)] =
            two_pi * static_cast<double>(flat % static_cast<std::size_t>(n)) / static_cast<double>(n);
        flat /= static_cast<std::size_t>(n);
    }
    return t;
}

double l1_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += std::fabs(x);
    return s;
}

double sq_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

void check_problem(const ReconProblem& p) {
    if (p.grid_knots < 1) throw std::invalid_argument("problem: grid knots must be >= 1");
    if (p.bandwidth < 1) throw std::invalid_argument("problem: bandwidth must be >= 1");
    if (p.functionals.empty()) throw std::invalid_argument("problem: no measurement functionals");
    const std::size_t n0 = null_basis(p.op).size();
    if (p.functionals.size() < n0)
        throw std::invalid_argument("problem: fewer measurements than null space dimensions");
    if (!nullspace_injectivity(p.functionals, p.op))
        throw std::invalid_argument("problem: measurements are not injective on the null space");
}

}  // namespace

LinearSystem build_system(const ReconProblem& problem) {
    check_problem(problem);
    const int d = problem.op.dim();
    const std::size_t n_knots = pow_size(static_cast<std::size_t>(problem.grid_knots), d);
    const std::size_t m = problem.functionals.size();

    LinearSystem sys;
    sys.basis = null_basis(problem.op);
    sys.knots.resize(n_knots);
    for (std::size_t i = 0; i < n_knots; ++i) sys.knots[i] = grid_knot(i, d, problem.grid_knots);

    // One admissibility gate for the whole assembly.
    bool any_spatial = false;
    for (const Functional& nu : problem.functionals)
        if (nu.kind() == Functional::Kind::spatial) any_spatial = true;
    if (any_spatial) {
        const AdmissibilityVerdict v = sampling_admissible(problem.op);
        if (v.status == AdmissibilityVerdict::Status::no)
            throw std::runtime_error("build_system: spatial sampling refused, operator is not "
                                     "sampling-admissible (" + to_string(v.basis) + ")");
        if (v.status == AdmissibilityVerdict::Status::indeterminate) sys.sampling_warning = true;
    }

    sys.a = Matrix(m, n_knots);
    parallel_for(n_knots, [&](std::size_t i) {
        for (std::size_t mm = 0; mm < m; ++mm)
            sys.a(mm, i) = measurement_column_unchecked(problem.functionals[mm], problem.op,
                                                        sys.knots[i], problem.bandwidth);
    });

    sys.b = Matrix(m, sys.basis.size());
    for (std::size_t n = 0; n < sys.basis.size(); ++n) {
        const SymbolTable bt = sys.basis[n].table(d, problem.bandwidth);
        for (std::size_t mm = 0; mm < m; ++mm) sys.b(mm, n) = measure(problem.functionals[mm], bt);
    }

    const std::vector<FreqIndex>& nf = problem.op.null_frequencies();
    sys.m_real = Matrix(2 * nf.size(), n_knots);
    for (std::size_t n = 0; n < nf.size(); ++n) {
        for (std::size_t i = 0; i < n_knots; ++i) {
            double dot = 0.0;
            for (int a = 0; a < d; ++a)
                dot += static_cast<double>(nf[n][a]) * sys.knots[i][static_cast<std::size_t>(a)];
            sys.m_real(2 * n, i) = std::cos(dot);
            sys.m_real(2 * n + 1, i) = -std::sin(dot);
        }
    }
    return sys;
}

double lambda_max(const ReconProblem& problem, const LinearSystem& system) {
    if (problem.y.size() != system.a.rows) throw std::invalid_argument("lambda_max: data length mismatch");
    std::vector<double> r = problem.y;
    if (system.b.cols > 0) {
        const std::vector<double> c = least_squares(system.b, problem.y);
        const std::vector<double> bc = matvec(system.b, c);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] -= bc[i];
    }
    const std::vector<double> g = matvec_t(system.a, r);
    double mx = 0.0;
    for (double v : g) mx = std::max(mx, 2.0 * std::fabs(v));
    return mx;
}

double lambda_max(const ReconProblem& problem) { return lambda_max(problem, build_system(problem)); }

ObjectiveParts objective(const ReconProblem& problem, const LinearSystem& system,
                         const std::vector<double>& weights, const std::vector<double>& null_coeffs) {
    if (weights.size() != system.a.cols || null_coeffs.size() != system.b.cols ||
        problem.y.size() != system.a.rows)
        throw std::invalid_argument("objective: shape mismatch");
    std::vector<double> r = matvec(system.a, weights);
    if (system.b.cols > 0) {
        const std::vector<double> bc = matvec(system.b, null_coeffs);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] += bc[i];
    }
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = problem.y[i] - r[i];
    ObjectiveParts parts;
    parts.data_fit = sq_norm(r);
    parts.reg_value = l1_norm(weights);
    parts.objective = parts.data_fit + problem.lambda * parts.reg_value;
    return parts;
}

namespace {

struct Iterate {
    std::vector<double> a;
    std::vector<double> c;
};

struct SmoothModel {
    const LinearSystem& sys;
    const std::vector<double>& y;
    double rho;

    // ||y - A a - B c||^2 + rho ||M a||^2
    double value(const Iterate& x) const {
        std::vector<double> r = matvec(sys.a, x.a);
        if (sys.b.cols > 0) {
            const std::vector<double> bc = matvec(sys.b, x.c);
            for (std::size_t i = 0; i < r.size(); ++i) r[i] += bc[i];
        }
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = y[i] - r[i];
        double v = sq_norm(r);
        if (sys.m_real.rows > 0) v += rho * sq_norm(matvec(sys.m_real, x.a));
        return v;
    }

    Iterate gradient(const Iterate& x) const {
        std::vector<double> r = matvec(sys.a, x.a);
        if (sys.b.cols > 0) {
            const std::vector<double> bc = matvec(sys.b, x.c);
            for (std::size_t i = 0; i < r.size(); ++i) r[i] += bc[i];
        }
        for (std::size_t i = 0; i < r.size(); ++i) r[i] -= y[i];
        Iterate g;
        g.a = matvec_t(sys.a, r);
        for (double& v : g.a) v *= 2.0;
        if (sys.m_real.rows > 0) {
            const std::vector<double> ma = matvec(sys.m_real, x.a);
            const std::vector<double> mtma = matvec_t(sys.m_real, ma);
            for (std::size_t i = 0; i < g.a.size(); ++i) g.a[i] += 2.0 * rho * mtma[i];
        }
        g.c = sys.b.cols > 0 ? matvec_t(sys.b, r) : std::vector<double>();
        for (double& v : g.c) v *= 2.0;
        return g;
    }
};

double soft_threshold(double v, double t) {
    if (v > t) return v - t;
    if (v < -t) return v + t;
    return 0.0;
}

Iterate prox_step(const SmoothModel& model, const Iterate& x, double step, double lambda) {
    const Iterate g = model.gradient(x);
    Iterate z;
    z.a.resize(x.a.size());
    for (std::size_t i = 0; i < x.a.size(); ++i)
        z.a[i] = soft_threshold(x.a[i] - step * g.a[i], lambda * step);
    z.c.resize(x.c.size());
    for (std::size_t i = 0; i < x.c.size(); ++i) z.c[i] = x.c[i] - step * g.c[i];
    return z;
}

double full_objective(const SmoothModel& model, const Iterate& x, double lambda) {
    return model.value(x) + lambda * l1_norm(x.a);
}

double estimate_step(const LinearSystem& sys, const SolverConfig& cfg) {
    // Lipschitz constant of the smooth gradient: 2 sigma_max^2 of the
    // stacked [A B; sqrt(rho) M 0].
    const std::size_t cols = sys.a.cols + sys.b.cols;
    Matrix s(sys.a.rows + sys.m_real.rows, cols);
    for (std::size_t i = 0; i < sys.a.rows; ++i) {
        for (std::size_t j = 0; j < sys.a.cols; ++j) s(i, j) = sys.a(i, j);
        for (std::size_t j = 0; j < sys.b.cols; ++j) s(i, sys.a.cols + j) = sys.b(i, j);
    }
    const double srho = std::sqrt(cfg.null_penalty);
    for (std::size_t i = 0; i < sys.m_real.rows; ++i)
        for (std::size_t j = 0; j < sys.a.cols; ++j)
            s(sys.a.rows + i, j) = srho * sys.m_real(i, j);
    const double sigma_sq = power_iteration_sq_norm(s, cfg.power_iterations);
    if (!(sigma_sq > 0.0) || !std::isfinite(sigma_sq))
        throw std::runtime_error("solve_tv: degenerate step estimate");
    return cfg.step_safety / (2.0 * sigma_sq);
}

}  // namespace

Solution solve_tv(const ReconProblem& problem, const LinearSystem& system, const SolverConfig& config) {
    if (problem.y.size() != system.a.rows)
        throw std::invalid_argument("solve_tv: data length does not match measurement count");
    for (double v : problem.y)
        if (!std::isfinite(v)) throw std::runtime_error("solve_tv: non-finite data vector");
    if (!(problem.lambda > 0.0)) throw std::invalid_argument("solve_tv: lambda must be > 0");

    const SmoothModel model{system, problem.y, config.null_penalty};
    const double step = estimate_step(system, config);

    Iterate x;
    x.a.assign(system.a.cols, 0.0);
    x.c.assign(system.b.cols, 0.0);
    Iterate momentum = x;
    double t = 1.0;
    double fx = full_objective(model, x, problem.lambda);

    Solution sol;
    if (config.record_trace) sol.diagnostics.trace.push_back(fx);

    int iter = 0;
    int stall = 0;
    bool converged = false;
    for (; iter < config.max_iterations; ++iter) {
        Iterate z = prox_step(model, momentum, step, problem.lambda);
        double fz = full_objective(model, z, problem.lambda);
        if (!config.accelerated) {
            momentum = z;
        } else if (fz > fx) {
            // Monotone restart: fall back to a plain step from the
            // current point, which cannot increase F for a valid step.
            t = 1.0;
            z = prox_step(model, x, step, problem.lambda);
            fz = full_objective(model, z, problem.lambda);
            if (fz > fx) {
                z = x;
                fz = fx;
            }
            const double t_next = (1.0 + std::sqrt(1.0 + 4.0 * t * t)) / 2.0;
            momentum = z;
            t = t_next;
        } else {
            const double t_next = (1.0 + std::sqrt(1.0 + 4.0 * t * t)) / 2.0;
            momentum.a.resize(z.a.size());
            momentum.c.resize(z.c.size());
            const double beta = (t - 1.0) / t_next;
            for (std::size_t i = 0; i < z.a.size(); ++i)
                momentum.a[i] = z.a[i] + beta * (z.a[i] - x.a[i]);
            for (std::size_t i = 0; i < z.c.size(); ++i)
                momentum.c[i] = z.c[i] + beta * (z.c[i] - x.c[i]);
            t = t_next;
        }
        const double decrease = fx - fz;
        x = z;
        fx = fz;
        if (config.record_trace) sol.diagnostics.trace.push_back(fx);
        if (decrease <= config.rel_tolerance * std::max(1.0, std::fabs(fx))) {
            if (++stall >= 10) {
                converged = true;
                ++iter;
                break;
            }
        } else {
            stall = 0;
        }
    }

    sol.weights = x.a;
    sol.null_coeffs = x.c;
    const ObjectiveParts parts = objective(problem, system, x.a, x.c);
    sol.diagnostics.objective = parts.objective;
    sol.diagnostics.data_fit = parts.data_fit;
    sol.diagnostics.reg_value = parts.reg_value;
    if (system.m_real.rows > 0) {
        const std::vector<double> ma = matvec(system.m_real, x.a);
        sol.diagnostics.null_penalty_value = config.null_penalty * sq_norm(ma);
        for (std::size_t n = 0; n + 1 < ma.size(); n += 2)
            sol.diagnostics.null_residual =
                std::max(sol.diagnostics.null_residual, std::hypot(ma[n], ma[n + 1]));
    }
    sol.diagnostics.iterations = iter;
    sol.diagnostics.converged = converged;
    return sol;
}

Solution solve_tv(const ReconProblem& problem, const SolverConfig& config) {
    return solve_tv(problem, build_system(problem), config);
}

TikhonovSolution solve_tikhonov(const ReconProblem& problem) {
    check_problem(problem);
    const int d = problem.op.dim();
    const std::size_t m = problem.functionals.size();
    if (problem.y.size() != m) throw std::invalid_argument("solve_tikhonov: data length mismatch");
    if (!(problem.lambda > 0.0)) throw std::invalid_argument("solve_tikhonov: lambda must be > 0");

    std::vector<SymbolTable> nu_tables;
    nu_tables.reserve(m);
    for (const Functional& nu : problem.functionals)
        nu_tables.push_back(functional_table(nu, d, problem.bandwidth));

    // hhat[k] = |Lhat[k]|^-2 off the null set, 0 on it.
    SymbolTable hhat(d, problem.bandwidth);
    hhat.for_each([&](const FreqIndex& k, cplx) {
        const cplx p = problem.op.pseudo_symbol(k);
        hhat.set(k, cplx(std::norm(p), 0.0));
    });

    // Gram G[m,m'] = <nu_m, h_L * nu_m'> over the truncated lattice;
    // accumulating real parts keeps it exactly symmetric.
    const std::vector<NullBasisElement> basis = null_basis(problem.op);
    const std::size_t n0 = basis.size();
    Matrix sys(m + n0, m + n0);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i; j < m; ++j) {
            double g = 0.0;
            hhat.for_each([&](const FreqIndex& k, cplx h) {
                if (h.real() == 0.0) return;
                g += h.real() * (nu_tables[i].at(k) * std::conj(nu_tables[j].at(k))).real();
            });
            sys(i, j) = g + (i == j ? problem.lambda : 0.0);
            sys(j, i) = g + (i == j ? problem.lambda : 0.0);
        }
    }
    for (std::size_t n = 0; n < n0; ++n) {
        const SymbolTable bt = basis[n].table(d, problem.bandwidth);
        for (std::size_t i = 0; i < m; ++i) {
            const double v = measure(problem.functionals[i], bt);
            sys(i, m + n) = v;
            sys(m + n, i) = v;
        }
    }

    std::vector<double> rhs(m + n0, 0.0);
    for (std::size_t i = 0; i < m; ++i) rhs[i] = problem.y[i];
    std::vector<double> sol;
    try {
        sol = lu_solve(sys, rhs);
    } catch (const std::runtime_error&) {
        throw std::runtime_error("solve_tikhonov: singular augmented system (measurements not "
                                 "injective on the null space)");
    }

    TikhonovSolution out;
    out.coeffs.assign(sol.begin(), sol.begin() + static_cast<std::ptrdiff_t>(m));
    out.null_coeffs.assign(sol.begin() + static_cast<std::ptrdiff_t>(m), sol.end());

    std::vector<SymbolTable> basis_tables;
    basis_tables.reserve(n0);
    for (std::size_t n = 0; n < n0; ++n) basis_tables.push_back(basis[n].table(d, problem.bandwidth));

    auto gen = [&](const FreqIndex& k) {
        cplx f(0.0, 0.0);
        const double h = hhat.at(k).real();
        if (h != 0.0) {
            cplx s(0.0, 0.0);
            for (std::size_t i = 0; i < m; ++i) s += out.coeffs[i] * nu_tables[i].at(k);
            f = h * s;
        }
        for (std::size_t n = 0; n < n0; ++n) f += out.null_coeffs[n] * basis_tables[n].at(k);
        return f;
    };
    if (problem.op.real_symbol()) {
        out.table = make_hermitian_table(d, problem.bandwidth, gen);
    } else {
        out.table = SymbolTable(d, problem.bandwidth);
        out.table.for_each([&](const FreqIndex& k, cplx) { out.table.set(k, gen(k)); });
    }

    double fit = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double pred = measure(problem.functionals[i], out.table);
        fit += (problem.y[i] - pred) * (problem.y[i] - pred);
    }
    out.data_fit = fit;
    double reg = 0.0;
    out.table.for_each([&](const FreqIndex& k, cplx f) {
        if (!problem.op.in_null_space(k)) reg += std::norm(problem.op.symbol(k) * f);
    });
    out.reg_value = reg;
    out.objective = out.data_fit + problem.lambda * out.reg_value;
    return out;
}

namespace {

// Union-find over active grid cells; adjacency is l_inf distance one with
// cyclic wrap on every axis.
struct ClusterFinder {
    std::vector<std::size_t> parent;

    explicit ClusterFinder(std::size_t n) : parent(n) {
        for (std::size_t i = 0; i < n; ++i) parent[i] = i;
    }
    std::size_t find(std::size_t i) {
        while (parent[i] != i) {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        return i;
    }
    void unite(std::size_t i, std::size_t j) {
        const std::size_t ri = find(i), rj = find(j);
        if (ri != rj) parent[std::max(ri, rj)] = std::min(ri, rj);
    }
};

std::array<int, 3> unflatten(std::size_t flat, int dim, int n) {
    std::array<int, 3> idx{0, 0, 0};
    for (int a = dim - 1; a >= 0; --a) {
        idx[static_cast<std::size_t>(a)] = static_cast<int>(flat % static_cast<std::size_t>(n));
        flat /= static_cast<std::size_t>(n);
    }
    return idx;
}

bool cyclic_adjacent(const std::array<int, 3>& p, const std::array<int, 3>& q, int dim, int n) {
    for (int a = 0; a < dim; ++a) {
        const int diff = std::abs(p[static_cast<std::size_t>(a)] - q[static_cast<std::size_t>(a)]);
        if (std::min(diff, n - diff) > 1) return false;
    }
    return true;
}

}  // namespace

Spline extract_spline(const ReconProblem& problem, const LinearSystem& system,
                      const Solution& solution, double threshold) {
    const int d = problem.op.dim();
    const int n = problem.grid_knots;
    const std::vector<double>& a = solution.weights;
    if (a.size() != system.knots.size()) throw std::invalid_argument("extract_spline: shape mismatch");
    for (double v : a)
        if (!std::isfinite(v)) throw std::invalid_argument("extract_spline: non-finite solution");

    double amax = 0.0;
    for (double v : a) amax = std::max(amax, std::fabs(v));
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (amax > 0.0 && std::fabs(a[i]) > threshold * amax) active.push_back(i);

    // Merge adjacent active cells by |a|-weighted circular centroid.
    std::vector<Knot> knots;
    if (!active.empty()) {
        ClusterFinder cf(active.size());
        std::vector<std::array<int, 3>> cells(active.size());
        for (std::size_t i = 0; i < active.size(); ++i) cells[i] = unflatten(active[i], d, n);
        for (std::size_t i = 0; i < active.size(); ++i)
            for (std::size_t j = i + 1; j < active.size(); ++j)
                if (cyclic_adjacent(cells[i], cells[j], d, n)) cf.unite(i, j);

        std::vector<std::size_t> roots;
        for (std::size_t i = 0; i < active.size(); ++i)
            if (cf.find(i) == i) roots.push_back(i);
        for (std::size_t root : roots) {
            Knot centroid{0, 0, 0};
            for (int ax = 0; ax < d; ++ax) {
                double sx = 0.0, sy = 0.0;
                for (std::size_t i = 0; i < active.size(); ++i) {
                    if (cf.find(i) != root) continue;
                    const double w = std::fabs(a[active[i]]);
                    const double th = system.knots[active[i]][static_cast<std::size_t>(ax)];
                    sx += w * std::cos(th);
                    sy += w * std::sin(th);
                }
                centroid[static_cast<std::size_t>(ax)] = wrap_angle(std::atan2(sy, sx));
            }
            knots.push_back(centroid);
        }
    }

    // Restricted least squares with M a = 0 eliminated exactly: substitute
    // a = Z q over the null-space basis Z of the expanded innovation
    // matrix, then fit [A_S Z, B] by QR.
    const std::vector<FreqIndex>& nf = problem.op.null_frequencies();
    Matrix m_knots(2 * nf.size(), knots.size());
    for (std::size_t nn = 0; nn < nf.size(); ++nn) {
        for (std::size_t j = 0; j < knots.size(); ++j) {
            double dot = 0.0;
            for (int ax = 0; ax < d; ++ax)
                dot += static_cast<double>(nf[nn][ax]) * knots[j][static_cast<std::size_t>(ax)];
            m_knots(2 * nn, j) = std::cos(dot);
            m_knots(2 * nn + 1, j) = -std::sin(dot);
        }
    }
    const Matrix z = null_space_basis(m_knots);

    Matrix a_knots(problem.functionals.size(), knots.size());
    for (std::size_t j = 0; j < knots.size(); ++j)
        for (std::size_t mm = 0; mm < problem.functionals.size(); ++mm)
            a_knots(mm, j) = measurement_column_unchecked(problem.functionals[mm], problem.op, knots[j],
                                                          problem.bandwidth);

    const std::size_t q_cols = z.cols;
    const std::size_t c_cols = system.basis.size();
    Matrix design(problem.functionals.size(), q_cols + c_cols);
    for (std::size_t mm = 0; mm < problem.functionals.size(); ++mm) {
        for (std::size_t qq = 0; qq < q_cols; ++qq) {
            double s = 0.0;
            for (std::size_t j = 0; j < knots.size(); ++j) s += a_knots(mm, j) * z(j, qq);
            design(mm, qq) = s;
        }
        for (std::size_t cc = 0; cc < c_cols; ++cc) design(mm, q_cols + cc) = system.b(mm, cc);
    }

    std::vector<double> fit;
    if (q_cols + c_cols > 0) {
        try {
            fit = least_squares(design, problem.y);
        } catch (const std::exception&) {
            // Underdetermined or collinear refit (active set larger than
            // the measurement count): damped normal equations.
            Matrix gram(design.cols, design.cols);
            double tr = 0.0;
            for (std::size_t i = 0; i < design.cols; ++i) {
                for (std::size_t j = 0; j < design.cols; ++j) {
                    double s = 0.0;
                    for (std::size_t mm = 0; mm < design.rows; ++mm) s += design(mm, i) * design(mm, j);
                    gram(i, j) = s;
                }
                tr += gram(i, i);
            }
            const double damp = 1e-12 * std::max(tr, 1.0);
            for (std::size_t i = 0; i < design.cols; ++i) gram(i, i) += damp;
            fit = lu_solve(gram, matvec_t(design, problem.y));
        }
    }

    Innovations innov;
    innov.dim = d;
    for (std::size_t j = 0; j < knots.size(); ++j) {
        double w = 0.0;
        for (std::size_t qq = 0; qq < q_cols; ++qq) w += z(j, qq) * fit[qq];
        if (std::fabs(w) > 1e-12 * std::max(amax, 1.0)) {
            innov.knots.push_back(knots[j]);
            innov.weights.push_back(w);
        }
    }

    Spline s = make_spline(problem.op, std::move(innov));
    for (std::size_t nn = 0; nn < system.basis.size(); ++nn) {
        const NullBasisElement& b = system.basis[nn];
        const double v = fit[q_cols + nn];
        if (b.kind == NullBasisElement::Kind::constant) {
            s.set_null_coeff(b.freq, s.null_coeff(b.freq) + cplx(v, 0.0));
        } else if (b.kind == NullBasisElement::Kind::cosine) {
            s.set_null_coeff(b.freq, s.null_coeff(b.freq) + cplx(0.5 * v, 0.0));
        } else {
            s.set_null_coeff(b.freq, s.null_coeff(b.freq) + cplx(0.0, -0.5 * v));
        }
    }
    return s;
}

}  // namespace torus
