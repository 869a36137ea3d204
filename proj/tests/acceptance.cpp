// Acceptance suite: one pass/fail line per criterion. Exit code is the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "torus/formats.hpp"
#include "torus/util.hpp"

using namespace torus;

namespace {

int failures = 0;

struct Criterion {
    std::string name;
    double time_limit_s;  // 0 = unbounded
    std::vector<std::string> problems;

    void require(bool ok, const std::string& what) {
        if (!ok) problems.push_back(what);
    }
    void require_close(double got, double want, double tol, const std::string& what) {
        if (!(std::fabs(got - want) <= tol)) {
            std::ostringstream ss;
            ss << what << " (got " << got << ", want " << want << " +- " << tol << ")";
            problems.push_back(ss.str());
        }
    }
};

void run_criterion(int index, const std::string& name, double time_limit_s,
                   const std::function<void(Criterion&)>& body) {
    Criterion c{name, time_limit_s, {}};
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(c);
    } catch (const std::exception& e) {
        c.problems.push_back(std::string("exception: ") + e.what());
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (time_limit_s > 0 && elapsed > time_limit_s) {
        std::ostringstream ss;
        ss << "runtime " << elapsed << " s exceeds " << time_limit_s << " s";
        c.problems.push_back(ss.str());
    }
    if (c.problems.empty()) {
        std::printf("[PASS] criterion %d: %s (%.2f s)\n", index, name.c_str(), elapsed);
    } else {
        ++failures;
        std::printf("[FAIL] criterion %d: %s (%.2f s)\n", index, name.c_str(), elapsed);
        for (const std::string& p : c.problems) std::printf("       - %s\n", p.c_str());
    }
    std::fflush(stdout);
}

std::vector<Operator> table_row_instances() {
    return {
        Operator::derivative_power(2),
        Operator::exponential_shift(1.0, 1.0),
        Operator::modulated_derivative(2),
        Operator::harmonic_pair(freq(2)),
        Operator::fractional_derivative(1.5),
        Operator::exponential_shift(1.0, 1.5),
        Operator::fractional_laplacian(1.5),
        Operator::sobolev(2.0, 2.0),
        Operator::radial_green(RadialProfile::matern(1.5), 1.0, 64),
        Operator::radial_green(RadialProfile::compact_bump(), 1.0, 64, 2.5),
        Operator::separable({Operator::exponential_shift(1.0, 2.0), Operator::exponential_shift(3.0, 2.0)}),
        Operator::fractional_laplacian(2.0, 2),
        Operator::harmonic_pair(freq(1, 2)),
        Operator::sobolev(2.0, 2.0, 2),
    };
}

// The mixed-measurement bench of criteria 7 and 8: d=1 Sobolev(2, 2),
// N = 32 grid, M = 8 measurements of a two-knot spline with samples
// bracketing both knots.
struct Bench {
    ReconProblem problem;
    Innovations truth;
};

Bench make_bench() {
    Bench b;
    b.problem.op = Operator::sobolev(2.0, 2.0);
    b.problem.bandwidth = 64;
    b.problem.grid_knots = 32;
    b.problem.lambda = 1.0;  // replaced per run
    const double h = two_pi / 32;
    for (double x : {4.5 * h, 5.5 * h, 19.5 * h, 20.5 * h, 12.0 * h, 27.0 * h})
        b.problem.functionals.push_back(Functional::spatial(Knot{x, 0, 0}, 1));
    b.problem.functionals.push_back(Functional::fourier(freq(1), true));
    b.problem.functionals.push_back(Functional::fourier(freq(2), false));

    b.truth.dim = 1;
    b.truth.knots = {Knot{5 * h, 0, 0}, Knot{20 * h, 0, 0}};
    b.truth.weights = {1.3, -0.7};
    const SymbolTable table = spline_table(make_spline(b.problem.op, b.truth), b.problem.bandwidth);
    for (const Functional& nu : b.problem.functionals)
        b.problem.y.push_back(measure(nu, table));
    return b;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string value_of(const std::string& text, const std::string& key) {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind(key + " = ", 0) == 0) return line.substr(key.size() + 3);
    }
    return {};
}

}  // namespace

int main() {
    run_criterion(1, "symbol algebra suite over the catalog", 10.0, [](Criterion& c) {
        for (const Operator& op : table_row_instances()) {
            const int K = 64;
            const PseudoinverseReport r = verify_pseudoinverse(op, K);
            c.require(r.max() <= 1e-12,
                      op.description() + ": pseudoinverse deviation " + std::to_string(r.max()));
            bool projector_ok = true;
            SymbolTable lattice(op.dim(), K);
            lattice.for_each([&](const FreqIndex& k, cplx) {
                const cplx proj = 1.0 - op.symbol(k) * op.pseudo_symbol(k);
                if (op.in_null_space(k)) {
                    if (!(proj == cplx(1.0, 0.0))) projector_ok = false;
                } else if (!(std::abs(proj) <= 1e-12)) {
                    projector_ok = false;
                }
            });
            c.require(projector_ok, op.description() + ": projector identity violated");
        }
    });

    run_criterion(2, "spline annihilation and single-knot rejection", 5.0, [](Criterion& c) {
        const Operator d2 = Operator::derivative_power(2);
        Innovations innov;
        innov.dim = 1;
        innov.knots = {Knot{0.0, 0, 0}, Knot{pi, 0, 0}};
        innov.weights = {1.0, -1.0};
        const double dev = annihilation_check(d2, make_spline(d2, innov), 256);
        c.require(dev <= 1e-10, "two-knot D^2 annihilation deviation " + std::to_string(dev));

        for (int n : {1, 2, 3}) {
            Innovations single;
            single.dim = 1;
            single.knots = {Knot{1.0, 0, 0}};
            single.weights = {1.0};
            c.require(!validate_innovations(Operator::derivative_power(n), single).valid,
                      "single-knot D^" + std::to_string(n) + " must be rejected");
        }
    });

    run_criterion(3, "closed-form Green's functions", 0.0, [](Criterion& c) {
        // (a) sawtooth pi - x, K = 4096 with Fejer smoothing.
        {
            const GridFunction g =
                synthesize(green_table(Operator::derivative_power(1), 4096), 16384, Smoothing::fejer);
            double worst = 0.0;
            for (std::size_t j = 0; j < g.values.size(); ++j) {
                const double x = g.coordinate(j, 0);
                if (torus_distance(x, 0.0) <= 0.5) continue;
                worst = std::max(worst, std::fabs(g.values[j] - (pi - x)));
            }
            c.require(worst <= 0.02, "sawtooth interior error " + std::to_string(worst));
        }
        // (b) exponential Green's function c e^{-x}, c fixed by ghat[0] = 1.
        {
            const Operator ex = Operator::exponential_shift(1.0, 1.0);
            const double scale = two_pi / (1.0 - std::exp(-two_pi));
            const GridFunction g = synthesize(green_table(ex, 16384), 65536, Smoothing::fejer);
            double worst = 0.0;
            for (std::size_t j = 0; j < g.values.size(); ++j) {
                const double x = g.coordinate(j, 0);
                if (torus_distance(x, 0.0) <= 0.5) continue;
                const double truth = scale * std::exp(-x);
                worst = std::max(worst, std::fabs(g.values[j] - truth) / truth);
            }
            c.require(worst <= 0.02, "exponential interior relative error " + std::to_string(worst));
        }
    });

    run_criterion(4, "Matern spectral band", 10.0, [](Criterion& c) {
        for (double beta : {1.5, 2.5, 3.5}) {
            for (double eps : {1.0, 0.3}) {
                const SymbolTable g = radial_green_coeffs(RadialProfile::matern(beta), eps, 256);
                double lo = 1e300, hi = 0.0;
                bool positive = true;
                for (int k = 0; k <= 256; ++k) {
                    const double v = g.at(freq(k)).real();
                    if (!(v > 0.0)) positive = false;
                    if (k >= 1) {
                        const double band =
                            v * std::pow(1.0 + eps * static_cast<double>(k), 2.0 * (beta - 0.5));
                        lo = std::min(lo, band);
                        hi = std::max(hi, band);
                    }
                }
                std::ostringstream tag;
                tag << "beta=" << beta << " eps=" << eps;
                c.require(positive, tag.str() + ": nonpositive coefficient");
                c.require(hi / lo <= 10.0,
                          tag.str() + ": band ratio " + std::to_string(hi / lo) + " exceeds 10");
            }
        }
    });

    run_criterion(5, "compact-support Green's function", 0.0, [](Criterion& c) {
        for (double eps : {0.5, 1.0}) {
            const Operator op = Operator::radial_green(RadialProfile::compact_bump(), eps, 256, 2.5);
            const GridFunction g = synthesize(green_table(op, 256), 1024, Smoothing::none);
            double peak = 0.0;
            for (double v : g.values) peak = std::max(peak, std::fabs(v));
            const double support = 2.0 * std::asin(eps / 2.0) + 0.05;
            double worst = 0.0;
            for (std::size_t j = 0; j < g.values.size(); ++j) {
                if (torus_distance(g.coordinate(j, 0), 0.0) <= support) continue;
                worst = std::max(worst, std::fabs(g.values[j]));
            }
            c.require(worst <= 1e-2 * peak, "eps=" + std::to_string(eps) + ": tail " +
                                                std::to_string(worst / peak) + " of peak");
        }
    });

    run_criterion(6, "admissibility truth table", 5.0, [](Criterion& c) {
        using S = AdmissibilityVerdict::Status;
        auto expect_sampling = [&](const Operator& op, S want) {
            const AdmissibilityVerdict v = sampling_admissible(op);
            c.require(v.status == want, op.description() + ": sampling " + to_string(v.status) +
                                            ", expected " + to_string(want));
        };
        auto expect_l2 = [&](const Operator& op, S want) {
            const AdmissibilityVerdict v = l2_admissible(op);
            c.require(v.status == want, op.description() + ": L2 " + to_string(v.status) +
                                            ", expected " + to_string(want));
        };
        expect_sampling(Operator::fractional_derivative(0.4), S::no);
        expect_sampling(Operator::fractional_derivative(1.0), S::no);
        expect_sampling(Operator::fractional_derivative(1.5), S::yes);
        expect_sampling(Operator::fractional_laplacian(1.0, 2), S::no);
        expect_sampling(Operator::fractional_laplacian(2.5, 2), S::yes);
        expect_l2(Operator::fractional_derivative(0.6), S::yes);
        expect_l2(Operator::fractional_derivative(0.4), S::no);
        expect_l2(Operator::fractional_laplacian(1.0, 2), S::no);
        expect_l2(Operator::fractional_laplacian(1.5, 2), S::yes);
        const Operator matern = Operator::radial_green(RadialProfile::matern(2.5), 1.0, 64);
        const Operator compact = Operator::radial_green(RadialProfile::compact_bump(), 1.0, 64, 2.5);
        expect_sampling(matern, S::yes);
        expect_l2(matern, S::yes);
        expect_sampling(compact, S::yes);
        expect_l2(compact, S::yes);
        expect_sampling(Operator::separable({Operator::exponential_shift(1.0, 1.5),
                                             Operator::exponential_shift(1.0, 1.5)}),
                        S::yes);

        // Sweep: sampling-admissible implies L2-admissible.
        std::vector<Operator> sweep = table_row_instances();
        sweep.push_back(Operator::fractional_derivative(0.4));
        sweep.push_back(Operator::fractional_derivative(0.75));
        sweep.push_back(Operator::fractional_laplacian(1.0, 2));
        sweep.push_back(Operator::fractional_laplacian(2.5, 2));
        sweep.push_back(Operator::sobolev(1.0, 4.0, 3));
        for (const Operator& op : sweep) {
            if (sampling_admissible(op).status == S::yes)
                c.require(l2_admissible(op).status == S::yes,
                          op.description() + ": sampling-admissible but not L2-admissible");
        }
    });

    // State shared between criteria 7 and 8.
    static Bench bench = make_bench();
    static LinearSystem bench_sys;
    static Solution small_lambda_solution;
    static double small_lambda = 0.0;

    run_criterion(7, "TV solver oracle equivalence and optimality certificate", 60.0,
                  [](Criterion& c) {
        bench_sys = build_system(bench.problem);
        const double lmax = lambda_max(bench.problem, bench_sys);
        c.require(lmax > 0.0, "lambda_max must be positive");

        SolverConfig cfg;
        const double sigma_sq = power_iteration_sq_norm(bench_sys.a, 50);
        const double ref_step = 0.95 / (2.0 * sigma_sq);

        bool first = true;
        for (double frac : {1e-3, 3.16e-2, 1.0}) {
            ReconProblem p = bench.problem;
            p.lambda = frac * lmax;
            const Solution sol = solve_tv(p, bench_sys, cfg);
            if (first) {
                small_lambda_solution = sol;
                small_lambda = p.lambda;
                first = false;
            }

            const oracle::IstaResult ref =
                oracle::reference_ista(bench_sys.a, bench_sys.b, bench_sys.m_real, p.y, p.lambda,
                                       cfg.null_penalty, ref_step, 10 * cfg.max_iterations);
            const double rel = std::fabs(sol.diagnostics.objective - ref.objective) /
                               std::max(1e-300, std::fabs(ref.objective));
            c.require(rel <= 1e-6, "lambda=" + std::to_string(p.lambda) +
                                       ": objective off reference by rel " + std::to_string(rel));

            // KKT certificate at convergence.
            std::vector<double> r = matvec(bench_sys.a, sol.weights);
            for (std::size_t i = 0; i < r.size(); ++i) r[i] = p.y[i] - r[i];
            const std::vector<double> g = matvec_t(bench_sys.a, r);
            for (std::size_t i = 0; i < g.size(); ++i) {
                const double corr = 2.0 * std::fabs(g[i]);
                if (std::fabs(sol.weights[i]) > 1e-9) {
                    c.require(corr >= p.lambda * (1.0 - 1e-4) && corr <= p.lambda * (1.0 + 1e-4),
                              "active coordinate correlation outside the lambda band");
                } else {
                    c.require(corr <= p.lambda * (1.0 + 1e-4),
                              "inactive coordinate correlation above lambda");
                }
            }
        }
    });

    run_criterion(8, "representer-theorem desk check (<= M knots, restricted refit)", 0.0,
                  [](Criterion& c) {
        const std::size_t m = bench.problem.functionals.size();
        ReconProblem p = bench.problem;
        p.lambda = small_lambda;
        const Spline extracted = extract_spline(p, bench_sys, small_lambda_solution);
        c.require(extracted.innov.knots.size() <= m,
                  "extracted " + std::to_string(extracted.innov.knots.size()) + " knots > M");
        c.require(validate_innovations(p.op, extracted.innov).valid || extracted.innov.knots.empty(),
                  "extracted spline fails validation");

        // Restricted solve over the extracted knots only: the minimum over
        // <= M knots must reach the full-grid objective.
        Matrix a_restricted(m, extracted.innov.knots.size());
        for (std::size_t j = 0; j < extracted.innov.knots.size(); ++j)
            for (std::size_t mm = 0; mm < m; ++mm)
                a_restricted(mm, j) = measurement_column_unchecked(
                    p.functionals[mm], p.op, extracted.innov.knots[j], p.bandwidth);
        const double sigma_sq = power_iteration_sq_norm(a_restricted, 50);
        const oracle::IstaResult restricted = oracle::reference_ista(
            a_restricted, bench_sys.b, Matrix(0, extracted.innov.knots.size()), p.y, p.lambda, 1e6,
            0.95 / (2.0 * sigma_sq), 500000);
        const double full = small_lambda_solution.diagnostics.objective;
        const double rel = std::fabs(restricted.objective - full) / std::max(1e-300, full);
        c.require(rel <= 1e-6, "restricted refit objective off by rel " + std::to_string(rel));
    });

    run_criterion(9, "Tikhonov against the dense coefficient-space oracle", 10.0, [](Criterion& c) {
        ReconProblem p;
        p.op = Operator::sobolev(2.0, 2.0);
        p.bandwidth = 64;
        p.grid_knots = 4;
        p.lambda = 0.05;
        p.functionals = {
            Functional::spatial(Knot{0.5, 0, 0}, 1), Functional::spatial(Knot{2.2, 0, 0}, 1),
            Functional::spatial(Knot{4.4, 0, 0}, 1), Functional::fourier(freq(1), true),
            Functional::fourier(freq(3), false)};
        p.y = {1.0, -0.5, 0.25, 0.4, -0.1};

        const TikhonovSolution sol = solve_tikhonov(p);

        // Dense quadratic oracle over the real coefficients of the band.
        const int K = p.bandwidth;
        const std::size_t unknowns = 1 + 2 * static_cast<std::size_t>(K);
        const std::size_t m = p.functionals.size();
        Matrix n_mat(m, unknowns);
        for (std::size_t mm = 0; mm < m; ++mm) {
            for (int k = 0; k <= K; ++k) {
                SymbolTable re_basis(1, K), im_basis(1, K);
                re_basis.set_pair(freq(k), k == 0 ? cplx(1.0, 0.0) : cplx(0.5, 0.0));
                if (k > 0) im_basis.set_pair(freq(k), cplx(0.0, -0.5));
                const std::size_t col = k == 0 ? 0 : static_cast<std::size_t>(2 * k - 1);
                n_mat(mm, col) = measure(p.functionals[mm], re_basis);
                if (k > 0) n_mat(mm, col + 1) = measure(p.functionals[mm], im_basis);
            }
        }
        std::vector<double> penalty(unknowns, 0.0);
        penalty[0] = std::norm(p.op.symbol(freq(0)));
        for (int k = 1; k <= K; ++k) {
            const double w = std::norm(p.op.symbol(freq(k)));
            penalty[static_cast<std::size_t>(2 * k - 1)] = 0.5 * w;
            penalty[static_cast<std::size_t>(2 * k)] = 0.5 * w;
        }
        Matrix normal(unknowns, unknowns);
        for (std::size_t i = 0; i < unknowns; ++i)
            for (std::size_t j = 0; j < unknowns; ++j) {
                double s = 0.0;
                for (std::size_t mm = 0; mm < m; ++mm) s += n_mat(mm, i) * n_mat(mm, j);
                normal(i, j) = s + (i == j ? p.lambda * penalty[i] : 0.0);
            }
        const std::vector<double> v = lu_solve(normal, matvec_t(n_mat, p.y));

        double worst = 0.0;
        {
            const double a0 = sol.table.at(freq(0)).real();
            worst = std::fabs(a0 - v[0]) / std::max(1.0, std::fabs(v[0]));
        }
        for (int k = 1; k <= K; ++k) {
            const cplx expected(0.5 * v[static_cast<std::size_t>(2 * k - 1)],
                                -0.5 * v[static_cast<std::size_t>(2 * k)]);
            worst = std::max(worst, std::abs(sol.table.at(freq(k)) - expected) /
                                        std::max(1.0, std::abs(expected)));
        }
        c.require(worst <= 1e-8, "oracle mismatch rel " + std::to_string(worst));

        // Uniqueness: permuting the measurement order leaves the
        // reconstruction unchanged.
        ReconProblem q = p;
        std::reverse(q.functionals.begin(), q.functionals.end());
        std::reverse(q.y.begin(), q.y.end());
        const TikhonovSolution sol2 = solve_tikhonov(q);
        double perm_diff = 0.0;
        sol.table.for_each([&](const FreqIndex& k, cplx value) {
            perm_diff = std::max(perm_diff, std::abs(sol2.table.at(k) - value));
        });
        c.require(perm_diff <= 1e-10, "permutation difference " + std::to_string(perm_diff));
    });

    run_criterion(10, "CLI determinism and reproducibility", 0.0, [](Criterion& c) {
        const char* cli = std::getenv("TORUS_CLI");
        if (!cli) {
            c.require(false, "TORUS_CLI not set (run through ctest)");
            return;
        }
        namespace fs = std::filesystem;
        const fs::path dir = "acceptance_tmp";
        fs::remove_all(dir);
        fs::create_directories(dir);

        // Inputs: a truth spline and a problem file over it.
        const std::string truth_path = (dir / "truth.txt").string();
        write_spline_file(make_spline(bench.problem.op, bench.truth), truth_path);
        const std::string problem_path = (dir / "problem.txt").string();
        {
            std::ofstream out(problem_path);
            out << "operator = sobolev:alpha=2,gamma=2\n"
                   "dim = 1\nbandwidth = 64\ngrid = 32\nlambda = 0.01\n"
                   "[functionals]\n";
            const double h = two_pi / 32;
            for (double x : {4.5 * h, 5.5 * h, 19.5 * h, 20.5 * h, 12.0 * h, 27.0 * h})
                out << "spatial:x=" << x << "\n";
            out << "fourier:k=1,part=re\nfourier:k=2,part=im\n"
                   "[generate]\ntruth = " << truth_path << "\n";
        }

        auto shell = [&](const std::string& args) {
            const std::string cmd = std::string(cli) + " " + args;
            const int rc = std::system(cmd.c_str());
            return rc == -1 ? -1 : WEXITSTATUS(rc);
        };
        auto deterministic = [&](const std::string& name, const std::string& args,
                                 const std::vector<std::string>& outputs) {
            for (int round = 0; round < 2; ++round) {
                std::string cmd = args;
                for (const std::string& o : outputs) {
                    const std::string placeholder = "{" + o + "}";
                    std::string resolved =
                        (dir / (name + "_" + o + "_" + std::to_string(round))).string();
                    std::size_t pos;
                    while ((pos = cmd.find(placeholder)) != std::string::npos)
                        cmd.replace(pos, placeholder.size(), resolved);
                }
                const int rc = shell(cmd);
                c.require(rc == 0, name + ": exit code " + std::to_string(rc));
            }
            for (const std::string& o : outputs) {
                const std::string a = slurp((dir / (name + "_" + o + "_0")).string());
                const std::string b = slurp((dir / (name + "_" + o + "_1")).string());
                c.require(!a.empty(), name + ": empty output " + o);
                c.require(a == b, name + ": output " + o + " differs between runs");
            }
        };

        deterministic("green1",
                      "green --op dpow:n=2 --dim 1 --bandwidth 512 --grid 2048 --two-knot --out {csv}",
                      {"csv"});
        deterministic("green2",
                      "green --op sobolev:alpha=2,gamma=2 --dim 2 --bandwidth 24 --grid 64 --out {csv}",
                      {"csv"});
        deterministic("greenj",
                      "green --op matern:beta=2.5,eps=1,kmax=128 --dim 1 --bandwidth 128 --grid 512 "
                      "--format jsonl --out {jsonl}",
                      {"jsonl"});
        deterministic("adm", "admissible --op fracd:gamma=1.5 --op dpow:n=1 --dim 1 --out {txt}",
                      {"txt"});
        deterministic("spl", "spline --spline " + truth_path + " --bandwidth 64 --grid 256 --out {csv}",
                      {"csv"});
        deterministic("rec",
                      "reconstruct --problem " + problem_path +
                          " --out-solution {sol} --out-spline {spl}",
                      {"sol", "spl"});
        deterministic("tik", "tikhonov --problem " + problem_path + " --out {sol}", {"sol"});
        deterministic("cmp", "compare --problem " + problem_path + " --out {csv}", {"csv"});
        {
            const std::string out = (dir / "lmax.txt").string();
            const int rc1 = shell("reconstruct --problem " + problem_path + " --lambda-max > " + out);
            const std::string first = slurp(out);
            const int rc2 = shell("reconstruct --problem " + problem_path + " --lambda-max > " + out);
            c.require(rc1 == 0 && rc2 == 0, "lambda-max helper failed");
            c.require(!first.empty() && first == slurp(out), "lambda-max output differs");
        }

        // Two-knot hat: peak-normalized to exactly 1, piecewise linear.
        {
            const std::string csv = slurp((dir / "green1_csv_0").string());
            c.require(csv.find(",1.000000000000\n") != std::string::npos,
                      "two-knot hat: no unit maximum in the CSV");
            std::istringstream in(csv);
            std::string line;
            std::getline(in, line);  // header
            double worst = 0.0;
            while (std::getline(in, line)) {
                double x, v;
                if (std::sscanf(line.c_str(), "%lf,%lf", &x, &v) != 2) continue;
                const double hat = x <= pi ? (2.0 * x / pi - 1.0) : (3.0 - 2.0 * x / pi);
                worst = std::max(worst, std::fabs(v - hat));
            }
            c.require(worst <= 5e-3, "two-knot hat deviates from piecewise linear by " +
                                         std::to_string(worst));
        }
        // Admissibility verdict text.
        {
            const std::string txt = slurp((dir / "adm_txt_0").string());
            c.require(txt.find("sampling: Yes (family-override)") != std::string::npos,
                      "fracd gamma=1.5 verdict missing");
            c.require(txt.find("sampling: No (family-override)") != std::string::npos,
                      "dpow n=1 verdict missing");
        }
        // The compare table rows are recomputable from the single-solver runs.
        {
            const std::string cmp = slurp((dir / "cmp_csv_0").string());
            const std::string sol = slurp((dir / "rec_sol_0").string());
            const std::string tik = slurp((dir / "tik_sol_0").string());
            std::istringstream in(cmp);
            std::string header, tv_row, tik_row;
            std::getline(in, header);
            std::getline(in, tv_row);
            std::getline(in, tik_row);
            auto row_has = [&](const std::string& row, const std::string& value) {
                return row.find("," + value) != std::string::npos;
            };
            for (const char* key : {"objective", "datafit", "regvalue"}) {
                c.require(row_has(tv_row, value_of(sol, key)),
                          std::string("compare tv row does not match reconstruct ") + key);
                c.require(row_has(tik_row, value_of(tik, key)),
                          std::string("compare tikhonov row does not match tikhonov ") + key);
            }
        }
        // Missing problem file: validation error, exit 2.
        {
            const int rc = shell("reconstruct --problem missing.toml 2> /dev/null");
            c.require(rc == 2, "missing problem file should exit 2, got " + std::to_string(rc));
        }
    });

    std::printf("%s: %d/10 criteria passed\n", failures == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL",
                10 - failures);
    return failures;
}
