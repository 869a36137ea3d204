// torus-splines: generate periodic Green's functions and splines, classify
// measurement admissibility, and reconstruct periodic functions from finite
// measurements (TV-penalized grid solver and a Tikhonov baseline).

#include <cmath>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "torus/formats.hpp"
#include "torus/util.hpp"

namespace {

using namespace torus;

int default_bandwidth(int dim) {
    switch (dim) {
        case 1: return 512;
        case 2: return 64;
        default: return 32;
    }
}

GridFunction normalize_peak(GridFunction g) {
    double mx = 0.0;
    for (double v : g.values) mx = std::max(mx, v);
    if (!(mx > 0.0)) throw InputError("cannot peak-normalize: maximum value is not positive");
    for (double& v : g.values) v /= mx;
    return g;
}

void emit_to(const GridFunction& g, EmitFormat format, const std::string& out_path) {
    if (out_path.empty())
        emit(g, format, std::cout);
    else
        emit(g, format, out_path);
}

void write_text(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + out_path);
    out << text;
}

struct GreenArgs {
    std::string op;
    int dim = 1;
    int bandwidth = 0;
    int grid = 0;
    bool two_knot = false;
    bool fejer = false;
    bool raw = false;
    std::string format = "csv";
    std::string out;
};

int run_green(const GreenArgs& args) {
    const Operator op = parse_operator(args.op, args.dim);
    const int k = args.bandwidth > 0 ? args.bandwidth : default_bandwidth(op.dim());
    const int n = args.grid > 0 ? args.grid : static_cast<int>(next_pow2(2 * static_cast<std::size_t>(k) + 2));

    SymbolTable table = [&] {
        if (!args.two_knot) return green_table(op, k);
        // Two-knot construction g - g(. - pi) along axis 0: the minimal
        // spline when the null space makes the Green's function itself
        // inadmissible.
        return make_hermitian_table(op.dim(), k, [&](const FreqIndex& f) {
            const double shift = (f[0] % 2 == 0) ? 0.0 : 2.0;
            return op.pseudo_symbol(f) * shift;
        });
    }();

    GridFunction g = synthesize(table, n, args.fejer ? Smoothing::fejer : Smoothing::none);
    if (!args.raw) g = normalize_peak(std::move(g));
    emit_to(g, parse_emit_format(args.format), args.out);
    return 0;
}

struct SplineArgs {
    std::string file;
    int bandwidth = 0;
    int grid = 0;
    bool fejer = false;
    std::string format = "csv";
    std::string out;
};

int run_spline(const SplineArgs& args) {
    const Spline s = read_spline_file(args.file);
    const int k = args.bandwidth > 0 ? args.bandwidth : default_bandwidth(s.op.dim());
    const int n = args.grid > 0 ? args.grid : static_cast<int>(next_pow2(2 * static_cast<std::size_t>(k) + 2));
    const GridFunction g =
        synthesize(spline_table(s, k), n, args.fejer ? Smoothing::fejer : Smoothing::none);
    emit_to(g, parse_emit_format(args.format), args.out);
    return 0;
}

struct AdmissibleArgs {
    std::vector<std::string> ops;
    int dim = 1;
    std::string out;
};

int run_admissible(const AdmissibleArgs& args) {
    std::string text;
    for (const std::string& spec : args.ops) {
        const Operator op = parse_operator(spec, args.dim);
        const AdmissibilityVerdict s = sampling_admissible(op);
        const AdmissibilityVerdict l2 = l2_admissible(op);
        text += "op=" + op.description() + " dim=" + std::to_string(op.dim()) + "\n";
        text += "sampling: " + to_string(s.status) + " (" + to_string(s.basis) + ")\n";
        text += "l2: " + to_string(l2.status) + " (" + to_string(l2.basis) + ")\n";
    }
    write_text(text, args.out);
    return 0;
}

struct ReconstructArgs {
    std::string problem;
    std::string out_solution;
    std::string out_spline;
    bool print_lambda_max = false;
    int max_iterations = 0;
    double tolerance = 0.0;
    double rho = 0.0;
    double threshold = 1e-4;
};

int run_reconstruct(const ReconstructArgs& args) {
    const ProblemFile pf = read_problem_file(args.problem);
    const LinearSystem system = build_system(pf.problem);
    if (args.print_lambda_max) {
        std::cout << format_real(lambda_max(pf.problem, system)) << "\n";
        return 0;
    }
    SolverConfig cfg;
    if (args.max_iterations > 0) cfg.max_iterations = args.max_iterations;
    if (args.tolerance > 0) cfg.rel_tolerance = args.tolerance;
    if (args.rho > 0) cfg.null_penalty = args.rho;
    const Solution sol = solve_tv(pf.problem, system, cfg);
    if (system.sampling_warning)
        std::cerr << "warning: sampling admissibility is indeterminate for this operator\n";
    if (!args.out_solution.empty()) write_solution_file(pf.problem, system, sol, args.out_solution);
    if (!args.out_spline.empty()) {
        const Spline s = extract_spline(pf.problem, system, sol, args.threshold);
        write_spline_file(s, args.out_spline);
    }
    return 0;
}

struct TikhonovArgs {
    std::string problem;
    std::string out;
    std::string emit_grid;
    int grid_samples = 0;
    std::string format = "csv";
};

int run_tikhonov(const TikhonovArgs& args) {
    const ProblemFile pf = read_problem_file(args.problem);
    const TikhonovSolution sol = solve_tikhonov(pf.problem);
    if (!args.out.empty()) write_tikhonov_file(pf.problem, sol, args.out);
    if (!args.emit_grid.empty()) {
        const int n = args.grid_samples > 0
                          ? args.grid_samples
                          : static_cast<int>(next_pow2(2 * static_cast<std::size_t>(pf.problem.bandwidth) + 2));
        emit(synthesize(sol.table, n, Smoothing::none), parse_emit_format(args.format), args.emit_grid);
    }
    return 0;
}

struct CompareArgs {
    std::string problem;
    std::string out;
    int max_iterations = 0;
    double threshold = 1e-4;
};

int run_compare(const CompareArgs& args) {
    const ProblemFile pf = read_problem_file(args.problem);
    const LinearSystem system = build_system(pf.problem);
    SolverConfig cfg;
    if (args.max_iterations > 0) cfg.max_iterations = args.max_iterations;
    const Solution tv = solve_tv(pf.problem, system, cfg);
    const Spline tv_spline = extract_spline(pf.problem, system, tv, args.threshold);
    const TikhonovSolution tik = solve_tikhonov(pf.problem);

    std::string text = "method,objective,datafit,regvalue,knots,nullresidual\n";
    text += "tv," + format_real(tv.diagnostics.objective) + "," + format_real(tv.diagnostics.data_fit) +
            "," + format_real(tv.diagnostics.reg_value) + "," +
            std::to_string(tv_spline.innov.knots.size()) + "," +
            format_real(tv.diagnostics.null_residual) + "\n";
    text += "tikhonov," + format_real(tik.objective) + "," + format_real(tik.data_fit) + "," +
            format_real(tik.reg_value) + "," + std::to_string(pf.problem.functionals.size()) + "," +
            format_real(0.0) + "\n";
    write_text(text, args.out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"periodic spline toolkit on the d-torus"};
    app.require_subcommand(1);

    GreenArgs green;
    CLI::App* green_cmd = app.add_subcommand("green", "emit Green's-function / two-knot spline samples");
    green_cmd->add_option("--op", green.op, "operator spec, e.g. sobolev:alpha=2,gamma=2")->required();
    green_cmd->add_option("--dim", green.dim, "ambient dimension")->check(CLI::Range(1, 3));
    green_cmd->add_option("--bandwidth", green.bandwidth, "frequency bandwidth K");
    green_cmd->add_option("--grid", green.grid, "samples per axis (power of two)");
    green_cmd->add_flag("--two-knot", green.two_knot, "emit g - g(. - pi) instead of g");
    green_cmd->add_flag("--fejer", green.fejer, "Fejer-smoothed synthesis");
    green_cmd->add_flag("--raw", green.raw, "skip peak normalization");
    green_cmd->add_option("--format", green.format, "csv or jsonl");
    green_cmd->add_option("--out", green.out, "output path (default stdout)");

    SplineArgs spline;
    CLI::App* spline_cmd = app.add_subcommand("spline", "synthesize a spline file onto a grid");
    spline_cmd->add_option("--spline", spline.file, "spline interchange file")->required();
    spline_cmd->add_option("--bandwidth", spline.bandwidth, "frequency bandwidth K");
    spline_cmd->add_option("--grid", spline.grid, "samples per axis (power of two)");
    spline_cmd->add_flag("--fejer", spline.fejer, "Fejer-smoothed synthesis");
    spline_cmd->add_option("--format", spline.format, "csv or jsonl");
    spline_cmd->add_option("--out", spline.out, "output path (default stdout)");

    AdmissibleArgs adm;
    CLI::App* adm_cmd = app.add_subcommand("admissible", "sampling/L2 admissibility verdicts");
    adm_cmd->add_option("--op", adm.ops, "operator spec (repeatable)")->required();
    adm_cmd->add_option("--dim", adm.dim, "ambient dimension")->check(CLI::Range(1, 3));
    adm_cmd->add_option("--out", adm.out, "output path (default stdout)");

    ReconstructArgs rec;
    CLI::App* rec_cmd = app.add_subcommand("reconstruct", "TV-penalized grid reconstruction");
    rec_cmd->add_option("--problem", rec.problem, "problem file")->required();
    rec_cmd->add_option("--out-solution", rec.out_solution, "solution file path");
    rec_cmd->add_option("--out-spline", rec.out_spline, "extracted spline file path");
    rec_cmd->add_flag("--lambda-max", rec.print_lambda_max, "print the zero-solution threshold and exit");
    rec_cmd->add_option("--maxiter", rec.max_iterations, "iteration cap");
    rec_cmd->add_option("--tol", rec.tolerance, "relative objective-decrease tolerance");
    rec_cmd->add_option("--rho", rec.rho, "null-space constraint penalty");
    rec_cmd->add_option("--threshold", rec.threshold, "extraction threshold relative to ||a||_inf");

    TikhonovArgs tik;
    CLI::App* tik_cmd = app.add_subcommand("tikhonov", "quadratic closed-form baseline");
    tik_cmd->add_option("--problem", tik.problem, "problem file")->required();
    tik_cmd->add_option("--out", tik.out, "solution file path");
    tik_cmd->add_option("--emit-grid", tik.emit_grid, "emit the reconstruction on a grid");
    tik_cmd->add_option("--grid", tik.grid_samples, "samples per axis for --emit-grid");
    tik_cmd->add_option("--format", tik.format, "csv or jsonl");

    CompareArgs cmp;
    CLI::App* cmp_cmd = app.add_subcommand("compare", "TV vs Tikhonov error/sparsity table");
    cmp_cmd->add_option("--problem", cmp.problem, "problem file")->required();
    cmp_cmd->add_option("--out", cmp.out, "output path (default stdout)");
    cmp_cmd->add_option("--maxiter", cmp.max_iterations, "iteration cap");
    cmp_cmd->add_option("--threshold", cmp.threshold, "extraction threshold");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (green_cmd->parsed()) return run_green(green);
        if (spline_cmd->parsed()) return run_spline(spline);
        if (adm_cmd->parsed()) return run_admissible(adm);
        if (rec_cmd->parsed()) return run_reconstruct(rec);
        if (tik_cmd->parsed()) return run_tikhonov(tik);
        if (cmp_cmd->parsed()) return run_compare(cmp);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::out_of_range& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
