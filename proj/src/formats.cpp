#include "torus/formats.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "kv_grammar.hpp"
#include "torus/util.hpp"

namespace torus {

namespace {

std::string trim(const std::string& s) {
    const std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string fmt_exact(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open file: " + path);
    return in;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    return out;
}

// Line-oriented `key = value` / `[section]` reader shared by the spline
// and problem formats. '#' starts a comment.
struct SectionedFile {
    std::vector<std::pair<std::string, std::string>> keys;  // top-level and sectioned key = value
    std::vector<std::pair<std::string, std::string>> lines; // (section, bare line)

    std::string get(const std::string& key) const {
        for (const auto& [k, v] : keys)
            if (k == key) return v;
        throw InputError("missing key '" + key + "'");
    }
    bool has(const std::string& key) const {
        for (const auto& [k, v] : keys)
            if (k == key) return true;
        return false;
    }
    std::vector<std::string> section(const std::string& name) const {
        std::vector<std::string> out;
        for (const auto& [s, l] : lines)
            if (s == name) out.push_back(l);
        return out;
    }
    bool has_section(const std::string& name) const {
        for (const auto& [s, l] : lines)
            if (s == name) return true;
        for (const auto& [k, v] : keys)
            if (k.rfind(name + ".", 0) == 0) return true;
        return false;
    }
};

SectionedFile read_sectioned(const std::string& path) {
    std::ifstream in = open_input(path);
    SectionedFile f;
    std::string line, section;
    while (std::getline(in, line)) {
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') {
            section = grammar::lower(trim(line.substr(1, line.size() - 2)));
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq != std::string::npos && section != "functionals" && section != "data") {
            const std::string key = grammar::lower(trim(line.substr(0, eq)));
            const std::string val = trim(line.substr(eq + 1));
            f.keys.emplace_back(section.empty() ? key : section + "." + key, val);
        } else {
            f.lines.emplace_back(section, line);
        }
    }
    return f;
}

std::vector<double> parse_numbers(const std::string& s) {
    std::vector<double> out;
    std::istringstream iss(s);
    double v;
    while (iss >> v) out.push_back(v);
    return out;
}

}  // namespace

GridFunction read_grid_file(const std::string& path) {
    std::ifstream in = open_input(path);
    GridFunction g;
    if (!(in >> g.dim >> g.samples_per_axis))
        throw InputError("grid file: bad header (expected `dim n`): " + path);
    if (g.dim < 1 || g.dim > 3) throw InputError("grid file: dim must be 1, 2 or 3");
    if (!is_pow2(static_cast<std::size_t>(g.samples_per_axis)))
        throw InputError("grid file: n must be a power of two");
    std::size_t total = 1;
    for (int a = 0; a < g.dim; ++a) total *= static_cast<std::size_t>(g.samples_per_axis);
    g.values.resize(total);
    for (std::size_t i = 0; i < total; ++i)
        if (!(in >> g.values[i])) throw InputError("grid file: truncated values: " + path);
    return g;
}

void write_grid_file(const GridFunction& grid, const std::string& path) {
    std::ofstream out = open_output(path);
    out << grid.dim << " " << grid.samples_per_axis << "\n";
    for (double v : grid.values) out << fmt_exact(v) << "\n";
}

Spline read_spline_file(const std::string& path) {
    const SectionedFile f = read_sectioned(path);
    const int dim = grammar::parse_int(f.get("dim"));
    Operator op = parse_operator(f.get("operator"), dim);

    Innovations innov;
    innov.dim = dim;
    for (const std::string& line : f.section("knots")) {
        const std::vector<double> xs = parse_numbers(line);
        if (static_cast<int>(xs.size()) != dim)
            throw InputError("spline file: knot needs " + std::to_string(dim) + " coordinates");
        Knot k{0, 0, 0};
        for (int a = 0; a < dim; ++a) k[static_cast<std::size_t>(a)] = wrap_angle(xs[static_cast<std::size_t>(a)]);
        innov.knots.push_back(k);
    }
    for (const std::string& line : f.section("weights")) {
        const std::vector<double> ws = parse_numbers(line);
        for (double w : ws) innov.weights.push_back(w);
    }
    if (innov.knots.size() != innov.weights.size())
        throw InputError("spline file: knot/weight count mismatch");

    Spline s = make_spline(std::move(op), std::move(innov));
    for (const std::string& line : f.section("nullcoeffs")) {
        const std::vector<double> vs = parse_numbers(line);
        if (static_cast<int>(vs.size()) != dim + 2)
            throw InputError("spline file: nullcoeff line needs freq components, re, im");
        FreqIndex k;
        k.dim = dim;
        for (int a = 0; a < dim; ++a) {
            const double c = vs[static_cast<std::size_t>(a)];
            if (c != std::round(c)) throw InputError("spline file: frequency must be integer");
            k[a] = static_cast<int>(c);
        }
        s.set_null_coeff(k, cplx(vs[static_cast<std::size_t>(dim)], vs[static_cast<std::size_t>(dim) + 1]));
    }
    return s;
}

void write_spline_file(const Spline& spline, const std::string& path) {
    std::ofstream out = open_output(path);
    out << "operator = " << spline.op.description() << "\n";
    out << "dim = " << spline.op.dim() << "\n";
    out << "[knots]\n";
    for (const Knot& k : spline.innov.knots) {
        for (int a = 0; a < spline.op.dim(); ++a)
            out << (a ? " " : "") << fmt_exact(k[static_cast<std::size_t>(a)]);
        out << "\n";
    }
    out << "[weights]\n";
    for (double w : spline.innov.weights) out << fmt_exact(w) << "\n";
    out << "[nullcoeffs]\n";
    for (const auto& [f, v] : spline.null_coeffs) {
        for (int a = 0; a < f.dim; ++a) out << f[a] << " ";
        out << fmt_exact(v.real()) << " " << fmt_exact(v.imag()) << "\n";
    }
}

EmitFormat parse_emit_format(const std::string& name) {
    const std::string low = grammar::lower(name);
    if (low == "csv") return EmitFormat::csv;
    if (low == "jsonl" || low == "json-lines") return EmitFormat::jsonl;
    throw std::invalid_argument("unknown output format '" + name + "' (csv or jsonl)");
}

void emit(const GridFunction& grid, EmitFormat format, std::ostream& out) {
    static const char* axis_names[3] = {"x", "y", "z"};
    if (format == EmitFormat::csv) {
        for (int a = 0; a < grid.dim; ++a) out << axis_names[a] << ",";
        out << "value\n";
        for (std::size_t i = 0; i < grid.values.size(); ++i) {
            for (int a = 0; a < grid.dim; ++a) out << format_real(grid.coordinate(i, a)) << ",";
            out << format_real(grid.values[i]) << "\n";
        }
    } else {
        for (std::size_t i = 0; i < grid.values.size(); ++i) {
            out << "{";
            for (int a = 0; a < grid.dim; ++a)
                out << "\"" << axis_names[a] << "\":" << format_real(grid.coordinate(i, a)) << ",";
            out << "\"value\":" << format_real(grid.values[i]) << "}\n";
        }
    }
}

void emit(const GridFunction& grid, EmitFormat format, const std::string& path) {
    std::ofstream out = open_output(path);
    emit(grid, format, out);
    if (!out) throw std::runtime_error("emit: write failure: " + path);
}

ProblemFile read_problem_file(const std::string& path) {
    const SectionedFile f = read_sectioned(path);
    ProblemFile pf;
    const int dim = grammar::parse_int(f.get("dim"));
    pf.problem.op = parse_operator(f.get("operator"), dim);
    pf.problem.bandwidth = grammar::parse_int(f.get("bandwidth"));
    pf.problem.grid_knots = grammar::parse_int(f.get("grid"));
    pf.problem.lambda = grammar::parse_double(f.get("lambda"));

    for (const std::string& line : f.section("functionals"))
        pf.problem.functionals.push_back(parse_functional(line, dim, pf.problem.bandwidth));
    if (pf.problem.functionals.empty())
        throw InputError("problem file: no [functionals] section");

    const bool has_data = !f.section("data").empty();
    const bool has_generate = f.has("generate.truth");
    if (has_data == has_generate)
        throw InputError("problem file: provide exactly one of [data] or [generate]");

    if (has_data) {
        for (const std::string& line : f.section("data"))
            for (double v : parse_numbers(line)) pf.problem.y.push_back(v);
        if (pf.problem.y.size() != pf.problem.functionals.size())
            throw InputError("problem file: data length does not match functional count");
    } else {
        pf.truth_path = f.get("generate.truth");
        pf.noise_sigma = f.has("generate.sigma") ? grammar::parse_double(f.get("generate.sigma")) : 0.0;
        pf.seed = f.has("generate.seed")
                      ? static_cast<unsigned long long>(grammar::parse_double(f.get("generate.seed")))
                      : 0;
        const Spline truth = read_spline_file(*pf.truth_path);
        if (truth.op.dim() != dim) throw InputError("problem file: truth spline dimension mismatch");
        const SymbolTable table = spline_table(truth, pf.problem.bandwidth);
        std::mt19937_64 rng(pf.seed);
        // Box-Muller keeps the noise stream identical across library
        // implementations.
        auto gauss = [&rng]() {
            const double u1 = (static_cast<double>(rng()) + 0.5) / 18446744073709551616.0;
            const double u2 = (static_cast<double>(rng()) + 0.5) / 18446744073709551616.0;
            return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
        };
        for (const Functional& nu : pf.problem.functionals) {
            double y = measure(nu, table);
            if (pf.noise_sigma > 0.0) y += pf.noise_sigma * gauss();
            pf.problem.y.push_back(y);
        }
    }
    return pf;
}

void write_solution_file(const ReconProblem& problem, const LinearSystem& system,
                         const Solution& solution, const std::string& path) {
    std::ofstream out = open_output(path);
    const SolverDiagnostics& d = solution.diagnostics;
    out << "solver = tv\n";
    out << "operator = " << problem.op.description() << "\n";
    out << "dim = " << problem.op.dim() << "\n";
    out << "lambda = " << fmt_exact(problem.lambda) << "\n";
    out << "grid = " << problem.grid_knots << "\n";
    out << "bandwidth = " << problem.bandwidth << "\n";
    out << "converged = " << (d.converged ? 1 : 0) << "\n";
    out << "iterations = " << d.iterations << "\n";
    out << "samplingwarning = " << (system.sampling_warning ? 1 : 0) << "\n";
    out << "objective = " << format_real(d.objective) << "\n";
    out << "datafit = " << format_real(d.data_fit) << "\n";
    out << "regvalue = " << format_real(d.reg_value) << "\n";
    out << "nullpenalty = " << format_real(d.null_penalty_value) << "\n";
    out << "nullresidual = " << format_real(d.null_residual) << "\n";
    out << "[weights]\n";
    for (double w : solution.weights) out << fmt_exact(w) << "\n";
    out << "[nullcoeffs]\n";
    for (std::size_t n = 0; n < system.basis.size(); ++n)
        out << system.basis[n].name() << " " << fmt_exact(solution.null_coeffs[n]) << "\n";
}

void write_tikhonov_file(const ReconProblem& problem, const TikhonovSolution& solution,
                         const std::string& path) {
    std::ofstream out = open_output(path);
    out << "solver = tikhonov\n";
    out << "operator = " << problem.op.description() << "\n";
    out << "dim = " << problem.op.dim() << "\n";
    out << "lambda = " << fmt_exact(problem.lambda) << "\n";
    out << "bandwidth = " << problem.bandwidth << "\n";
    out << "objective = " << format_real(solution.objective) << "\n";
    out << "datafit = " << format_real(solution.data_fit) << "\n";
    out << "regvalue = " << format_real(solution.reg_value) << "\n";
    out << "[coeffs]\n";
    for (double c : solution.coeffs) out << fmt_exact(c) << "\n";
    out << "[nullcoeffs]\n";
    for (double c : solution.null_coeffs) out << fmt_exact(c) << "\n";
}

}  // namespace torus
