#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "torus/solver.hpp"

namespace torus {

// GridFunction file: header line `dim n`, then n^d whitespace-separated
// reals, row-major (axis 0 outermost).
GridFunction read_grid_file(const std::string& path);
void write_grid_file(const GridFunction& grid, const std::string& path);

// Spline interchange file: `operator = ...`, `dim = ...`, then [knots]
// (d radians per line), [weights] (one per line) and [nullcoeffs]
// (d integer frequency components, re, im per line).
Spline read_spline_file(const std::string& path);
void write_spline_file(const Spline& spline, const std::string& path);

enum class EmitFormat { csv, jsonl };

EmitFormat parse_emit_format(const std::string& name);

// CSV: header `x[,y[,z]],value`, coordinates in radians, one row per grid
// node in storage order; 12 fixed decimals throughout, byte-deterministic.
// json-lines mirrors the same records.
void emit(const GridFunction& grid, EmitFormat format, std::ostream& out);
void emit(const GridFunction& grid, EmitFormat format, const std::string& path);

// Problem file: `operator`, `dim`, `bandwidth`, `grid`, `lambda` keys, a
// [functionals] section of functional grammar lines, and either a [data]
// section (one y per line) or a [generate] section with keys
// `truth` (spline file), `sigma`, `seed`.
struct ProblemFile {
    ReconProblem problem;
    std::optional<std::string> truth_path;  // set when y was generated
    double noise_sigma = 0.0;
    unsigned long long seed = 0;
};

ProblemFile read_problem_file(const std::string& path);

void write_solution_file(const ReconProblem& problem, const LinearSystem& system,
                         const Solution& solution, const std::string& path);
void write_tikhonov_file(const ReconProblem& problem, const TikhonovSolution& solution,
                         const std::string& path);

}  // namespace torus
