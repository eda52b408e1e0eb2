#pragma once

// Dense primal-dual interior-point solver for the standard LMI pair
//   inf  c^T x   s.t.  X = sum_j x_j F_j - F0,  X PSD
//   sup  F0 . Y  s.t.  F_j . Y = c_j,           Y PSD
// plus a pluggable backend interface for comparing against external solvers.

#include <functional>
#include <iosfwd>
#include <string>

#include "hinf/fr.hpp"

namespace hinf {

enum class SolveStatus { Optimal, MaxIter, Infeasible, NumericalFailure };

const char* to_string(SolveStatus s);

struct SolveOptions {
    double tol = 1e-7;  // stop when max(primal res, dual res, complementarity) <= tol
    int max_iter = 100;
};

struct SolveReport {
    SolveStatus status = SolveStatus::NumericalFailure;
    Vector x;
    SymMatrix Xslack{Matrix::Zero(0, 0)};  // recomputed as sum x_j F_j - F0, so the
                                           // primal equation holds exactly
    SymMatrix Y{Matrix::Zero(0, 0)};
    double objective_primal = 0.0;
    double objective_dual = 0.0;
    int iterations = 0;
    double mu_final = 0.0;
};

// Infeasible-start interior-point method (HKM direction, Mehrotra
// predictor-corrector, fraction-to-boundary 0.98). Deterministic: a fixed
// input yields a bitwise-identical iterate sequence. Solver breakdowns are
// reported through SolveReport::status; only precondition violations
// (dependent F_j, bad dims) throw.
SolveReport solve(const StdLmi& lmi, const SolveOptions& opts = {});

class SolverBackend {
  public:
    virtual ~SolverBackend() = default;
    virtual std::string name() const = 0;
    virtual SolveReport run(const StdLmi& lmi, const SolveOptions& opts) = 0;
};

class BuiltinBackend : public SolverBackend {
  public:
    std::string name() const override { return "builtin"; }
    SolveReport run(const StdLmi& lmi, const SolveOptions& opts) override;
};

// Ships the problem as text to a caller-supplied runner (typically a wrapper
// around an external solver binary) and parses the report text it returns.
class FileExchangeBackend : public SolverBackend {
  public:
    using Runner = std::function<std::string(const std::string& problem_text)>;

    FileExchangeBackend(std::string label, Runner runner);

    std::string name() const override { return label_; }
    SolveReport run(const StdLmi& lmi, const SolveOptions& opts) override;

  private:
    std::string label_;
    Runner runner_;
};

SolveReport solve_with(const StdLmi& lmi, SolverBackend& backend, const SolveOptions& opts = {});

// Report text: line "status obj_p obj_d iterations", then x, then the lower
// triangles of Xslack and Y in the same layout as the problem text format.
void write_report(std::ostream& os, const SolveReport& report);
SolveReport read_report(std::istream& is, Index dim, Index num_vars);

}  // namespace hinf
