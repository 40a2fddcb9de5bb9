#pragma once

#include <limits>
#include <string>
#include <vector>

namespace faircurtail {

enum class Relation { LessEq, Eq };

struct LpConstraint {
    std::vector<double> coeffs;  // one per variable
    Relation rel = Relation::LessEq;
    double rhs = 0.0;
};

// min c^T x  subject to the rows and per-variable bounds (+-inf allowed).
struct LpProblem {
    std::vector<double> objective;
    std::vector<LpConstraint> constraints;
    std::vector<std::pair<double, double>> bounds;
    std::vector<std::string> names;

    static constexpr double kInf = std::numeric_limits<double>::infinity();

    int num_vars() const { return static_cast<int>(objective.size()); }

    // Appends a variable and returns its index.
    int add_variable(const std::string& name, double lo, double hi, double cost = 0.0);
    void set_cost(int var, double cost) { objective.at(var) = cost; }

    // Appends a row given sparse (var, coeff) terms.
    void add_row(const std::vector<std::pair<int, double>>& terms, Relation rel, double rhs);
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    std::vector<double> x;
    double objective_value = 0.0;
    int iterations = 0;
};

// Dense two-phase simplex with deterministic pivoting: largest-reduction
// entering rule with fixed tie-breaks, falling back to Bland's rule when
// the objective stalls so cycling cannot occur.  Rows and columns are
// equilibrated with power-of-two factors before solving, so mixed-unit
// problems stay well conditioned and results are bit-reproducible.
// status=optimal implies primal feasibility within 1e-7 absolute.
LpSolution solve_lp(const LpProblem& problem);

// Human-readable rendering for debugging.
std::string dump_lp(const LpProblem& problem);

}  // namespace faircurtail
