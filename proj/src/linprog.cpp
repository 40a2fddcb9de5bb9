#include "faircurtail/linprog.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "faircurtail/errors.hpp"

namespace faircurtail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCostTol = 1e-9;   // reduced-cost threshold
constexpr double kPivotTol = 1e-9;  // smallest acceptable pivot element
constexpr double kPhase1Tol = 1e-7;

double pow2_near(double v) {
    if (v <= 0.0 || !std::isfinite(v)) return 1.0;
    return std::exp2(std::round(std::log2(v)));
}

// How one original variable maps onto the non-negative solver variables.
struct VarMap {
    int col = -1;        // primary solver column
    int neg_col = -1;    // second column of a free split (x = u - v)
    double shift = 0.0;  // x_scaled = shift + sign * u  (- neg part)
    double sign = 1.0;
    double col_scale = 1.0;  // x = x_scaled / col_scale
};

// Dense tableau with an attached reduced-cost row.
struct Tableau {
    Eigen::MatrixXd tab;       // rows x (columns + 1); last column is rhs
    Eigen::RowVectorXd red;    // reduced costs; last entry is -objective
    std::vector<int> basis;    // basic column per row
    std::vector<char> is_art;  // artificial marker per column
    int rows = 0;
    int cols = 0;  // addressable columns (excludes rhs)
    int rhs = 0;   // rhs column index
    int iterations = 0;

    void pivot(int r, int s) {
        tab.row(r) /= tab(r, s);
        for (int i = 0; i < rows; ++i) {
            if (i == r) continue;
            const double f = tab(i, s);
            if (f != 0.0) tab.row(i) -= f * tab.row(r);
        }
        const double f = red(s);
        if (f != 0.0) red -= f * tab.row(r);
        basis[r] = s;
    }

    int ratio_row(int s) const {
        int r = -1;
        double best = kInf;
        for (int i = 0; i < rows; ++i) {
            const double den = tab(i, s);
            if (den <= kPivotTol) continue;
            const double ratio = tab(i, rhs) / den;
            if (ratio < best - 1e-12 ||
                (ratio < best + 1e-12 && (r == -1 || basis[i] < basis[r]))) {
                best = ratio;
                r = i;
            }
        }
        return r;
    }

    // Pivots until the reduced costs are non-negative.  Entering rule:
    // most-negative reduced cost, smallest index on ties; switches to
    // Bland's smallest-index rule while the objective stalls, which
    // guarantees termination.  Returns false on an unbounded direction.
    bool run(bool allow_artificial_entering) {
        int stall = 0;
        bool bland = false;
        double last_obj = -red(rhs);
        const int stall_limit = 2 * (rows + cols);
        while (true) {
            int s = -1;
            if (!bland) {
                double best = -kCostTol;
                for (int j = 0; j < cols; ++j) {
                    if (!allow_artificial_entering && is_art[j]) continue;
                    if (red(j) < best) {
                        best = red(j);
                        s = j;
                    }
                }
            } else {
                for (int j = 0; j < cols; ++j) {
                    if (!allow_artificial_entering && is_art[j]) continue;
                    if (red(j) < -kCostTol) {
                        s = j;
                        break;
                    }
                }
            }
            if (s < 0) return true;
            const int r = ratio_row(s);
            if (r < 0) return false;
            pivot(r, s);
            if (++iterations > 200000)
                throw ConvergenceError("simplex iteration cap exceeded", -red(rhs));
            const double obj = -red(rhs);
            if (obj < last_obj - 1e-12) {
                stall = 0;
                last_obj = obj;
                bland = false;
            } else if (++stall > stall_limit) {
                bland = true;
            }
        }
    }
};

}  // namespace

int LpProblem::add_variable(const std::string& name, double lo, double hi, double cost) {
    objective.push_back(cost);
    bounds.emplace_back(lo, hi);
    names.push_back(name);
    for (LpConstraint& c : constraints) c.coeffs.push_back(0.0);
    return num_vars() - 1;
}

void LpProblem::add_row(const std::vector<std::pair<int, double>>& terms, Relation rel,
                        double rhs) {
    LpConstraint c;
    c.coeffs.assign(num_vars(), 0.0);
    for (const auto& [var, coeff] : terms) c.coeffs.at(var) += coeff;
    c.rel = rel;
    c.rhs = rhs;
    constraints.push_back(std::move(c));
}

LpSolution solve_lp(const LpProblem& problem) {
    const int n = problem.num_vars();
    const int m = static_cast<int>(problem.constraints.size());
    if (static_cast<int>(problem.bounds.size()) != n)
        throw ValidationError("bounds size does not match objective size");
    for (const LpConstraint& c : problem.constraints)
        if (static_cast<int>(c.coeffs.size()) != n)
            throw ValidationError("constraint width does not match objective size");
    for (const auto& [lo, hi] : problem.bounds)
        if (lo > hi) throw ValidationError("variable bound has lo > hi");

    // --- power-of-two equilibration ------------------------------------
    Eigen::MatrixXd a(m, n);
    Eigen::VectorXd b(m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) a(i, j) = problem.constraints[i].coeffs[j];
        b(i) = problem.constraints[i].rhs;
    }
    for (int i = 0; i < m; ++i) {
        const double s = pow2_near(n > 0 ? a.row(i).cwiseAbs().maxCoeff() : 1.0);
        a.row(i) /= s;
        b(i) /= s;
    }
    std::vector<double> col_scale(n, 1.0);
    for (int j = 0; j < n; ++j) {
        col_scale[j] = pow2_near(m > 0 ? a.col(j).cwiseAbs().maxCoeff() : 1.0);
        a.col(j) /= col_scale[j];
    }
    // substitution x_scaled = col_scale * x: bounds scale up, costs down
    std::vector<double> cost(n);
    std::vector<std::pair<double, double>> bnd(n);
    for (int j = 0; j < n; ++j) {
        cost[j] = problem.objective[j] / col_scale[j];
        bnd[j] = {problem.bounds[j].first * col_scale[j],
                  problem.bounds[j].second * col_scale[j]};
    }

    // --- map every variable to non-negative solver columns -------------
    std::vector<VarMap> vmap(n);
    int n_struct = 0;
    std::vector<std::pair<int, double>> upper_rows;  // (solver column, upper bound)
    for (int j = 0; j < n; ++j) {
        VarMap& vm = vmap[j];
        vm.col_scale = col_scale[j];
        const auto [lo, hi] = bnd[j];
        if (std::isfinite(lo)) {
            vm.col = n_struct++;
            vm.shift = lo;
            vm.sign = 1.0;
            if (std::isfinite(hi)) upper_rows.emplace_back(vm.col, hi - lo);
        } else if (std::isfinite(hi)) {
            vm.col = n_struct++;
            vm.shift = hi;
            vm.sign = -1.0;
        } else {
            vm.col = n_struct++;
            vm.neg_col = n_struct++;
        }
    }

    const int m_total = m + static_cast<int>(upper_rows.size());
    int n_slack = static_cast<int>(upper_rows.size());
    for (const LpConstraint& c : problem.constraints)
        if (c.rel == Relation::LessEq) ++n_slack;

    Tableau t;
    t.rows = m_total;
    t.cols = n_struct + n_slack + m_total;  // artificials allocated worst-case
    t.rhs = t.cols;
    t.tab = Eigen::MatrixXd::Zero(m_total, t.cols + 1);
    t.red = Eigen::RowVectorXd::Zero(t.cols + 1);
    t.is_art.assign(t.cols, 0);
    t.basis.assign(m_total, -1);

    int slack_at = n_struct;
    int art_at = n_struct + n_slack;
    int n_art = 0;
    auto finish_row = [&](int row, bool has_slack) {
        int slack = -1;
        if (has_slack) {
            slack = slack_at++;
            t.tab(row, slack) = 1.0;
        }
        if (t.tab(row, t.rhs) < 0.0) t.tab.row(row) = -t.tab.row(row);
        if (slack >= 0 && t.tab(row, slack) == 1.0) {
            t.basis[row] = slack;
        } else {
            const int art = art_at++;
            ++n_art;
            t.is_art[art] = 1;
            t.tab(row, art) = 1.0;
            t.basis[row] = art;
        }
    };
    for (int i = 0; i < m; ++i) {
        double rhs = b(i);
        for (int j = 0; j < n; ++j) {
            const double cj = a(i, j);
            if (cj == 0.0) continue;
            const VarMap& vm = vmap[j];
            t.tab(i, vm.col) += cj * vm.sign;
            if (vm.neg_col >= 0) t.tab(i, vm.neg_col) -= cj;
            rhs -= cj * vm.shift;
        }
        t.tab(i, t.rhs) = rhs;
        finish_row(i, problem.constraints[i].rel == Relation::LessEq);
    }
    {
        int row = m;
        for (const auto& [col, ub] : upper_rows) {
            t.tab(row, col) = 1.0;
            t.tab(row, t.rhs) = ub;
            finish_row(row, true);
            ++row;
        }
    }

    LpSolution sol;

    // --- phase 1: drive artificial variables to zero --------------------
    if (n_art > 0) {
        for (int j = 0; j < t.cols; ++j)
            if (t.is_art[j]) t.red(j) = 1.0;
        for (int i = 0; i < t.rows; ++i)
            if (t.is_art[t.basis[i]]) t.red -= t.tab.row(i);
        if (!t.run(true))
            throw ConvergenceError("phase-1 simplex reported an unbounded direction",
                                   -t.red(t.rhs));
        if (-t.red(t.rhs) > kPhase1Tol) {
            sol.status = LpStatus::Infeasible;
            sol.iterations = t.iterations;
            return sol;
        }
        // pivot leftover artificials out; rows that cannot release one are
        // redundant and get dropped
        std::vector<char> keep(t.rows, 1);
        for (int i = 0; i < t.rows; ++i) {
            if (!t.is_art[t.basis[i]]) continue;
            int s = -1;
            for (int j = 0; j < t.cols && s < 0; ++j)
                if (!t.is_art[j] && std::abs(t.tab(i, j)) > kPhase1Tol) s = j;
            if (s >= 0)
                t.pivot(i, s);
            else
                keep[i] = 0;
        }
        int kept = 0;
        for (int i = 0; i < t.rows; ++i) kept += keep[i];
        if (kept != t.rows) {
            Eigen::MatrixXd tab2(kept, t.tab.cols());
            std::vector<int> basis2;
            basis2.reserve(kept);
            int r = 0;
            for (int i = 0; i < t.rows; ++i)
                if (keep[i]) {
                    tab2.row(r++) = t.tab.row(i);
                    basis2.push_back(t.basis[i]);
                }
            t.tab = std::move(tab2);
            t.basis = std::move(basis2);
            t.rows = kept;
        }
    }

    // --- phase 2: original objective ------------------------------------
    t.red.setZero();
    for (int j = 0; j < n; ++j) {
        const VarMap& vm = vmap[j];
        t.red(vm.col) += cost[j] * vm.sign;
        if (vm.neg_col >= 0) t.red(vm.neg_col) -= cost[j];
        t.red(t.rhs) -= cost[j] * vm.shift;
    }
    for (int i = 0; i < t.rows; ++i) {
        const double f = t.red(t.basis[i]);
        if (f != 0.0) t.red -= f * t.tab.row(i);
    }
    if (!t.run(false)) {
        sol.status = LpStatus::Unbounded;
        sol.iterations = t.iterations;
        return sol;
    }

    // --- extract ---------------------------------------------------------
    std::vector<double> u(t.cols, 0.0);
    for (int i = 0; i < t.rows; ++i) u[t.basis[i]] = t.tab(i, t.rhs);
    sol.x.assign(n, 0.0);
    double obj = 0.0;
    for (int j = 0; j < n; ++j) {
        const VarMap& vm = vmap[j];
        double xs = vm.shift + vm.sign * u[vm.col];
        if (vm.neg_col >= 0) xs -= u[vm.neg_col];
        sol.x[j] = xs / vm.col_scale;
        obj += problem.objective[j] * sol.x[j];
    }
    sol.objective_value = obj;
    sol.status = LpStatus::Optimal;
    sol.iterations = t.iterations;
    return sol;
}

std::string dump_lp(const LpProblem& problem) {
    std::ostringstream os;
    char buf[64];
    auto name = [&](int j) {
        return j < static_cast<int>(problem.names.size()) && !problem.names[j].empty()
                   ? problem.names[j]
                   : "x" + std::to_string(j);
    };
    os << "minimize\n ";
    for (int j = 0; j < problem.num_vars(); ++j) {
        if (problem.objective[j] == 0.0) continue;
        std::snprintf(buf, sizeof buf, " %+.12g ", problem.objective[j]);
        os << buf << name(j);
    }
    os << "\nsubject to\n";
    int idx = 0;
    for (const LpConstraint& c : problem.constraints) {
        os << " r" << idx++ << ":";
        for (int j = 0; j < problem.num_vars(); ++j) {
            if (c.coeffs[j] == 0.0) continue;
            std::snprintf(buf, sizeof buf, " %+.12g ", c.coeffs[j]);
            os << buf << name(j);
        }
        std::snprintf(buf, sizeof buf, " %s %.12g\n",
                      c.rel == Relation::LessEq ? "<=" : "=", c.rhs);
        os << buf;
    }
    os << "bounds\n";
    for (int j = 0; j < problem.num_vars(); ++j) {
        std::snprintf(buf, sizeof buf, " %.12g <= ", problem.bounds[j].first);
        os << buf << name(j);
        std::snprintf(buf, sizeof buf, " <= %.12g\n", problem.bounds[j].second);
        os << buf;
    }
    return os.str();
}

}  // namespace faircurtail
