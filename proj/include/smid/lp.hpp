#pragma once

// Dense bounded-variable primal simplex for small linear programs
//
//   minimize  c^T v   subject to  rows (<=, >=, =),  lo <= v <= hi
//
// Infinite bounds are written as +/-infinity.

#include <limits>
#include <span>
#include <string>
#include <vector>

namespace smid::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { LessEqual, GreaterEqual, Equal };

struct Row {
    std::vector<double> coeffs;
    Sense sense = Sense::LessEqual;
    double rhs = 0.0;
};

struct VarBound {
    double lo = -kInf;
    double hi = kInf;
};

class LinearProgram {
public:
    explicit LinearProgram(int n_vars);

    int n_vars() const noexcept { return n_vars_; }
    int n_rows() const noexcept { return static_cast<int>(rows_.size()); }

    const std::vector<double>& objective() const noexcept { return objective_; }
    const std::vector<Row>& rows() const noexcept { return rows_; }
    const std::vector<VarBound>& bounds() const noexcept { return bounds_; }

    void set_objective(std::vector<double> c);
    void set_objective_coeff(int var, double value);
    void set_bounds(int var, double lo, double hi);
    void add_row(std::vector<double> coeffs, Sense sense, double rhs);

    /// Worst violation of any row or bound at `point` (0 when feasible).
    double max_violation(std::span<const double> point) const;
    double evaluate(std::span<const double> point) const;

private:
    int n_vars_;
    std::vector<double> objective_;
    std::vector<Row> rows_;
    std::vector<VarBound> bounds_;
};

struct Tolerances {
    double feasibility = 1e-9;
    double pivot = 1e-10;
    double optimality = 1e-9;
    /// Violation above which an "optimal" point is rejected as a numerical failure.
    double certificate = 1e-7;
};

enum class Status { Optimal, Infeasible, Unbounded, NumericalFailure };

const char* to_string(Status s) noexcept;

struct Solution {
    Status status = Status::NumericalFailure;
    std::vector<double> point;       ///< valid when Optimal
    double objective_value = 0.0;    ///< valid when Optimal
    int iterations = 0;
    std::string message;             ///< set on NumericalFailure
};

Solution solve(const LinearProgram& lp, const Tolerances& tol = {});

/// Text dump: "objective c1 .. cn", "bounds lo1 hi1 .. lon hin", then one
/// line per row "c1 c2 ... | <=|>=|= | rhs".
std::string dump(const LinearProgram& lp);

}  // namespace smid::lp
