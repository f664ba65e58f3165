#include "smid/lp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "smid/errors.hpp"

namespace smid::lp {

LinearProgram::LinearProgram(int n_vars)
    : n_vars_(n_vars), objective_(static_cast<std::size_t>(n_vars), 0.0), bounds_(static_cast<std::size_t>(n_vars)) {
    if (n_vars < 1) throw ConfigError("LinearProgram needs at least one variable");
}

void LinearProgram::set_objective(std::vector<double> c) {
    if (static_cast<int>(c.size()) != n_vars_) throw ConfigError("objective length != n_vars");
    objective_ = std::move(c);
}

void LinearProgram::set_objective_coeff(int var, double value) { objective_.at(static_cast<std::size_t>(var)) = value; }

void LinearProgram::set_bounds(int var, double lo, double hi) {
    if (!(lo <= hi) || lo == kInf || hi == -kInf) throw ConfigError("variable bound needs lo <= hi");
    bounds_.at(static_cast<std::size_t>(var)) = {lo, hi};
}

void LinearProgram::add_row(std::vector<double> coeffs, Sense sense, double rhs) {
    if (static_cast<int>(coeffs.size()) != n_vars_) throw ConfigError("row length != n_vars");
    if (!std::isfinite(rhs)) throw ConfigError("row rhs must be finite");
    rows_.push_back({std::move(coeffs), sense, rhs});
}

double LinearProgram::evaluate(std::span<const double> point) const {
    double v = 0.0;
    for (std::size_t j = 0; j < objective_.size(); ++j) v += objective_[j] * point[j];
    return v;
}

double LinearProgram::max_violation(std::span<const double> point) const {
    double worst = 0.0;
    for (std::size_t j = 0; j < bounds_.size(); ++j) {
        worst = std::max({worst, bounds_[j].lo - point[j], point[j] - bounds_[j].hi});
    }
    for (const auto& r : rows_) {
        double act = 0.0;
        for (std::size_t j = 0; j < r.coeffs.size(); ++j) act += r.coeffs[j] * point[j];
        switch (r.sense) {
            case Sense::LessEqual: worst = std::max(worst, act - r.rhs); break;
            case Sense::GreaterEqual: worst = std::max(worst, r.rhs - act); break;
            case Sense::Equal: worst = std::max(worst, std::abs(act - r.rhs)); break;
        }
    }
    return worst;
}

const char* to_string(Status s) noexcept {
    switch (s) {
        case Status::Optimal: return "optimal";
        case Status::Infeasible: return "infeasible";
        case Status::Unbounded: return "unbounded";
        case Status::NumericalFailure: return "numerical_failure";
    }
    return "?";
}

namespace {

// Working form: every row i becomes  A_i v - s_i (+ sigma_i art_i) = 0  with
// s_i carrying the row bounds. The tableau holds B^-1 [A | -I | art] and the
// right-hand side is identically zero, so basic values follow from the
// nonbasic ones: x_B = -T_N x_N.
class BoundedSimplex {
public:
    enum class State { Basic, AtLower, AtUpper, FreeZero };
    enum class Outcome { Optimal, Unbounded, IterationLimit, Breakdown };

    BoundedSimplex(const LinearProgram& lp, const Tolerances& tol) : tol_(tol) {
        n_ = lp.n_vars();
        m_ = lp.n_rows();

        std::vector<double> start(static_cast<std::size_t>(n_));
        for (int j = 0; j < n_; ++j) {
            const auto& b = lp.bounds()[static_cast<std::size_t>(j)];
            start[static_cast<std::size_t>(j)] = std::isfinite(b.lo) ? b.lo : (std::isfinite(b.hi) ? b.hi : 0.0);
        }

        // Decide which rows need an artificial column.
        std::vector<double> activity(static_cast<std::size_t>(m_), 0.0);
        std::vector<int> art_rows;
        for (int i = 0; i < m_; ++i) {
            const auto& r = lp.rows()[static_cast<std::size_t>(i)];
            double act = 0.0;
            for (int j = 0; j < n_; ++j) act += r.coeffs[static_cast<std::size_t>(j)] * start[static_cast<std::size_t>(j)];
            activity[static_cast<std::size_t>(i)] = act;
            const auto [slo, shi] = row_bounds(r);
            if (act < slo - tol_.feasibility || act > shi + tol_.feasibility) art_rows.push_back(i);
        }
        n_art_ = static_cast<int>(art_rows.size());
        cols_ = n_ + m_ + n_art_;

        tab_.assign(static_cast<std::size_t>(m_) * static_cast<std::size_t>(cols_), 0.0);
        lo_.assign(static_cast<std::size_t>(cols_), 0.0);
        hi_.assign(static_cast<std::size_t>(cols_), 0.0);
        x_.assign(static_cast<std::size_t>(cols_), 0.0);
        state_.assign(static_cast<std::size_t>(cols_), State::AtLower);
        basis_.assign(static_cast<std::size_t>(m_), -1);

        for (int j = 0; j < n_; ++j) {
            const auto& b = lp.bounds()[static_cast<std::size_t>(j)];
            lo_[static_cast<std::size_t>(j)] = b.lo;
            hi_[static_cast<std::size_t>(j)] = b.hi;
            x_[static_cast<std::size_t>(j)] = start[static_cast<std::size_t>(j)];
            state_[static_cast<std::size_t>(j)] =
                std::isfinite(b.lo) ? State::AtLower : (std::isfinite(b.hi) ? State::AtUpper : State::FreeZero);
        }

        int next_art = 0;
        for (int i = 0; i < m_; ++i) {
            const auto& r = lp.rows()[static_cast<std::size_t>(i)];
            const int s = n_ + i;
            const auto [slo, shi] = row_bounds(r);
            lo_[static_cast<std::size_t>(s)] = slo;
            hi_[static_cast<std::size_t>(s)] = shi;
            for (int j = 0; j < n_; ++j) at(i, j) = r.coeffs[static_cast<std::size_t>(j)];
            at(i, s) = -1.0;

            const double act = activity[static_cast<std::size_t>(i)];
            if (next_art < n_art_ && art_rows[static_cast<std::size_t>(next_art)] == i) {
                const int a = n_ + m_ + next_art++;
                const double target = std::clamp(act, slo, shi);
                x_[static_cast<std::size_t>(s)] = target;
                state_[static_cast<std::size_t>(s)] = (target == slo) ? State::AtLower : State::AtUpper;
                // A_i v - s_i + sigma art = 0  =>  art = (s_i - A_i v) / sigma >= 0
                const double sigma = target > act ? 1.0 : -1.0;
                at(i, a) = sigma;
                lo_[static_cast<std::size_t>(a)] = 0.0;
                hi_[static_cast<std::size_t>(a)] = kInf;
                make_basic(i, a);
            } else {
                make_basic(i, s);
            }
        }
        refresh_basic_values();
    }

    bool has_artificials() const noexcept { return n_art_ > 0; }

    double artificial_sum() const {
        double s = 0.0;
        for (int a = n_ + m_; a < cols_; ++a) s += x_[static_cast<std::size_t>(a)];
        return s;
    }

    void fix_artificials() {
        for (int a = n_ + m_; a < cols_; ++a) {
            hi_[static_cast<std::size_t>(a)] = 0.0;
            if (state_[static_cast<std::size_t>(a)] != State::Basic) {
                state_[static_cast<std::size_t>(a)] = State::AtLower;
                x_[static_cast<std::size_t>(a)] = 0.0;
            }
        }
        refresh_basic_values();
    }

    Outcome optimize(const std::vector<double>& cost) {
        cost_ = cost;
        const int bland_after = 3 * (n_ + m_);
        const int limit = 50 * (cols_ + m_) + 1000;
        for (int iter = 0; iter < limit; ++iter, ++iterations_) {
            const bool bland = iter >= bland_after;
            int enter = -1;
            double dir = 0.0;
            choose_entering(bland, enter, dir);
            if (enter < 0) return Outcome::Optimal;

            // Ratio test.
            double step = kInf;
            int leave_row = -1;
            double best_alpha = 0.0;
            for (int i = 0; i < m_; ++i) {
                const double alpha = dir * at(i, enter);
                if (std::abs(alpha) <= tol_.pivot) continue;
                const int b = basis_[static_cast<std::size_t>(i)];
                double limit_i;
                if (alpha > 0.0) {
                    if (!std::isfinite(lo_[static_cast<std::size_t>(b)])) continue;
                    limit_i = (x_[static_cast<std::size_t>(b)] - lo_[static_cast<std::size_t>(b)]) / alpha;
                } else {
                    if (!std::isfinite(hi_[static_cast<std::size_t>(b)])) continue;
                    limit_i = (hi_[static_cast<std::size_t>(b)] - x_[static_cast<std::size_t>(b)]) / -alpha;
                }
                limit_i = std::max(limit_i, 0.0);
                bool take = false;
                if (leave_row < 0 || limit_i < step - 1e-12) {
                    take = true;
                } else if (limit_i <= step + 1e-12) {
                    take = bland ? b < basis_[static_cast<std::size_t>(leave_row)] : std::abs(alpha) > best_alpha;
                }
                if (take) {
                    step = limit_i;
                    leave_row = i;
                    best_alpha = std::abs(alpha);
                }
            }

            const double own_range = hi_[static_cast<std::size_t>(enter)] - lo_[static_cast<std::size_t>(enter)];
            if (std::isfinite(own_range) && own_range <= step) {
                // Bound flip, no basis change.
                const bool to_upper = dir > 0.0;
                state_[static_cast<std::size_t>(enter)] = to_upper ? State::AtUpper : State::AtLower;
                x_[static_cast<std::size_t>(enter)] =
                    to_upper ? hi_[static_cast<std::size_t>(enter)] : lo_[static_cast<std::size_t>(enter)];
                refresh_basic_values();
                continue;
            }
            if (leave_row < 0) return Outcome::Unbounded;

            const int leave = basis_[static_cast<std::size_t>(leave_row)];
            const double alpha = dir * at(leave_row, enter);
            state_[static_cast<std::size_t>(leave)] = alpha > 0.0 ? State::AtLower : State::AtUpper;
            x_[static_cast<std::size_t>(leave)] =
                alpha > 0.0 ? lo_[static_cast<std::size_t>(leave)] : hi_[static_cast<std::size_t>(leave)];
            x_[static_cast<std::size_t>(enter)] += dir * step;
            if (std::abs(at(leave_row, enter)) <= tol_.pivot) return Outcome::Breakdown;
            make_basic(leave_row, enter);
            refresh_basic_values();
        }
        return Outcome::IterationLimit;
    }

    std::vector<double> structural() const { return {x_.begin(), x_.begin() + n_}; }
    int n() const noexcept { return n_; }
    int rows() const noexcept { return m_; }
    int columns() const noexcept { return cols_; }
    int iterations() const noexcept { return iterations_; }

private:
    static std::pair<double, double> row_bounds(const Row& r) {
        switch (r.sense) {
            case Sense::LessEqual: return {-kInf, r.rhs};
            case Sense::GreaterEqual: return {r.rhs, kInf};
            case Sense::Equal: return {r.rhs, r.rhs};
        }
        return {-kInf, kInf};
    }

    double& at(int i, int j) { return tab_[static_cast<std::size_t>(i) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(j)]; }
    double at(int i, int j) const { return tab_[static_cast<std::size_t>(i) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(j)]; }

    void make_basic(int row, int col) {
        const double p = at(row, col);
        for (int j = 0; j < cols_; ++j) at(row, j) /= p;
        at(row, col) = 1.0;
        for (int i = 0; i < m_; ++i) {
            if (i == row) continue;
            const double f = at(i, col);
            if (f == 0.0) continue;
            for (int j = 0; j < cols_; ++j) at(i, j) -= f * at(row, j);
            at(i, col) = 0.0;
        }
        basis_[static_cast<std::size_t>(row)] = col;
        state_[static_cast<std::size_t>(col)] = State::Basic;
    }

    void refresh_basic_values() {
        for (int i = 0; i < m_; ++i) {
            double v = 0.0;
            for (int j = 0; j < cols_; ++j) {
                if (state_[static_cast<std::size_t>(j)] == State::Basic) continue;
                v -= at(i, j) * x_[static_cast<std::size_t>(j)];
            }
            x_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)])] = v;
        }
    }

    void choose_entering(bool bland, int& enter, double& dir) const {
        double best = 0.0;
        for (int j = 0; j < cols_; ++j) {
            const State st = state_[static_cast<std::size_t>(j)];
            if (st == State::Basic) continue;
            if (lo_[static_cast<std::size_t>(j)] == hi_[static_cast<std::size_t>(j)]) continue;
            double d = cost_[static_cast<std::size_t>(j)];
            for (int i = 0; i < m_; ++i) d -= cost_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)])] * at(i, j);

            double candidate_dir = 0.0;
            if (st == State::AtLower && d < -tol_.optimality) candidate_dir = 1.0;
            else if (st == State::AtUpper && d > tol_.optimality) candidate_dir = -1.0;
            else if (st == State::FreeZero && std::abs(d) > tol_.optimality) candidate_dir = d < 0.0 ? 1.0 : -1.0;
            if (candidate_dir == 0.0) continue;

            if (bland) {
                enter = j;
                dir = candidate_dir;
                return;
            }
            if (std::abs(d) > best) {
                best = std::abs(d);
                enter = j;
                dir = candidate_dir;
            }
        }
    }

    Tolerances tol_;
    int n_ = 0, m_ = 0, n_art_ = 0, cols_ = 0;
    int iterations_ = 0;
    std::vector<double> tab_, lo_, hi_, x_, cost_;
    std::vector<State> state_;
    std::vector<int> basis_;
};

Solution failure(std::string msg, int iterations) {
    Solution s;
    s.status = Status::NumericalFailure;
    s.message = std::move(msg);
    s.iterations = iterations;
    return s;
}

}  // namespace

Solution solve(const LinearProgram& lp, const Tolerances& tol) {
    BoundedSimplex simplex(lp, tol);

    if (simplex.has_artificials()) {
        std::vector<double> phase1(static_cast<std::size_t>(simplex.columns()), 0.0);
        for (int a = simplex.n() + simplex.rows(); a < simplex.columns(); ++a) phase1[static_cast<std::size_t>(a)] = 1.0;
        const auto outcome = simplex.optimize(phase1);
        if (outcome != BoundedSimplex::Outcome::Optimal) {
            return failure("phase 1 did not converge", simplex.iterations());
        }
        double scale = 1.0;
        for (const auto& r : lp.rows()) scale = std::max(scale, std::abs(r.rhs));
        if (simplex.artificial_sum() > tol.feasibility * scale) {
            Solution s;
            s.status = Status::Infeasible;
            s.iterations = simplex.iterations();
            return s;
        }
        simplex.fix_artificials();
    }

    std::vector<double> phase2(static_cast<std::size_t>(simplex.columns()), 0.0);
    std::copy(lp.objective().begin(), lp.objective().end(), phase2.begin());
    const auto outcome = simplex.optimize(phase2);
    switch (outcome) {
        case BoundedSimplex::Outcome::Optimal: break;
        case BoundedSimplex::Outcome::Unbounded: {
            Solution s;
            s.status = Status::Unbounded;
            s.iterations = simplex.iterations();
            return s;
        }
        case BoundedSimplex::Outcome::IterationLimit:
            return failure("iteration limit reached", simplex.iterations());
        case BoundedSimplex::Outcome::Breakdown:
            return failure("pivot below tolerance", simplex.iterations());
    }

    Solution s;
    s.point = simplex.structural();
    s.iterations = simplex.iterations();
    const double violation = lp.max_violation(s.point);
    if (!(violation <= tol.certificate)) {
        return failure("optimal point violates constraints by " + std::to_string(violation), simplex.iterations());
    }
    s.status = Status::Optimal;
    s.objective_value = lp.evaluate(s.point);
    return s;
}

std::string dump(const LinearProgram& lp) {
    std::ostringstream os;
    os.precision(17);
    os << "objective";
    for (double c : lp.objective()) os << ' ' << c;
    os << "\nbounds";
    for (const auto& b : lp.bounds()) os << ' ' << b.lo << ' ' << b.hi;
    os << '\n';
    for (const auto& r : lp.rows()) {
        for (std::size_t j = 0; j < r.coeffs.size(); ++j) os << (j ? " " : "") << r.coeffs[j];
        const char* sense = r.sense == Sense::LessEqual ? "<=" : (r.sense == Sense::GreaterEqual ? ">=" : "=");
        os << " | " << sense << " | " << r.rhs << '\n';
    }
    return os.str();
}

}  // namespace smid::lp
