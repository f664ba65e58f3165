#include "smid/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>

#include "smid/errors.hpp"

namespace smid::oracle {

namespace {

struct Grid {
    // One entry per noise dimension: eta(t-1..t-n_a) then zeta(t..t-n_b).
    std::vector<std::vector<double>> values;
    int n_a = 0;
};

std::vector<double> axis(double delta, bool active, int points) {
    if (!active || delta == 0.0) return {0.0};
    std::vector<double> v(static_cast<std::size_t>(points));
    for (int g = 0; g < points; ++g) {
        v[static_cast<std::size_t>(g)] = -delta + 2.0 * delta * g / (points - 1);
    }
    v.back() = delta;
    return v;
}

bool pinned_zero(const Interval& box) { return box.lower == 0.0 && box.upper == 0.0; }

void validate(const Instance& inst, int grid_points) {
    const auto order = inst.window.order();
    if (static_cast<int>(inst.boxes.size()) != order.n_params()) throw ConfigError("oracle: one box per parameter");
    if (grid_points < 3 || grid_points % 2 == 0) throw ConfigError("oracle grid needs an odd number of points >= 3");
}

Grid make_grid(const Instance& inst, int points) {
    const auto order = inst.window.order();
    Grid g;
    g.n_a = order.n_a();
    for (int i = 1; i <= order.n_a(); ++i) {
        g.values.push_back(axis(inst.noise.delta_eta, !pinned_zero(inst.boxes[static_cast<std::size_t>(order.index_a(i))]), points));
    }
    for (int j = 0; j <= order.n_b(); ++j) {
        g.values.push_back(axis(inst.noise.delta_zeta, !pinned_zero(inst.boxes[static_cast<std::size_t>(order.index_b(j))]), points));
    }
    return g;
}

// Calls fn(noise assignment) for every grid point, odometer order.
void for_each_point(const Grid& g, const std::function<void(const std::vector<double>&)>& fn) {
    std::vector<std::size_t> idx(g.values.size(), 0);
    std::vector<double> point(g.values.size());
    while (true) {
        for (std::size_t d = 0; d < idx.size(); ++d) point[d] = g.values[d][idx[d]];
        fn(point);
        std::size_t d = 0;
        for (; d < idx.size(); ++d) {
            if (++idx[d] < g.values[d].size()) break;
            idx[d] = 0;
        }
        if (d == idx.size()) return;
    }
}

// Model row: y(t) - eta(t) = sum_i -a_i (y(t-i) - eta(t-i)) + sum_j b_j (u(t-j) - zeta(t-j)).
std::vector<double> model_row(const RegressorWindow& w, const std::vector<double>& noise, int n_a) {
    std::vector<double> row;
    row.reserve(noise.size());
    for (std::size_t i = 0; i < w.y_past.size(); ++i) row.push_back(-(w.y_past[i] - noise[i]));
    for (std::size_t j = 0; j < w.u_lags.size(); ++j) row.push_back(w.u_lags[j] - noise[static_cast<std::size_t>(n_a) + j]);
    return row;
}

Witness make_witness(const Instance& inst, const std::vector<double>& noise, std::vector<double> theta, int n_a) {
    Witness w;
    const auto row = model_row(inst.window, noise, n_a);
    double fit = 0.0;
    for (std::size_t p = 0; p < row.size(); ++p) fit += row[p] * theta[p];
    w.eta_now = inst.window.y_now - fit;
    w.theta = std::move(theta);
    w.eta_past.assign(noise.begin(), noise.begin() + n_a);
    w.zeta.assign(noise.begin() + n_a, noise.end());
    return w;
}

struct SubInterval {
    bool feasible = false;
    double lower = 0.0, upper = 0.0;
    std::vector<double> arg_lower, arg_upper;
};

SubInterval solve_point(const Instance& inst, const std::vector<double>& noise, int n_a, int k,
                        const lp::Tolerances& tol) {
    const int np = static_cast<int>(inst.boxes.size());
    lp::LinearProgram prog(np);
    for (int p = 0; p < np; ++p) prog.set_bounds(p, inst.boxes[static_cast<std::size_t>(p)].lower,
                                                 inst.boxes[static_cast<std::size_t>(p)].upper);
    auto row = model_row(inst.window, noise, n_a);
    prog.add_row(row, lp::Sense::GreaterEqual, inst.window.y_now - inst.noise.delta_eta);
    prog.add_row(std::move(row), lp::Sense::LessEqual, inst.window.y_now + inst.noise.delta_eta);

    SubInterval out;
    prog.set_objective_coeff(k, 1.0);
    auto lo = lp::solve(prog, tol);
    if (lo.status == lp::Status::Infeasible) return out;
    if (lo.status != lp::Status::Optimal) throw SolverFailure(inst.t, "oracle subproblem: " + lo.message);
    prog.set_objective_coeff(k, -1.0);
    auto hi = lp::solve(prog, tol);
    if (hi.status != lp::Status::Optimal) throw SolverFailure(inst.t, "oracle subproblem: " + hi.message);
    out.feasible = true;
    out.lower = lo.objective_value;
    out.upper = -hi.objective_value;
    out.arg_lower = std::move(lo.point);
    out.arg_upper = std::move(hi.point);
    return out;
}

void check_budget(const Instance& inst, const Config& cfg) {
    const double need = required_subproblems(inst, cfg.grid_points);
    if (need > static_cast<double>(cfg.max_subproblems)) throw OracleBudgetExceeded(need, cfg.max_subproblems);
}

}  // namespace

double required_subproblems(const Instance& inst, int grid_points) {
    validate(inst, grid_points);
    double total = 1.0;
    for (const auto& ax : make_grid(inst, grid_points).values) total *= static_cast<double>(ax.size());
    return total;
}

std::vector<Result> pui_bruteforce_all(const Instance& inst, const Config& cfg) {
    check_budget(inst, cfg);
    const Grid grid = make_grid(inst, cfg.grid_points);
    const int np = static_cast<int>(inst.boxes.size());

    std::vector<Result> results(static_cast<std::size_t>(np));
    for (auto& r : results) {
        r.interval = {std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    }
    for_each_point(grid, [&](const std::vector<double>& noise) {
        for (auto& r : results) ++r.grid_points_visited;
        // Every subproblem at a grid point shares one feasible set, so the
        // first LP decides feasibility for all parameters.
        std::vector<double> any_point;
        for (int k = 0; k < np; ++k) {
            auto& r = results[static_cast<std::size_t>(k)];
            const auto& box = inst.boxes[static_cast<std::size_t>(k)];
            SubInterval sub;
            if (box.lower == box.upper && !any_point.empty()) {
                // Fixed parameter: the slab is already known to be nonempty.
                sub = {true, box.lower, box.upper, any_point, any_point};
            } else {
                sub = solve_point(inst, noise, grid.n_a, k, cfg.tolerances);
                if (!sub.feasible) return;
                if (any_point.empty()) any_point = sub.arg_lower;
            }
            ++r.feasible_points;
            if (sub.lower < r.interval.lower) {
                r.interval.lower = sub.lower;
                r.lower_witness = make_witness(inst, noise, std::move(sub.arg_lower), grid.n_a);
            }
            if (sub.upper > r.interval.upper) {
                r.interval.upper = sub.upper;
                r.upper_witness = make_witness(inst, noise, std::move(sub.arg_upper), grid.n_a);
            }
        }
    });
    for (const auto& r : results) {
        if (r.feasible_points == 0) throw EmptyFps(inst.t);
    }
    return results;
}

Result pui_bruteforce(const Instance& inst, int k, const Config& cfg) {
    check_budget(inst, cfg);
    if (k < 0 || k >= static_cast<int>(inst.boxes.size())) throw ConfigError("oracle: parameter index out of range");
    const Grid grid = make_grid(inst, cfg.grid_points);

    Result r;
    r.interval = {std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for_each_point(grid, [&](const std::vector<double>& noise) {
        ++r.grid_points_visited;
        auto sub = solve_point(inst, noise, grid.n_a, k, cfg.tolerances);
        if (!sub.feasible) return;
        ++r.feasible_points;
        if (sub.lower < r.interval.lower) {
            r.interval.lower = sub.lower;
            r.lower_witness = make_witness(inst, noise, std::move(sub.arg_lower), grid.n_a);
        }
        if (sub.upper > r.interval.upper) {
            r.interval.upper = sub.upper;
            r.upper_witness = make_witness(inst, noise, std::move(sub.arg_upper), grid.n_a);
        }
    });
    if (r.feasible_points == 0) throw EmptyFps(inst.t);
    return r;
}

bool witness_satisfies(const Instance& inst, const Witness& w, double tol) {
    const auto order = inst.window.order();
    if (w.theta.size() != inst.boxes.size()) return false;
    for (std::size_t p = 0; p < w.theta.size(); ++p) {
        if (!inst.boxes[p].contains(w.theta[p], tol)) return false;
    }
    for (double e : w.eta_past) {
        if (std::abs(e) > inst.noise.delta_eta + tol) return false;
    }
    for (double z : w.zeta) {
        if (std::abs(z) > inst.noise.delta_zeta + tol) return false;
    }
    if (std::abs(w.eta_now) > inst.noise.delta_eta + tol) return false;

    // A(q^-1)(y - eta) = B(q^-1)(u - zeta), written out term by term.
    double lhs = inst.window.y_now - w.eta_now;
    for (int i = 1; i <= order.n_a(); ++i) {
        lhs += w.theta[static_cast<std::size_t>(order.index_a(i))] *
               (inst.window.y_past[static_cast<std::size_t>(i - 1)] - w.eta_past[static_cast<std::size_t>(i - 1)]);
    }
    double rhs = 0.0;
    for (int j = 0; j <= order.n_b(); ++j) {
        rhs += w.theta[static_cast<std::size_t>(order.index_b(j))] *
               (inst.window.u_lags[static_cast<std::size_t>(j)] - w.zeta[static_cast<std::size_t>(j)]);
    }
    return std::abs(lhs - rhs) <= tol;
}

double gap_tolerance(const Instance& inst, int grid_points, double factor) {
    const double spacing = 2.0 * std::max(inst.noise.delta_eta, inst.noise.delta_zeta) / (grid_points - 1);
    double max_phi = 0.0;
    for (double v : inst.window.phi()) max_phi = std::max(max_phi, std::abs(v));
    double max_radius = 0.0;
    for (const auto& b : inst.boxes) max_radius = std::max(max_radius, 0.5 * b.width());
    return factor * spacing * (max_phi + max_radius);
}

void write_grid_csv(std::ostream& os, const Instance& inst, int k, const Config& cfg) {
    check_budget(inst, cfg);
    const Grid grid = make_grid(inst, cfg.grid_points);
    const auto order = inst.window.order();
    for (int i = 1; i <= order.n_a(); ++i) os << "eta_" << i << ',';
    for (int j = 0; j <= order.n_b(); ++j) os << "zeta_" << j << ',';
    os << "feasible,lower,upper\n";
    const auto old_precision = os.precision(17);
    for_each_point(grid, [&](const std::vector<double>& noise) {
        for (double v : noise) os << v << ',';
        const auto sub = solve_point(inst, noise, grid.n_a, k, cfg.tolerances);
        if (sub.feasible) os << "1," << sub.lower << ',' << sub.upper << '\n';
        else os << "0,,\n";
    });
    os.precision(old_precision);
}

}  // namespace smid::oracle
