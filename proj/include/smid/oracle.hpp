#pragma once

// Brute-force certifier for one measurement update. The past noise samples
// eta(t-1..t-n_a) and zeta(t..t-n_b) are fixed on a uniform grid; for each
// grid point the model equation is linear in theta, and min/max theta_k over
// that slab intersected with the parameter box is an ordinary LP. The union
// over the grid is an inner approximation of the exact parameter interval.

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "smid/identifier.hpp"

namespace smid::oracle {

struct Instance {
    RegressorWindow window;
    std::vector<Interval> boxes;  ///< expanded (time-updated) boxes
    NoiseBounds noise;
    long t = 0;                   ///< only used in error reports
};

struct Config {
    int grid_points = 101;                    ///< odd, >= 3
    std::size_t max_subproblems = 10'000'000;
    lp::Tolerances tolerances;
};

/// A point of the nonconvex feasible set, with the implied current output noise.
struct Witness {
    std::vector<double> theta;
    std::vector<double> eta_past;  ///< eta(t-1) .. eta(t-n_a)
    std::vector<double> zeta;      ///< zeta(t) .. zeta(t-n_b)
    double eta_now = 0.0;
};

struct Result {
    Interval interval;
    Witness lower_witness;
    Witness upper_witness;
    std::size_t grid_points_visited = 0;
    std::size_t feasible_points = 0;
};

/// Number of grid points the instance needs. A noise dimension collapses to
/// the single value 0 when its bound is zero or its parameter box is [0, 0].
double required_subproblems(const Instance& inst, int grid_points);

/// Throws OracleBudgetExceeded over the cap, EmptyFps when no grid point is feasible.
Result pui_bruteforce(const Instance& inst, int k, const Config& cfg = {});
/// Same as pui_bruteforce for every parameter, sharing one pass over the grid.
std::vector<Result> pui_bruteforce_all(const Instance& inst, const Config& cfg = {});

/// Re-substitutes a witness into the original (bilinear) constraints.
bool witness_satisfies(const Instance& inst, const Witness& w, double tol = 1e-9);

/// Accepted oracle/relaxation endpoint gap:
/// factor * (grid spacing) * (max |phi| + max box radius).
double gap_tolerance(const Instance& inst, int grid_points, double factor = 2.0);

/// CSV of every grid point: eta_1..eta_na, zeta_0..zeta_nb, feasible, lower, upper.
void write_grid_csv(std::ostream& os, const Instance& inst, int k, const Config& cfg = {});

}  // namespace smid::oracle
