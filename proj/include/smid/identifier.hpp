#pragma once

// Online set-membership identification of LTV errors-in-variables models.
//
// Each step t first expands the previous parameter box by the variation
// bounds (time update) and then contracts it by solving 2 * n_p linear
// programs over the measurement-consistent set (measurement update):
//
//   RSM-M  McCormick relaxation of the bilinear noise terms, no sign knowledge.
//   RSM-S  Linear reformulation that needs the sign of every parameter.

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "smid/lp.hpp"
#include "smid/model.hpp"

namespace smid {

enum class Method { RsmM, RsmS };
const char* to_string(Method m) noexcept;
Method parse_method(const std::string& s);

enum class Extremum { Min, Max };

struct Interval {
    double lower = 0.0;
    double upper = 0.0;

    double width() const noexcept { return upper - lower; }
    double center() const noexcept { return 0.5 * (upper + lower); }
    bool contains(double v, double slack = 0.0) const noexcept { return lower - slack <= v && v <= upper + slack; }
    bool contains(const Interval& o, double slack = 0.0) const noexcept {
        return lower - slack <= o.lower && o.upper <= upper + slack;
    }
};

struct PuiState {
    long t = 0;
    std::vector<Interval> intervals;
};

struct NoiseBounds {
    double delta_eta = 0.0;
    double delta_zeta = 0.0;
};

/// Declared sign (+1 / -1) of every parameter at time t. +1 means theta >= 0.
using SignSource = std::function<std::vector<int>(long t)>;

enum class EmptyFpsPolicy { FailFast, SkipAndHold };

struct IdentifierConfig {
    explicit IdentifierConfig(ModelOrder o) : order(o) {}

    ModelOrder order;
    NoiseBounds noise;
    std::vector<double> variation;   ///< Delta_theta_k per parameter
    PuiState initial;                ///< PUIs at t = 0
    Method method = Method::RsmM;
    SignSource signs;                ///< required for RSM-S
    lp::Tolerances tolerances;
    EmptyFpsPolicy on_empty = EmptyFpsPolicy::FailFast;

    /// Throws ConfigError on inconsistent sizes, negative bounds, inverted
    /// initial intervals or a missing sign source for RSM-S.
    void validate() const;
};

/// Measurements entering the step-t model equation: y(t), y(t-1..t-n_a)
/// and u(t..t-n_b), zero-extended before the first sample.
struct RegressorWindow {
    double y_now = 0.0;
    std::vector<double> y_past;  ///< y(t-1) .. y(t-n_a)
    std::vector<double> u_lags;  ///< u(t) .. u(t-n_b)

    static RegressorWindow at(std::span<const double> u, std::span<const double> y, ModelOrder order, long t);

    /// [-y(t-1) .. -y(t-n_a), u(t) .. u(t-n_b)]
    std::vector<double> phi() const;
    ModelOrder order() const { return {static_cast<int>(y_past.size()), static_cast<int>(u_lags.size()) - 1}; }
};

/// Column layout of the RSM-M program: theta, M, eta(t-1..t-n_a), zeta(t..t-n_b).
struct RsmMLayout {
    explicit RsmMLayout(ModelOrder o) : order(o) {}

    ModelOrder order;
    int theta(int k) const noexcept { return k; }
    int m_term(int k) const noexcept { return order.n_params() + k; }
    int eta(int i) const noexcept { return 2 * order.n_params() + (i - 1); }
    int zeta(int j) const noexcept { return 2 * order.n_params() + order.n_a() + j; }
    int n_vars() const noexcept { return 3 * order.n_params(); }
};

std::vector<Interval> time_update(const PuiState& prev, std::span<const double> variation);

lp::LinearProgram build_rsm_m_lp(const RegressorWindow& window, std::span<const Interval> boxes,
                                 const NoiseBounds& noise, int k, Extremum sense);

lp::LinearProgram build_rsm_s_lp(const RegressorWindow& window, std::span<const Interval> boxes,
                                 const NoiseBounds& noise, std::span<const int> signs, int k, Extremum sense);

struct MeasurementResult {
    PuiState pui;
    std::vector<lp::Status> statuses;  ///< 2 per parameter: min then max
};

/// Throws EmptyFps when any program is infeasible and SolverFailure on
/// numerical breakdown. Results are clipped to the expanded boxes.
MeasurementResult measurement_update(std::span<const Interval> boxes, const RegressorWindow& window,
                                     const IdentifierConfig& config, long t);

ParameterVector central_estimate(const PuiState& pui);

struct StepRecord {
    long t = 0;
    PuiState pui;
    std::vector<double> center;
    double step_time_us = 0.0;        ///< wall time of the measurement update
    std::vector<lp::Status> statuses;
    bool measured = false;            ///< false during warm-up
    bool held = false;                ///< empty FPS skipped under SkipAndHold
};

/// Runs t = 1..N; steps before the first full regressor window only apply the
/// time update. Uses the observed u and y only.
std::vector<StepRecord> run(std::span<const double> u, std::span<const double> y, const IdentifierConfig& config);
std::vector<StepRecord> run(const Dataset& dataset, const IdentifierConfig& config);

struct ParameterSummary {
    std::string name;
    double containment_rate = 0.0;
    double mean_width = 0.0;
    double max_width = 0.0;
};

struct RunSummary {
    Method method = Method::RsmM;
    long steps = 0;                 ///< identified (measured) steps
    double containment_rate = 0.0;  ///< over all measured steps and parameters
    std::vector<ParameterSummary> parameters;
    double mean_step_time_us = 0.0;
    double p99_step_time_us = 0.0;
    long held_steps = 0;
};

/// Containment is checked with `slack` on both endpoints.
RunSummary summarize(const std::vector<StepRecord>& records, const Dataset& truth, Method method,
                     double slack = 1e-9);

}  // namespace smid
