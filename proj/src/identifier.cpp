#include "smid/identifier.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "smid/errors.hpp"
#include "smid/mccormick.hpp"

namespace smid {

const char* to_string(Method m) noexcept { return m == Method::RsmM ? "rsm-m" : "rsm-s"; }

Method parse_method(const std::string& s) {
    if (s == "rsm-m" || s == "RSM-M") return Method::RsmM;
    if (s == "rsm-s" || s == "RSM-S") return Method::RsmS;
    throw ConfigError("unknown method '" + s + "' (expected rsm-m or rsm-s)");
}

void IdentifierConfig::validate() const {
    const auto np = static_cast<std::size_t>(order.n_params());
    if (!(noise.delta_eta >= 0.0) || !(noise.delta_zeta >= 0.0)) throw ConfigError("noise bounds must be >= 0");
    if (variation.size() != np) throw ConfigError("variation bounds must have one entry per parameter");
    for (double v : variation) {
        if (!(v >= 0.0)) throw ConfigError("variation bounds must be >= 0");
    }
    if (initial.intervals.size() != np) throw ConfigError("initial PUI must have one interval per parameter");
    for (const auto& iv : initial.intervals) {
        if (!(iv.lower <= iv.upper) || !std::isfinite(iv.lower) || !std::isfinite(iv.upper)) {
            throw ConfigError("initial PUI needs finite lower <= upper");
        }
    }
    if (method == Method::RsmS && !signs) throw ConfigError("RSM-S requires a sign source");
}

RegressorWindow RegressorWindow::at(std::span<const double> u, std::span<const double> y, ModelOrder order, long t) {
    auto sample = [](std::span<const double> s, long tt) {
        return (tt >= 1 && tt <= static_cast<long>(s.size())) ? s[static_cast<std::size_t>(tt - 1)] : 0.0;
    };
    RegressorWindow w;
    w.y_now = sample(y, t);
    for (int i = 1; i <= order.n_a(); ++i) w.y_past.push_back(sample(y, t - i));
    for (int j = 0; j <= order.n_b(); ++j) w.u_lags.push_back(sample(u, t - j));
    return w;
}

std::vector<double> RegressorWindow::phi() const {
    std::vector<double> out;
    out.reserve(y_past.size() + u_lags.size());
    for (double v : y_past) out.push_back(-v);
    for (double v : u_lags) out.push_back(v);
    return out;
}

std::vector<Interval> time_update(const PuiState& prev, std::span<const double> variation) {
    if (variation.size() != prev.intervals.size()) throw ConfigError("time_update: size mismatch");
    std::vector<Interval> out(prev.intervals.size());
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = {prev.intervals[k].lower - variation[k], prev.intervals[k].upper + variation[k]};
    }
    return out;
}

namespace {

void check_sizes(const RegressorWindow& window, std::span<const Interval> boxes, int k) {
    const auto np = static_cast<int>(window.y_past.size() + window.u_lags.size());
    if (window.y_past.empty() || window.u_lags.empty()) throw ConfigError("regressor window is empty");
    if (static_cast<int>(boxes.size()) != np) throw ConfigError("one box per parameter required");
    if (k < 0 || k >= np) throw ConfigError("parameter index out of range");
}

void set_objective(lp::LinearProgram& prog, int k, Extremum sense) {
    prog.set_objective_coeff(k, sense == Extremum::Min ? 1.0 : -1.0);
}

}  // namespace

lp::LinearProgram build_rsm_m_lp(const RegressorWindow& window, std::span<const Interval> boxes,
                                 const NoiseBounds& noise, int k, Extremum sense) {
    check_sizes(window, boxes, k);
    const ModelOrder order = window.order();
    const RsmMLayout layout(order);
    const int np = order.n_params();

    lp::LinearProgram prog(layout.n_vars());
    for (int p = 0; p < np; ++p) prog.set_bounds(layout.theta(p), boxes[static_cast<std::size_t>(p)].lower,
                                                 boxes[static_cast<std::size_t>(p)].upper);
    for (int i = 1; i <= order.n_a(); ++i) prog.set_bounds(layout.eta(i), -noise.delta_eta, noise.delta_eta);
    for (int j = 0; j <= order.n_b(); ++j) prog.set_bounds(layout.zeta(j), -noise.delta_zeta, noise.delta_zeta);

    // y(t) + sum a_i y(t-i) - sum b_j u(t-j) - sum M_a + sum M_b = eta(t), |eta(t)| <= delta_eta
    std::vector<double> residual(static_cast<std::size_t>(layout.n_vars()), 0.0);
    for (int i = 1; i <= order.n_a(); ++i) {
        residual[static_cast<std::size_t>(layout.theta(order.index_a(i)))] = window.y_past[static_cast<std::size_t>(i - 1)];
        residual[static_cast<std::size_t>(layout.m_term(order.index_a(i)))] = -1.0;
    }
    for (int j = 0; j <= order.n_b(); ++j) {
        residual[static_cast<std::size_t>(layout.theta(order.index_b(j)))] = -window.u_lags[static_cast<std::size_t>(j)];
        residual[static_cast<std::size_t>(layout.m_term(order.index_b(j)))] = 1.0;
    }
    prog.add_row(residual, lp::Sense::GreaterEqual, -noise.delta_eta - window.y_now);
    prog.add_row(std::move(residual), lp::Sense::LessEqual, noise.delta_eta - window.y_now);

    auto add_envelope = [&](int p, int eps_var, double delta_eps) {
        const auto& box = boxes[static_cast<std::size_t>(p)];
        const auto env = mccormick::m_term_bounds(mccormick::Box(box.lower, box.upper), delta_eps);
        for (const auto& ineq : env) {
            std::vector<double> row(static_cast<std::size_t>(layout.n_vars()), 0.0);
            row[static_cast<std::size_t>(layout.m_term(p))] = ineq.coeff_w;
            row[static_cast<std::size_t>(layout.theta(p))] = ineq.coeff_x;
            row[static_cast<std::size_t>(eps_var)] = ineq.coeff_y;
            prog.add_row(std::move(row),
                         ineq.side == mccormick::Side::Under ? lp::Sense::GreaterEqual : lp::Sense::LessEqual,
                         ineq.rhs);
        }
    };
    for (int i = 1; i <= order.n_a(); ++i) add_envelope(order.index_a(i), layout.eta(i), noise.delta_eta);
    for (int j = 0; j <= order.n_b(); ++j) add_envelope(order.index_b(j), layout.zeta(j), noise.delta_zeta);

    set_objective(prog, layout.theta(k), sense);
    return prog;
}

lp::LinearProgram build_rsm_s_lp(const RegressorWindow& window, std::span<const Interval> boxes,
                                 const NoiseBounds& noise, std::span<const int> signs, int k, Extremum sense) {
    check_sizes(window, boxes, k);
    const ModelOrder order = window.order();
    const int np = order.n_params();
    if (static_cast<int>(signs.size()) != np) throw ConfigError("RSM-S needs one declared sign per parameter");
    for (int s : signs) {
        if (s != 1 && s != -1) throw ConfigError("RSM-S signs must be +1 or -1");
    }

    lp::LinearProgram prog(np);
    for (int p = 0; p < np; ++p) prog.set_bounds(p, boxes[static_cast<std::size_t>(p)].lower,
                                                 boxes[static_cast<std::size_t>(p)].upper);

    const auto phi = window.phi();
    std::vector<double> lower_row(static_cast<std::size_t>(np)), upper_row(static_cast<std::size_t>(np));
    for (int p = 0; p < np; ++p) {
        const double delta = (p < order.n_a() ? noise.delta_eta : noise.delta_zeta) * signs[static_cast<std::size_t>(p)];
        lower_row[static_cast<std::size_t>(p)] = phi[static_cast<std::size_t>(p)] - delta;
        upper_row[static_cast<std::size_t>(p)] = phi[static_cast<std::size_t>(p)] + delta;
    }
    prog.add_row(std::move(lower_row), lp::Sense::LessEqual, window.y_now + noise.delta_eta);
    prog.add_row(std::move(upper_row), lp::Sense::GreaterEqual, window.y_now - noise.delta_eta);

    set_objective(prog, k, sense);
    return prog;
}

MeasurementResult measurement_update(std::span<const Interval> boxes, const RegressorWindow& window,
                                     const IdentifierConfig& config, long t) {
    const int np = config.order.n_params();
    std::vector<int> signs;
    if (config.method == Method::RsmS) {
        if (!config.signs) throw ConfigError("RSM-S requires a sign source");
        signs = config.signs(t);
    }

    MeasurementResult result;
    result.pui.t = t;
    result.pui.intervals.resize(static_cast<std::size_t>(np));
    result.statuses.reserve(static_cast<std::size_t>(2 * np));

    auto solve_one = [&](int k, Extremum sense) {
        const auto prog = config.method == Method::RsmM ? build_rsm_m_lp(window, boxes, config.noise, k, sense)
                                                         : build_rsm_s_lp(window, boxes, config.noise, signs, k, sense);
        auto sol = lp::solve(prog, config.tolerances);
        result.statuses.push_back(sol.status);
        switch (sol.status) {
            case lp::Status::Optimal: break;
            case lp::Status::Infeasible: throw EmptyFps(t);
            case lp::Status::Unbounded: throw SolverFailure(t, "bounded program reported unbounded");
            case lp::Status::NumericalFailure: throw SolverFailure(t, sol.message);
        }
        return sense == Extremum::Min ? sol.objective_value : -sol.objective_value;
    };

    for (int k = 0; k < np; ++k) {
        const auto& box = boxes[static_cast<std::size_t>(k)];
        double lower = std::max(solve_one(k, Extremum::Min), box.lower);
        double upper = std::min(solve_one(k, Extremum::Max), box.upper);
        if (lower > upper) {
            if (lower - upper > config.tolerances.certificate) {
                throw SolverFailure(t, "inverted interval for parameter " + config.order.param_name(k));
            }
            lower = upper = 0.5 * (lower + upper);
        }
        result.pui.intervals[static_cast<std::size_t>(k)] = {lower, upper};
    }
    return result;
}

ParameterVector central_estimate(const PuiState& pui) {
    ParameterVector c;
    c.t = pui.t;
    c.values.reserve(pui.intervals.size());
    for (const auto& iv : pui.intervals) c.values.push_back(iv.center());
    return c;
}

std::vector<StepRecord> run(std::span<const double> u, std::span<const double> y, const IdentifierConfig& config) {
    config.validate();
    if (u.size() != y.size()) throw ConfigError("u and y must have equal length");
    const long n = static_cast<long>(u.size());
    const long first = config.order.first_identified_step();
    if (n < first) throw ConfigError("dataset shorter than the first identified step");

    std::vector<StepRecord> records;
    records.reserve(static_cast<std::size_t>(n));
    PuiState pui = config.initial;
    pui.t = 0;

    for (long t = 1; t <= n; ++t) {
        StepRecord rec;
        rec.t = t;
        auto boxes = time_update(pui, config.variation);
        if (t < first) {
            pui = {t, std::move(boxes)};
        } else {
            const auto window = RegressorWindow::at(u, y, config.order, t);
            const auto start = std::chrono::steady_clock::now();
            try {
                auto m = measurement_update(boxes, window, config, t);
                pui = std::move(m.pui);
                rec.statuses = std::move(m.statuses);
            } catch (const EmptyFps&) {
                if (config.on_empty == EmptyFpsPolicy::FailFast) throw;
                pui = {t, std::move(boxes)};
                rec.held = true;
            }
            const auto stop = std::chrono::steady_clock::now();
            rec.step_time_us = std::chrono::duration<double, std::micro>(stop - start).count();
            rec.measured = true;
        }
        rec.pui = pui;
        rec.center = central_estimate(pui).values;
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<StepRecord> run(const Dataset& dataset, const IdentifierConfig& config) {
    if (!(dataset.order == config.order)) throw ConfigError("dataset and identifier model orders differ");
    return run(dataset.u, dataset.y, config);
}

RunSummary summarize(const std::vector<StepRecord>& records, const Dataset& truth, Method method, double slack) {
    RunSummary s;
    s.method = method;
    const int np = truth.order.n_params();
    s.parameters.resize(static_cast<std::size_t>(np));
    for (int k = 0; k < np; ++k) s.parameters[static_cast<std::size_t>(k)].name = truth.order.param_name(k);

    std::vector<double> times;
    long contained = 0;
    std::vector<long> contained_k(static_cast<std::size_t>(np), 0);
    for (const auto& rec : records) {
        if (!rec.measured) continue;
        ++s.steps;
        if (rec.held) ++s.held_steps;
        times.push_back(rec.step_time_us);
        const auto truth_t = truth.theta_at(rec.t);
        for (int k = 0; k < np; ++k) {
            const auto& iv = rec.pui.intervals[static_cast<std::size_t>(k)];
            auto& ps = s.parameters[static_cast<std::size_t>(k)];
            if (iv.contains(truth_t.values[static_cast<std::size_t>(k)], slack)) {
                ++contained;
                ++contained_k[static_cast<std::size_t>(k)];
            }
            ps.mean_width += iv.width();
            ps.max_width = std::max(ps.max_width, iv.width());
        }
    }
    if (s.steps == 0) return s;
    const double steps = static_cast<double>(s.steps);
    s.containment_rate = static_cast<double>(contained) / (steps * np);
    for (int k = 0; k < np; ++k) {
        auto& ps = s.parameters[static_cast<std::size_t>(k)];
        ps.mean_width /= steps;
        ps.containment_rate = static_cast<double>(contained_k[static_cast<std::size_t>(k)]) / steps;
    }
    double total = 0.0;
    for (double v : times) total += v;
    s.mean_step_time_us = total / steps;
    std::sort(times.begin(), times.end());
    const auto idx = static_cast<std::size_t>(std::ceil(0.99 * steps)) - 1;
    s.p99_step_time_us = times[std::min(idx, times.size() - 1)];
    return s;
}

}  // namespace smid
