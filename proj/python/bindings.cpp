#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "smid/errors.hpp"
#include "smid/experiment.hpp"
#include "smid/identifier.hpp"
#include "smid/lp.hpp"
#include "smid/mccormick.hpp"
#include "smid/model.hpp"
#include "smid/oracle.hpp"

namespace py = pybind11;
using namespace smid;

namespace {

lp::Sense parse_sense(const std::string& s) {
    if (s == "<=") return lp::Sense::LessEqual;
    if (s == ">=") return lp::Sense::GreaterEqual;
    if (s == "=" || s == "==") return lp::Sense::Equal;
    throw ConfigError("row sense must be '<=', '>=' or '='");
}

std::vector<Interval> to_intervals(const std::vector<std::pair<double, double>>& boxes) {
    std::vector<Interval> out;
    for (const auto& [lo, hi] : boxes) out.push_back({lo, hi});
    return out;
}

py::list to_pairs(const std::vector<Interval>& ivs) {
    py::list out;
    for (const auto& iv : ivs) out.append(py::make_tuple(iv.lower, iv.upper));
    return out;
}

RegressorWindow make_window(double y_now, std::vector<double> y_past, std::vector<double> u_lags) {
    RegressorWindow w;
    w.y_now = y_now;
    w.y_past = std::move(y_past);
    w.u_lags = std::move(u_lags);
    return w;
}

py::dict run_dict(const std::vector<StepRecord>& records, const Dataset& d, Method m) {
    py::list steps;
    for (const auto& rec : records) {
        py::dict s;
        s["t"] = rec.t;
        s["intervals"] = to_pairs(rec.pui.intervals);
        s["center"] = rec.center;
        s["measured"] = rec.measured;
        s["held"] = rec.held;
        s["step_time_us"] = rec.step_time_us;
        steps.append(s);
    }
    const auto sum = summarize(records, d, m);
    py::dict out;
    out["steps"] = steps;
    out["containment_rate"] = sum.containment_rate;
    out["mean_step_time_us"] = sum.mean_step_time_us;
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Set-membership identification of LTV errors-in-variables systems";
    m.attr("__version__") = "0.1.0";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<EmptyFps>(m, "EmptyFps", PyExc_RuntimeError);
    py::register_exception<SolverFailure>(m, "SolverFailure", PyExc_RuntimeError);
    py::register_exception<OracleBudgetExceeded>(m, "OracleBudgetExceeded", PyExc_RuntimeError);
    py::register_exception<UnstableTrajectory>(m, "UnstableTrajectory", PyExc_RuntimeError);

    py::class_<ParameterTrajectory>(m, "ParameterTrajectory")
        .def_static("constant", &ParameterTrajectory::constant, py::arg("value"))
        .def_static("sinusoid", &ParameterTrajectory::sinusoid, py::arg("offset"), py::arg("amplitude"),
                    py::arg("period"))
        .def("at", &ParameterTrajectory::at, py::arg("t"))
        .def_property_readonly("variation_bound", [](const ParameterTrajectory& t) { return variation_bound_of(t); });
    m.def("variation_bound_of", &variation_bound_of, py::arg("trajectory"));

    py::class_<Dataset>(m, "Dataset")
        .def_property_readonly("n_a", [](const Dataset& d) { return d.order.n_a(); })
        .def_property_readonly("n_b", [](const Dataset& d) { return d.order.n_b(); })
        .def_readonly("u", &Dataset::u)
        .def_readonly("y", &Dataset::y)
        .def_readonly("x", &Dataset::x)
        .def_readonly("w", &Dataset::w)
        .def_readonly("eta", &Dataset::eta)
        .def_readonly("zeta", &Dataset::zeta)
        .def_readonly("theta", &Dataset::theta)
        .def("__len__", &Dataset::size);

    m.def(
        "simulate",
        [](const std::vector<ParameterTrajectory>& tr, int n_a, int n_b, long n, double delta_eta, double delta_zeta,
           std::uint64_t seed, double lo, double hi) {
            return simulate(tr, ModelOrder(n_a, n_b), NoiseSpec{delta_eta, delta_zeta, seed}, InputSpec{lo, hi, seed},
                            n);
        },
        py::arg("trajectories"), py::arg("n_a"), py::arg("n_b"), py::arg("samples"), py::arg("delta_eta") = 0.0,
        py::arg("delta_zeta") = 0.0, py::arg("seed") = 1, py::arg("input_lo") = -1.0, py::arg("input_hi") = 1.0);
    m.def("snr_db", [](const std::vector<double>& s, const std::vector<double>& n) { return snr_db(s, n); },
          py::arg("signal"), py::arg("noise"));
    m.def("delta_for_snr", [](const std::vector<double>& s, double db) { return delta_for_snr(s, db); },
          py::arg("signal"), py::arg("target_snr_db"));

    m.def(
        "envelope",
        [](std::pair<double, double> x, std::pair<double, double> y) {
            py::list rows;
            for (const auto& q : mccormick::envelope({x.first, x.second}, {y.first, y.second})) {
                rows.append(py::make_tuple(q.coeff_w, q.coeff_x, q.coeff_y,
                                           q.side == mccormick::Side::Under ? ">=" : "<=", q.rhs));
            }
            return rows;
        },
        py::arg("x_box"), py::arg("y_box"),
        "Four rows (coeff_w, coeff_x, coeff_y, sense, rhs) of the McCormick envelope of w = x*y.");
    m.def(
        "m_term_bounds",
        [](std::pair<double, double> theta, double delta) {
            py::list rows;
            for (const auto& q : mccormick::m_term_bounds({theta.first, theta.second}, delta)) {
                rows.append(py::make_tuple(q.coeff_w, q.coeff_x, q.coeff_y,
                                           q.side == mccormick::Side::Under ? ">=" : "<=", q.rhs));
            }
            return rows;
        },
        py::arg("theta_box"), py::arg("delta_eps"));

    m.def(
        "solve_lp",
        [](const std::vector<double>& c, const std::vector<std::tuple<std::vector<double>, std::string, double>>& rows,
           const std::vector<std::pair<double, double>>& bounds) {
            lp::LinearProgram prog(static_cast<int>(c.size()));
            prog.set_objective(c);
            for (std::size_t j = 0; j < bounds.size(); ++j) {
                prog.set_bounds(static_cast<int>(j), bounds[j].first, bounds[j].second);
            }
            for (const auto& [a, s, b] : rows) prog.add_row(a, parse_sense(s), b);
            const auto sol = lp::solve(prog);
            py::dict out;
            out["status"] = lp::to_string(sol.status);
            out["x"] = sol.point;
            out["objective"] = sol.objective_value;
            out["iterations"] = sol.iterations;
            return out;
        },
        py::arg("c"), py::arg("rows") = std::vector<std::tuple<std::vector<double>, std::string, double>>{},
        py::arg("bounds") = std::vector<std::pair<double, double>>{},
        "Minimise c.x subject to rows (coeffs, '<='|'>='|'=', rhs) and per-variable (lo, hi) bounds.");

    m.def(
        "measurement_update",
        [](double y_now, std::vector<double> y_past, std::vector<double> u_lags,
           const std::vector<std::pair<double, double>>& boxes, double delta_eta, double delta_zeta,
           const std::string& method, std::optional<std::vector<int>> signs) {
            const auto window = make_window(y_now, std::move(y_past), std::move(u_lags));
            IdentifierConfig cfg(window.order());
            cfg.noise = {delta_eta, delta_zeta};
            cfg.variation.assign(boxes.size(), 0.0);
            cfg.initial = {0, to_intervals(boxes)};
            cfg.method = parse_method(method);
            if (signs) cfg.signs = [s = *signs](long) { return s; };
            cfg.validate();
            return to_pairs(measurement_update(cfg.initial.intervals, window, cfg, 1).pui.intervals);
        },
        py::arg("y_now"), py::arg("y_past"), py::arg("u_lags"), py::arg("boxes"), py::arg("delta_eta"),
        py::arg("delta_zeta"), py::arg("method") = "rsm-m", py::arg("signs") = std::nullopt,
        "One measurement update over the given parameter boxes; returns [(lower, upper), ...].");

    m.def(
        "oracle_pui",
        [](double y_now, std::vector<double> y_past, std::vector<double> u_lags,
           const std::vector<std::pair<double, double>>& boxes, double delta_eta, double delta_zeta, int grid) {
            oracle::Instance inst{make_window(y_now, std::move(y_past), std::move(u_lags)), to_intervals(boxes),
                                  {delta_eta, delta_zeta}, 1};
            oracle::Config cfg;
            cfg.grid_points = grid;
            std::vector<Interval> out;
            for (const auto& r : oracle::pui_bruteforce_all(inst, cfg)) out.push_back(r.interval);
            return to_pairs(out);
        },
        py::arg("y_now"), py::arg("y_past"), py::arg("u_lags"), py::arg("boxes"), py::arg("delta_eta"),
        py::arg("delta_zeta"), py::arg("grid") = 101,
        "Grid inner approximation of the exact parameter intervals for one step.");

    m.def("preset_names", &experiment::preset_names);
    m.def(
        "simulate_preset",
        [](const std::string& name, std::optional<std::uint64_t> seed) {
            auto cfg = experiment::preset(name);
            if (seed) cfg.seed = *seed;
            return experiment::make_dataset(cfg);
        },
        py::arg("preset"), py::arg("seed") = std::nullopt);
    m.def(
        "identify",
        [](const std::string& name, const std::string& method, std::optional<std::uint64_t> seed) {
            auto cfg = experiment::preset(name);
            if (seed) cfg.seed = *seed;
            const auto d = experiment::make_dataset(cfg);
            const auto mth = parse_method(method);
            return run_dict(run(d, experiment::identifier_config(cfg, d, mth)), d, mth);
        },
        py::arg("preset"), py::arg("method") = "rsm-m", py::arg("seed") = std::nullopt,
        "Simulates a preset and runs the identifier over it.");
    m.def(
        "compare",
        [](const std::string& name, std::optional<std::uint64_t> seed) {
            auto cfg = experiment::preset(name);
            if (seed) cfg.seed = *seed;
            const auto d = experiment::make_dataset(cfg);
            return experiment::compare(cfg, d, Method::RsmM, Method::RsmS).max_discrepancy;
        },
        py::arg("preset"), py::arg("seed") = std::nullopt,
        "Maximum endpoint discrepancy between RSM-M and RSM-S on a preset.");
}
