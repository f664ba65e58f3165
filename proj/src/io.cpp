#include "smid/io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "smid/errors.hpp"

namespace smid::io {

std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

void write_dataset_csv(std::ostream& os, const Dataset& d) {
    const int np = d.order.n_params();
    os << "t,u,y,x,w,eta,zeta";
    for (int k = 1; k <= np; ++k) os << ",theta_" << k;
    os << '\n';
    for (long t = 1; t <= d.size(); ++t) {
        os << t << ',' << format_double(d.u_at(t)) << ',' << format_double(d.y_at(t)) << ','
           << format_double(d.x_at(t)) << ',' << format_double(d.w_at(t)) << ',' << format_double(d.eta_at(t))
           << ',' << format_double(d.zeta_at(t));
        for (double v : d.theta[static_cast<std::size_t>(t - 1)]) os << ',' << format_double(v);
        os << '\n';
    }
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_number(const std::string& s, const std::string& where) {
    double v = 0.0;
    const auto* first = s.data();
    const auto* last = s.data() + s.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last) throw ConfigError(where + ": not a number: '" + s + "'");
    return v;
}

}  // namespace

Dataset read_dataset_csv(std::istream& is, ModelOrder order, const std::string& source) {
    const int np = order.n_params();
    std::string line;
    if (!std::getline(is, line)) throw ConfigError(source + ":1: empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    std::string expected = "t,u,y,x,w,eta,zeta";
    for (int k = 1; k <= np; ++k) expected += ",theta_" + std::to_string(k);
    if (line != expected) throw ConfigError(source + ":1: unexpected header (want '" + expected + "')");

    Dataset d(order);
    long line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::string where = source + ":" + std::to_string(line_no);
        const auto cells = split(line);
        if (static_cast<int>(cells.size()) != 7 + np) {
            throw ConfigError(where + ": expected " + std::to_string(7 + np) + " fields, got " +
                              std::to_string(cells.size()));
        }
        const double t = parse_number(cells[0], where);
        if (t != static_cast<double>(d.size() + 1)) throw ConfigError(where + ": time index out of sequence");
        d.u.push_back(parse_number(cells[1], where));
        d.y.push_back(parse_number(cells[2], where));
        d.x.push_back(parse_number(cells[3], where));
        d.w.push_back(parse_number(cells[4], where));
        d.eta.push_back(parse_number(cells[5], where));
        d.zeta.push_back(parse_number(cells[6], where));
        std::vector<double> th;
        for (int k = 0; k < np; ++k) th.push_back(parse_number(cells[static_cast<std::size_t>(7 + k)], where));
        d.theta.push_back(std::move(th));
    }
    if (d.size() == 0) throw ConfigError(source + ": no samples");
    return d;
}

void write_steps_csv(std::ostream& os, const std::vector<StepRecord>& records, Method method, const Dataset& truth,
                     bool with_timing) {
    os << "t,method,k,lower,upper,center,true_theta,step_time_us\n";
    for (const auto& rec : records) {
        const auto& th = truth.theta[static_cast<std::size_t>(rec.t - 1)];
        for (std::size_t k = 0; k < rec.pui.intervals.size(); ++k) {
            const auto& iv = rec.pui.intervals[k];
            os << rec.t << ',' << to_string(method) << ',' << (k + 1) << ',' << format_double(iv.lower) << ','
               << format_double(iv.upper) << ',' << format_double(rec.center[k]) << ',' << format_double(th[k]) << ','
               << format_double(with_timing ? rec.step_time_us : 0.0) << '\n';
        }
    }
}

void write_plot_csv(std::ostream& os, const std::vector<StepRecord>& records, const Dataset& truth,
                    const std::string& prefix) {
    os << "t,series,value\n";
    for (const auto& rec : records) {
        const auto& th = truth.theta[static_cast<std::size_t>(rec.t - 1)];
        for (std::size_t k = 0; k < rec.pui.intervals.size(); ++k) {
            const std::string name = prefix + truth.order.param_name(static_cast<int>(k));
            const auto& iv = rec.pui.intervals[k];
            os << rec.t << ',' << name << ".lower," << format_double(iv.lower) << '\n';
            os << rec.t << ',' << name << ".upper," << format_double(iv.upper) << '\n';
            os << rec.t << ',' << name << ".center," << format_double(rec.center[k]) << '\n';
            os << rec.t << ',' << name << ".true," << format_double(th[k]) << '\n';
        }
    }
}

nlohmann::json snr_json(double snr_db) {
    if (std::isinf(snr_db)) return "inf";
    return snr_db;
}

nlohmann::json summary_json(const RunSummary& s) {
    nlohmann::json j;
    j["method"] = to_string(s.method);
    j["identified_steps"] = s.steps;
    j["held_steps"] = s.held_steps;
    j["containment_rate"] = s.containment_rate;
    j["mean_step_time_us"] = s.mean_step_time_us;
    j["p99_step_time_us"] = s.p99_step_time_us;
    auto& params = j["parameters"] = nlohmann::json::array();
    for (const auto& p : s.parameters) {
        params.push_back({{"name", p.name},
                          {"containment_rate", p.containment_rate},
                          {"mean_width", p.mean_width},
                          {"max_width", p.max_width}});
    }
    return j;
}

}  // namespace smid::io
