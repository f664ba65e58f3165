#include <doctest.h>

#include <charconv>
#include <cmath>
#include <sstream>

#include "smid/errors.hpp"
#include "smid/experiment.hpp"
#include "smid/io.hpp"

using namespace smid;

namespace {

Dataset small_dataset() {
    auto cfg = experiment::preset("example1");
    cfg.samples = 60;
    return experiment::make_dataset(cfg);
}

std::string error_of(const std::string& text) {
    std::istringstream in(text);
    try {
        io::read_dataset_csv(in, ModelOrder(1, 1), "data.csv");
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("format_double round-trips") {
    for (double v : {0.1, -2.0, 1.0 / 3.0, 6.02214076e23, -4.9e-324, 0.0}) {
        const auto text = io::format_double(v);
        double back = 1.0;
        std::from_chars(text.data(), text.data() + text.size(), back);
        CHECK(back == v);
    }
    CHECK(io::format_double(0.5) == "0.5");
    CHECK(io::format_double(-2.0) == "-2");
}

TEST_CASE("dataset CSV round-trips exactly") {
    const auto d = small_dataset();
    std::ostringstream out;
    io::write_dataset_csv(out, d);
    CHECK(out.str().rfind("t,u,y,x,w,eta,zeta,theta_1,theta_2,theta_3\n", 0) == 0);
    std::istringstream in(out.str());
    const auto back = io::read_dataset_csv(in, d.order);
    CHECK(back.u == d.u);
    CHECK(back.y == d.y);
    CHECK(back.x == d.x);
    CHECK(back.w == d.w);
    CHECK(back.eta == d.eta);
    CHECK(back.zeta == d.zeta);
    CHECK(back.theta == d.theta);
}

TEST_CASE("malformed dataset CSV names the line") {
    const std::string header = "t,u,y,x,w,eta,zeta,theta_1,theta_2,theta_3\n";
    const std::string row1 = "1,0.1,0.2,0.1,0.2,0,0,0.2,0,-2\n";
    CHECK(error_of(header + row1 + "2,0.1,abc,0.1,0.2,0,0,0.2,0,-2\n").find("data.csv:3:") != std::string::npos);
    CHECK(error_of(header + row1 + "2,0.1,0.2\n").find("data.csv:3: expected 10 fields") != std::string::npos);
    CHECK(error_of(header + "5,0.1,0.2,0.1,0.2,0,0,0.2,0,-2\n").find("data.csv:2: time index") != std::string::npos);
    CHECK(error_of("t,u,y\n" + row1).find("data.csv:1:") != std::string::npos);
    CHECK(error_of("").find("data.csv:1: empty") != std::string::npos);
    CHECK(error_of(header).find("no samples") != std::string::npos);
}

TEST_CASE("step and plot CSV layout") {
    const auto d = small_dataset();
    auto cfg = experiment::preset("example1");
    const auto records = run(d, experiment::identifier_config(cfg, d, Method::RsmM));

    std::ostringstream steps;
    io::write_steps_csv(steps, records, Method::RsmM, d, false);
    const auto s = steps.str();
    CHECK(s.rfind("t,method,k,lower,upper,center,true_theta,step_time_us\n", 0) == 0);
    CHECK(std::count(s.begin(), s.end(), '\n') == 1 + 60 * 3);
    CHECK(s.find("\n2,rsm-m,3,") != std::string::npos);
    // Every timing cell is 0 without timing.
    std::istringstream lines(s);
    std::string line;
    std::getline(lines, line);
    while (std::getline(lines, line)) CHECK(line.substr(line.rfind(',')) == ",0");

    std::ostringstream plot;
    io::write_plot_csv(plot, records, d);
    const auto p = plot.str();
    CHECK(p.rfind("t,series,value\n", 0) == 0);
    CHECK(std::count(p.begin(), p.end(), '\n') == 1 + 60 * 3 * 4);
    CHECK(p.find("\n1,a1.lower,") != std::string::npos);
    CHECK(p.find("\n60,b1.true,") != std::string::npos);
}

TEST_CASE("summary and SNR JSON") {
    RunSummary s;
    s.method = Method::RsmS;
    s.steps = 10;
    s.containment_rate = 1.0;
    s.parameters = {{"a1", 1.0, 0.1, 0.2}};
    const auto j = io::summary_json(s);
    CHECK(j["method"] == "rsm-s");
    CHECK(j["identified_steps"] == 10);
    CHECK(j["parameters"][0]["name"] == "a1");
    CHECK(io::snr_json(kInfiniteSnr) == "inf");
    CHECK(io::snr_json(12.5) == 12.5);
}
