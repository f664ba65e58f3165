#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "smid/errors.hpp"
#include "smid/experiment.hpp"
#include "smid/io.hpp"

using namespace smid;
namespace fs = std::filesystem;

namespace {

std::string config_text(const experiment::ExperimentConfig& c) {
    std::ostringstream os;
    experiment::write_config(os, c);
    return os.str();
}

experiment::ExperimentConfig parse(const std::string& text) {
    std::istringstream in(text);
    return experiment::parse_config(in, "test.ini");
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag)
        : path(fs::temp_directory_path() / ("smid_" + tag + "_" + std::to_string(std::rand()))) {
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

int cli(const std::string& args) {
    const std::string cmd = std::string(SMID_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

const std::string kMinimal =
    "[experiment]\nversion = 1\nn_a = 1\nn_b = 0\nsamples = 50\n"
    "[parameters]\na1 = constant 0.5\nb0 = sinusoid 1 0.2 100\n"
    "[noise]\ndelta_eta = 0.01\ndelta_zeta = 0.02\n";

}  // namespace

TEST_CASE("presets") {
    const auto e1 = experiment::preset("example1");
    CHECK(e1.order == ModelOrder(1, 1));
    CHECK(e1.samples == 1500);
    CHECK(e1.snr->input_db == 47.0);
    CHECK(e1.snr->output_db == 46.0);
    const auto e2 = experiment::preset("example2");
    CHECK(e2.order == ModelOrder(2, 2));
    CHECK(e2.samples == 2000);
    CHECK(e2.trajectories[1].kind() == ParameterTrajectory::Kind::Constant);
    CHECK(e2.trajectories[1].at(17) == 0.25);
    CHECK(experiment::preset("example2-low").snr->input_db == 32.0);
    CHECK(experiment::preset("example1-low").snr->output_db == 26.0);
    CHECK_THROWS_AS(experiment::preset("nope"), ConfigError);
}

TEST_CASE("config text round-trips") {
    for (const auto& name : experiment::preset_names()) {
        const auto text = config_text(experiment::preset(name));
        CHECK(config_text(parse(text)) == text);
    }
    auto c = parse(kMinimal);
    CHECK(c.noise->delta_zeta == 0.02);
    CHECK(c.trajectories[1].period() == 100.0);
    c.variation = std::vector<double>{0.0, 0.1};
    c.on_empty = EmptyFpsPolicy::SkipAndHold;
    c.signs = "a1=+1,b0=-1";
    const auto again = parse(config_text(c));
    CHECK(*again.variation == *c.variation);
    CHECK(again.on_empty == EmptyFpsPolicy::SkipAndHold);
    CHECK(again.signs == c.signs);
}

TEST_CASE("shipped configs encode the presets") {
    for (const auto& name : experiment::preset_names()) {
        CAPTURE(name);
        const auto path = fs::path(SMID_CONFIG_DIR) / (name + ".ini");
        REQUIRE(fs::exists(path));
        CHECK(slurp(path) == config_text(experiment::preset(name)));
    }
}

TEST_CASE("config errors") {
    CHECK_THROWS_AS(parse(kMinimal + "[extra]\nx = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse(kMinimal + "[oracle]\ngridd = 3\n"), ConfigError);
    CHECK_THROWS_AS(parse(kMinimal + "snr_input_db = 40\nsnr_output_db = 40\n"), ConfigError);
    std::string v2 = kMinimal;
    v2.replace(v2.find("version = 1"), 11, "version = 2");
    CHECK_THROWS_AS(parse(v2), ConfigError);
    std::string no_noise = kMinimal.substr(0, kMinimal.find("[noise]"));
    CHECK_THROWS_WITH_AS(parse(no_noise), doctest::Contains("exactly one"), ConfigError);
    CHECK_THROWS_AS(parse(kMinimal + "[identifier]\nknown = c7\n"), ConfigError);
    CHECK_THROWS_AS(parse(kMinimal + "[oracle]\ngrid = 4\n"), ConfigError);
    CHECK_THROWS_AS(parse("[experiment\n"), ConfigError);
}

TEST_CASE("sidecar reports measured SNR and the infinite sentinel") {
    auto cfg = experiment::preset("zero-noise");
    const auto d = experiment::make_dataset(cfg);
    const auto j = experiment::dataset_sidecar(cfg, d);
    CHECK(j["snr_input_db"] == "inf");
    CHECK(j["snr_output_db"] == "inf");
    CHECK(j["delta_eta"] == 0.0);

    cfg = experiment::preset("example1");
    const auto d1 = experiment::make_dataset(cfg);
    const auto j1 = experiment::dataset_sidecar(cfg, d1);
    CHECK(std::abs(j1["snr_input_db"].get<double>() - 47.0) < 1.0);
    CHECK(j1["target_snr_output_db"] == 46.0);
}

TEST_CASE("signs from a config string") {
    auto cfg = experiment::preset("example1");
    const auto d = experiment::make_dataset(cfg);
    cfg.signs = "a1=+1,b0=+1,b1=-1";
    const auto ic = experiment::identifier_config(cfg, d, Method::RsmS);
    CHECK(ic.signs(5) == std::vector<int>{1, 1, -1});
    cfg.signs = "a1=+1,b1=-1";
    CHECK_THROWS_AS(experiment::identifier_config(cfg, d, Method::RsmS), ConfigError);
    cfg.signs = "from-truth";
    const auto truth = experiment::identifier_config(cfg, d, Method::RsmS);
    CHECK(truth.signs(1) == std::vector<int>{1, 1, -1});
}

TEST_CASE("compare a method with itself") {
    auto cfg = experiment::preset("example1");
    cfg.samples = 300;
    const auto d = experiment::make_dataset(cfg);
    const auto r = experiment::compare(cfg, d, Method::RsmM, Method::RsmM);
    CHECK(r.max_discrepancy == 0.0);
    CHECK(r.rows.size() == 299 * 3);
}

TEST_CASE("sample_steps") {
    CHECK(experiment::sample_steps(2, 1500, 3) == std::vector<long>{2, 751, 1500});
    CHECK(experiment::sample_steps(2, 4, 20) == std::vector<long>{2, 3, 4});
    CHECK(experiment::sample_steps(5, 5, 1) == std::vector<long>{5});
    CHECK(experiment::sample_steps(5, 4, 3).empty());
}

TEST_CASE("verify: zero noise has no gap, a coarse grid stays sound") {
    auto cfg = experiment::preset("zero-noise");
    const auto d = experiment::make_dataset(cfg);
    const auto r = experiment::verify(cfg, d, 101, 20);
    CHECK(r.rows.size() == 60);
    CHECK(r.max_gap <= 1e-9);
    CHECK(r.all_pass);

    auto e1 = experiment::preset("example1");
    const auto d1 = experiment::make_dataset(e1);
    const auto coarse = experiment::verify(e1, d1, 3, 10);
    const auto fine = experiment::verify(e1, d1, 21, 10);
    CHECK(coarse.all_sound);
    CHECK(coarse.max_gap >= fine.max_gap);
}

TEST_CASE("verify refuses oversized grids before any work") {
    auto cfg = experiment::preset("example1");
    const auto d = experiment::make_dataset(cfg);
    CHECK_THROWS_AS(experiment::verify(cfg, d, 4001, 1), OracleBudgetExceeded);
}

TEST_CASE("cli: exit codes") {
    TempDir tmp("codes");
    const auto out = " --out " + tmp.path.string();
    CHECK(cli("simulate --preset zero-noise" + out) == 0);
    CHECK(cli("frobnicate") == 2);
    CHECK(cli("identify --preset nope" + out) == 2);
    CHECK(cli("identify --preset example1 --method rsm-x" + out) == 2);
    CHECK(cli("identify --config /nonexistent.ini" + out) == 2);
    CHECK(cli("verify --preset example1 --grid 4001" + out) == 5);

    // A dataset with an impossible output sample stops at that step.
    auto cfg = experiment::preset("example1");
    auto d = experiment::make_dataset(cfg);
    d.y[199] += 100.0;
    {
        std::ofstream f(tmp.path / "bad.csv");
        io::write_dataset_csv(f, d);
    }
    CHECK(cli("identify --preset example1 --data " + (tmp.path / "bad.csv").string() + out) == 3);

    {
        std::ofstream f(tmp.path / "broken.csv");
        f << "t,u,y,x,w,eta,zeta,theta_1,theta_2,theta_3\n1,2,3\n";
    }
    const std::string cmd = std::string(SMID_CLI_PATH) + " identify --preset example1 --data " +
                            (tmp.path / "broken.csv").string() + out + " 2> " + (tmp.path / "err.txt").string();
    const int rc = std::system(cmd.c_str());
    CHECK(WEXITSTATUS(rc) == 2);
    CHECK(slurp(tmp.path / "err.txt").find("broken.csv:2:") != std::string::npos);
}

TEST_CASE("cli: simulate then identify matches the in-memory pipeline") {
    TempDir tmp("roundtrip");
    const auto dir = tmp.path.string();
    REQUIRE(cli("simulate --preset example1 --seed 4 --out " + dir) == 0);
    REQUIRE(cli("identify --preset example1 --seed 4 --no-timing --data " + dir + "/dataset.csv --out " + dir) == 0);

    auto cfg = experiment::preset("example1");
    cfg.seed = 4;
    const auto d = experiment::make_dataset(cfg);
    const auto records = run(d, experiment::identifier_config(cfg, d, Method::RsmM));
    std::ostringstream expected;
    io::write_steps_csv(expected, records, Method::RsmM, d, false);
    CHECK(slurp(tmp.path / "steps_rsm-m.csv") == expected.str());

    const auto side = nlohmann::json::parse(slurp(tmp.path / "dataset.json"));
    CHECK(side["samples"] == 1500);
    const auto summary = nlohmann::json::parse(slurp(tmp.path / "summary_rsm-m.json"));
    CHECK(summary["containment_rate"] == 1.0);
}

TEST_CASE("cli: identical runs give identical non-timing outputs") {
    TempDir a("det_a"), b("det_b");
    for (const auto* dir : {&a, &b}) {
        const auto o = " --out " + dir->path.string();
        REQUIRE(cli("simulate --preset example1 --seed 9" + o) == 0);
        REQUIRE(cli("identify --preset example1 --seed 9 --no-timing --emit-plot-data" + o) == 0);
        REQUIRE(cli("compare --preset example1 --seed 9 --no-timing" + o) == 0);
        REQUIRE(cli("verify --preset example1 --seed 9 --grid 11 --steps 5" + o) == 0);
    }
    for (const auto* f : {"dataset.csv", "dataset.json", "steps_rsm-m.csv", "plot_rsm-m.csv", "summary_rsm-m.json", "compare.csv",
                          "compare.json", "verify.csv", "verify.json"}) {
        CAPTURE(f);
        CHECK(slurp(a.path / f) == slurp(b.path / f));
        CHECK_FALSE(slurp(a.path / f).empty());
    }
}
