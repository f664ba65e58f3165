// smid: simulate LTV errors-in-variables datasets, identify parameter
// uncertainty intervals, compare RSM-M with RSM-S and certify against the
// brute-force oracle.
//
// Exit codes: 0 ok, 1 certification failed, 2 config error,
// 3 empty feasible parameter set, 4 solver failure, 5 oracle budget exceeded.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "smid/errors.hpp"
#include "smid/experiment.hpp"
#include "smid/io.hpp"

namespace fs = std::filesystem;
using namespace smid;

namespace {

enum ExitCode { kOk = 0, kCertificationFailed = 1, kConfigError = 2, kEmptyFps = 3, kSolverFailure = 4, kOracleBudget = 5 };

struct CommonOptions {
    std::string config_path;
    std::string preset_name;
    std::optional<std::uint64_t> seed;
    std::string out_dir = "out";
    std::string method;
    bool emit_plot_data = false;
    bool no_timing = false;
    std::string data_path;
    std::string signs;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool with_data) {
    cmd->add_option("--config", o.config_path, "Experiment INI file");
    cmd->add_option("--preset", o.preset_name, "Built-in experiment (example1, example1-low, example2, example2-low, zero-noise)");
    cmd->add_option("--seed", o.seed, "Override the experiment seed");
    cmd->add_option("--out", o.out_dir, "Output directory")->capture_default_str();
    cmd->add_option("--method", o.method, "rsm-m or rsm-s");
    cmd->add_flag("--emit-plot-data", o.emit_plot_data, "Write long-format CSV for plotting");
    cmd->add_flag("--no-timing", o.no_timing, "Write 0 for every timing value (for byte-identical reruns)");
    if (!with_data) return;
    cmd->add_option("--data", o.data_path, "Dataset CSV (default: simulate from the config)");
    cmd->add_option("--signs", o.signs, "Sign source for rsm-s: from-truth or a1=+1,b1=-1,...");
}

experiment::ExperimentConfig resolve_config(const CommonOptions& o) {
    if (!o.config_path.empty() && !o.preset_name.empty()) throw ConfigError("use either --config or --preset, not both");
    auto cfg = !o.config_path.empty() ? experiment::load_config(o.config_path)
                                      : experiment::preset(o.preset_name.empty() ? "example1" : o.preset_name);
    if (o.seed) cfg.seed = *o.seed;
    if (!o.method.empty()) cfg.method = parse_method(o.method);
    if (!o.signs.empty()) cfg.signs = o.signs;
    cfg.validate();
    return cfg;
}

fs::path prepare_out(const std::string& dir) {
    fs::path p(dir);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec || !fs::is_directory(p)) throw ConfigError("cannot create output directory '" + dir + "'");
    return p;
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream f(p);
    if (!f) throw ConfigError("cannot write '" + p.string() + "'");
    return f;
}

void drop_timing(RunSummary& s) {
    s.mean_step_time_us = 0.0;
    s.p99_step_time_us = 0.0;
}

Dataset obtain_dataset(const experiment::ExperimentConfig& cfg, const CommonOptions& o) {
    if (o.data_path.empty()) return experiment::make_dataset(cfg);
    std::ifstream in(o.data_path);
    if (!in) throw ConfigError("cannot open dataset '" + o.data_path + "'");
    return io::read_dataset_csv(in, cfg.order, o.data_path);
}

int cmd_simulate(const CommonOptions& o) {
    const auto cfg = resolve_config(o);
    const auto out = prepare_out(o.out_dir);
    const auto d = experiment::make_dataset(cfg);
    {
        auto f = open_out(out / "dataset.csv");
        io::write_dataset_csv(f, d);
    }
    const auto sidecar = experiment::dataset_sidecar(cfg, d);
    open_out(out / "dataset.json") << sidecar.dump(2) << '\n';
    std::cout << "wrote " << (out / "dataset.csv").string() << " (" << d.size() << " samples, SNR_x "
              << sidecar["snr_input_db"] << " dB, SNR_w " << sidecar["snr_output_db"] << " dB)\n";
    return kOk;
}

int cmd_identify(const CommonOptions& o) {
    const auto cfg = resolve_config(o);
    const auto out = prepare_out(o.out_dir);
    const auto d = obtain_dataset(cfg, o);
    const auto ic = experiment::identifier_config(cfg, d, cfg.method);
    const auto records = run(d, ic);
    auto summary = summarize(records, d, cfg.method);
    if (o.no_timing) drop_timing(summary);

    const std::string tag = to_string(cfg.method);
    {
        auto f = open_out(out / ("steps_" + tag + ".csv"));
        io::write_steps_csv(f, records, cfg.method, d, !o.no_timing);
    }
    auto j = io::summary_json(summary);
    j["delta_eta"] = ic.noise.delta_eta;
    j["delta_zeta"] = ic.noise.delta_zeta;
    j["reference_step_time_ms"] = {{"example1", 1.5}, {"example2_rsm_s", 1.8}, {"example2_rsm_m", 2.3}};
    open_out(out / ("summary_" + tag + ".json")) << j.dump(2) << '\n';
    if (o.emit_plot_data) {
        auto f = open_out(out / ("plot_" + tag + ".csv"));
        io::write_plot_csv(f, records, d);
    }
    std::cout << tag << ": " << summary.steps << " steps, containment " << summary.containment_rate
              << ", mean step " << summary.mean_step_time_us << " us (p99 " << summary.p99_step_time_us << " us)\n";
    return kOk;
}

int cmd_compare(const CommonOptions& o, const std::string& against) {
    const auto cfg = resolve_config(o);
    const auto out = prepare_out(o.out_dir);
    const auto d = obtain_dataset(cfg, o);
    auto report = experiment::compare(cfg, d, cfg.method, parse_method(against));
    if (o.no_timing) {
        drop_timing(report.first_summary);
        drop_timing(report.second_summary);
    }
    {
        auto f = open_out(out / "compare.csv");
        experiment::write_compare_csv(f, report);
    }
    open_out(out / "compare.json") << experiment::compare_json(report).dump(2) << '\n';
    std::cout << to_string(report.first) << " vs " << to_string(report.second) << ": max endpoint discrepancy "
              << report.max_discrepancy;
    if (report.max_discrepancy > 0.0) std::cout << " (t=" << report.worst_t << ", k=" << report.worst_k + 1 << ")";
    std::cout << '\n';
    return kOk;
}

int cmd_verify(const CommonOptions& o, std::optional<int> grid, std::optional<int> steps) {
    const auto cfg = resolve_config(o);
    const auto out = prepare_out(o.out_dir);
    const auto d = obtain_dataset(cfg, o);
    const auto report = experiment::verify(cfg, d, grid.value_or(cfg.oracle_grid), steps.value_or(cfg.verify_steps));
    {
        auto f = open_out(out / "verify.csv");
        experiment::write_verify_csv(f, report);
    }
    const auto j = experiment::verify_json(report);
    open_out(out / "verify.json") << j.dump(2) << '\n';
    for (const auto& row : report.rows) {
        if (!row.pass) {
            std::cout << "t=" << row.t << " k=" << row.k + 1 << (row.sound ? "" : " UNSOUND") << " gap " << row.gap
                      << " > tolerance " << row.tolerance << '\n';
        }
    }
    std::cout << "verify: " << j["checks"] << " checks, " << j["failed"] << " failed, max gap " << report.max_gap
              << ", oracle inside relaxation: " << (report.all_sound ? "yes" : "NO") << '\n';
    return report.all_pass ? kOk : kCertificationFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Set-membership identification of LTV errors-in-variables systems"};
    app.require_subcommand(1);

    CommonOptions simulate_opts, identify_opts, compare_opts, verify_opts;
    auto* sim = app.add_subcommand("simulate", "Simulate a dataset (CSV + JSON sidecar)");
    add_common(sim, simulate_opts, false);

    auto* ident = app.add_subcommand("identify", "Run the online identifier");
    add_common(ident, identify_opts, true);

    auto* cmp = app.add_subcommand("compare", "Compare two methods step by step");
    add_common(cmp, compare_opts, true);
    std::string against = "rsm-s";
    cmp->add_option("--against", against, "Second method")->capture_default_str();

    auto* ver = app.add_subcommand("verify", "Certify RSM-M steps against the brute-force oracle");
    add_common(ver, verify_opts, true);
    std::optional<int> grid, steps;
    ver->add_option("--grid", grid, "Oracle grid points per noise dimension (odd)");
    ver->add_option("--steps", steps, "Number of sampled steps");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kConfigError;
    }

    try {
        if (*sim) return cmd_simulate(simulate_opts);
        if (*ident) return cmd_identify(identify_opts);
        if (*cmp) return cmd_compare(compare_opts, against);
        if (*ver) return cmd_verify(verify_opts, grid, steps);
    } catch (const EmptyFps& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kEmptyFps;
    } catch (const SolverFailure& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kSolverFailure;
    } catch (const OracleBudgetExceeded& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kOracleBudget;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfigError;
    }
    return kConfigError;
}
