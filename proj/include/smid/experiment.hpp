#pragma once

// Experiment descriptions (INI files or built-in presets) and the drivers
// behind the command-line tool: simulate, identify, compare, verify.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "smid/identifier.hpp"
#include "smid/model.hpp"
#include "smid/oracle.hpp"

namespace smid::experiment {

inline constexpr int kConfigVersion = 1;

struct SnrTargets {
    double input_db = 0.0;
    double output_db = 0.0;
};

struct ExperimentConfig {
    std::string name = "custom";
    ModelOrder order{1, 0};
    std::vector<ParameterTrajectory> trajectories;
    double input_lo = -1.0;
    double input_hi = 1.0;
    long samples = 0;
    std::uint64_t seed = 1;

    // Exactly one of the two is set.
    std::optional<NoiseBounds> noise;
    std::optional<SnrTargets> snr;

    std::optional<std::vector<double>> variation;  ///< unset: derived from the trajectories
    double initial_radius = 0.5;                    ///< initial PUI = theta(0) +/- radius
    std::vector<std::string> known;                 ///< parameters whose initial PUI is the point theta(0)
    Method method = Method::RsmM;
    std::string signs = "from-truth";               ///< "from-truth" or "a1=+1,b1=-1,..."
    EmptyFpsPolicy on_empty = EmptyFpsPolicy::FailFast;

    int oracle_grid = 101;
    int verify_steps = 20;

    void validate() const;
};

std::vector<std::string> preset_names();
ExperimentConfig preset(const std::string& name);

ExperimentConfig parse_config(std::istream& is, const std::string& source = "<config>");
ExperimentConfig load_config(const std::string& path);
void write_config(std::ostream& os, const ExperimentConfig& cfg);

/// Simulates the experiment; SNR targets are converted to noise bounds from
/// the noise-free input and output first.
Dataset make_dataset(const ExperimentConfig& cfg);

/// Noise bounds used for identification: the explicit ones, or the bounds
/// implied by the SNR targets and the hidden x, w of the dataset.
NoiseBounds noise_bounds(const ExperimentConfig& cfg, const Dataset& d);

IdentifierConfig identifier_config(const ExperimentConfig& cfg, const Dataset& d, Method method);

/// Sign of the true parameters (+1 for theta >= 0). Holds its own copy of the truth.
SignSource signs_from_truth(const Dataset& d);

nlohmann::json dataset_sidecar(const ExperimentConfig& cfg, const Dataset& d);

struct CompareRow {
    long t = 0;
    int k = 0;
    Interval first;
    Interval second;
    double discrepancy = 0.0;
};

struct CompareReport {
    Method first = Method::RsmM;
    Method second = Method::RsmS;
    std::vector<CompareRow> rows;
    double max_discrepancy = 0.0;
    long worst_t = 0;
    int worst_k = 0;
    RunSummary first_summary;
    RunSummary second_summary;
};

CompareReport compare(const ExperimentConfig& cfg, const Dataset& d, Method first, Method second);
void write_compare_csv(std::ostream& os, const CompareReport& r);
nlohmann::json compare_json(const CompareReport& r);

struct VerifyRow {
    long t = 0;
    int k = 0;
    Interval oracle;
    Interval relaxed;
    double gap = 0.0;
    double tolerance = 0.0;
    bool sound = false;
    bool witnesses_ok = false;
    bool pass = false;
};

struct VerifyReport {
    int grid = 0;
    std::vector<VerifyRow> rows;
    bool all_sound = true;
    bool all_pass = true;
    double max_gap = 0.0;
};

/// Evenly spaced identified steps of an RSM-M run, `count` of them.
std::vector<long> sample_steps(long first, long last, int count);

/// Certifies `steps` sampled steps of an RSM-M run against the grid oracle.
/// Throws OracleBudgetExceeded before doing any work when a step is too large.
VerifyReport verify(const ExperimentConfig& cfg, const Dataset& d, int grid, int steps);
void write_verify_csv(std::ostream& os, const VerifyReport& r);
nlohmann::json verify_json(const VerifyReport& r);

/// Soundness slack for oracle containment.
inline constexpr double kSoundnessSlack = 1e-7;

}  // namespace smid::experiment
