#pragma once

// CSV and JSON artifacts. Numbers use the shortest decimal form that parses
// back to the same double.

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "smid/identifier.hpp"
#include "smid/model.hpp"

namespace smid::io {

std::string format_double(double v);

/// Header: t,u,y,x,w,eta,zeta,theta_1..theta_np
void write_dataset_csv(std::ostream& os, const Dataset& d);
/// Throws ConfigError naming `source` and the offending line.
Dataset read_dataset_csv(std::istream& is, ModelOrder order, const std::string& source = "<dataset>");

/// Header: t,method,k,lower,upper,center,true_theta,step_time_us. `k` is
/// 1-based. The timing column is written as 0 when `with_timing` is false.
void write_steps_csv(std::ostream& os, const std::vector<StepRecord>& records, Method method, const Dataset& truth,
                     bool with_timing = true);

/// Long format "t,series,value" with series <param>.lower/.upper/.center/.true.
void write_plot_csv(std::ostream& os, const std::vector<StepRecord>& records, const Dataset& truth,
                    const std::string& prefix = "");

nlohmann::json summary_json(const RunSummary& s);
/// SNR values serialize as numbers, or the string "inf" for the infinite sentinel.
nlohmann::json snr_json(double snr_db);

}  // namespace smid::io
