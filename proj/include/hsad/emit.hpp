#pragma once

#include <string>
#include <vector>

#include "hsad/simulation.hpp"

namespace hsad {

struct RunOutputs {
  std::vector<std::string> files;      // paths written, in order
  std::string summary_json;            // the summary document, also on disk
  long first_detection = -1;
  double duty_cycle = 0.0;
  double min_if = std::numeric_limits<double>::quiet_NaN();
};

// Writes timeseries.csv, detection.csv, summary.json and one
// projections_<i>_<j>.csv per requested coordinate pair into out_dir
// (created if needed). Float formatting is round-trip exact so repeated runs
// with the same seed produce byte-identical files.
RunOutputs emit(const ScenarioConfig& cfg, const RunResult& result,
                const std::string& out_dir);

// Structured debug record of a set {center, generators, con_matrix,
// con_vector} as a JSON string.
std::string debug_record(const ConstrainedZonotope& z);

}  // namespace hsad
