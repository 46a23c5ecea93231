#pragma once

#include <vector>

#include "hsad/monitor.hpp"
#include "hsad/scenario.hpp"

namespace hsad {

// One polygon snapshot for a requested coordinate pair.
struct ProjectionFrame {
  long k = 0;
  std::pair<int, int> coords;
  std::vector<Eigen::Vector2d> local_polygon;
  std::vector<Eigen::Vector2d> sup_polygon;
};

// Everything observed at one step, before the plant advanced.
struct StepLog {
  long k = 0;
  std::vector<Eigen::VectorXd> x, r, u0, a_u, d_true, d_hat_l, d_hat_la,
      d_hat_s;
  Eigen::VectorXd eps_bar;  // bounds in force at this step
  DetectionRecord record;

  // Containment diagnostics (true disturbance versus the monitor's sets, and
  // the worst ratio of actual tracking error to its inflated bound).
  bool d_in_sup = false;
  bool d_in_local = false;
  double eps_ratio = 0.0;
};

struct RunResult {
  std::vector<StepLog> steps;
  std::vector<ProjectionFrame> projections;
  long first_detection = -1;   // step index, -1 when never
  double duty_cycle = 0.0;     // fraction of steps with empty intersection
  double min_if = std::numeric_limits<double>::quiet_NaN();
};

// Runs the local control/estimation layer and the supervisory monitor in
// lockstep over the configured horizon. Assumes the scenario has passed
// validate_scenario.
RunResult run(const ScenarioConfig& cfg);

}  // namespace hsad
