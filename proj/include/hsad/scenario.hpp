#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hsad/attack.hpp"
#include "hsad/control.hpp"
#include "hsad/model.hpp"
#include "hsad/monitor.hpp"

namespace hsad {

// Configuration problem (missing field, wrong type/shape, bad value). The
// message names the offending JSON path.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Everything a run needs, parsed and shape-checked but not yet semantically
// validated (that is validate_scenario's job).
struct ScenarioConfig {
  LssModel model;
  std::vector<ControllerConfig> gains;
  std::vector<ReferenceSchedule> schedules;
  std::vector<double> alphas;
  MonitorConfig monitor;
  Eigen::VectorXd eps_bar0;      // per subsystem
  Eigen::VectorXd x0;            // stacked initial state
  AttackScenario attack;
  long horizon = 0;
  std::vector<std::pair<int, int>> projections;  // stacked coordinate pairs
  // reference hygiene thresholds (warnings only)
  long dwell_min_steps = 0;
  double ref_step_max = std::numeric_limits<double>::infinity();
};

ScenarioConfig load_scenario(const std::string& path);
ScenarioConfig parse_scenario_text(const std::string& text);

// Semantic validation: model structure, destabilizing or non-contractive
// gains, schedule shape plus dwell/step hygiene (warnings), attack shape,
// initial tracking errors versus the configured bounds, monitor knobs.
std::vector<ValidationIssue> validate_scenario(const ScenarioConfig& cfg);

bool has_errors(const std::vector<ValidationIssue>& issues);
std::string format_issues(const std::vector<ValidationIssue>& issues);

}  // namespace hsad
