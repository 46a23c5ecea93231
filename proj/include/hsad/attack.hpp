#pragma once

#include <Eigen/Dense>
#include <map>
#include <utility>
#include <vector>

#include "hsad/control.hpp"
#include "hsad/model.hpp"
#include "hsad/observer.hpp"

namespace hsad {

// Piecewise-constant attack signals on compromised subsystems: a_u enters the
// actuator, a_d tampers the transmitted disturbance estimate. Everything is
// zero before k_a and on subsystems outside `attacked`.
struct AttackScenario {
  enum class Cover { None, Stealthy, Explicit };

  std::vector<int> attacked;
  long k_a = 0;
  Cover cover = Cover::None;
  // subsystem -> sorted (start step, value) segments; a segment holds until
  // the next one starts.
  std::map<int, std::vector<std::pair<long, Eigen::VectorXd>>> input_segments;
  // only used with Cover::Explicit
  std::map<int, std::vector<std::pair<long, Eigen::VectorXd>>> tamper_segments;

  bool is_attacked(int i) const;
};

std::vector<ValidationIssue> validate_attack(const AttackScenario& scenario,
                                             const LssModel& model);

// Actuator signal applied to subsystem i at step k.
Eigen::VectorXd input_attack_at(const AttackScenario& scenario,
                                const LssModel& model, int i, long k);

// Explicit tamper signal (Cover::Explicit only path that yields nonzero).
Eigen::VectorXd explicit_tamper_at(const AttackScenario& scenario,
                                   const LssModel& model, int i, long k);

// The attacker's replica of the deviation system: how far the plant state and
// every local estimate have been pushed away from the nominal (attack-free)
// trajectory. Superposition of the LTI loop makes this exact, which is what
// lets the attacker cancel its own footprint from the transmitted estimate.
struct DeviationReplica {
  std::vector<Eigen::VectorXd> dx;   // per-subsystem state deviation
  std::vector<RuioState> dxi;       // per-subsystem observer deviation
};

DeviationReplica replica_zero(const LssModel& model,
                              const std::vector<RuioDesign>& designs);

// Estimate deviations at the current step (before advancing).
std::vector<Eigen::VectorXd> replica_estimates(
    const std::vector<RuioDesign>& designs, const DeviationReplica& replica);

// Advance the replica one step under the given actuator attack: the deviation
// input is K dx + a_u (feedforward cancels), the deviation output is dx.
DeviationReplica deviation_step(const LssModel& model,
                                const std::vector<ControllerConfig>& gains,
                                const std::vector<RuioDesign>& designs,
                                const DeviationReplica& replica,
                                const std::vector<Eigen::VectorXd>& a_u);

// Tamper signals for the current step under the scenario's cover policy:
// Stealthy cancels the replica's estimate deviation on attacked subsystems,
// Explicit reads the configured segments, None is all zeros.
std::vector<Eigen::VectorXd> stealthy_cover(
    const AttackScenario& scenario, const LssModel& model,
    const std::vector<Eigen::VectorXd>& delta_d_hat, long k);

// Geometric existence test for attacks invisible at every other subsystem:
// V* is the largest subspace of K0 = ker(stacked outgoing coupling blocks)
// that the closed loop can be held inside; R* is its reachable part from
// rest. A nonzero globally stealthy attack exists iff R* is nonzero.
struct StealthSubspaceResult {
  Eigen::MatrixXd stealth_basis;    // orthonormal columns spanning V*
  Eigen::MatrixXd reachable_basis;  // orthonormal columns spanning R*
  int stealth_dim = 0;
  int reachable_dim = 0;
  bool exists = false;
};

StealthSubspaceResult globally_stealthy_existence(
    const LssModel& model, const std::vector<ControllerConfig>& gains,
    int subsystem);

}  // namespace hsad
