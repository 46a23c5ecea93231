#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

namespace hsad {

// One LTI subsystem: x_i(k+1) = A x_i(k) + B u_i(k) + d_i(k), with the
// interconnection disturbance d_i(k) = sum over neighbors j of A_ij x_j(k).
// C/Q define the tracked output and its regulation target (C x + Q r -> 0).
struct SubsystemModel {
  std::string name;
  Eigen::MatrixXd A;  // n x n state transition
  Eigen::MatrixXd B;  // n x m input map
  Eigen::MatrixXd C;  // p x n tracked output map
  Eigen::MatrixXd Q;  // p x q regulation target map
  std::map<int, Eigen::MatrixXd> neighbors;  // j -> A_ij (n_i x n_j)

  int nx() const { return static_cast<int>(A.rows()); }
  int nu() const { return static_cast<int>(B.cols()); }
  int np() const { return static_cast<int>(C.rows()); }
  int nq() const { return static_cast<int>(Q.cols()); }
};

// The interconnected plant.
struct LssModel {
  double dt = 1.0;  // seconds per step, for reporting only
  std::vector<SubsystemModel> subsystems;

  int count() const { return static_cast<int>(subsystems.size()); }
  int total_states() const;
  int state_offset(int i) const;  // start of subsystem i in the stacked state

  // Stacked coupling matrix: block (i, j) = A_ij for j in N_i, zero elsewhere
  // (including the diagonal). Maps the stacked state to the stacked
  // disturbance d = A_c x.
  Eigen::MatrixXd coupling_matrix() const;
};

// Per-subsystem state of the plant.
struct LssState {
  std::vector<Eigen::VectorXd> x;

  Eigen::VectorXd stacked(const LssModel& model) const;
  static LssState zero(const LssModel& model);
  static LssState from_stacked(const LssModel& model, const Eigen::VectorXd& v);
};

// Attack channels: additive actuator signals a_u (enter the plant through B)
// and estimate-tamper signals a_d (added to transmitted estimates only, never
// touching the physical plant).
struct AttackSignals {
  std::vector<Eigen::VectorXd> a_u;
  std::vector<Eigen::VectorXd> a_d;

  static AttackSignals zero(const LssModel& model);
};

struct ValidationIssue {
  enum class Severity { Error, Warning };
  Severity severity = Severity::Error;
  std::string where;
  std::string message;
};

// Structural checks: dimension coherence, neighbor index sanity,
// controllability of each (A_i, B_i) pair, and the coupling kernel condition
// ker(C_i) subset of ker(A_ji) for every j that receives influence from i
// (influences invisible in the tracked output cannot be predicted or
// attributed at the supervisory level).
std::vector<ValidationIssue> validate(const LssModel& model);

// d_i = sum_j A_ij x_j for every subsystem.
std::vector<Eigen::VectorXd> coupling(const LssModel& model,
                                      const LssState& state);

// One synchronous plant step under the applied inputs (attacks, if any,
// already folded into u by the caller).
LssState step(const LssModel& model, const LssState& state,
              const std::vector<Eigen::VectorXd>& u);

}  // namespace hsad
