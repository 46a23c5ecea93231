#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "hsad/model.hpp"

namespace hsad {

// Solution of the output-regulation equations
//   Pi S = A Pi + B Gamma,   0 = C Pi + Q,
// plus the feedforward gain L = Gamma - K Pi used by the control law
// u = K x + L r. Pi maps references to the steady state they induce.
struct RegulatorSolution {
  Eigen::MatrixXd Pi;     // n x q
  Eigen::MatrixXd Gamma;  // m x q
  Eigen::MatrixXd L;      // m x q
};

// Per-subsystem tracking controller parameters. b is the contraction rate the
// monitor assumes for the closed loop (must dominate the spectral radius).
struct ControllerConfig {
  Eigen::MatrixXd K;  // m x n state feedback
  double b = 0.0;
};

// Piecewise-constant reference: (switch step, value) entries, first step 0,
// steps strictly increasing. The value holds until the next switch.
struct ReferenceSchedule {
  std::vector<std::pair<long, Eigen::VectorXd>> entries;
};

std::vector<ValidationIssue> validate_schedule(const ReferenceSchedule& sched,
                                               int expected_dim);

Eigen::VectorXd reference_at(const ReferenceSchedule& sched, long k);

// Solves the regulator equations by Kronecker-stacked least squares over
// vec(Pi), vec(Gamma). S is the reference dynamics (identity for
// piecewise-constant references). Throws NumericalError when the equations
// have no solution to within 1e-10 relative residual.
RegulatorSolution solve_regulator(const SubsystemModel& sub,
                                  const Eigen::MatrixXd& S,
                                  const Eigen::MatrixXd& K);

// u = K x + L r.
Eigen::VectorXd control_law(const ControllerConfig& cfg,
                            const RegulatorSolution& reg,
                            const Eigen::VectorXd& x, const Eigen::VectorXd& r);

struct GainReport {
  double spectral_radius = 0.0;  // rho(A + B K)
  double induced_norm = 0.0;     // ||A + B K||_2
  bool stable = false;           // spectral_radius < 1
  bool contractive = false;      // spectral_radius <= b
  // sup over 0 <= k <= horizon of ||(A+BK)^k||_2 / b^k; values above 1 mean
  // the step-wise bound ||eps(k+1)|| <= b ||eps(k)|| + ... can be violated
  // transiently and a safety factor is needed on the monitor's error balls.
  double max_transient_ratio = 0.0;
};

GainReport validate_gain(const SubsystemModel& sub, const ControllerConfig& cfg,
                         int horizon = 200);

}  // namespace hsad
