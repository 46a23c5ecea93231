#pragma once

#include <Eigen/Dense>

#include "hsad/control.hpp"
#include "hsad/model.hpp"

namespace fixtures {

// Series chain of identical double-integrator-like carts: weak position
// coupling to both neighbors, one actuator per cart, tracked output is the
// position. This is the workhorse model for most tests and scenarios.
inline hsad::LssModel chain_model(int n_subsystems) {
  hsad::LssModel model;
  model.dt = 0.25;
  Eigen::MatrixXd A(2, 2), B(2, 1), C(1, 2), Q(1, 1), Aij(2, 2);
  A << 1.0, 0.25, -0.055, 0.995;
  B << 0.0, 0.05;
  C << 1.0, 0.0;
  Q << -1.0;
  Aij << 0.005, 0.0, 0.0, 0.0;
  for (int i = 0; i < n_subsystems; ++i) {
    hsad::SubsystemModel sub;
    sub.name = "cart" + std::to_string(i + 1);
    sub.A = A;
    sub.B = B;
    sub.C = C;
    sub.Q = Q;
    if (i > 0) sub.neighbors[i - 1] = Aij;
    if (i + 1 < n_subsystems) sub.neighbors[i + 1] = Aij;
    model.subsystems.push_back(sub);
  }
  return model;
}

inline hsad::ControllerConfig chain_gain() {
  hsad::ControllerConfig cfg;
  cfg.K = Eigen::MatrixXd(1, 2);
  cfg.K << -0.284, -2.100;
  cfg.b = 0.955;
  return cfg;
}

// Two-subsystem model whose first member is fully actuated and has a
// one-dimensional outgoing-coupling kernel that the closed loop keeps
// invariant, so a globally stealthy attack direction exists by construction.
inline hsad::LssModel planar_pair_model() {
  hsad::LssModel model;
  model.dt = 0.25;

  hsad::SubsystemModel s1;
  s1.name = "planar";
  s1.A = Eigen::MatrixXd(2, 2);
  s1.A << 0.9, 0.2, 0.1, 0.8;
  s1.B = Eigen::MatrixXd::Identity(2, 2);
  s1.C = Eigen::MatrixXd(1, 2);
  s1.C << 1.0, 0.0;
  s1.Q = Eigen::MatrixXd(1, 1);
  s1.Q << -1.0;

  hsad::SubsystemModel s2;
  s2.name = "cart";
  s2.A = Eigen::MatrixXd(2, 2);
  s2.A << 1.0, 0.25, -0.055, 0.995;
  s2.B = Eigen::MatrixXd(2, 1);
  s2.B << 0.0, 0.05;
  s2.C = Eigen::MatrixXd(1, 2);
  s2.C << 1.0, 0.0;
  s2.Q = Eigen::MatrixXd(1, 1);
  s2.Q << -1.0;
  Eigen::MatrixXd A21(2, 2);
  A21 << 0.01, 0.0, 0.0, 0.0;
  s2.neighbors[0] = A21;

  model.subsystems.push_back(s1);
  model.subsystems.push_back(s2);
  return model;
}

// Gains for planar_pair_model: the first closed loop becomes diag(0.4, 0.5),
// which maps the coupling kernel span{e2} into itself.
inline std::vector<hsad::ControllerConfig> planar_pair_gains() {
  hsad::ControllerConfig g1;
  g1.K = Eigen::MatrixXd(2, 2);
  g1.K << -0.5, -0.2, -0.1, -0.3;
  g1.b = 0.955;
  hsad::ControllerConfig g2 = chain_gain();
  return {g1, g2};
}

}  // namespace fixtures
