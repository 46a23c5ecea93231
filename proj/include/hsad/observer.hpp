#pragma once

#include <Eigen/Dense>

#include "hsad/model.hpp"

namespace hsad {

// Reduced unknown-input observer reconstructing the interconnection
// disturbance d_i from the subsystem's own input/output streams only:
//   xi(k+1) = M xi(k) + G u(k) + R y(k),    d_hat(k) = xi(k) + H y(k).
// The one-parameter family below (alpha in (0, 1]) satisfies the functional
// observer matching conditions on the disturbance-extended system; alpha is
// the estimator bandwidth (alpha = 1 reconstructs d with a one-step lag).
struct RuioDesign {
  Eigen::MatrixXd M;  // n x n, (1-alpha) I
  Eigen::MatrixXd G;  // n x m, -alpha B
  Eigen::MatrixXd R;  // n x n, alpha((1-alpha) I - A)
  Eigen::MatrixXd H;  // n x n, alpha I
  Eigen::MatrixXd T;  // n x 2n, [-alpha I, I]
  double alpha = 0.0;
};

struct RuioState {
  Eigen::VectorXd xi;
};

RuioDesign design_ruio(const SubsystemModel& sub, double alpha);

// Residuals of the matching conditions on the extended system
//   Abar = [[A, I], [0, I]], Bbar = [B; 0], Cbar = [I, 0], selector = [0, I]:
//   T Abar = M T + R Cbar,  T + H Cbar = selector,  G = T Bbar,  ||M|| < 1.
struct RuioVerification {
  double stability_residual = 0.0;  // max(0, ||M||_2 - 1)
  double matching_residual = 0.0;   // ||T Abar - M T - R Cbar||
  double selection_residual = 0.0;  // ||T + H Cbar - selector||
  double input_residual = 0.0;      // ||G - T Bbar||
  double m_norm = 0.0;              // ||M||_2

  double worst() const {
    return std::max(std::max(stability_residual, matching_residual),
                    std::max(selection_residual, input_residual));
  }
};

RuioVerification verify_design(const SubsystemModel& sub, const RuioDesign& d);

// Estimate at the current step, before advancing the observer.
Eigen::VectorXd ruio_estimate(const RuioDesign& d, const RuioState& state,
                              const Eigen::VectorXd& y);

// xi(k+1) from (xi(k), u(k), y(k)).
RuioState ruio_step(const RuioDesign& d, const RuioState& state,
                    const Eigen::VectorXd& u, const Eigen::VectorXd& y);

// xi(0) = -H y(0), making the initial estimate exactly zero.
RuioState initial_ruio_state(const RuioDesign& d, const Eigen::VectorXd& y0);

// What the subsystem reports upward: the estimate plus any tamper signal an
// attacker injects on the communication channel.
Eigen::VectorXd transmit(const Eigen::VectorXd& d_hat,
                         const Eigen::VectorXd& a_d);

}  // namespace hsad
