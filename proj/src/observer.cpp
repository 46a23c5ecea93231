#include "hsad/observer.hpp"

#include <Eigen/SVD>
#include <stdexcept>

namespace hsad {

RuioDesign design_ruio(const SubsystemModel& sub, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("design_ruio: alpha must be in (0, 1]");
  const int n = sub.nx();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);

  RuioDesign d;
  d.alpha = alpha;
  d.M = (1.0 - alpha) * I;
  d.G = -alpha * sub.B;
  d.R = alpha * ((1.0 - alpha) * I - sub.A);
  d.H = alpha * I;
  d.T.resize(n, 2 * n);
  d.T << -alpha * I, I;
  return d;
}

RuioVerification verify_design(const SubsystemModel& sub, const RuioDesign& d) {
  const int n = sub.nx();
  const int m = sub.nu();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(n, n);

  Eigen::MatrixXd Abar(2 * n, 2 * n);
  Abar << sub.A, I, Z, I;
  Eigen::MatrixXd Bbar(2 * n, m);
  Bbar << sub.B, Eigen::MatrixXd::Zero(n, m);
  Eigen::MatrixXd Cbar(n, 2 * n);
  Cbar << I, Z;
  Eigen::MatrixXd selector(n, 2 * n);
  selector << Z, I;

  RuioVerification v;
  v.m_norm = Eigen::JacobiSVD<Eigen::MatrixXd>(d.M).singularValues()(0);
  v.stability_residual = std::max(0.0, v.m_norm - 1.0);
  v.matching_residual = (d.T * Abar - d.M * d.T - d.R * Cbar).norm();
  v.selection_residual = (d.T + d.H * Cbar - selector).norm();
  v.input_residual = (d.G - d.T * Bbar).norm();
  return v;
}

Eigen::VectorXd ruio_estimate(const RuioDesign& d, const RuioState& state,
                              const Eigen::VectorXd& y) {
  if (state.xi.size() != d.M.rows() || y.size() != d.H.cols())
    throw std::invalid_argument("ruio_estimate: dimension mismatch");
  return state.xi + d.H * y;
}

RuioState ruio_step(const RuioDesign& d, const RuioState& state,
                    const Eigen::VectorXd& u, const Eigen::VectorXd& y) {
  if (state.xi.size() != d.M.rows() || u.size() != d.G.cols() ||
      y.size() != d.R.cols())
    throw std::invalid_argument("ruio_step: dimension mismatch");
  return RuioState{d.M * state.xi + d.G * u + d.R * y};
}

RuioState initial_ruio_state(const RuioDesign& d, const Eigen::VectorXd& y0) {
  if (y0.size() != d.H.cols())
    throw std::invalid_argument("initial_ruio_state: dimension mismatch");
  return RuioState{-d.H * y0};
}

Eigen::VectorXd transmit(const Eigen::VectorXd& d_hat,
                         const Eigen::VectorXd& a_d) {
  if (d_hat.size() != a_d.size())
    throw std::invalid_argument("transmit: dimension mismatch");
  return d_hat + a_d;
}

}  // namespace hsad
