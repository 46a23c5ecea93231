#include "hsad/control.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "hsad/lp.hpp"

namespace hsad {

namespace {

Eigen::MatrixXd kron(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  Eigen::MatrixXd K(A.rows() * B.rows(), A.cols() * B.cols());
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j)
      K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return K;
}

double operator_norm(const Eigen::MatrixXd& M) {
  if (M.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Eigen::MatrixXd>(M).singularValues()(0);
}

}  // namespace

std::vector<ValidationIssue> validate_schedule(const ReferenceSchedule& sched,
                                               int expected_dim) {
  std::vector<ValidationIssue> issues;
  auto error = [&](const std::string& msg) {
    issues.push_back({ValidationIssue::Severity::Error, "schedule", msg});
  };
  if (sched.entries.empty()) {
    error("schedule must have at least one entry");
    return issues;
  }
  if (sched.entries.front().first != 0)
    error("first schedule entry must be at step 0");
  for (size_t t = 0; t < sched.entries.size(); ++t) {
    if (sched.entries[t].second.size() != expected_dim)
      error("entry " + std::to_string(t) + " has wrong reference dimension");
    if (t > 0 && sched.entries[t].first <= sched.entries[t - 1].first)
      error("switch steps must be strictly increasing");
  }
  return issues;
}

Eigen::VectorXd reference_at(const ReferenceSchedule& sched, long k) {
  if (k < 0) throw std::invalid_argument("reference_at: negative step");
  if (sched.entries.empty())
    throw std::invalid_argument("reference_at: empty schedule");
  Eigen::VectorXd value = sched.entries.front().second;
  for (const auto& [step, v] : sched.entries) {
    if (step > k) break;
    value = v;
  }
  return value;
}

RegulatorSolution solve_regulator(const SubsystemModel& sub,
                                  const Eigen::MatrixXd& S,
                                  const Eigen::MatrixXd& K) {
  const int n = sub.nx(), m = sub.nu(), p = sub.np(), q = sub.nq();
  if (S.rows() != q || S.cols() != q)
    throw std::invalid_argument("solve_regulator: S must be q x q");
  if (K.rows() != m || K.cols() != n)
    throw std::invalid_argument("solve_regulator: K must be m x n");

  const Eigen::MatrixXd In = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd Iq = Eigen::MatrixXd::Identity(q, q);

  // [ S' (x) I - I (x) A,  -(I (x) B) ] [vec Pi   ]   [ 0      ]
  // [ I (x) C,              0         ] [vec Gamma] = [ -vec Q ]
  const int rows = n * q + p * q;
  const int cols = n * q + m * q;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(rows, cols);
  M.topLeftCorner(n * q, n * q) = kron(S.transpose(), In) - kron(Iq, sub.A);
  M.topRightCorner(n * q, m * q) = -kron(Iq, sub.B);
  M.bottomLeftCorner(p * q, n * q) = kron(Iq, sub.C);

  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(rows);
  rhs.tail(p * q) = -Eigen::Map<const Eigen::VectorXd>(sub.Q.data(), p * q);

  Eigen::VectorXd sol = M.completeOrthogonalDecomposition().solve(rhs);
  const double scale =
      1.0 + sub.A.norm() + sub.B.norm() + sub.C.norm() + sub.Q.norm();
  if ((M * sol - rhs).lpNorm<Eigen::Infinity>() > 1e-10 * scale)
    throw NumericalError(
        "solve_regulator: regulator equations have no solution for this "
        "(A, B, C, Q, S)");

  RegulatorSolution out;
  out.Pi = Eigen::Map<Eigen::MatrixXd>(sol.data(), n, q);
  out.Gamma = Eigen::Map<Eigen::MatrixXd>(sol.data() + n * q, m, q);
  out.L = out.Gamma - K * out.Pi;
  return out;
}

Eigen::VectorXd control_law(const ControllerConfig& cfg,
                            const RegulatorSolution& reg,
                            const Eigen::VectorXd& x,
                            const Eigen::VectorXd& r) {
  if (cfg.K.cols() != x.size())
    throw std::invalid_argument("control_law: state dimension mismatch");
  if (reg.L.cols() != r.size())
    throw std::invalid_argument("control_law: reference dimension mismatch");
  return cfg.K * x + reg.L * r;
}

GainReport validate_gain(const SubsystemModel& sub, const ControllerConfig& cfg,
                         int horizon) {
  if (cfg.K.rows() != sub.nu() || cfg.K.cols() != sub.nx())
    throw std::invalid_argument("validate_gain: K has wrong dimensions");
  const Eigen::MatrixXd Acl = sub.A + sub.B * cfg.K;

  GainReport report;
  Eigen::EigenSolver<Eigen::MatrixXd> eig(Acl);
  report.spectral_radius = eig.eigenvalues().cwiseAbs().maxCoeff();
  report.induced_norm = operator_norm(Acl);
  report.stable = report.spectral_radius < 1.0;
  report.contractive = report.spectral_radius <= cfg.b;

  double worst = 1.0;
  Eigen::MatrixXd P = Eigen::MatrixXd::Identity(sub.nx(), sub.nx());
  double bk = 1.0;
  for (int k = 1; k <= horizon; ++k) {
    P = Acl * P;
    bk *= cfg.b;
    if (bk <= 0.0) break;
    worst = std::max(worst, operator_norm(P) / bk);
  }
  report.max_transient_ratio = worst;
  return report;
}

}  // namespace hsad
