#include "hsad/attack.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <stdexcept>

namespace hsad {

namespace {

Eigen::VectorXd segment_value_at(
    const std::vector<std::pair<long, Eigen::VectorXd>>& segments, long k,
    int dim) {
  Eigen::VectorXd value = Eigen::VectorXd::Zero(dim);
  for (const auto& [start, v] : segments) {
    if (start > k) break;
    value = v;
  }
  return value;
}

constexpr double kRankTol = 1e-10;

// Orthonormal basis of the column span (empty matrix for the zero subspace).
Eigen::MatrixXd span_basis(const Eigen::MatrixXd& M) {
  if (M.cols() == 0) return Eigen::MatrixXd(M.rows(), 0);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  const double tol = kRankTol * std::max(1.0, sv.size() > 0 ? sv(0) : 0.0);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) ++rank;
  return svd.matrixU().leftCols(rank);
}

// Orthonormal basis of ker(M).
Eigen::MatrixXd kernel_basis(const Eigen::MatrixXd& M) {
  const int n = static_cast<int>(M.cols());
  if (M.rows() == 0) return Eigen::MatrixXd::Identity(n, n);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double tol = kRankTol * std::max(1.0, sv.size() > 0 ? sv(0) : 0.0);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) ++rank;
  return svd.matrixV().rightCols(n - rank);
}

// span(U) intersect span(W) via the null space of [U, -W].
Eigen::MatrixXd intersect_spans(const Eigen::MatrixXd& U,
                                const Eigen::MatrixXd& W) {
  if (U.cols() == 0 || W.cols() == 0) return Eigen::MatrixXd(U.rows(), 0);
  Eigen::MatrixXd stacked(U.rows(), U.cols() + W.cols());
  stacked << U, -W;
  Eigen::MatrixXd null = kernel_basis(stacked);
  if (null.cols() == 0) return Eigen::MatrixXd(U.rows(), 0);
  return span_basis(U * null.topRows(U.cols()));
}

// {x : A x in span(S)} = ker((I - S S') A).
Eigen::MatrixXd preimage(const Eigen::MatrixXd& A, const Eigen::MatrixXd& S) {
  const Eigen::MatrixXd P =
      Eigen::MatrixXd::Identity(A.rows(), A.rows()) - S * S.transpose();
  return kernel_basis(P * A);
}

Eigen::MatrixXd sum_spans(const Eigen::MatrixXd& U, const Eigen::MatrixXd& W) {
  Eigen::MatrixXd stacked(U.rows(), U.cols() + W.cols());
  stacked.leftCols(U.cols()) = U;
  stacked.rightCols(W.cols()) = W;
  return span_basis(stacked);
}

}  // namespace

bool AttackScenario::is_attacked(int i) const {
  return std::find(attacked.begin(), attacked.end(), i) != attacked.end();
}

std::vector<ValidationIssue> validate_attack(const AttackScenario& scenario,
                                             const LssModel& model) {
  std::vector<ValidationIssue> issues;
  auto error = [&](const std::string& where, const std::string& msg) {
    issues.push_back({ValidationIssue::Severity::Error, where, msg});
  };
  for (int i : scenario.attacked) {
    if (i < 0 || i >= model.count())
      error("attack.attacked", "subsystem index out of range");
  }
  if (scenario.k_a < 0) error("attack.k_a", "attack start must be >= 0");

  auto check_segments = [&](const auto& map, const std::string& what,
                            bool input_dim) {
    for (const auto& [i, segs] : map) {
      const std::string where = "attack." + what + "[" + std::to_string(i) + "]";
      if (i < 0 || i >= model.count()) {
        error(where, "subsystem index out of range");
        continue;
      }
      if (!scenario.is_attacked(i))
        error(where, "segments given for a subsystem not in the attacked list");
      const int dim =
          input_dim ? model.subsystems[i].nu() : model.subsystems[i].nx();
      long prev = -1;
      for (const auto& [start, v] : segs) {
        if (v.size() != dim) error(where, "segment value has wrong dimension");
        if (start < scenario.k_a)
          error(where, "segment starts before the attack step");
        if (start <= prev) error(where, "segment starts must be increasing");
        prev = start;
      }
    }
  };
  check_segments(scenario.input_segments, "input_segments", true);
  check_segments(scenario.tamper_segments, "tamper_segments", false);
  if (scenario.cover == AttackScenario::Cover::Explicit &&
      scenario.tamper_segments.empty())
    issues.push_back({ValidationIssue::Severity::Warning, "attack.cover",
                      "explicit cover with no tamper segments is a no-op"});
  return issues;
}

Eigen::VectorXd input_attack_at(const AttackScenario& scenario,
                                const LssModel& model, int i, long k) {
  if (i < 0 || i >= model.count())
    throw std::invalid_argument("input_attack_at: subsystem index out of range");
  const int dim = model.subsystems[i].nu();
  if (k < scenario.k_a || !scenario.is_attacked(i))
    return Eigen::VectorXd::Zero(dim);
  auto it = scenario.input_segments.find(i);
  if (it == scenario.input_segments.end()) return Eigen::VectorXd::Zero(dim);
  return segment_value_at(it->second, k, dim);
}

Eigen::VectorXd explicit_tamper_at(const AttackScenario& scenario,
                                   const LssModel& model, int i, long k) {
  if (i < 0 || i >= model.count())
    throw std::invalid_argument("explicit_tamper_at: subsystem index out of range");
  const int dim = model.subsystems[i].nx();
  if (scenario.cover != AttackScenario::Cover::Explicit ||
      k < scenario.k_a || !scenario.is_attacked(i))
    return Eigen::VectorXd::Zero(dim);
  auto it = scenario.tamper_segments.find(i);
  if (it == scenario.tamper_segments.end()) return Eigen::VectorXd::Zero(dim);
  return segment_value_at(it->second, k, dim);
}

DeviationReplica replica_zero(const LssModel& model,
                              const std::vector<RuioDesign>& designs) {
  if (static_cast<int>(designs.size()) != model.count())
    throw std::invalid_argument("replica_zero: design list size mismatch");
  DeviationReplica r;
  for (int i = 0; i < model.count(); ++i) {
    r.dx.push_back(Eigen::VectorXd::Zero(model.subsystems[i].nx()));
    r.dxi.push_back(RuioState{Eigen::VectorXd::Zero(model.subsystems[i].nx())});
  }
  return r;
}

std::vector<Eigen::VectorXd> replica_estimates(
    const std::vector<RuioDesign>& designs, const DeviationReplica& replica) {
  std::vector<Eigen::VectorXd> out;
  out.reserve(designs.size());
  for (size_t i = 0; i < designs.size(); ++i)
    out.push_back(ruio_estimate(designs[i], replica.dxi[i], replica.dx[i]));
  return out;
}

DeviationReplica deviation_step(const LssModel& model,
                                const std::vector<ControllerConfig>& gains,
                                const std::vector<RuioDesign>& designs,
                                const DeviationReplica& replica,
                                const std::vector<Eigen::VectorXd>& a_u) {
  const int count = model.count();
  if (static_cast<int>(a_u.size()) != count)
    throw std::invalid_argument("deviation_step: attack list size mismatch");

  DeviationReplica next;
  next.dx.resize(count);
  next.dxi.resize(count);
  for (int i = 0; i < count; ++i) {
    const auto& sub = model.subsystems[i];
    const Eigen::VectorXd du = gains[i].K * replica.dx[i] + a_u[i];
    Eigen::VectorXd dd = Eigen::VectorXd::Zero(sub.nx());
    for (const auto& [j, Aij] : sub.neighbors) dd += Aij * replica.dx[j];
    next.dx[i] = sub.A * replica.dx[i] + sub.B * du + dd;
    next.dxi[i] = ruio_step(designs[i], replica.dxi[i], du, replica.dx[i]);
  }
  return next;
}

std::vector<Eigen::VectorXd> stealthy_cover(
    const AttackScenario& scenario, const LssModel& model,
    const std::vector<Eigen::VectorXd>& delta_d_hat, long k) {
  std::vector<Eigen::VectorXd> a_d;
  a_d.reserve(model.count());
  for (int i = 0; i < model.count(); ++i) {
    const int dim = model.subsystems[i].nx();
    if (scenario.cover == AttackScenario::Cover::Stealthy &&
        scenario.is_attacked(i) && k >= scenario.k_a) {
      a_d.push_back(-delta_d_hat[i]);
    } else if (scenario.cover == AttackScenario::Cover::Explicit) {
      a_d.push_back(explicit_tamper_at(scenario, model, i, k));
    } else {
      a_d.push_back(Eigen::VectorXd::Zero(dim));
    }
  }
  return a_d;
}

StealthSubspaceResult globally_stealthy_existence(
    const LssModel& model, const std::vector<ControllerConfig>& gains,
    int subsystem) {
  if (subsystem < 0 || subsystem >= model.count())
    throw std::invalid_argument(
        "globally_stealthy_existence: subsystem index out of range");
  const auto& sub = model.subsystems[subsystem];
  const int n = sub.nx();
  const Eigen::MatrixXd Acl = sub.A + sub.B * gains[subsystem].K;

  // K0: deviations invisible on every outgoing coupling block.
  std::vector<Eigen::MatrixXd> outgoing;
  int rows = 0;
  for (int j = 0; j < model.count(); ++j) {
    if (j == subsystem) continue;
    auto it = model.subsystems[j].neighbors.find(subsystem);
    if (it == model.subsystems[j].neighbors.end()) continue;
    outgoing.push_back(it->second);
    rows += static_cast<int>(it->second.rows());
  }
  Eigen::MatrixXd stacked(rows, n);
  int off = 0;
  for (const auto& Aji : outgoing) {
    stacked.middleRows(off, Aji.rows()) = Aji;
    off += static_cast<int>(Aji.rows());
  }
  Eigen::MatrixXd K0 = kernel_basis(stacked);  // identity when no outgoing

  const Eigen::MatrixXd B_span = span_basis(sub.B);

  // Largest controlled-invariant subspace inside K0:
  // V_{q+1} = K0 intersect Acl^{-1}(V_q + Im B), from V_0 = K0.
  Eigen::MatrixXd V = K0;
  for (int iter = 0; iter <= n; ++iter) {
    Eigen::MatrixXd target = sum_spans(V, B_span);
    Eigen::MatrixXd Vnext = intersect_spans(K0, preimage(Acl, target));
    if (Vnext.cols() == V.cols()) {
      V = Vnext;
      break;
    }
    V = Vnext;
  }

  // Reachable part of V* from rest: R_0 = V* intersect Im B,
  // R_{q+1} = V* intersect (Acl R_q + Im B).
  Eigen::MatrixXd R = intersect_spans(V, B_span);
  for (int iter = 0; iter <= n; ++iter) {
    Eigen::MatrixXd grown =
        intersect_spans(V, sum_spans(Eigen::MatrixXd(Acl * R), B_span));
    if (grown.cols() == R.cols()) break;
    R = grown;
  }

  StealthSubspaceResult out;
  out.stealth_basis = V;
  out.reachable_basis = R;
  out.stealth_dim = static_cast<int>(V.cols());
  out.reachable_dim = static_cast<int>(R.cols());
  out.exists = out.reachable_dim > 0;
  return out;
}

}  // namespace hsad
