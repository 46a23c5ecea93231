#include "hsad/model.hpp"

#include <Eigen/QR>
#include <stdexcept>

namespace hsad {

namespace {

int rank_of(const Eigen::MatrixXd& M) {
  if (M.rows() == 0 || M.cols() == 0) return 0;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(M);
  qr.setThreshold(1e-10);
  return static_cast<int>(qr.rank());
}

}  // namespace

int LssModel::total_states() const {
  int n = 0;
  for (const auto& s : subsystems) n += s.nx();
  return n;
}

int LssModel::state_offset(int i) const {
  if (i < 0 || i >= count())
    throw std::invalid_argument("state_offset: subsystem index out of range");
  int off = 0;
  for (int k = 0; k < i; ++k) off += subsystems[k].nx();
  return off;
}

Eigen::MatrixXd LssModel::coupling_matrix() const {
  const int n = total_states();
  Eigen::MatrixXd Ac = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < count(); ++i) {
    for (const auto& [j, Aij] : subsystems[i].neighbors) {
      Ac.block(state_offset(i), state_offset(j), subsystems[i].nx(),
               subsystems[j].nx()) = Aij;
    }
  }
  return Ac;
}

Eigen::VectorXd LssState::stacked(const LssModel& model) const {
  Eigen::VectorXd v(model.total_states());
  for (int i = 0; i < model.count(); ++i)
    v.segment(model.state_offset(i), model.subsystems[i].nx()) = x[i];
  return v;
}

LssState LssState::zero(const LssModel& model) {
  LssState s;
  for (const auto& sub : model.subsystems)
    s.x.push_back(Eigen::VectorXd::Zero(sub.nx()));
  return s;
}

LssState LssState::from_stacked(const LssModel& model,
                                const Eigen::VectorXd& v) {
  if (v.size() != model.total_states())
    throw std::invalid_argument("from_stacked: dimension mismatch");
  LssState s;
  for (int i = 0; i < model.count(); ++i)
    s.x.push_back(v.segment(model.state_offset(i), model.subsystems[i].nx()));
  return s;
}

AttackSignals AttackSignals::zero(const LssModel& model) {
  AttackSignals a;
  for (const auto& sub : model.subsystems) {
    a.a_u.push_back(Eigen::VectorXd::Zero(sub.nu()));
    a.a_d.push_back(Eigen::VectorXd::Zero(sub.nx()));
  }
  return a;
}

std::vector<ValidationIssue> validate(const LssModel& model) {
  std::vector<ValidationIssue> issues;
  auto error = [&](const std::string& where, const std::string& msg) {
    issues.push_back({ValidationIssue::Severity::Error, where, msg});
  };

  if (model.subsystems.empty()) {
    error("model", "no subsystems");
    return issues;
  }
  if (!(model.dt > 0.0)) error("model.dt", "sample time must be positive");

  for (int i = 0; i < model.count(); ++i) {
    const auto& s = model.subsystems[i];
    const std::string where = "subsystem " + std::to_string(i);
    if (s.A.rows() != s.A.cols() || s.A.rows() == 0)
      error(where + ".A", "state matrix must be square and nonempty");
    if (s.B.rows() != s.A.rows())
      error(where + ".B", "input matrix row count must match state dimension");
    if (s.C.cols() != s.A.rows())
      error(where + ".C", "output matrix column count must match state dimension");
    if (s.Q.rows() != s.C.rows())
      error(where + ".Q", "target map row count must match output dimension");

    for (const auto& [j, Aij] : s.neighbors) {
      const std::string cwhere =
          where + ".neighbors[" + std::to_string(j) + "]";
      if (j < 0 || j >= model.count()) {
        error(cwhere, "neighbor index out of range");
        continue;
      }
      if (j == i) {
        error(cwhere, "self-coupling is part of A, not the neighbor list");
        continue;
      }
      if (Aij.rows() != s.nx() || Aij.cols() != model.subsystems[j].nx())
        error(cwhere, "coupling block has wrong dimensions");
    }
  }
  if (!issues.empty()) return issues;  // structural errors mask the rest

  for (int i = 0; i < model.count(); ++i) {
    const auto& s = model.subsystems[i];
    const std::string where = "subsystem " + std::to_string(i);

    // Controllability of (A, B).
    const int n = s.nx();
    Eigen::MatrixXd ctrb(n, n * s.nu());
    Eigen::MatrixXd AkB = s.B;
    for (int k = 0; k < n; ++k) {
      ctrb.middleCols(k * s.nu(), s.nu()) = AkB;
      AkB = s.A * AkB;
    }
    if (rank_of(ctrb) < n)
      error(where, "(A, B) is not controllable");

    // Kernel condition on every block that carries influence FROM i: states
    // of i invisible in C_i x_i must not drive any neighbor.
    for (int j = 0; j < model.count(); ++j) {
      if (j == i) continue;
      auto it = model.subsystems[j].neighbors.find(i);
      if (it == model.subsystems[j].neighbors.end()) continue;
      const Eigen::MatrixXd& Aji = it->second;
      Eigen::MatrixXd stacked(s.C.rows() + Aji.rows(), s.nx());
      stacked << s.C, Aji;
      if (rank_of(stacked) > rank_of(s.C)) {
        error(where,
              "coupling into subsystem " + std::to_string(j) +
                  " acts on states outside the tracked output (kernel "
                  "condition violated)");
      }
    }
  }
  return issues;
}

std::vector<Eigen::VectorXd> coupling(const LssModel& model,
                                      const LssState& state) {
  if (static_cast<int>(state.x.size()) != model.count())
    throw std::invalid_argument("coupling: state size mismatch");
  std::vector<Eigen::VectorXd> d;
  d.reserve(model.count());
  for (int i = 0; i < model.count(); ++i) {
    Eigen::VectorXd di = Eigen::VectorXd::Zero(model.subsystems[i].nx());
    for (const auto& [j, Aij] : model.subsystems[i].neighbors)
      di += Aij * state.x[j];
    d.push_back(di);
  }
  return d;
}

LssState step(const LssModel& model, const LssState& state,
              const std::vector<Eigen::VectorXd>& u) {
  if (static_cast<int>(u.size()) != model.count())
    throw std::invalid_argument("step: input list size mismatch");
  std::vector<Eigen::VectorXd> d = coupling(model, state);
  LssState next;
  next.x.reserve(model.count());
  for (int i = 0; i < model.count(); ++i) {
    const auto& s = model.subsystems[i];
    if (u[i].size() != s.nu())
      throw std::invalid_argument("step: input dimension mismatch");
    next.x.push_back(s.A * state.x[i] + s.B * u[i] + d[i]);
  }
  return next;
}

}  // namespace hsad
