#include "hsad/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace hsad {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-9;
constexpr int kStallLimit = 60;

enum class VarState { Basic, AtLower, AtUpper };

// Dense tableau simplex over bounded variables. The tableau holds B^{-1}[E S]
// where S carries the phase-1 artificial columns; basic variable values are
// tracked incrementally and re-solved from the original system on exit.
class BoundedSimplex {
 public:
  BoundedSimplex(const Eigen::MatrixXd& E, const Eigen::VectorXd& f,
                 const Eigen::VectorXd& lo, const Eigen::VectorXd& hi)
      : m_(static_cast<int>(E.rows())),
        n_(static_cast<int>(E.cols())),
        total_(n_ + m_),
        E_(E),
        f_(f),
        lo_(total_),
        hi_(total_),
        state_(total_, VarState::AtLower),
        tableau_(m_, total_),
        basis_(m_),
        xb_(m_),
        art_sign_(m_) {
    lo_.head(n_) = lo;
    hi_.head(n_) = hi;
    lo_.tail(m_).setZero();
    hi_.tail(m_).setConstant(kInf);

    // Structural variables start at their lower bound; artificials absorb the
    // residual with a +-1 column so the starting basis is the identity.
    Eigen::VectorXd residual = f_ - E_ * lo;
    for (int i = 0; i < m_; ++i) {
      art_sign_(i) = residual(i) >= 0.0 ? 1.0 : -1.0;
      tableau_.row(i).head(n_) = art_sign_(i) * E_.row(i);
      tableau_.row(i).tail(m_).setZero();
      tableau_(i, n_ + i) = 1.0;
      basis_(i) = n_ + i;
      xb_(i) = std::abs(residual(i));
      state_[n_ + i] = VarState::Basic;
    }
  }

  // Runs the simplex for the given cost over all total_ variables.
  LpStatus run(const Eigen::VectorXd& cost) {
    const long max_iters = 1000 + 60L * (total_ + m_);
    bool bland = false;
    int stall = 0;
    for (long iter = 0; iter < max_iters; ++iter) {
      // Reduced costs z_j = cost_j - cost_B' * tableau_j.
      Eigen::VectorXd cost_b(m_);
      for (int i = 0; i < m_; ++i) cost_b(i) = cost(basis_(i));
      Eigen::VectorXd z = cost - tableau_.transpose() * cost_b;

      int enter = -1;
      double best = kCostTol;
      for (int j = 0; j < total_; ++j) {
        if (state_[j] == VarState::Basic) continue;
        if (hi_(j) - lo_(j) <= 0.0) continue;  // fixed variable
        double viol = 0.0;
        if (state_[j] == VarState::AtLower && z(j) < -kCostTol) viol = -z(j);
        if (state_[j] == VarState::AtUpper && z(j) > kCostTol) viol = z(j);
        if (viol <= 0.0) continue;
        if (bland) {
          enter = j;
          break;
        }
        if (viol > best) {
          best = viol;
          enter = j;
        }
      }
      if (enter < 0) return LpStatus::Optimal;

      const double sigma = state_[enter] == VarState::AtLower ? 1.0 : -1.0;
      Eigen::VectorXd dir = tableau_.col(enter);

      // Ratio test: entering moves by delta >= 0, basic values move at rate
      // -sigma*dir. Ties are broken by pivot magnitude for stability.
      double delta = hi_(enter) - lo_(enter);  // bound flip distance
      int leave = -1;
      double leave_pivot = 0.0;
      bool leave_to_upper = false;
      for (int i = 0; i < m_; ++i) {
        const double rate = sigma * dir(i);
        double limit = kInf;
        bool to_upper = false;
        if (rate > kPivotTol) {
          limit = (xb_(i) - lo_(basis_(i))) / rate;
        } else if (rate < -kPivotTol && hi_(basis_(i)) < kInf) {
          limit = (xb_(i) - hi_(basis_(i))) / rate;
          to_upper = true;
        } else {
          continue;
        }
        limit = std::max(limit, 0.0);
        if (limit < delta - 1e-13 ||
            (limit < delta + 1e-13 &&
             (leave < 0 || std::abs(dir(i)) > std::abs(leave_pivot)))) {
          delta = limit;
          leave = i;
          leave_pivot = dir(i);
          leave_to_upper = to_upper;
        }
      }

      if (!(delta < kInf)) return LpStatus::Unbounded;

      stall = delta > 1e-12 ? 0 : stall + 1;
      if (stall > kStallLimit) bland = true;

      xb_ -= (sigma * delta) * dir;
      if (leave < 0) {
        // Pure bound flip, basis unchanged.
        state_[enter] = state_[enter] == VarState::AtLower ? VarState::AtUpper
                                                           : VarState::AtLower;
        continue;
      }

      const int leaving_var = basis_(leave);
      state_[leaving_var] = leave_to_upper ? VarState::AtUpper : VarState::AtLower;
      const double enter_value = state_[enter] == VarState::AtLower
                                     ? lo_(enter) + delta
                                     : hi_(enter) - delta;
      // Gauss-Jordan pivot on (leave, enter).
      const double piv = tableau_(leave, enter);
      if (std::abs(piv) < kPivotTol) return LpStatus::Stalled;
      tableau_.row(leave) /= piv;
      for (int i = 0; i < m_; ++i) {
        if (i == leave) continue;
        const double factor = tableau_(i, enter);
        if (factor != 0.0) tableau_.row(i) -= factor * tableau_.row(leave);
      }
      basis_(leave) = enter;
      state_[enter] = VarState::Basic;
      xb_(leave) = enter_value;
    }
    return LpStatus::Stalled;
  }

  // Locks all artificial variables at zero ahead of phase 2.
  void fix_artificials() {
    for (int j = n_; j < total_; ++j) hi_(j) = 0.0;
  }

  double artificial_mass() const {
    double mass = 0.0;
    for (int i = 0; i < m_; ++i)
      if (basis_(i) >= n_) mass += std::abs(xb_(i));
    return mass;
  }

  // Re-solves the basic values against the original system to shed pivot
  // drift, then assembles the full structural solution.
  Eigen::VectorXd extract(double* residual_out) const {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(total_);
    for (int j = 0; j < total_; ++j) {
      if (state_[j] == VarState::AtLower) x(j) = lo_(j);
      else if (state_[j] == VarState::AtUpper) x(j) = hi_(j);
    }
    Eigen::MatrixXd basis_cols(m_, m_);
    for (int i = 0; i < m_; ++i) basis_cols.col(i) = column(basis_(i));
    Eigen::VectorXd rhs = f_;
    for (int j = 0; j < total_; ++j) {
      if (state_[j] != VarState::Basic && x(j) != 0.0) rhs -= x(j) * column(j);
    }
    Eigen::VectorXd vb = basis_cols.colPivHouseholderQr().solve(rhs);
    for (int i = 0; i < m_; ++i) x(basis_(i)) = vb(i);
    if (residual_out) {
      Eigen::VectorXd full = -f_;
      for (int j = 0; j < total_; ++j)
        if (x(j) != 0.0) full += x(j) * column(j);
      *residual_out = full.lpNorm<Eigen::Infinity>();
    }
    return x.head(n_);
  }

 private:
  Eigen::VectorXd column(int j) const {
    if (j < n_) return E_.col(j);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(m_);
    e(j - n_) = art_sign_(j - n_);
    return e;
  }

  int m_, n_, total_;
  Eigen::MatrixXd E_;
  Eigen::VectorXd f_;
  Eigen::VectorXd lo_, hi_;
  std::vector<VarState> state_;
  Eigen::MatrixXd tableau_;
  Eigen::VectorXi basis_;
  Eigen::VectorXd xb_;
  Eigen::VectorXd art_sign_;
};

void check_bounds(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  for (int j = 0; j < lo.size(); ++j) {
    if (!std::isfinite(lo(j)))
      throw std::invalid_argument("solve_lp: lower bounds must be finite");
    if (hi(j) < lo(j))
      throw std::invalid_argument("solve_lp: upper bound below lower bound");
  }
}

}  // namespace

LpSolution solve_lp(const Eigen::VectorXd& cost, const Eigen::MatrixXd& E,
                    const Eigen::VectorXd& f, const Eigen::VectorXd& lo,
                    const Eigen::VectorXd& hi) {
  const int m = static_cast<int>(E.rows());
  const int n = static_cast<int>(E.cols());
  if (cost.size() != n || lo.size() != n || hi.size() != n || f.size() != m)
    throw std::invalid_argument("solve_lp: inconsistent dimensions");
  check_bounds(lo, hi);

  LpSolution out;
  if (m == 0) {
    // Box-only problem: optimize each coordinate independently.
    out.x.resize(n);
    for (int j = 0; j < n; ++j) {
      if (cost(j) > 0.0) {
        out.x(j) = lo(j);
      } else if (cost(j) < 0.0) {
        if (!std::isfinite(hi(j))) {
          out.status = LpStatus::Unbounded;
          return out;
        }
        out.x(j) = hi(j);
      } else {
        out.x(j) = lo(j);
      }
    }
    out.status = LpStatus::Optimal;
    out.objective = cost.dot(out.x);
    return out;
  }

  BoundedSimplex simplex(E, f, lo, hi);

  Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(n + m);
  phase1.tail(m).setOnes();
  LpStatus st = simplex.run(phase1);
  if (st == LpStatus::Stalled) {
    out.status = LpStatus::Stalled;
    return out;
  }
  const double feas_tol = 1e-9 * (1.0 + f.lpNorm<Eigen::Infinity>());
  if (simplex.artificial_mass() > feas_tol) {
    out.status = LpStatus::Infeasible;
    return out;
  }
  simplex.fix_artificials();

  Eigen::VectorXd phase2 = Eigen::VectorXd::Zero(n + m);
  phase2.head(n) = cost;
  st = simplex.run(phase2);
  if (st == LpStatus::Stalled || st == LpStatus::Unbounded) {
    out.status = st;
    return out;
  }

  double residual = 0.0;
  out.x = simplex.extract(&residual);
  if (residual > 1e-7 * (1.0 + f.lpNorm<Eigen::Infinity>())) {
    out.status = LpStatus::Stalled;
    return out;
  }
  out.status = LpStatus::Optimal;
  out.objective = cost.dot(out.x);
  return out;
}

std::optional<Eigen::VectorXd> feasible_point(const Eigen::MatrixXd& E,
                                              const Eigen::VectorXd& f,
                                              const Eigen::VectorXd& lo,
                                              const Eigen::VectorXd& hi) {
  LpSolution sol = solve_lp(Eigen::VectorXd::Zero(E.cols()), E, f, lo, hi);
  if (sol.status == LpStatus::Optimal) return sol.x;
  if (sol.status == LpStatus::Infeasible) return std::nullopt;
  throw NumericalError("feasible_point: simplex failed to certify a result");
}

std::optional<Eigen::VectorXd> solve_in_unit_box(const Eigen::MatrixXd& A,
                                                 const Eigen::VectorXd& b,
                                                 double tol) {
  const int n = static_cast<int>(A.cols());
  const double box = 1.0 + tol;
  if (n == 0) {
    if (b.size() == 0 || b.lpNorm<Eigen::Infinity>() <= 1e-12 * (1.0 + b.lpNorm<Eigen::Infinity>()))
      return Eigen::VectorXd(0);
    return std::nullopt;
  }
  // Least-squares shortcut: the minimum-2-norm solution often already sits in
  // the box, resolving the decision without a simplex run.
  Eigen::VectorXd beta_ls = A.completeOrthogonalDecomposition().solve(b);
  const double scale = 1.0 + b.lpNorm<Eigen::Infinity>();
  if ((A * beta_ls - b).lpNorm<Eigen::Infinity>() <= 1e-10 * scale &&
      beta_ls.lpNorm<Eigen::Infinity>() <= box) {
    return beta_ls;
  }
  return feasible_point(A, b, Eigen::VectorXd::Constant(n, -box),
                        Eigen::VectorXd::Constant(n, box));
}

InfNormResult min_inf_norm(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                           double tol) {
  const int n = static_cast<int>(A.cols());
  InfNormResult res;
  const double scale = 1.0 + b.lpNorm<Eigen::Infinity>();

  if (n == 0) {
    res.feasible = b.size() == 0 || b.lpNorm<Eigen::Infinity>() <= 1e-12 * scale;
    if (res.feasible) {
      res.objective = 0.0;
      res.within_unit_box = true;
      res.beta = Eigen::VectorXd(0);
    }
    return res;
  }

  // Consistency and an upper bound for the bisection come from least squares.
  Eigen::VectorXd beta_ls = A.completeOrthogonalDecomposition().solve(b);
  if ((A * beta_ls - b).lpNorm<Eigen::Infinity>() > 1e-9 * scale) {
    return res;  // system has no solution at all
  }
  res.feasible = true;

  auto try_box = [&](double t) -> std::optional<Eigen::VectorXd> {
    return feasible_point(A, b, Eigen::VectorXd::Constant(n, -t),
                          Eigen::VectorXd::Constant(n, t));
  };

  double hi = beta_ls.lpNorm<Eigen::Infinity>();
  Eigen::VectorXd witness = beta_ls;
  const double threshold = 1.0 + tol;
  if (hi <= threshold) {
    res.within_unit_box = true;
  } else {
    // The exact unit-box decision the emptiness threshold is defined by.
    auto at_threshold = try_box(threshold);
    if (at_threshold) {
      res.within_unit_box = true;
      witness = *at_threshold;
      hi = threshold;
    }
  }

  double lo = res.within_unit_box ? 0.0 : threshold;
  for (int iter = 0; iter < 50 && hi - lo > 1e-9 * std::max(1.0, hi); ++iter) {
    const double mid = 0.5 * (lo + hi);
    auto pt = try_box(mid);
    if (pt) {
      hi = mid;
      witness = *pt;
    } else {
      lo = mid;
    }
  }
  res.objective = hi;
  res.beta = witness;
  return res;
}

}  // namespace hsad
