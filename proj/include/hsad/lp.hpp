#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>

namespace hsad {

// Thrown when a numerical routine cannot certify its result (simplex stall,
// unresolvable ill-conditioning). Deliberately distinct from any "empty set"
// or "infeasible" outcome, which are ordinary return values.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class LpStatus { Optimal, Infeasible, Unbounded, Stalled };

struct LpSolution {
  LpStatus status = LpStatus::Stalled;
  Eigen::VectorXd x;        // optimizer when Optimal, otherwise last iterate
  double objective = 0.0;   // cost at x when Optimal
};

// Minimize cost'x subject to E x = f and lo <= x <= hi, elementwise.
// Upper bounds may be +infinity; lower bounds must be finite.
// Dense bounded-variable two-phase simplex, Dantzig pricing with a Bland
// fallback once pivoting stalls.
LpSolution solve_lp(const Eigen::VectorXd& cost, const Eigen::MatrixXd& E,
                    const Eigen::VectorXd& f, const Eigen::VectorXd& lo,
                    const Eigen::VectorXd& hi);

// Phase-1 only: any point with E x = f, lo <= x <= hi, or nullopt.
std::optional<Eigen::VectorXd> feasible_point(const Eigen::MatrixXd& E,
                                              const Eigen::VectorXd& f,
                                              const Eigen::VectorXd& lo,
                                              const Eigen::VectorXd& hi);

struct InfNormResult {
  bool feasible = false;     // does A beta = b admit any solution
  bool within_unit_box = false;  // min ||beta||_inf <= 1 + tol
  double objective = std::numeric_limits<double>::infinity();  // min ||beta||_inf
  Eigen::VectorXd beta;      // witness attaining objective (up to ~1e-9)
};

// Minimize ||beta||_inf subject to A beta = b. The unit-box decision
// (objective <= 1 + tol) is made by one exact feasibility solve at bounds
// +-(1 + tol); the objective value itself is then refined by bisection.
InfNormResult min_inf_norm(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                           double tol);

// Decision-only variant: is there beta with A beta = b, ||beta||_inf <= 1+tol?
// Cheap least-squares shortcut first, feasibility LP only when inconclusive.
// Returns the witness when the answer is yes.
std::optional<Eigen::VectorXd> solve_in_unit_box(const Eigen::MatrixXd& A,
                                                 const Eigen::VectorXd& b,
                                                 double tol);

}  // namespace hsad
