#pragma once

#include <Eigen/Dense>
#include <optional>
#include <utility>
#include <vector>

#include "hsad/lp.hpp"

namespace hsad {

// Certificate attached to LP-backed set queries. For emptiness checks the
// objective is the minimum attainable ||beta||_inf (refined to ~1e-9); for
// membership checks it is the inf-norm of the witness that was found.
struct LpCertificate {
  bool feasible = false;
  std::optional<Eigen::VectorXd> witness_beta;
  double objective = std::numeric_limits<double>::infinity();
};

// A constrained zonotope { c + G*beta : ||beta||_inf <= 1, A*beta = b }.
// Generator and constraint matrices may have zero columns/rows; every
// operation below is exact on the representation except where noted.
class ConstrainedZonotope {
 public:
  // Degenerate default (0-dimensional singleton) so the type is regular.
  ConstrainedZonotope();

  ConstrainedZonotope(Eigen::VectorXd center, Eigen::MatrixXd generators);
  ConstrainedZonotope(Eigen::VectorXd center, Eigen::MatrixXd generators,
                      Eigen::MatrixXd con_matrix, Eigen::VectorXd con_vector);

  static ConstrainedZonotope singleton(const Eigen::VectorXd& point);
  static ConstrainedZonotope box(const Eigen::VectorXd& center,
                                 const Eigen::VectorXd& half_widths);

  int dim() const { return static_cast<int>(center_.size()); }
  int num_generators() const { return static_cast<int>(generators_.cols()); }
  int num_constraints() const { return static_cast<int>(con_matrix_.rows()); }

  const Eigen::VectorXd& center() const { return center_; }
  const Eigen::MatrixXd& generators() const { return generators_; }
  const Eigen::MatrixXd& con_matrix() const { return con_matrix_; }
  const Eigen::VectorXd& con_vector() const { return con_vector_; }

  // c + G*beta (beta need not be feasible).
  Eigen::VectorXd point_at(const Eigen::VectorXd& beta) const;

 private:
  Eigen::VectorXd center_;
  Eigen::MatrixXd generators_;
  Eigen::MatrixXd con_matrix_;
  Eigen::VectorXd con_vector_;
};

// Exact image under x -> R*x (R may be rectangular).
ConstrainedZonotope linear_map(const Eigen::MatrixXd& R,
                               const ConstrainedZonotope& z);

// Exact translate by v.
ConstrainedZonotope translate(const ConstrainedZonotope& z,
                              const Eigen::VectorXd& v);

// Exact Minkowski sum of same-dimension sets.
ConstrainedZonotope minkowski_sum(const ConstrainedZonotope& a,
                                  const ConstrainedZonotope& b);

// Exact pointwise negation { -x : x in Z }.
ConstrainedZonotope negate(const ConstrainedZonotope& z);

// Exact product set stacking the parts' coordinates in order.
ConstrainedZonotope cartesian_product(
    const std::vector<ConstrainedZonotope>& parts);

// Exact intersection of same-dimension sets (generator-sharing construction;
// the result keeps a's generators plus zero-weight copies of b's).
ConstrainedZonotope intersect(const ConstrainedZonotope& a,
                              const ConstrainedZonotope& b);

// Exact coordinate projection onto (coords.first, coords.second).
ConstrainedZonotope project(const ConstrainedZonotope& z,
                            std::pair<int, int> coords);

// Cheap over-approximation of max ||x||_2 over the set: ||c|| + sum_j ||g_j||.
double radius_bound(const ConstrainedZonotope& z);

// Ball enclosure templates: the exact axis-aligned box, or per-coordinate-pair
// circumscribed regular zonogons with `rotations_per_pair` extra directions
// (0 extra directions reproduces the box exactly).
struct BallTemplate {
  enum class Kind { Box, Refined };
  Kind kind = Kind::Box;
  int rotations_per_pair = 2;
};

// Zonotope guaranteed to contain the Euclidean ball of the given radius.
ConstrainedZonotope enclose_ball(int dim, double radius,
                                 const BallTemplate& tpl = {});

// Emptiness via min ||beta||_inf over the constraint polytope: empty iff the
// optimum exceeds 1 + lp_tol. Certificate witness is present iff nonempty.
std::pair<bool, LpCertificate> is_empty(const ConstrainedZonotope& z,
                                        double lp_tol = 1e-9);

// Membership of a point, decided by feasibility of A*beta=b, G*beta=x-c over
// the unit box (inflated by lp_tol).
std::pair<bool, LpCertificate> contains(const ConstrainedZonotope& z,
                                        const Eigen::VectorXd& x,
                                        double lp_tol = 1e-9);

// Girard-style order reduction: replaces the smallest unconstrained generator
// columns by an interval hull until at most max_generators remain (columns
// entering the constraints are never touched, so the result may exceed the cap
// when too few columns are free). Always returns a superset.
ConstrainedZonotope reduce_order(const ConstrainedZonotope& z,
                                 int max_generators);

// Vertex list (counter-clockwise) of a 2-dimensional set. Exact for
// unconstrained zonotopes; constrained sets fall back to support-point
// sampling over a direction fan (an inner approximation of the true polygon).
std::vector<Eigen::Vector2d> polygon_vertices(const ConstrainedZonotope& z,
                                              int support_directions = 64);

}  // namespace hsad
