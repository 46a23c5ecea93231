#include "hsad/constrained_zonotope.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace hsad {

namespace {

void require(bool ok, const char* message) {
  if (!ok) throw std::invalid_argument(message);
}

}  // namespace

ConstrainedZonotope::ConstrainedZonotope()
    : center_(0), generators_(0, 0), con_matrix_(0, 0), con_vector_(0) {}

ConstrainedZonotope::ConstrainedZonotope(Eigen::VectorXd center,
                                         Eigen::MatrixXd generators)
    : center_(std::move(center)),
      generators_(std::move(generators)),
      con_matrix_(0, generators_.cols()),
      con_vector_(0) {
  require(generators_.rows() == center_.size(),
          "ConstrainedZonotope: generator rows must match center dimension");
}

ConstrainedZonotope::ConstrainedZonotope(Eigen::VectorXd center,
                                         Eigen::MatrixXd generators,
                                         Eigen::MatrixXd con_matrix,
                                         Eigen::VectorXd con_vector)
    : center_(std::move(center)),
      generators_(std::move(generators)),
      con_matrix_(std::move(con_matrix)),
      con_vector_(std::move(con_vector)) {
  require(generators_.rows() == center_.size(),
          "ConstrainedZonotope: generator rows must match center dimension");
  require(con_matrix_.cols() == generators_.cols(),
          "ConstrainedZonotope: constraint columns must match generator count");
  require(con_matrix_.rows() == con_vector_.size(),
          "ConstrainedZonotope: constraint rows must match constraint vector");
}

ConstrainedZonotope ConstrainedZonotope::singleton(const Eigen::VectorXd& point) {
  return ConstrainedZonotope(point, Eigen::MatrixXd(point.size(), 0));
}

ConstrainedZonotope ConstrainedZonotope::box(const Eigen::VectorXd& center,
                                             const Eigen::VectorXd& half_widths) {
  require(center.size() == half_widths.size(),
          "box: center and half_widths must have equal dimension");
  require((half_widths.array() >= 0.0).all(),
          "box: half widths must be nonnegative");
  return ConstrainedZonotope(
      center, Eigen::MatrixXd(half_widths.asDiagonal()));
}

Eigen::VectorXd ConstrainedZonotope::point_at(const Eigen::VectorXd& beta) const {
  require(beta.size() == num_generators(),
          "point_at: beta size must match generator count");
  return center_ + generators_ * beta;
}

ConstrainedZonotope linear_map(const Eigen::MatrixXd& R,
                               const ConstrainedZonotope& z) {
  require(R.cols() == z.dim(), "linear_map: matrix columns must match set dimension");
  return ConstrainedZonotope(R * z.center(), R * z.generators(), z.con_matrix(),
                             z.con_vector());
}

ConstrainedZonotope translate(const ConstrainedZonotope& z,
                              const Eigen::VectorXd& v) {
  require(v.size() == z.dim(), "translate: vector dimension mismatch");
  return ConstrainedZonotope(z.center() + v, z.generators(), z.con_matrix(),
                             z.con_vector());
}

ConstrainedZonotope minkowski_sum(const ConstrainedZonotope& a,
                                  const ConstrainedZonotope& b) {
  require(a.dim() == b.dim(), "minkowski_sum: dimension mismatch");
  const int n = a.dim();
  const int ga = a.num_generators(), gb = b.num_generators();
  const int ca = a.num_constraints(), cb = b.num_constraints();

  Eigen::MatrixXd G(n, ga + gb);
  G.leftCols(ga) = a.generators();
  G.rightCols(gb) = b.generators();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(ca + cb, ga + gb);
  A.topLeftCorner(ca, ga) = a.con_matrix();
  A.bottomRightCorner(cb, gb) = b.con_matrix();
  Eigen::VectorXd bvec(ca + cb);
  bvec.head(ca) = a.con_vector();
  bvec.tail(cb) = b.con_vector();
  return ConstrainedZonotope(a.center() + b.center(), G, A, bvec);
}

ConstrainedZonotope negate(const ConstrainedZonotope& z) {
  return ConstrainedZonotope(-z.center(), -z.generators(), z.con_matrix(),
                             z.con_vector());
}

ConstrainedZonotope cartesian_product(
    const std::vector<ConstrainedZonotope>& parts) {
  require(!parts.empty(), "cartesian_product: empty part list");
  int n = 0, g = 0, c = 0;
  for (const auto& p : parts) {
    n += p.dim();
    g += p.num_generators();
    c += p.num_constraints();
  }
  Eigen::VectorXd center(n), bvec(c);
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n, g);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(c, g);
  int in = 0, ig = 0, ic = 0;
  for (const auto& p : parts) {
    center.segment(in, p.dim()) = p.center();
    G.block(in, ig, p.dim(), p.num_generators()) = p.generators();
    A.block(ic, ig, p.num_constraints(), p.num_generators()) = p.con_matrix();
    bvec.segment(ic, p.num_constraints()) = p.con_vector();
    in += p.dim();
    ig += p.num_generators();
    ic += p.num_constraints();
  }
  return ConstrainedZonotope(center, G, A, bvec);
}

ConstrainedZonotope intersect(const ConstrainedZonotope& a,
                              const ConstrainedZonotope& b) {
  require(a.dim() == b.dim(), "intersect: dimension mismatch");
  const int n = a.dim();
  const int ga = a.num_generators(), gb = b.num_generators();
  const int ca = a.num_constraints(), cb = b.num_constraints();

  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n, ga + gb);
  G.leftCols(ga) = a.generators();

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(ca + cb + n, ga + gb);
  A.topLeftCorner(ca, ga) = a.con_matrix();
  A.block(ca, ga, cb, gb) = b.con_matrix();
  A.bottomLeftCorner(n, ga) = a.generators();
  A.bottomRightCorner(n, gb) = -b.generators();

  Eigen::VectorXd bvec(ca + cb + n);
  bvec.head(ca) = a.con_vector();
  bvec.segment(ca, cb) = b.con_vector();
  bvec.tail(n) = b.center() - a.center();
  return ConstrainedZonotope(a.center(), G, A, bvec);
}

ConstrainedZonotope project(const ConstrainedZonotope& z,
                            std::pair<int, int> coords) {
  require(coords.first >= 0 && coords.first < z.dim() && coords.second >= 0 &&
              coords.second < z.dim(),
          "project: coordinate index out of range");
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(2, z.dim());
  R(0, coords.first) = 1.0;
  R(1, coords.second) = 1.0;
  return linear_map(R, z);
}

double radius_bound(const ConstrainedZonotope& z) {
  double r = z.center().norm();
  for (int j = 0; j < z.num_generators(); ++j) r += z.generators().col(j).norm();
  return r;
}

ConstrainedZonotope enclose_ball(int dim, double radius,
                                 const BallTemplate& tpl) {
  require(dim >= 1, "enclose_ball: dimension must be positive");
  require(radius >= 0.0, "enclose_ball: radius must be nonnegative");
  if (radius == 0.0)
    return ConstrainedZonotope::singleton(Eigen::VectorXd::Zero(dim));
  if (tpl.kind == BallTemplate::Kind::Box || tpl.rotations_per_pair <= 0 ||
      dim == 1) {
    return ConstrainedZonotope::box(Eigen::VectorXd::Zero(dim),
                                    Eigen::VectorXd::Constant(dim, radius));
  }

  // Consecutive coordinate pairs each receive m = 2 + rotations uniformly
  // spaced generator directions, scaled so the resulting regular 2m-gon
  // circumscribes the disk. Between kinks the support function
  // f(phi) = sum_t |cos(theta_t - phi)| is a single sinusoid, so its minimum
  // over the period lies at a kink phi = theta_t + pi/2; evaluating there is
  // exact. The product of per-pair disk covers contains the full ball.
  const int m = 2 + tpl.rotations_per_pair;
  std::vector<double> theta(m);
  for (int t = 0; t < m; ++t) theta[t] = std::numbers::pi * t / m;
  double support_min = std::numeric_limits<double>::infinity();
  for (int t = 0; t < m; ++t) {
    const double phi = theta[t] + std::numbers::pi / 2.0;
    double s = 0.0;
    for (int u = 0; u < m; ++u) s += std::abs(std::cos(theta[u] - phi));
    support_min = std::min(support_min, s);
  }
  const double scale = radius / support_min;

  const int pairs = dim / 2;
  const bool leftover = dim % 2 != 0;
  Eigen::MatrixXd G =
      Eigen::MatrixXd::Zero(dim, pairs * m + (leftover ? 1 : 0));
  for (int p = 0; p < pairs; ++p) {
    for (int t = 0; t < m; ++t) {
      G(2 * p, p * m + t) = scale * std::cos(theta[t]);
      G(2 * p + 1, p * m + t) = scale * std::sin(theta[t]);
    }
  }
  if (leftover) G(dim - 1, pairs * m) = radius;
  return ConstrainedZonotope(Eigen::VectorXd::Zero(dim), G);
}

std::pair<bool, LpCertificate> is_empty(const ConstrainedZonotope& z,
                                        double lp_tol) {
  LpCertificate cert;
  if (z.num_constraints() == 0) {
    cert.feasible = true;
    cert.witness_beta = Eigen::VectorXd::Zero(z.num_generators());
    cert.objective = 0.0;
    return {false, cert};
  }
  InfNormResult res = min_inf_norm(z.con_matrix(), z.con_vector(), lp_tol);
  const bool empty = !res.feasible || !res.within_unit_box;
  cert.feasible = !empty;
  cert.objective = res.objective;
  if (!empty) cert.witness_beta = res.beta;
  return {empty, cert};
}

std::pair<bool, LpCertificate> contains(const ConstrainedZonotope& z,
                                        const Eigen::VectorXd& x,
                                        double lp_tol) {
  require(x.size() == z.dim(), "contains: point dimension mismatch");
  const int rows = z.num_constraints() + z.dim();
  Eigen::MatrixXd E(rows, z.num_generators());
  E.topRows(z.num_constraints()) = z.con_matrix();
  E.bottomRows(z.dim()) = z.generators();
  Eigen::VectorXd f(rows);
  f.head(z.num_constraints()) = z.con_vector();
  f.tail(z.dim()) = x - z.center();

  LpCertificate cert;
  auto beta = solve_in_unit_box(E, f, lp_tol);
  if (beta) {
    cert.feasible = true;
    cert.witness_beta = *beta;
    cert.objective = beta->size() == 0 ? 0.0 : beta->lpNorm<Eigen::Infinity>();
  }
  return {cert.feasible, cert};
}

ConstrainedZonotope reduce_order(const ConstrainedZonotope& z,
                                 int max_generators) {
  require(max_generators >= 0, "reduce_order: cap must be nonnegative");
  const int g = z.num_generators();
  if (g <= max_generators) return z;

  std::vector<int> free_cols;
  for (int j = 0; j < g; ++j) {
    if (z.num_constraints() == 0 ||
        z.con_matrix().col(j).lpNorm<Eigen::Infinity>() == 0.0)
      free_cols.push_back(j);
  }
  // Removing k free columns and adding the interval hull costs dim columns.
  const int want = g - max_generators + z.dim();
  const int k = std::min<int>(want, static_cast<int>(free_cols.size()));
  if (k <= 0) return z;

  std::sort(free_cols.begin(), free_cols.end(), [&](int a, int b) {
    const double na = z.generators().col(a).norm();
    const double nb = z.generators().col(b).norm();
    return na != nb ? na < nb : a < b;
  });
  std::vector<bool> removed(g, false);
  for (int t = 0; t < k; ++t) removed[free_cols[t]] = true;

  Eigen::VectorXd hull = Eigen::VectorXd::Zero(z.dim());
  for (int j = 0; j < g; ++j)
    if (removed[j]) hull += z.generators().col(j).cwiseAbs();

  int hull_cols = 0;
  for (int i = 0; i < z.dim(); ++i)
    if (hull(i) > 0.0) ++hull_cols;

  const int kept = g - k;
  Eigen::MatrixXd G(z.dim(), kept + hull_cols);
  Eigen::MatrixXd A(z.num_constraints(), kept + hull_cols);
  A.setZero();
  int out = 0;
  for (int j = 0; j < g; ++j) {
    if (removed[j]) continue;
    G.col(out) = z.generators().col(j);
    if (z.num_constraints() > 0) A.col(out) = z.con_matrix().col(j);
    ++out;
  }
  for (int i = 0; i < z.dim(); ++i) {
    if (hull(i) > 0.0) {
      G.col(out).setZero();
      G(i, out) = hull(i);
      ++out;
    }
  }
  return ConstrainedZonotope(z.center(), G, A, z.con_vector());
}

std::vector<Eigen::Vector2d> polygon_vertices(const ConstrainedZonotope& z,
                                              int support_directions) {
  require(z.dim() == 2, "polygon_vertices: set must be 2-dimensional");

  if (z.num_constraints() == 0) {
    std::vector<Eigen::Vector2d> gens;
    for (int j = 0; j < z.num_generators(); ++j) {
      Eigen::Vector2d g = z.generators().col(j);
      if (g.norm() < 1e-14) continue;
      if (g.y() < 0.0 || (g.y() == 0.0 && g.x() < 0.0)) g = -g;
      gens.push_back(g);
    }
    const Eigen::Vector2d c = z.center();
    if (gens.empty()) return {c};
    std::sort(gens.begin(), gens.end(),
              [](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
                return std::atan2(a.y(), a.x()) < std::atan2(b.y(), b.x());
              });
    Eigen::Vector2d v = c;
    for (const auto& g : gens) v -= g;
    std::vector<Eigen::Vector2d> verts;
    verts.push_back(v);
    for (const auto& g : gens) {
      v += 2.0 * g;
      verts.push_back(v);
    }
    for (const auto& g : gens) {
      v -= 2.0 * g;
      if (static_cast<int>(verts.size()) < 2 * static_cast<int>(gens.size()))
        verts.push_back(v);
    }
    return verts;
  }

  // Constrained fall-back: support points over a fan of directions.
  require(support_directions >= 3, "polygon_vertices: need at least 3 directions");
  const int ng = z.num_generators();
  Eigen::VectorXd lo = Eigen::VectorXd::Constant(ng, -1.0);
  Eigen::VectorXd hi = Eigen::VectorXd::Constant(ng, 1.0);
  std::vector<Eigen::Vector2d> verts;
  for (int t = 0; t < support_directions; ++t) {
    const double ang = 2.0 * std::numbers::pi * t / support_directions;
    const Eigen::Vector2d dir(std::cos(ang), std::sin(ang));
    Eigen::VectorXd cost = -(z.generators().transpose() * dir);
    LpSolution sol = solve_lp(cost, z.con_matrix(), z.con_vector(), lo, hi);
    if (sol.status != LpStatus::Optimal) continue;
    Eigen::Vector2d p = z.center() + z.generators() * sol.x;
    if (verts.empty() || (verts.back() - p).norm() > 1e-12) verts.push_back(p);
  }
  if (verts.size() > 1 && (verts.front() - verts.back()).norm() <= 1e-12)
    verts.pop_back();
  return verts;
}

}  // namespace hsad
