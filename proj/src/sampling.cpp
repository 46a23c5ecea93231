#include "hsad/sampling.hpp"

#include <algorithm>
#include <cmath>

#include "hsad/rng.hpp"

namespace hsad {

std::vector<Eigen::VectorXd> sample(const ConstrainedZonotope& z, int count,
                                    std::uint64_t seed,
                                    const SampleOptions& options) {
  if (count < 0) throw std::invalid_argument("sample: negative count");
  if (count == 0) return {};

  auto [empty, cert] = is_empty(z, options.lp_tol);
  if (empty) throw std::invalid_argument("sample: set is empty");

  const int ng = z.num_generators();
  if (ng == 0) return std::vector<Eigen::VectorXd>(count, z.center());

  Eigen::VectorXd beta = *cert.witness_beta;
  beta = beta.cwiseMax(-1.0).cwiseMin(1.0);
  if (z.num_constraints() > 0) {
    // The witness is only as accurate as the LP that produced it (~1e-9 off
    // the constraint plane). Pull the start point onto the plane so every
    // sample is a member to machine precision, not to LP precision.
    const auto cod = z.con_matrix().completeOrthogonalDecomposition();
    for (int round = 0; round < 3; ++round) {
      beta -= cod.solve(z.con_matrix() * beta - z.con_vector());
      if (round < 2) beta = beta.cwiseMax(-1.0).cwiseMin(1.0);
    }
  }

  // Directions live in the null space of the constraint matrix so the walk
  // never leaves the constraint plane. Without constraints the whole box is
  // the domain and no basis is needed.
  Eigen::MatrixXd null_basis;
  int null_dim = ng;
  if (z.num_constraints() > 0) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(
        z.con_matrix(), Eigen::ComputeThinU | Eigen::ComputeFullV);
    const double tol = 1e-12 * std::max(1.0, svd.singularValues().size() > 0
                                                 ? svd.singularValues()(0)
                                                 : 0.0);
    int rank = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()(i) > tol) ++rank;
    null_dim = ng - rank;
    if (null_dim <= 0)
      return std::vector<Eigen::VectorXd>(count, z.point_at(beta));
    null_basis = svd.matrixV().rightCols(null_dim);
  }

  Rng rng(seed);
  std::vector<Eigen::VectorXd> points;
  points.reserve(count);

  const long burn = static_cast<long>(options.burn_in_per_generator) * ng;
  const int thin = std::max(1, options.thinning);
  long step = 0;
  while (static_cast<int>(points.size()) < count) {
    Eigen::VectorXd u;
    if (z.num_constraints() > 0) {
      u = null_basis * rng.sphere(null_dim);
    } else {
      u = rng.sphere(ng);
    }

    double t_lo = -std::numeric_limits<double>::infinity();
    double t_hi = std::numeric_limits<double>::infinity();
    for (int j = 0; j < ng; ++j) {
      if (std::abs(u(j)) < 1e-13) continue;
      const double a = (-1.0 - beta(j)) / u(j);
      const double b = (1.0 - beta(j)) / u(j);
      t_lo = std::max(t_lo, std::min(a, b));
      t_hi = std::min(t_hi, std::max(a, b));
    }
    if (std::isfinite(t_lo) && std::isfinite(t_hi)) {
      // Keep the current point inside the segment despite rounding.
      t_lo = std::min(t_lo, 0.0);
      t_hi = std::max(t_hi, 0.0);
      beta += rng.uniform(t_lo, t_hi) * u;
    }

    if (step >= burn && (step - burn) % thin == 0)
      points.push_back(z.point_at(beta));
    ++step;
  }
  return points;
}

}  // namespace hsad
