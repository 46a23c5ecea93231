#pragma once

#include <cstdint>
#include <vector>

#include "hsad/constrained_zonotope.hpp"

namespace hsad {

struct SampleOptions {
  int burn_in_per_generator = 50;
  int thinning = 5;
  double lp_tol = 1e-9;
};

// Approximately uniform samples from a nonempty set, by hit-and-run over the
// feasible beta-polytope (the unit box sliced by the constraint plane). The
// walk starts from the emptiness-check witness; directions are drawn on the
// sphere of the constraint null space so every move stays on A*beta = b
// exactly. Deterministic for a fixed seed. Throws std::invalid_argument when
// the set is empty.
std::vector<Eigen::VectorXd> sample(const ConstrainedZonotope& z, int count,
                                    std::uint64_t seed,
                                    const SampleOptions& options = {});

}  // namespace hsad
