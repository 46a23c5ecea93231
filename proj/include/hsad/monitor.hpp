#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hsad/constrained_zonotope.hpp"
#include "hsad/control.hpp"
#include "hsad/model.hpp"
#include "hsad/observer.hpp"

namespace hsad {

struct MonitorConfig {
  double lp_tol = 1e-9;
  int order_cap = 200;             // generator cap on the local error set
  BallTemplate ball_template;      // tracking-error ball enclosure shape
  double safety_factor = 1.0;      // multiplies eps_bar when building balls
  bool es_term_unmapped = false;   // alternative eps recursion reading: use
                                   // block i of E instead of block i of A_c E
  bool compute_if = true;
  int if_samples = 1000;
  std::uint64_t seed = 0;
};

// Static supervisory-side data, assembled once per scenario.
struct Monitor {
  Eigen::MatrixXd Ac;                    // stacked coupling matrix
  std::vector<int> dims;                 // n_i per subsystem
  std::vector<int> offsets;              // block starts in the stacked space
  std::vector<double> b;                 // contraction rates
  std::vector<double> pi_norm;           // ||Pi_i||_2
  Eigen::MatrixXd Pi_stack;              // block-diagonal Pi
  std::vector<RuioDesign> designs;
  MonitorConfig cfg;
};

Monitor make_monitor(const LssModel& model,
                     const std::vector<ControllerConfig>& gains,
                     const std::vector<RegulatorSolution>& regs,
                     const std::vector<RuioDesign>& designs,
                     const MonitorConfig& cfg);

// Evolving supervisory state.
struct MonitorState {
  Eigen::VectorXd eps_bar;       // per-subsystem tracking-error norm bounds
  ConstrainedZonotope e_local;   // bound on the gap between true disturbance
                                 // and the reported local estimate
  bool e_local_ready = false;    // set on the first step (seeded from D^s(0))
};

MonitorState initial_monitor_state(const Monitor& mon,
                                   const Eigen::VectorXd& eps_bar0);

struct DetectionRecord {
  long k = 0;
  bool empty = false;            // empty intersection <=> attack flagged
  LpCertificate certificate;
  std::optional<Eigen::VectorXd> witness;  // a point in both sets, if any
  double i_f = std::numeric_limits<double>::quiet_NaN();  // NaN = not computed
};

// --- building blocks (each exact unless stated) ---

// Stacked predicted disturbance A_c * blockdiag(Pi) * r.
Eigen::VectorXd supervisory_estimate(const Monitor& mon,
                                     const std::vector<Eigen::VectorXd>& r);

// One step of the tracking-error norm recursion:
//   eps' = b*eps + ||d_hat_s_i|| + e_s_block_radius + ||Pi_i||*||r' - r||.
// The reference lookahead makes the bound inflate in the same step the
// tracking error jumps.
double epsilon_bound_update(double eps_bar, double b, double d_hat_s_norm,
                            double e_s_block_radius, double pi_norm,
                            const Eigen::VectorXd& r_now,
                            const Eigen::VectorXd& r_next);

// Cartesian product of per-subsystem ball enclosures with the given radii.
ConstrainedZonotope build_E(const std::vector<double>& radii,
                            const std::vector<int>& dims,
                            const BallTemplate& tpl);

// D^s = d_hat_s + A_c * E.
ConstrainedZonotope supervisory_set(const Eigen::MatrixXd& Ac,
                                    const Eigen::VectorXd& d_hat_s,
                                    const ConstrainedZonotope& E);

// E^l(k+1) = M E^l(k) + (-T) lift(D^s(k) + (-D^s(k+1))), order-reduced.
// The lift places the disturbance block of the extended state; for this
// observer family (-T)*lift is exactly -I, so the increment is the set of
// possible one-step disturbance changes.
ConstrainedZonotope local_error_set_update(
    const std::vector<RuioDesign>& designs, const std::vector<int>& dims,
    const ConstrainedZonotope& e_local, const ConstrainedZonotope& d_sup_now,
    const ConstrainedZonotope& d_sup_next, int order_cap);

// D^l = d_hat_la + E^l.
ConstrainedZonotope local_set(const Eigen::VectorXd& d_hat_la,
                              const ConstrainedZonotope& e_local);

// Empty-intersection test of the two disturbance sets; the record carries the
// LP certificate and a witness point inside both sets when nonempty.
DetectionRecord detect(long k, const ConstrainedZonotope& d_local,
                       const ConstrainedZonotope& d_sup, double lp_tol = 1e-9);

// Sampling estimate of how much the sets overlap relative to the smaller one:
// max of (fraction of d_local samples inside d_sup) and vice versa. Exact 0
// when the intersection is empty; exact 1 when either set contains the other
// (every sample of the inner set hits). The precomputed intersection is used
// only as the emptiness short-circuit.
double intersection_fraction(const ConstrainedZonotope& d_local,
                             const ConstrainedZonotope& d_sup,
                             const ConstrainedZonotope& intersection,
                             int samples, std::uint64_t seed,
                             double lp_tol = 1e-9);

// --- per-step orchestration (reference lookahead, bound update, detection,
//     local error set propagation), mutating the monitor state ---

struct MonitorStepResult {
  Eigen::VectorXd d_hat_s;
  ConstrainedZonotope d_sup;       // D^s(k)
  ConstrainedZonotope d_sup_next;  // D^s(k+1)
  ConstrainedZonotope d_local;     // D^l(k)
  DetectionRecord record;
};

MonitorStepResult monitor_step(const Monitor& mon, MonitorState& state, long k,
                               const std::vector<Eigen::VectorXd>& r_now,
                               const std::vector<Eigen::VectorXd>& r_next,
                               const Eigen::VectorXd& d_hat_la);

}  // namespace hsad
