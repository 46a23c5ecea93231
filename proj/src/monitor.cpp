#include "hsad/monitor.hpp"

#include <Eigen/SVD>
#include <stdexcept>

#include "hsad/sampling.hpp"

namespace hsad {

namespace {

// Radius bound of one block of a centered set given its mapped generators.
double block_generator_radius(const Eigen::MatrixXd& gens, int offset,
                              int rows) {
  double r = 0.0;
  for (int j = 0; j < gens.cols(); ++j)
    r += gens.block(offset, j, rows, 1).norm();
  return r;
}

}  // namespace

Monitor make_monitor(const LssModel& model,
                     const std::vector<ControllerConfig>& gains,
                     const std::vector<RegulatorSolution>& regs,
                     const std::vector<RuioDesign>& designs,
                     const MonitorConfig& cfg) {
  const int count = model.count();
  if (static_cast<int>(gains.size()) != count ||
      static_cast<int>(regs.size()) != count ||
      static_cast<int>(designs.size()) != count)
    throw std::invalid_argument("make_monitor: per-subsystem list size mismatch");

  Monitor mon;
  mon.Ac = model.coupling_matrix();
  mon.cfg = cfg;
  mon.designs = designs;
  int qtotal = 0;
  for (int i = 0; i < count; ++i) {
    mon.dims.push_back(model.subsystems[i].nx());
    mon.offsets.push_back(model.state_offset(i));
    mon.b.push_back(gains[i].b);
    mon.pi_norm.push_back(
        regs[i].Pi.size() == 0
            ? 0.0
            : Eigen::JacobiSVD<Eigen::MatrixXd>(regs[i].Pi).singularValues()(0));
    qtotal += static_cast<int>(regs[i].Pi.cols());
  }
  mon.Pi_stack = Eigen::MatrixXd::Zero(model.total_states(), qtotal);
  int qoff = 0;
  for (int i = 0; i < count; ++i) {
    mon.Pi_stack.block(mon.offsets[i], qoff, mon.dims[i], regs[i].Pi.cols()) =
        regs[i].Pi;
    qoff += static_cast<int>(regs[i].Pi.cols());
  }
  return mon;
}

MonitorState initial_monitor_state(const Monitor& mon,
                                   const Eigen::VectorXd& eps_bar0) {
  if (eps_bar0.size() != static_cast<int>(mon.dims.size()))
    throw std::invalid_argument("initial_monitor_state: eps_bar size mismatch");
  if ((eps_bar0.array() < 0.0).any())
    throw std::invalid_argument("initial_monitor_state: eps_bar must be >= 0");
  MonitorState s;
  s.eps_bar = eps_bar0;
  return s;
}

Eigen::VectorXd supervisory_estimate(const Monitor& mon,
                                     const std::vector<Eigen::VectorXd>& r) {
  Eigen::VectorXd r_stacked(mon.Pi_stack.cols());
  int off = 0;
  for (const auto& ri : r) {
    r_stacked.segment(off, ri.size()) = ri;
    off += static_cast<int>(ri.size());
  }
  if (off != mon.Pi_stack.cols())
    throw std::invalid_argument("supervisory_estimate: reference size mismatch");
  return mon.Ac * (mon.Pi_stack * r_stacked);
}

double epsilon_bound_update(double eps_bar, double b, double d_hat_s_norm,
                            double e_s_block_radius, double pi_norm,
                            const Eigen::VectorXd& r_now,
                            const Eigen::VectorXd& r_next) {
  if (eps_bar < 0.0 || b < 0.0 || d_hat_s_norm < 0.0 || e_s_block_radius < 0.0)
    throw std::invalid_argument("epsilon_bound_update: negative argument");
  return b * eps_bar + d_hat_s_norm + e_s_block_radius +
         pi_norm * (r_next - r_now).norm();
}

ConstrainedZonotope build_E(const std::vector<double>& radii,
                            const std::vector<int>& dims,
                            const BallTemplate& tpl) {
  if (radii.size() != dims.size())
    throw std::invalid_argument("build_E: radii/dims size mismatch");
  std::vector<ConstrainedZonotope> balls;
  balls.reserve(dims.size());
  for (size_t i = 0; i < dims.size(); ++i)
    balls.push_back(enclose_ball(dims[i], radii[i], tpl));
  return cartesian_product(balls);
}

ConstrainedZonotope supervisory_set(const Eigen::MatrixXd& Ac,
                                    const Eigen::VectorXd& d_hat_s,
                                    const ConstrainedZonotope& E) {
  return translate(linear_map(Ac, E), d_hat_s);
}

ConstrainedZonotope local_error_set_update(
    const std::vector<RuioDesign>& designs, const std::vector<int>& dims,
    const ConstrainedZonotope& e_local, const ConstrainedZonotope& d_sup_now,
    const ConstrainedZonotope& d_sup_next, int order_cap) {
  int n = 0;
  for (int d : dims) n += d;
  if (e_local.dim() != n || d_sup_now.dim() != n || d_sup_next.dim() != n)
    throw std::invalid_argument("local_error_set_update: dimension mismatch");

  // Stacked observer transition and the stacked (-T) * lift product. The lift
  // embeds a disturbance vector into the extended state's disturbance block,
  // so (-T_i) * lift_i = -[(-alpha I) 0 + I] ... = -I for every design; the
  // explicit product keeps the construction faithful to the design matrices.
  Eigen::MatrixXd M_stack = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd mapped_lift = Eigen::MatrixXd::Zero(n, n);
  int off = 0;
  for (size_t i = 0; i < designs.size(); ++i) {
    const int ni = dims[i];
    M_stack.block(off, off, ni, ni) = designs[i].M;
    Eigen::MatrixXd lift = Eigen::MatrixXd::Zero(2 * ni, ni);
    lift.bottomRows(ni) = Eigen::MatrixXd::Identity(ni, ni);
    mapped_lift.block(off, off, ni, ni) = -designs[i].T * lift;
    off += ni;
  }

  ConstrainedZonotope dbar = minkowski_sum(d_sup_now, negate(d_sup_next));
  ConstrainedZonotope increment = linear_map(mapped_lift, dbar);
  ConstrainedZonotope next =
      minkowski_sum(linear_map(M_stack, e_local), increment);
  return reduce_order(next, order_cap);
}

ConstrainedZonotope local_set(const Eigen::VectorXd& d_hat_la,
                              const ConstrainedZonotope& e_local) {
  return translate(e_local, d_hat_la);
}

DetectionRecord detect(long k, const ConstrainedZonotope& d_local,
                       const ConstrainedZonotope& d_sup, double lp_tol) {
  DetectionRecord rec;
  rec.k = k;
  ConstrainedZonotope inter = intersect(d_local, d_sup);
  auto [empty, cert] = is_empty(inter, lp_tol);
  rec.empty = empty;
  rec.certificate = cert;
  if (!empty && cert.witness_beta)
    rec.witness = inter.point_at(*cert.witness_beta);
  return rec;
}

double intersection_fraction(const ConstrainedZonotope& d_local,
                             const ConstrainedZonotope& d_sup,
                             const ConstrainedZonotope& intersection,
                             int samples, std::uint64_t seed, double lp_tol) {
  if (samples <= 0)
    throw std::invalid_argument("intersection_fraction: samples must be positive");
  if (is_empty(intersection, lp_tol).first) return 0.0;

  const auto count_inside = [&](const ConstrainedZonotope& from,
                                const ConstrainedZonotope& other,
                                std::uint64_t s) {
    int inside = 0;
    for (const auto& p : sample(from, samples, s)) {
      if (contains(other, p, lp_tol).first) ++inside;
    }
    return static_cast<double>(inside) / samples;
  };
  const double f_local =
      count_inside(d_local, d_sup, seed);
  const double f_sup =
      count_inside(d_sup, d_local, seed ^ 0x9e3779b97f4a7c15ULL);
  return std::max(f_local, f_sup);
}

MonitorStepResult monitor_step(const Monitor& mon, MonitorState& state, long k,
                               const std::vector<Eigen::VectorXd>& r_now,
                               const std::vector<Eigen::VectorXd>& r_next,
                               const Eigen::VectorXd& d_hat_la) {
  const int count = static_cast<int>(mon.dims.size());
  const double c = mon.cfg.safety_factor;

  MonitorStepResult out;
  out.d_hat_s = supervisory_estimate(mon, r_now);

  std::vector<double> radii_now(count);
  for (int i = 0; i < count; ++i) radii_now[i] = c * state.eps_bar(i);
  ConstrainedZonotope E_now =
      build_E(radii_now, mon.dims, mon.cfg.ball_template);
  out.d_sup = supervisory_set(mon.Ac, out.d_hat_s, E_now);

  // Norm-bound recursion with reference lookahead. The coupling term uses the
  // blocks of the mapped enclosure A_c E (or of E itself under the
  // alternative reading).
  Eigen::MatrixXd term_gens = mon.cfg.es_term_unmapped
                                  ? E_now.generators()
                                  : Eigen::MatrixXd(mon.Ac * E_now.generators());
  Eigen::VectorXd eps_next(count);
  for (int i = 0; i < count; ++i) {
    const double dsn =
        out.d_hat_s.segment(mon.offsets[i], mon.dims[i]).norm();
    const double block_radius =
        block_generator_radius(term_gens, mon.offsets[i], mon.dims[i]);
    eps_next(i) = epsilon_bound_update(state.eps_bar(i), mon.b[i], dsn,
                                       block_radius, mon.pi_norm[i], r_now[i],
                                       r_next[i]);
  }

  Eigen::VectorXd d_hat_s_next = supervisory_estimate(mon, r_next);
  std::vector<double> radii_next(count);
  for (int i = 0; i < count; ++i) radii_next[i] = c * eps_next(i);
  ConstrainedZonotope E_next =
      build_E(radii_next, mon.dims, mon.cfg.ball_template);
  out.d_sup_next = supervisory_set(mon.Ac, d_hat_s_next, E_next);

  if (!state.e_local_ready) {
    state.e_local = out.d_sup;
    state.e_local_ready = true;
  }

  out.d_local = local_set(d_hat_la, state.e_local);
  out.record = detect(k, out.d_local, out.d_sup, mon.cfg.lp_tol);
  if (mon.cfg.compute_if) {
    if (out.record.empty) {
      out.record.i_f = 0.0;
    } else {
      ConstrainedZonotope inter = intersect(out.d_local, out.d_sup);
      out.record.i_f = intersection_fraction(
          out.d_local, out.d_sup, inter, mon.cfg.if_samples,
          mon.cfg.seed + 1000003ULL * static_cast<std::uint64_t>(k),
          mon.cfg.lp_tol);
    }
  }

  state.e_local =
      local_error_set_update(mon.designs, mon.dims, state.e_local, out.d_sup,
                             out.d_sup_next, mon.cfg.order_cap);
  state.eps_bar = eps_next;
  return out;
}

}  // namespace hsad
