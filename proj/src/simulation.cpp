#include "hsad/simulation.hpp"

#include <cmath>

namespace hsad {

RunResult run(const ScenarioConfig& cfg) {
  const int count = cfg.model.count();

  std::vector<RegulatorSolution> regs;
  std::vector<RuioDesign> designs;
  regs.reserve(count);
  designs.reserve(count);
  for (int i = 0; i < count; ++i) {
    const auto& sub = cfg.model.subsystems[i];
    regs.push_back(solve_regulator(
        sub, Eigen::MatrixXd::Identity(sub.nq(), sub.nq()), cfg.gains[i].K));
    designs.push_back(design_ruio(sub, cfg.alphas[i]));
  }

  Monitor mon = make_monitor(cfg.model, cfg.gains, regs, designs, cfg.monitor);
  MonitorState mstate = initial_monitor_state(mon, cfg.eps_bar0);

  LssState plant = LssState::from_stacked(cfg.model, cfg.x0);
  std::vector<RuioState> obs;
  obs.reserve(count);
  for (int i = 0; i < count; ++i)
    obs.push_back(initial_ruio_state(designs[i], plant.x[i]));
  DeviationReplica replica = replica_zero(cfg.model, designs);

  RunResult result;
  result.steps.reserve(cfg.horizon);
  long detected_steps = 0;

  for (long k = 0; k < cfg.horizon; ++k) {
    StepLog log;
    log.k = k;
    log.eps_bar = mstate.eps_bar;

    std::vector<Eigen::VectorXd> r_now(count), r_next(count), u(count);
    for (int i = 0; i < count; ++i) {
      r_now[i] = reference_at(cfg.schedules[i], k);
      r_next[i] = reference_at(cfg.schedules[i], k + 1);
      log.u0.push_back(control_law(cfg.gains[i], regs[i], plant.x[i], r_now[i]));
      log.a_u.push_back(input_attack_at(cfg.attack, cfg.model, i, k));
      u[i] = log.u0.back() + log.a_u.back();
      log.d_hat_l.push_back(ruio_estimate(designs[i], obs[i], plant.x[i]));
    }
    log.x = plant.x;
    log.r = r_now;
    log.d_true = coupling(cfg.model, plant);

    const std::vector<Eigen::VectorXd> delta_d_hat =
        replica_estimates(designs, replica);
    const std::vector<Eigen::VectorXd> a_d =
        stealthy_cover(cfg.attack, cfg.model, delta_d_hat, k);
    Eigen::VectorXd d_hat_la_stacked(cfg.model.total_states());
    for (int i = 0; i < count; ++i) {
      log.d_hat_la.push_back(transmit(log.d_hat_l[i], a_d[i]));
      d_hat_la_stacked.segment(cfg.model.state_offset(i),
                               cfg.model.subsystems[i].nx()) =
          log.d_hat_la.back();
    }

    MonitorStepResult mres =
        monitor_step(mon, mstate, k, r_now, r_next, d_hat_la_stacked);
    for (int i = 0; i < count; ++i)
      log.d_hat_s.push_back(mres.d_hat_s.segment(
          cfg.model.state_offset(i), cfg.model.subsystems[i].nx()));
    log.record = mres.record;

    // Containment diagnostics against the true disturbance and tracking error.
    Eigen::VectorXd d_stacked(cfg.model.total_states());
    for (int i = 0; i < count; ++i)
      d_stacked.segment(cfg.model.state_offset(i),
                        cfg.model.subsystems[i].nx()) = log.d_true[i];
    log.d_in_sup = contains(mres.d_sup, d_stacked, cfg.monitor.lp_tol).first;
    log.d_in_local = contains(mres.d_local, d_stacked, cfg.monitor.lp_tol).first;
    double worst = 0.0;
    for (int i = 0; i < count; ++i) {
      const double err = (plant.x[i] - regs[i].Pi * r_now[i]).norm();
      const double bound = cfg.monitor.safety_factor * log.eps_bar(i);
      if (err <= 1e-15) continue;
      worst = bound > 0.0 ? std::max(worst, err / bound)
                          : std::numeric_limits<double>::infinity();
    }
    log.eps_ratio = worst;

    for (const auto& pr : cfg.projections) {
      ProjectionFrame frame;
      frame.k = k;
      frame.coords = pr;
      frame.local_polygon = polygon_vertices(project(mres.d_local, pr));
      frame.sup_polygon = polygon_vertices(project(mres.d_sup, pr));
      result.projections.push_back(std::move(frame));
    }

    if (log.record.empty) {
      ++detected_steps;
      if (result.first_detection < 0) result.first_detection = k;
    }
    if (!std::isnan(log.record.i_f)) {
      if (std::isnan(result.min_if) || log.record.i_f < result.min_if)
        result.min_if = log.record.i_f;
    }
    result.steps.push_back(std::move(log));

    plant = step(cfg.model, plant, u);
    for (int i = 0; i < count; ++i)
      obs[i] = ruio_step(designs[i], obs[i], u[i], result.steps.back().x[i]);
    replica = deviation_step(cfg.model, cfg.gains, designs, replica,
                             result.steps.back().a_u);
  }

  result.duty_cycle =
      cfg.horizon > 0 ? static_cast<double>(detected_steps) / cfg.horizon : 0.0;
  return result;
}

}  // namespace hsad
