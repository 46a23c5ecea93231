#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "hsad/constrained_zonotope.hpp"
#include "hsad/control.hpp"
#include "hsad/monitor.hpp"
#include "hsad/observer.hpp"
#include "support/fixtures.hpp"

using hsad::BallTemplate;
using hsad::ConstrainedZonotope;
using hsad::Monitor;
using hsad::MonitorConfig;
using hsad::MonitorState;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

struct ChainSetup {
  hsad::LssModel model;
  std::vector<hsad::ControllerConfig> gains;
  std::vector<hsad::RegulatorSolution> regs;
  std::vector<hsad::RuioDesign> designs;
};

ChainSetup chain_setup(int count, double alpha = 0.6) {
  ChainSetup s;
  s.model = fixtures::chain_model(count);
  for (int i = 0; i < count; ++i) {
    s.gains.push_back(fixtures::chain_gain());
    s.regs.push_back(hsad::solve_regulator(s.model.subsystems[i],
                                           Eigen::MatrixXd::Identity(1, 1),
                                           s.gains.back().K));
    s.designs.push_back(hsad::design_ruio(s.model.subsystems[i], alpha));
  }
  return s;
}

std::vector<Eigen::VectorXd> scalar_refs(std::initializer_list<double> xs) {
  std::vector<Eigen::VectorXd> r;
  for (double x : xs) r.push_back(vec({x}));
  return r;
}

}  // namespace

TEST_CASE("make_monitor assembles the stacked supervisory data") {
  auto s = chain_setup(4);
  MonitorConfig cfg;
  const Monitor mon = hsad::make_monitor(s.model, s.gains, s.regs, s.designs, cfg);

  CHECK(mon.dims == std::vector<int>({2, 2, 2, 2}));
  CHECK(mon.offsets == std::vector<int>({0, 2, 4, 6}));
  for (double bi : mon.b) CHECK(bi == doctest::Approx(0.955));
  // Pi = [1; 0] for every cart, so its largest singular value is 1.
  for (double p : mon.pi_norm) CHECK(p == doctest::Approx(1.0).epsilon(1e-12));

  CHECK(mon.Ac.isApprox(s.model.coupling_matrix(), 1e-15));
  REQUIRE(mon.Pi_stack.rows() == 8);
  REQUIRE(mon.Pi_stack.cols() == 4);
  Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(8, 4);
  for (int i = 0; i < 4; ++i) expected(2 * i, i) = 1.0;
  CHECK(mon.Pi_stack.isApprox(expected, 1e-12));

  auto short_gains = s.gains;
  short_gains.pop_back();
  CHECK_THROWS_AS(
      hsad::make_monitor(s.model, short_gains, s.regs, s.designs, cfg),
      std::invalid_argument);
}

TEST_CASE("initial_monitor_state validates the bound vector") {
  auto s = chain_setup(2);
  const Monitor mon =
      hsad::make_monitor(s.model, s.gains, s.regs, s.designs, MonitorConfig{});
  CHECK_THROWS_AS(hsad::initial_monitor_state(mon, vec({0.1})),
                  std::invalid_argument);
  CHECK_THROWS_AS(hsad::initial_monitor_state(mon, vec({0.1, -0.2})),
                  std::invalid_argument);
  const MonitorState st = hsad::initial_monitor_state(mon, vec({0.1, 0.2}));
  CHECK(st.eps_bar(1) == 0.2);
  CHECK_FALSE(st.e_local_ready);
}

TEST_CASE("supervisory_estimate is the coupling image of the tracked targets") {
  auto s = chain_setup(4);
  const Monitor mon =
      hsad::make_monitor(s.model, s.gains, s.regs, s.designs, MonitorConfig{});

  // Each cart settles at state (r_i, 0), so the disturbance seen by cart i is
  // 0.005 * (sum of neighbour targets) in its first coordinate only.
  const Eigen::VectorXd d =
      hsad::supervisory_estimate(mon, scalar_refs({1.0, 2.0, -1.0, 0.5}));
  REQUIRE(d.size() == 8);
  CHECK(d(0) == doctest::Approx(0.005 * 2.0).epsilon(1e-12));
  CHECK(d(2) == doctest::Approx(0.005 * (1.0 - 1.0)).epsilon(1e-12));
  CHECK(d(4) == doctest::Approx(0.005 * (2.0 + 0.5)).epsilon(1e-12));
  CHECK(d(6) == doctest::Approx(0.005 * -1.0).epsilon(1e-12));
  CHECK(d(1) == 0.0);
  CHECK(d(3) == 0.0);
  CHECK(d(5) == 0.0);
  CHECK(d(7) == 0.0);

  CHECK_THROWS_AS(hsad::supervisory_estimate(mon, scalar_refs({1.0, 2.0})),
                  std::invalid_argument);
}

TEST_CASE("epsilon_bound_update follows the norm recursion") {
  const double next = hsad::epsilon_bound_update(
      0.2, 0.955, 0.01, 0.05, 1.0, vec({0.0}), vec({1.0}));
  CHECK(next == doctest::Approx(0.955 * 0.2 + 0.01 + 0.05 + 1.0).epsilon(1e-12));

  // No reference motion drops the lookahead term entirely.
  const double steady = hsad::epsilon_bound_update(
      0.2, 0.955, 0.01, 0.05, 1.0, vec({3.0}), vec({3.0}));
  CHECK(steady == doctest::Approx(0.955 * 0.2 + 0.06).epsilon(1e-12));

  CHECK_THROWS_AS(hsad::epsilon_bound_update(-0.1, 0.9, 0.0, 0.0, 1.0,
                                             vec({0.0}), vec({0.0})),
                  std::invalid_argument);
  CHECK_THROWS_AS(hsad::epsilon_bound_update(0.1, 0.9, -1.0, 0.0, 1.0,
                                             vec({0.0}), vec({0.0})),
                  std::invalid_argument);
}

TEST_CASE("build_E stacks per-subsystem ball enclosures") {
  BallTemplate box_tpl;
  box_tpl.kind = BallTemplate::Kind::Box;
  const ConstrainedZonotope E =
      hsad::build_E({1.0, 0.5}, {2, 2}, box_tpl);
  REQUIRE(E.dim() == 4);
  CHECK(E.center().isZero(1e-15));
  CHECK(hsad::radius_bound(E) == doctest::Approx(3.0).epsilon(1e-12));

  // Box template: every corner of the product box belongs to the set.
  CHECK(hsad::contains(E, vec({1.0, -1.0, 0.5, 0.5})).first);
  CHECK(hsad::contains(E, vec({-1.0, 1.0, -0.5, 0.5})).first);
  CHECK_FALSE(hsad::contains(E, vec({1.02, 0.0, 0.0, 0.0})).first);
  CHECK_FALSE(hsad::contains(E, vec({0.0, 0.0, 0.0, 0.53})).first);

  // Refined template still covers the spheres it is meant to enclose.
  BallTemplate hex_tpl;
  hex_tpl.kind = BallTemplate::Kind::Refined;
  hex_tpl.rotations_per_pair = 2;
  const ConstrainedZonotope Eh = hsad::build_E({1.0, 0.5}, {2, 2}, hex_tpl);
  for (int t = 0; t < 12; ++t) {
    const double th = 2.0 * M_PI * t / 12.0;
    Eigen::VectorXd p(4);
    p << std::cos(th), std::sin(th), 0.5 * std::sin(th), -0.5 * std::cos(th);
    CHECK(hsad::contains(Eh, p).first);
  }

  CHECK_THROWS_AS(hsad::build_E({1.0}, {2, 2}, box_tpl), std::invalid_argument);
}

TEST_CASE("supervisory_set shifts the coupling image of the error enclosure") {
  auto s = chain_setup(4);
  const Eigen::MatrixXd Ac = s.model.coupling_matrix();
  BallTemplate tpl;
  tpl.kind = BallTemplate::Kind::Box;
  const ConstrainedZonotope E = hsad::build_E({0.3, 0.1, 0.2, 0.4}, {2, 2, 2, 2}, tpl);
  Eigen::VectorXd d_hat = Eigen::VectorXd::LinSpaced(8, -0.4, 0.3);

  const ConstrainedZonotope D = hsad::supervisory_set(Ac, d_hat, E);
  CHECK(D.center().isApprox(d_hat, 1e-14));
  CHECK(D.generators().isApprox(Ac * E.generators(), 1e-14));
}

TEST_CASE("local error set propagation contracts through the observer map") {
  auto s = chain_setup(1, 0.25);
  const double alpha = 0.25;
  const ConstrainedZonotope e0 =
      ConstrainedZonotope::box(vec({0.0, 0.0}), vec({1.0, 1.0}));
  const ConstrainedZonotope d_fixed =
      ConstrainedZonotope::singleton(vec({0.3, -0.2}));

  // A frozen supervisory set contributes nothing, so the local error set is
  // scaled by (1 - alpha) each step.
  const ConstrainedZonotope e1 = hsad::local_error_set_update(
      s.designs, {2}, e0, d_fixed, d_fixed, 100);
  CHECK(e1.center().isZero(1e-14));
  CHECK(hsad::radius_bound(e1) ==
        doctest::Approx(2.0 * (1.0 - alpha)).epsilon(1e-12));
  CHECK(hsad::contains(e1, vec({1.0 - alpha, -(1.0 - alpha)})).first);
  CHECK_FALSE(hsad::contains(e1, vec({1.0 - alpha + 0.01, 0.0})).first);
}

TEST_CASE("local error set propagation absorbs supervisory set motion") {
  auto s = chain_setup(1, 0.6);
  const ConstrainedZonotope e0 = ConstrainedZonotope::singleton(vec({0.0, 0.0}));
  const Eigen::VectorXd c1 = vec({0.5, -1.0});
  const Eigen::VectorXd c2 = vec({0.8, -0.4});
  const ConstrainedZonotope d_now = ConstrainedZonotope::box(c1, vec({0.1, 0.1}));
  const ConstrainedZonotope d_next = ConstrainedZonotope::box(c2, vec({0.2, 0.2}));

  // With a trivial starting set, the update reduces to the one-step
  // disturbance change set: -(D^s(k) + (-D^s(k+1))) = (c2 - c1) +- radii sum.
  const ConstrainedZonotope e1 = hsad::local_error_set_update(
      s.designs, {2}, e0, d_now, d_next, 100);
  CHECK(e1.center().isApprox(c2 - c1, 1e-14));
  CHECK(hsad::radius_bound(e1) ==
        doctest::Approx((c2 - c1).norm() + 0.6).epsilon(1e-12));
  CHECK(hsad::contains(e1, c2 - c1 + vec({0.3, -0.3})).first);
  CHECK_FALSE(hsad::contains(e1, c2 - c1 + vec({0.32, 0.0})).first);

  CHECK_THROWS_AS(hsad::local_error_set_update(s.designs, {2}, e0, d_now,
                                               ConstrainedZonotope::singleton(
                                                   vec({0.0, 0.0, 0.0})),
                                               100),
                  std::invalid_argument);
}

TEST_CASE("local error set update honours the generator cap") {
  auto s = chain_setup(1, 0.5);
  const ConstrainedZonotope e0 =
      ConstrainedZonotope::box(vec({0.0, 0.0}), vec({1.0, 2.0}));
  const ConstrainedZonotope d_now =
      ConstrainedZonotope::box(vec({0.1, 0.1}), vec({0.3, 0.4}));
  const ConstrainedZonotope d_next =
      ConstrainedZonotope::box(vec({-0.1, 0.2}), vec({0.2, 0.1}));

  const ConstrainedZonotope full = hsad::local_error_set_update(
      s.designs, {2}, e0, d_now, d_next, 100);
  REQUIRE(full.generators().cols() == 6);

  const ConstrainedZonotope capped = hsad::local_error_set_update(
      s.designs, {2}, e0, d_now, d_next, 4);
  CHECK(capped.generators().cols() <= 4);
  // Reduction only ever grows the set.
  CHECK(hsad::contains(capped, full.center() + vec({0.5 + 0.25, 0.0})).first);
}

TEST_CASE("local_set recentres the error set on the reported estimate") {
  const ConstrainedZonotope e =
      ConstrainedZonotope::box(vec({0.1, -0.1}), vec({0.2, 0.3}));
  const ConstrainedZonotope d = hsad::local_set(vec({1.0, 2.0}), e);
  CHECK(d.center().isApprox(vec({1.1, 1.9}), 1e-14));
  CHECK(d.generators().isApprox(e.generators(), 1e-15));
}

TEST_CASE("detect reports emptiness with a certificate or a witness") {
  const ConstrainedZonotope a =
      ConstrainedZonotope::box(vec({0.0, 0.0}), vec({1.0, 1.0}));

  SUBCASE("disjoint sets produce an empty record with an infeasibility margin") {
    const ConstrainedZonotope b =
        ConstrainedZonotope::box(vec({4.0, 4.0}), vec({1.0, 1.0}));
    const hsad::DetectionRecord rec = hsad::detect(17, a, b);
    CHECK(rec.k == 17);
    CHECK(rec.empty);
    // Closing the 4-wide centre gap with unit generators needs coefficients
    // of size 2, well past the unit box.
    CHECK(rec.certificate.objective == doctest::Approx(2.0).epsilon(1e-6));
    CHECK_FALSE(rec.witness.has_value());
    CHECK(std::isnan(rec.i_f));
  }

  SUBCASE("overlapping sets yield a point inside both") {
    const ConstrainedZonotope b =
        ConstrainedZonotope::box(vec({1.0, 1.0}), vec({1.0, 1.0}));
    const hsad::DetectionRecord rec = hsad::detect(3, a, b);
    CHECK_FALSE(rec.empty);
    REQUIRE(rec.witness.has_value());
    CHECK(hsad::contains(a, *rec.witness, 1e-7).first);
    CHECK(hsad::contains(b, *rec.witness, 1e-7).first);
  }
}

TEST_CASE("intersection_fraction estimates the overlap against the smaller set") {
  const auto interval = [](double lo, double hi) {
    return ConstrainedZonotope::box(vec({0.5 * (lo + hi)}),
                                    vec({0.5 * (hi - lo)}));
  };
  const int n = 1000;

  SUBCASE("quarter overlap") {
    const auto a = interval(0.0, 2.0);
    const auto b = interval(1.5, 3.5);
    const auto inter = hsad::intersect(a, b);
    const double f = hsad::intersection_fraction(a, b, inter, n, 7);
    CHECK(std::abs(f - 0.25) < 0.05);
  }

  SUBCASE("half overlap") {
    const auto a = interval(0.0, 2.0);
    const auto b = interval(1.0, 3.0);
    const auto inter = hsad::intersect(a, b);
    const double f = hsad::intersection_fraction(a, b, inter, n, 11);
    CHECK(std::abs(f - 0.5) < 0.05);
  }

  SUBCASE("containment saturates at one") {
    const auto a = interval(0.0, 2.0);
    const auto b = interval(0.5, 1.5);
    const auto inter = hsad::intersect(a, b);
    CHECK(hsad::intersection_fraction(a, b, inter, n, 3) == 1.0);
  }

  SUBCASE("disjoint sets give exactly zero") {
    const auto a = interval(0.0, 2.0);
    const auto b = interval(3.0, 4.0);
    const auto inter = hsad::intersect(a, b);
    CHECK(hsad::intersection_fraction(a, b, inter, n, 5) == 0.0);
  }

  SUBCASE("sample count must be positive") {
    const auto a = interval(0.0, 1.0);
    CHECK_THROWS_AS(
        hsad::intersection_fraction(a, a, hsad::intersect(a, a), 0, 1),
        std::invalid_argument);
  }

  SUBCASE("same seed, same estimate") {
    const auto a = interval(0.0, 2.0);
    const auto b = interval(1.0, 3.0);
    const auto inter = hsad::intersect(a, b);
    const double f1 = hsad::intersection_fraction(a, b, inter, 500, 42);
    const double f2 = hsad::intersection_fraction(a, b, inter, 500, 42);
    CHECK(f1 == f2);
  }
}

TEST_CASE("monitor_step seeds the local error set from the first supervisory set") {
  auto s = chain_setup(4);
  MonitorConfig cfg;
  cfg.ball_template.kind = BallTemplate::Kind::Box;
  cfg.compute_if = false;
  const Monitor mon = hsad::make_monitor(s.model, s.gains, s.regs, s.designs, cfg);
  MonitorState st = hsad::initial_monitor_state(mon, vec({0.1, 0.2, 0.3, 0.4}));

  const auto r = scalar_refs({0.0, 0.0, 0.0, 0.0});
  const Eigen::VectorXd d_hat_la = Eigen::VectorXd::Zero(8);
  const auto out = hsad::monitor_step(mon, st, 0, r, r, d_hat_la);

  CHECK(st.e_local_ready);
  // On the first step the local set coincides with D^s shifted by the
  // reported estimate (zero here).
  CHECK(out.d_local.center().isApprox(out.d_sup.center(), 1e-14));
  CHECK(out.d_local.generators().isApprox(out.d_sup.generators(), 1e-14));
  CHECK_FALSE(out.record.empty);
}

TEST_CASE("monitor_step runs the norm recursion through the coupling map") {
  auto s = chain_setup(4);
  MonitorConfig cfg;
  cfg.ball_template.kind = BallTemplate::Kind::Box;
  cfg.safety_factor = 1.0;
  cfg.compute_if = false;
  const Monitor mon = hsad::make_monitor(s.model, s.gains, s.regs, s.designs, cfg);
  MonitorState st = hsad::initial_monitor_state(mon, vec({0.1, 0.2, 0.3, 0.4}));

  const auto r = scalar_refs({0.0, 0.0, 0.0, 0.0});
  const auto out = hsad::monitor_step(mon, st, 0, r, r, Eigen::VectorXd::Zero(8));
  CHECK(out.d_hat_s.isZero(1e-15));

  // eps_i' = 0.955 eps_i + 0.005 * (sum of neighbour eps), because only the
  // first ball axis survives the coupling blocks.
  CHECK(st.eps_bar(0) == doctest::Approx(0.955 * 0.1 + 0.005 * 0.2).epsilon(1e-12));
  CHECK(st.eps_bar(1) ==
        doctest::Approx(0.955 * 0.2 + 0.005 * (0.1 + 0.3)).epsilon(1e-12));
  CHECK(st.eps_bar(2) ==
        doctest::Approx(0.955 * 0.3 + 0.005 * (0.2 + 0.4)).epsilon(1e-12));
  CHECK(st.eps_bar(3) == doctest::Approx(0.955 * 0.4 + 0.005 * 0.3).epsilon(1e-12));
}

TEST_CASE("monitor_step alternative recursion uses the raw enclosure blocks") {
  auto s = chain_setup(4);
  MonitorConfig cfg;
  cfg.ball_template.kind = BallTemplate::Kind::Box;
  cfg.compute_if = false;
  cfg.es_term_unmapped = true;
  const Monitor mon = hsad::make_monitor(s.model, s.gains, s.regs, s.designs, cfg);
  MonitorState st = hsad::initial_monitor_state(mon, vec({0.1, 0.2, 0.3, 0.4}));

  const auto r = scalar_refs({0.0, 0.0, 0.0, 0.0});
  hsad::monitor_step(mon, st, 0, r, r, Eigen::VectorXd::Zero(8));

  // A 2-d box of radius eps contributes 2 eps from its own block.
  for (int i = 0; i < 4; ++i) {
    const double eps0 = 0.1 * (i + 1);
    CHECK(st.eps_bar(i) == doctest::Approx((0.955 + 2.0) * eps0).epsilon(1e-12));
  }
}

TEST_CASE("monitor_step inflates the bound when the reference moves") {
  auto s = chain_setup(4);
  MonitorConfig cfg;
  cfg.ball_template.kind = BallTemplate::Kind::Box;
  cfg.compute_if = false;
  const Monitor mon = hsad::make_monitor(s.model, s.gains, s.regs, s.designs, cfg);

  MonitorState still = hsad::initial_monitor_state(mon, vec({0.1, 0.2, 0.3, 0.4}));
  MonitorState moving = hsad::initial_monitor_state(mon, vec({0.1, 0.2, 0.3, 0.4}));
  const auto r0 = scalar_refs({0.0, 0.0, 0.0, 0.0});
  const auto r1 = scalar_refs({1.0, 0.0, 0.0, 0.0});

  hsad::monitor_step(mon, still, 0, r0, r0, Eigen::VectorXd::Zero(8));
  hsad::monitor_step(mon, moving, 0, r0, r1, Eigen::VectorXd::Zero(8));

  // ||Pi|| = 1 and the step is 1, so exactly one unit is added to cart 1.
  CHECK(moving.eps_bar(0) ==
        doctest::Approx(still.eps_bar(0) + 1.0).epsilon(1e-12));
  for (int i = 1; i < 4; ++i) CHECK(moving.eps_bar(i) == still.eps_bar(i));
}

TEST_CASE("monitor_step flags a reported estimate far outside the predicted set") {
  auto s = chain_setup(4);
  MonitorConfig cfg;
  cfg.ball_template.kind = BallTemplate::Kind::Refined;
  cfg.compute_if = true;
  cfg.if_samples = 200;
  const Monitor mon = hsad::make_monitor(s.model, s.gains, s.regs, s.designs, cfg);

  SUBCASE("consistent estimate keeps a nonempty intersection") {
    MonitorState st = hsad::initial_monitor_state(mon, vec({0.1, 0.1, 0.1, 0.1}));
    const auto r = scalar_refs({0.0, 0.0, 0.0, 0.0});
    const auto out = hsad::monitor_step(mon, st, 0, r, r, Eigen::VectorXd::Zero(8));
    CHECK_FALSE(out.record.empty);
    CHECK(out.record.i_f > 0.0);
    CHECK(out.record.i_f <= 1.0);
  }

  SUBCASE("implausible estimate yields an empty intersection and zero overlap") {
    MonitorState st = hsad::initial_monitor_state(mon, vec({0.1, 0.1, 0.1, 0.1}));
    const auto r = scalar_refs({0.0, 0.0, 0.0, 0.0});
    // Seed the local error set with a sane first step, then report nonsense.
    hsad::monitor_step(mon, st, 0, r, r, Eigen::VectorXd::Zero(8));
    const Eigen::VectorXd huge = Eigen::VectorXd::Constant(8, 100.0);
    const auto out = hsad::monitor_step(mon, st, 1, r, r, huge);
    CHECK(out.record.empty);
    CHECK(out.record.i_f == 0.0);
    CHECK(out.record.certificate.objective > 1.0);
  }

  SUBCASE("overlap estimates repeat bit for bit with the same configuration") {
    MonitorState st1 = hsad::initial_monitor_state(mon, vec({0.1, 0.1, 0.1, 0.1}));
    MonitorState st2 = hsad::initial_monitor_state(mon, vec({0.1, 0.1, 0.1, 0.1}));
    const auto r = scalar_refs({0.2, 0.0, -0.1, 0.0});
    const auto a = hsad::monitor_step(mon, st1, 0, r, r, Eigen::VectorXd::Zero(8));
    const auto b = hsad::monitor_step(mon, st2, 0, r, r, Eigen::VectorXd::Zero(8));
    CHECK(a.record.i_f == b.record.i_f);
  }
}
