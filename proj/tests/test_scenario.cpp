#include <doctest.h>
#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>

#include "hsad/scenario.hpp"

using hsad::ConfigError;
using hsad::ScenarioConfig;
using hsad::ValidationIssue;

namespace {

nlohmann::json canonical_json() {
  std::ifstream in(HSAD_SOURCE_DIR "/scenarios/chain4_attack.json");
  REQUIRE(in.good());
  nlohmann::json j;
  in >> j;
  return j;
}

ScenarioConfig canonical_config() {
  return hsad::load_scenario(HSAD_SOURCE_DIR "/scenarios/chain4_attack.json");
}

// Parses the mutated document and returns the ConfigError message, or an
// empty string if parsing unexpectedly succeeded.
std::string parse_failure(const nlohmann::json& j) {
  try {
    hsad::parse_scenario_text(j.dump());
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

bool mentions(const std::string& text, const std::string& part) {
  return text.find(part) != std::string::npos;
}

bool has_issue(const std::vector<ValidationIssue>& issues,
               ValidationIssue::Severity sev, const std::string& where_part,
               const std::string& msg_part = "") {
  for (const auto& issue : issues) {
    if (issue.severity == sev && mentions(issue.where, where_part) &&
        (msg_part.empty() || mentions(issue.message, msg_part)))
      return true;
  }
  return false;
}

}  // namespace

TEST_CASE("the canonical attacked scenario parses with every field") {
  ScenarioConfig cfg = canonical_config();

  CHECK(cfg.model.count() == 4);
  CHECK(cfg.model.dt == doctest::Approx(0.25));
  CHECK(cfg.model.subsystems[0].name == "cart1");
  CHECK(cfg.model.subsystems[3].name == "cart4");
  CHECK(cfg.model.subsystems[0].A(0, 1) == doctest::Approx(0.25));
  CHECK(cfg.model.subsystems[0].B(1, 0) == doctest::Approx(0.05));
  CHECK(cfg.model.subsystems[0].C(0, 0) == doctest::Approx(1.0));
  CHECK(cfg.model.subsystems[0].Q(0, 0) == doctest::Approx(-1.0));
  CHECK(cfg.model.subsystems[0].neighbors.size() == 1);
  CHECK(cfg.model.subsystems[1].neighbors.size() == 2);
  CHECK(cfg.model.subsystems[1].neighbors.at(2)(0, 0) == doctest::Approx(0.005));

  REQUIRE(cfg.gains.size() == 4);
  CHECK(cfg.gains[2].K(0, 1) == doctest::Approx(-2.1));
  CHECK(cfg.gains[2].b == doctest::Approx(0.955));

  REQUIRE(cfg.schedules.size() == 4);
  CHECK(cfg.schedules[0].entries.size() == 2);
  CHECK(cfg.schedules[0].entries[1].first == 4);
  CHECK(cfg.schedules[0].entries[1].second(0) == doctest::Approx(1.0));
  CHECK(cfg.schedules[2].entries.size() == 1);
  CHECK(hsad::reference_at(cfg.schedules[0], 3)(0) == doctest::Approx(0.0));
  CHECK(hsad::reference_at(cfg.schedules[0], 4)(0) == doctest::Approx(1.0));
  CHECK(cfg.dwell_min_steps == 4);
  CHECK(cfg.ref_step_max == doctest::Approx(1.5));

  REQUIRE(cfg.alphas.size() == 4);
  for (double a : cfg.alphas) CHECK(a == doctest::Approx(0.6));

  CHECK(cfg.monitor.lp_tol == doctest::Approx(1e-9));
  CHECK(cfg.monitor.order_cap == 60);
  CHECK(cfg.monitor.ball_template.kind == hsad::BallTemplate::Kind::Box);
  CHECK_FALSE(cfg.monitor.es_term_unmapped);
  CHECK(cfg.monitor.safety_factor == doctest::Approx(2.2));
  CHECK(cfg.monitor.compute_if);
  CHECK(cfg.monitor.if_samples == 1000);
  CHECK(cfg.monitor.seed == 2024);
  CHECK(cfg.eps_bar0.size() == 4);
  CHECK(cfg.eps_bar0.norm() == 0.0);

  REQUIRE(cfg.attack.attacked.size() == 1);
  CHECK(cfg.attack.attacked[0] == 0);
  CHECK(cfg.attack.k_a == 16);
  CHECK(cfg.attack.cover == hsad::AttackScenario::Cover::Stealthy);
  REQUIRE(cfg.attack.input_segments.count(0) == 1);
  REQUIRE(cfg.attack.input_segments.at(0).size() == 2);
  CHECK(cfg.attack.input_segments.at(0)[1].first == 32);
  CHECK(cfg.attack.input_segments.at(0)[1].second(0) == doctest::Approx(-8.0));
  CHECK(cfg.attack.tamper_segments.empty());

  CHECK(cfg.horizon == 80);
  CHECK(cfg.x0.size() == 8);
  CHECK(cfg.x0.norm() == 0.0);
  REQUIRE(cfg.projections.size() == 2);
  CHECK(cfg.projections[1] == std::pair<int, int>(6, 7));

  // The shipped scenario should be spotless: no errors, no warnings.
  CHECK(hsad::validate_scenario(cfg).empty());
}

TEST_CASE("the nominal companion scenario validates clean") {
  ScenarioConfig cfg =
      hsad::load_scenario(HSAD_SOURCE_DIR "/scenarios/chain4_nominal.json");
  CHECK(cfg.attack.attacked.empty());
  CHECK(cfg.horizon == 80);
  CHECK(hsad::validate_scenario(cfg).empty());
}

TEST_CASE("optional fields fall back to documented defaults") {
  const std::string minimal = R"({
    "model": {"dt": 0.5, "subsystems": [
      {"A": [[0.5, 0.1], [0.0, 0.4]], "B": [[0.0], [1.0]]}]},
    "control": {"gains": [{"K": [[0.0, 0.0]], "b": 0.9}],
                "references": [[[0, [0.0]]]]},
    "observer": {"alpha": [1.0]},
    "horizon": 5
  })";
  ScenarioConfig cfg = hsad::parse_scenario_text(minimal);

  CHECK(cfg.model.subsystems[0].name == "S1");
  CHECK(cfg.model.subsystems[0].C.rows() == 1);
  CHECK(cfg.model.subsystems[0].C(0, 0) == doctest::Approx(1.0));
  CHECK(cfg.model.subsystems[0].C(0, 1) == doctest::Approx(0.0));
  CHECK(cfg.model.subsystems[0].Q(0, 0) == doctest::Approx(-1.0));
  CHECK(cfg.model.subsystems[0].neighbors.empty());
  CHECK(cfg.alphas == std::vector<double>{1.0});

  // Monitor knobs keep their struct defaults when the block is absent.
  CHECK(cfg.monitor.lp_tol == doctest::Approx(1e-9));
  CHECK(cfg.monitor.order_cap == 200);
  CHECK(cfg.monitor.safety_factor == doctest::Approx(1.0));
  CHECK(cfg.monitor.compute_if);
  CHECK(cfg.monitor.seed == 0);
  CHECK(cfg.eps_bar0.size() == 1);
  CHECK(cfg.eps_bar0(0) == 0.0);

  CHECK(cfg.attack.attacked.empty());
  CHECK(cfg.x0.size() == 2);
  CHECK(cfg.x0.norm() == 0.0);
  CHECK(cfg.projections.empty());
  CHECK(cfg.dwell_min_steps == 0);
  CHECK(cfg.ref_step_max == std::numeric_limits<double>::infinity());

  CHECK_FALSE(hsad::has_errors(hsad::validate_scenario(cfg)));
}

TEST_CASE("parse errors name the offending JSON path") {
  SUBCASE("missing top-level blocks") {
    auto j = canonical_json();
    j.erase("model");
    CHECK(mentions(parse_failure(j), "scenario.model: missing required field"));

    j = canonical_json();
    j.erase("horizon");
    CHECK(mentions(parse_failure(j), "scenario.horizon: missing required field"));
  }

  SUBCASE("model block") {
    auto j = canonical_json();
    j["model"].erase("dt");
    CHECK(mentions(parse_failure(j), "model.dt: missing required field"));

    j = canonical_json();
    j["model"]["dt"] = "fast";
    CHECK(mentions(parse_failure(j), "model.dt: expected a number"));

    j = canonical_json();
    j["model"]["subsystems"][0]["A"][1] = {1.0};
    CHECK(mentions(parse_failure(j), "model.subsystems[0].A[1]: ragged"));

    j = canonical_json();
    j["model"]["subsystems"][0]["A"][1][0] = "x";
    CHECK(mentions(parse_failure(j),
                   "model.subsystems[0].A[1][0]: expected a number"));

    j = canonical_json();
    j["model"]["subsystems"][0]["neighbors"]["east"] = {{0.0, 0.0}, {0.0, 0.0}};
    CHECK(mentions(parse_failure(j),
                   "model.subsystems[0].neighbors: keys must be subsystem "
                   "indices"));
  }

  SUBCASE("control block") {
    auto j = canonical_json();
    j["control"]["gains"].erase(3);
    CHECK(mentions(parse_failure(j),
                   "control.gains: expected one entry per subsystem"));

    j = canonical_json();
    j["control"]["gains"][0].erase("b");
    CHECK(mentions(parse_failure(j), "control.gains[0].b: missing required field"));

    j = canonical_json();
    j["control"]["references"][0][1] = {5};
    CHECK(mentions(parse_failure(j),
                   "control.references[0][1]: expected [step, value] pair"));
  }

  SUBCASE("observer block") {
    auto j = canonical_json();
    j["observer"].erase("alpha");
    CHECK(mentions(parse_failure(j), "observer.alpha: missing required field"));

    j = canonical_json();
    j["observer"]["alpha"] = {0.6, 0.6};
    CHECK(mentions(parse_failure(j),
                   "observer.alpha: expected one value per subsystem"));
  }

  SUBCASE("monitor block") {
    auto j = canonical_json();
    j["monitor"]["template"] = "octagon";
    CHECK(mentions(parse_failure(j),
                   "monitor.template: must be 'box' or 'refined'"));

    j = canonical_json();
    j["monitor"]["es_term"] = "middle";
    CHECK(mentions(parse_failure(j),
                   "monitor.es_term: must be 'mapped' or 'unmapped'"));

    j = canonical_json();
    j["monitor"]["eps_bar0"] = {0.0, 0.0};
    CHECK(mentions(parse_failure(j),
                   "monitor.eps_bar0: expected one value per subsystem"));

    j = canonical_json();
    j["monitor"]["seed"] = 1.5;
    CHECK(mentions(parse_failure(j), "monitor.seed: expected an integer"));
  }

  SUBCASE("attack block") {
    auto j = canonical_json();
    j["attack"]["cover"] = "loud";
    CHECK(mentions(parse_failure(j),
                   "attack.cover: must be 'none', 'stealthy' or 'explicit'"));

    j = canonical_json();
    j["attack"]["input_segments"]["one"] = {{16, {8.0}}};
    CHECK(mentions(parse_failure(j),
                   "attack.input_segments: keys must be subsystem indices"));

    j = canonical_json();
    j["attack"]["input_segments"]["0"][0] = {16};
    CHECK(mentions(parse_failure(j),
                   "attack.input_segments[0][0]: expected [step, value] pair"));
  }

  SUBCASE("run shape") {
    auto j = canonical_json();
    j["x0"] = {0.0, 0.0};
    CHECK(mentions(parse_failure(j), "x0: expected the stacked state dimension"));

    j = canonical_json();
    j["output"]["projections"][0] = {1};
    CHECK(mentions(parse_failure(j),
                   "output.projections[0]: expected [i, j] coordinate pair"));
  }

  SUBCASE("malformed JSON text") {
    try {
      hsad::parse_scenario_text("{ not json");
      FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
      CHECK(mentions(e.what(), "scenario JSON"));
    }
  }
}

TEST_CASE("load_scenario reports unreadable files") {
  try {
    hsad::load_scenario("/nonexistent/nowhere.json");
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(mentions(e.what(), "cannot open scenario file"));
  }
}

TEST_CASE("validation rejects broken run shape before touching subsystems") {
  ScenarioConfig cfg = canonical_config();
  cfg.horizon = 0;
  cfg.monitor.lp_tol = 0.0;
  cfg.monitor.order_cap = 4;
  cfg.monitor.safety_factor = 0.5;
  cfg.monitor.if_samples = 0;
  cfg.eps_bar0(1) = -1.0;

  auto issues = hsad::validate_scenario(cfg);
  CHECK(hsad::has_errors(issues));
  using Sev = ValidationIssue::Severity;
  CHECK(has_issue(issues, Sev::Error, "horizon"));
  CHECK(has_issue(issues, Sev::Error, "monitor.lp_tol"));
  CHECK(has_issue(issues, Sev::Error, "monitor.order_cap"));
  CHECK(has_issue(issues, Sev::Error, "monitor.safety_factor"));
  CHECK(has_issue(issues, Sev::Error, "monitor.if_samples"));
  CHECK(has_issue(issues, Sev::Error, "monitor.eps_bar0"));
  // Per-subsystem checks are skipped once the run shape is broken.
  for (const auto& issue : issues) {
    CHECK_FALSE(mentions(issue.where, "control."));
    CHECK_FALSE(mentions(issue.where, "observer."));
  }
}

TEST_CASE("validation flags bad observers, gains and schedules") {
  using Sev = ValidationIssue::Severity;

  SUBCASE("alpha out of range") {
    ScenarioConfig cfg = canonical_config();
    cfg.alphas[2] = 1.5;
    CHECK(has_issue(hsad::validate_scenario(cfg), Sev::Error,
                    "observer.alpha[2]", "alpha must be in (0, 1]"));
  }

  SUBCASE("destabilizing gain") {
    ScenarioConfig cfg = canonical_config();
    cfg.gains[1].K.setZero();
    CHECK(has_issue(hsad::validate_scenario(cfg), Sev::Error,
                    "control.gains[1]", "not stable"));
  }

  SUBCASE("contraction rate below the closed-loop spectral radius") {
    ScenarioConfig cfg = canonical_config();
    cfg.gains[0].b = 0.9;
    CHECK(has_issue(hsad::validate_scenario(cfg), Sev::Error,
                    "control.gains[0]", "contraction rate"));
  }

  SUBCASE("gain with wrong dimensions") {
    ScenarioConfig cfg = canonical_config();
    cfg.gains[3].K = Eigen::MatrixXd::Zero(1, 3);
    CHECK(has_issue(hsad::validate_scenario(cfg), Sev::Error,
                    "control.gains[3].K", "wrong dimensions"));
  }

  SUBCASE("schedule not anchored at step zero") {
    ScenarioConfig cfg = canonical_config();
    cfg.schedules[0].entries[0].first = 2;
    CHECK(has_issue(hsad::validate_scenario(cfg), Sev::Error,
                    "control.references[0]", "must be at step 0"));
  }
}

TEST_CASE("validation warns about reference hygiene without failing") {
  using Sev = ValidationIssue::Severity;

  SUBCASE("transient growth beyond the safety factor") {
    ScenarioConfig cfg = canonical_config();
    cfg.monitor.safety_factor = 1.0;
    auto issues = hsad::validate_scenario(cfg);
    CHECK_FALSE(hsad::has_errors(issues));
    CHECK(has_issue(issues, Sev::Warning, "control.gains",
                    "transient growth ratio"));
  }

  SUBCASE("dwell time too short") {
    ScenarioConfig cfg = canonical_config();
    cfg.dwell_min_steps = 100;
    auto issues = hsad::validate_scenario(cfg);
    CHECK_FALSE(hsad::has_errors(issues));
    CHECK(has_issue(issues, Sev::Warning, "control.references",
                    "minimum dwell"));
  }

  SUBCASE("reference step too large") {
    ScenarioConfig cfg = canonical_config();
    cfg.ref_step_max = 0.1;
    auto issues = hsad::validate_scenario(cfg);
    CHECK_FALSE(hsad::has_errors(issues));
    CHECK(has_issue(issues, Sev::Warning, "control.references",
                    "exceeds the configured maximum"));
  }
}

TEST_CASE("validation ties the initial state to the configured error bounds") {
  using Sev = ValidationIssue::Severity;
  ScenarioConfig cfg = canonical_config();
  cfg.x0(0) = 0.5;  // initial tracking error 0.5 on subsystem 0
  auto issues = hsad::validate_scenario(cfg);
  CHECK(has_issue(issues, Sev::Error, "monitor.eps_bar0[0]",
                  "initial tracking error"));

  // Raising the bound so that safety_factor * eps_bar0 covers it fixes it.
  cfg.eps_bar0(0) = 0.25;
  CHECK_FALSE(hsad::has_errors(hsad::validate_scenario(cfg)));
}

TEST_CASE("attack problems surface through the scenario check") {
  using Sev = ValidationIssue::Severity;
  ScenarioConfig cfg = canonical_config();
  cfg.attack.attacked.push_back(9);
  CHECK(has_issue(hsad::validate_scenario(cfg), Sev::Error, "attack.attacked"));

  ScenarioConfig cfg2 = canonical_config();
  cfg2.attack.k_a = -1;
  CHECK(has_issue(hsad::validate_scenario(cfg2), Sev::Error, "attack.k_a"));
}

TEST_CASE("format_issues prints severity and location") {
  std::vector<ValidationIssue> issues = {
      {ValidationIssue::Severity::Error, "somewhere", "broke"},
      {ValidationIssue::Severity::Warning, "elsewhere", "iffy"},
  };
  const std::string text = hsad::format_issues(issues);
  CHECK(mentions(text, "error [somewhere] broke"));
  CHECK(mentions(text, "warning [elsewhere] iffy"));
  CHECK(hsad::has_errors(issues));
  CHECK_FALSE(hsad::has_errors({issues[1]}));
}
