#include "hsad/scenario.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

namespace hsad {

namespace {

using nlohmann::json;

const json& require_field(const json& j, const std::string& path,
                          const char* key) {
  if (!j.is_object())
    throw ConfigError(path + ": expected an object");
  auto it = j.find(key);
  if (it == j.end())
    throw ConfigError(path + "." + key + ": missing required field");
  return *it;
}

double as_double(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path + ": expected a number");
  return j.get<double>();
}

long as_long(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path + ": expected an integer");
  return j.get<long>();
}

int as_int(const json& j, const std::string& path) {
  return static_cast<int>(as_long(j, path));
}

bool as_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) throw ConfigError(path + ": expected a boolean");
  return j.get<bool>();
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path + ": expected a string");
  return j.get<std::string>();
}

Eigen::VectorXd as_vector(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path + ": expected an array of numbers");
  Eigen::VectorXd v(j.size());
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number())
      throw ConfigError(path + "[" + std::to_string(i) + "]: expected a number");
    v(i) = j[i].get<double>();
  }
  return v;
}

Eigen::MatrixXd as_matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty())
    throw ConfigError(path + ": expected a non-empty array of rows");
  const size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) throw ConfigError(path + ": rows must be non-empty arrays");
  Eigen::MatrixXd m(j.size(), cols);
  for (size_t r = 0; r < j.size(); ++r) {
    const std::string rpath = path + "[" + std::to_string(r) + "]";
    if (!j[r].is_array() || j[r].size() != cols)
      throw ConfigError(rpath + ": ragged or non-array row");
    for (size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number())
        throw ConfigError(rpath + "[" + std::to_string(c) + "]: expected a number");
      m(r, c) = j[r][c].get<double>();
    }
  }
  return m;
}

std::vector<std::pair<long, Eigen::VectorXd>> as_segments(
    const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path + ": expected an array of segments");
  std::vector<std::pair<long, Eigen::VectorXd>> segs;
  for (size_t t = 0; t < j.size(); ++t) {
    const std::string spath = path + "[" + std::to_string(t) + "]";
    if (!j[t].is_array() || j[t].size() != 2)
      throw ConfigError(spath + ": expected [step, value] pair");
    segs.emplace_back(as_long(j[t][0], spath + "[0]"),
                      as_vector(j[t][1], spath + "[1]"));
  }
  return segs;
}

int subsystem_key(const std::string& key, const std::string& path) {
  try {
    size_t pos = 0;
    int v = std::stoi(key, &pos);
    if (pos != key.size()) throw std::invalid_argument("trailing chars");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(path + ": keys must be subsystem indices, got '" + key +
                      "'");
  }
}

}  // namespace

ScenarioConfig parse_scenario_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("scenario JSON: ") + e.what());
  }

  ScenarioConfig cfg;

  // --- model ---
  const json& jmodel = require_field(root, "scenario", "model");
  cfg.model.dt = as_double(require_field(jmodel, "model", "dt"), "model.dt");
  const json& jsubs = require_field(jmodel, "model", "subsystems");
  if (!jsubs.is_array() || jsubs.empty())
    throw ConfigError("model.subsystems: expected a non-empty array");
  for (size_t i = 0; i < jsubs.size(); ++i) {
    const std::string p = "model.subsystems[" + std::to_string(i) + "]";
    const json& js = jsubs[i];
    SubsystemModel sub;
    sub.name = js.contains("name") ? as_string(js["name"], p + ".name")
                                   : "S" + std::to_string(i + 1);
    sub.A = as_matrix(require_field(js, p, "A"), p + ".A");
    sub.B = as_matrix(require_field(js, p, "B"), p + ".B");
    const int n = static_cast<int>(sub.A.rows());
    if (js.contains("C")) {
      sub.C = as_matrix(js["C"], p + ".C");
    } else {
      // Track the first state coordinate by default.
      sub.C = Eigen::MatrixXd::Zero(1, n);
      sub.C(0, 0) = 1.0;
    }
    sub.Q = js.contains("Q")
                ? as_matrix(js["Q"], p + ".Q")
                : Eigen::MatrixXd::Constant(sub.C.rows(), sub.C.rows(), -1.0);
    if (js.contains("neighbors")) {
      const json& jn = js["neighbors"];
      if (!jn.is_object()) throw ConfigError(p + ".neighbors: expected an object");
      for (auto it = jn.begin(); it != jn.end(); ++it) {
        const int jdx = subsystem_key(it.key(), p + ".neighbors");
        sub.neighbors[jdx] =
            as_matrix(it.value(), p + ".neighbors[" + it.key() + "]");
      }
    }
    cfg.model.subsystems.push_back(std::move(sub));
  }
  const int count = cfg.model.count();

  // --- control ---
  const json& jctrl = require_field(root, "scenario", "control");
  const json& jgains = require_field(jctrl, "control", "gains");
  if (!jgains.is_array() || static_cast<int>(jgains.size()) != count)
    throw ConfigError("control.gains: expected one entry per subsystem");
  for (int i = 0; i < count; ++i) {
    const std::string p = "control.gains[" + std::to_string(i) + "]";
    ControllerConfig g;
    g.K = as_matrix(require_field(jgains[i], p, "K"), p + ".K");
    g.b = as_double(require_field(jgains[i], p, "b"), p + ".b");
    cfg.gains.push_back(std::move(g));
  }
  const json& jrefs = require_field(jctrl, "control", "references");
  if (!jrefs.is_array() || static_cast<int>(jrefs.size()) != count)
    throw ConfigError("control.references: expected one schedule per subsystem");
  for (int i = 0; i < count; ++i) {
    const std::string p = "control.references[" + std::to_string(i) + "]";
    ReferenceSchedule sched;
    sched.entries = as_segments(jrefs[i], p);
    cfg.schedules.push_back(std::move(sched));
  }
  if (jctrl.contains("dwell_min_steps"))
    cfg.dwell_min_steps =
        as_long(jctrl["dwell_min_steps"], "control.dwell_min_steps");
  if (jctrl.contains("ref_step_max"))
    cfg.ref_step_max = as_double(jctrl["ref_step_max"], "control.ref_step_max");

  // --- observer ---
  const json& jobs = require_field(root, "scenario", "observer");
  const json& jalpha = require_field(jobs, "observer", "alpha");
  if (jalpha.is_number()) {
    cfg.alphas.assign(count, jalpha.get<double>());
  } else {
    Eigen::VectorXd a = as_vector(jalpha, "observer.alpha");
    if (a.size() != count)
      throw ConfigError("observer.alpha: expected one value per subsystem");
    for (int i = 0; i < count; ++i) cfg.alphas.push_back(a(i));
  }

  // --- monitor ---
  cfg.eps_bar0 = Eigen::VectorXd::Zero(count);
  if (root.contains("monitor")) {
    const json& jm = root["monitor"];
    if (jm.contains("lp_tol")) cfg.monitor.lp_tol = as_double(jm["lp_tol"], "monitor.lp_tol");
    if (jm.contains("order_cap"))
      cfg.monitor.order_cap = as_int(jm["order_cap"], "monitor.order_cap");
    if (jm.contains("safety_factor"))
      cfg.monitor.safety_factor =
          as_double(jm["safety_factor"], "monitor.safety_factor");
    if (jm.contains("template")) {
      const std::string t = as_string(jm["template"], "monitor.template");
      if (t == "box") {
        cfg.monitor.ball_template.kind = BallTemplate::Kind::Box;
      } else if (t == "refined") {
        cfg.monitor.ball_template.kind = BallTemplate::Kind::Refined;
      } else {
        throw ConfigError("monitor.template: must be 'box' or 'refined'");
      }
    }
    if (jm.contains("refined_rotations"))
      cfg.monitor.ball_template.rotations_per_pair =
          as_int(jm["refined_rotations"], "monitor.refined_rotations");
    if (jm.contains("es_term")) {
      const std::string t = as_string(jm["es_term"], "monitor.es_term");
      if (t == "mapped") {
        cfg.monitor.es_term_unmapped = false;
      } else if (t == "unmapped") {
        cfg.monitor.es_term_unmapped = true;
      } else {
        throw ConfigError("monitor.es_term: must be 'mapped' or 'unmapped'");
      }
    }
    if (jm.contains("if_samples"))
      cfg.monitor.if_samples = as_int(jm["if_samples"], "monitor.if_samples");
    if (jm.contains("compute_if"))
      cfg.monitor.compute_if = as_bool(jm["compute_if"], "monitor.compute_if");
    if (jm.contains("seed"))
      cfg.monitor.seed =
          static_cast<std::uint64_t>(as_long(jm["seed"], "monitor.seed"));
    if (jm.contains("eps_bar0")) {
      if (jm["eps_bar0"].is_number()) {
        cfg.eps_bar0.setConstant(jm["eps_bar0"].get<double>());
      } else {
        cfg.eps_bar0 = as_vector(jm["eps_bar0"], "monitor.eps_bar0");
        if (cfg.eps_bar0.size() != count)
          throw ConfigError("monitor.eps_bar0: expected one value per subsystem");
      }
    }
  }

  // --- attack (optional; absent means nominal run) ---
  if (root.contains("attack")) {
    const json& ja = root["attack"];
    if (ja.contains("attacked")) {
      const json& jl = ja["attacked"];
      if (!jl.is_array()) throw ConfigError("attack.attacked: expected an array");
      for (size_t t = 0; t < jl.size(); ++t)
        cfg.attack.attacked.push_back(
            as_int(jl[t], "attack.attacked[" + std::to_string(t) + "]"));
    }
    if (ja.contains("k_a")) cfg.attack.k_a = as_long(ja["k_a"], "attack.k_a");
    if (ja.contains("cover")) {
      const std::string c = as_string(ja["cover"], "attack.cover");
      if (c == "none") {
        cfg.attack.cover = AttackScenario::Cover::None;
      } else if (c == "stealthy") {
        cfg.attack.cover = AttackScenario::Cover::Stealthy;
      } else if (c == "explicit") {
        cfg.attack.cover = AttackScenario::Cover::Explicit;
      } else {
        throw ConfigError("attack.cover: must be 'none', 'stealthy' or 'explicit'");
      }
    }
    auto read_map = [&](const char* key, auto& target) {
      if (!ja.contains(key)) return;
      const std::string p = std::string("attack.") + key;
      if (!ja[key].is_object()) throw ConfigError(p + ": expected an object");
      for (auto it = ja[key].begin(); it != ja[key].end(); ++it) {
        target[subsystem_key(it.key(), p)] =
            as_segments(it.value(), p + "[" + it.key() + "]");
      }
    };
    read_map("input_segments", cfg.attack.input_segments);
    read_map("tamper_segments", cfg.attack.tamper_segments);
  }

  // --- run shape ---
  cfg.horizon = as_long(require_field(root, "scenario", "horizon"), "horizon");
  cfg.x0 = Eigen::VectorXd::Zero(cfg.model.total_states());
  if (root.contains("x0")) {
    cfg.x0 = as_vector(root["x0"], "x0");
    if (cfg.x0.size() != cfg.model.total_states())
      throw ConfigError("x0: expected the stacked state dimension");
  }
  if (root.contains("output") && root["output"].contains("projections")) {
    const json& jp = root["output"]["projections"];
    if (!jp.is_array()) throw ConfigError("output.projections: expected an array");
    for (size_t t = 0; t < jp.size(); ++t) {
      const std::string p = "output.projections[" + std::to_string(t) + "]";
      if (!jp[t].is_array() || jp[t].size() != 2)
        throw ConfigError(p + ": expected [i, j] coordinate pair");
      cfg.projections.emplace_back(as_int(jp[t][0], p + "[0]"),
                                   as_int(jp[t][1], p + "[1]"));
    }
  }
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str());
}

bool has_errors(const std::vector<ValidationIssue>& issues) {
  for (const auto& issue : issues)
    if (issue.severity == ValidationIssue::Severity::Error) return true;
  return false;
}

std::string format_issues(const std::vector<ValidationIssue>& issues) {
  std::ostringstream out;
  for (const auto& issue : issues) {
    out << (issue.severity == ValidationIssue::Severity::Error ? "error"
                                                               : "warning")
        << " [" << issue.where << "] " << issue.message << "\n";
  }
  return out.str();
}

std::vector<ValidationIssue> validate_scenario(const ScenarioConfig& cfg) {
  std::vector<ValidationIssue> issues = validate(cfg.model);
  auto error = [&](const std::string& where, const std::string& msg) {
    issues.push_back({ValidationIssue::Severity::Error, where, msg});
  };
  auto warn = [&](const std::string& where, const std::string& msg) {
    issues.push_back({ValidationIssue::Severity::Warning, where, msg});
  };

  if (cfg.horizon <= 0) error("horizon", "horizon must be positive");
  if (cfg.monitor.lp_tol <= 0.0) error("monitor.lp_tol", "must be positive");
  if (cfg.monitor.order_cap < cfg.model.total_states())
    error("monitor.order_cap", "cap below the stacked state dimension");
  if (cfg.monitor.safety_factor < 1.0)
    error("monitor.safety_factor", "safety factor must be >= 1");
  if (cfg.monitor.if_samples <= 0)
    error("monitor.if_samples", "sample count must be positive");
  if ((cfg.eps_bar0.array() < 0.0).any())
    error("monitor.eps_bar0", "initial bounds must be nonnegative");

  if (has_errors(issues)) return issues;  // structure is broken; stop here

  for (int i = 0; i < cfg.model.count(); ++i) {
    const auto& sub = cfg.model.subsystems[i];
    const std::string where = "subsystem " + std::to_string(i);

    if (!(cfg.alphas[i] > 0.0 && cfg.alphas[i] <= 1.0))
      error("observer.alpha[" + std::to_string(i) + "]",
            "alpha must be in (0, 1]");

    if (cfg.gains[i].K.rows() != sub.nu() || cfg.gains[i].K.cols() != sub.nx()) {
      error("control.gains[" + std::to_string(i) + "].K", "wrong dimensions");
      continue;
    }
    GainReport rep = validate_gain(sub, cfg.gains[i]);
    if (!rep.stable)
      error("control.gains[" + std::to_string(i) + "]",
            "closed loop is not stable (spectral radius " +
                std::to_string(rep.spectral_radius) + ")");
    if (!rep.contractive)
      error("control.gains[" + std::to_string(i) + "]",
            "contraction rate b below the closed-loop spectral radius");
    if (rep.stable && rep.max_transient_ratio > cfg.monitor.safety_factor)
      warn("control.gains[" + std::to_string(i) + "]",
           "transient growth ratio " +
               std::to_string(rep.max_transient_ratio) +
               " exceeds the monitor safety factor; tracking-error bounds "
               "may be violated transiently");

    auto sched_issues = validate_schedule(cfg.schedules[i], sub.nq());
    const bool sched_ok = !has_errors(sched_issues);
    for (auto& si : sched_issues) {
      si.where = "control.references[" + std::to_string(i) + "]";
      issues.push_back(si);
    }
    if (!sched_ok) continue;
    // Reference hygiene: dwell time and step size are advisory limits.
    for (size_t t = 1; t < cfg.schedules[i].entries.size(); ++t) {
      const auto& prev = cfg.schedules[i].entries[t - 1];
      const auto& cur = cfg.schedules[i].entries[t];
      if (cur.first - prev.first < cfg.dwell_min_steps)
        warn("control.references[" + std::to_string(i) + "]",
             "switch at step " + std::to_string(cur.first) +
                 " violates the minimum dwell time");
      if ((cur.second - prev.second).lpNorm<Eigen::Infinity>() >
          cfg.ref_step_max)
        warn("control.references[" + std::to_string(i) + "]",
             "reference step at " + std::to_string(cur.first) +
                 " exceeds the configured maximum");
    }

    // Regulator solvability is part of scenario health.
    try {
      RegulatorSolution reg =
          solve_regulator(sub, Eigen::MatrixXd::Identity(sub.nq(), sub.nq()),
                          cfg.gains[i].K);
      const Eigen::VectorXd r0 = reference_at(cfg.schedules[i], 0);
      const Eigen::VectorXd eps0 =
          cfg.x0.segment(cfg.model.state_offset(i), sub.nx()) - reg.Pi * r0;
      if (eps0.norm() >
          cfg.monitor.safety_factor * cfg.eps_bar0(i) + 1e-12)
        error("monitor.eps_bar0[" + std::to_string(i) + "]",
              "initial tracking error exceeds the configured bound");
    } catch (const NumericalError& e) {
      error(where, e.what());
    }
  }

  auto attack_issues = validate_attack(cfg.attack, cfg.model);
  issues.insert(issues.end(), attack_issues.begin(), attack_issues.end());
  return issues;
}

}  // namespace hsad
