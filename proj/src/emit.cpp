#include "hsad/emit.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace hsad {

namespace {

// Round-trip exact, locale-independent float text.
std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content,
                RunOutputs& outputs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  outputs.files.push_back(path.string());
}

}  // namespace

RunOutputs emit(const ScenarioConfig& cfg, const RunResult& result,
                const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  RunOutputs outputs;
  outputs.first_detection = result.first_detection;
  outputs.duty_cycle = result.duty_cycle;
  outputs.min_if = result.min_if;

  const int count = cfg.model.count();

  // --- timeseries.csv ---
  {
    std::ostringstream csv;
    csv << "k,t_seconds";
    auto vec_header = [&](const std::string& base, int i, int n) {
      for (int c = 0; c < n; ++c)
        csv << ",s" << i << "_" << base << c;
    };
    for (int i = 0; i < count; ++i) {
      const auto& sub = cfg.model.subsystems[i];
      vec_header("x", i, sub.nx());
      vec_header("r", i, sub.nq());
      vec_header("u0_", i, sub.nu());
      vec_header("au_", i, sub.nu());
      vec_header("d", i, sub.nx());
      vec_header("dhat_l", i, sub.nx());
      vec_header("dhat_la", i, sub.nx());
      vec_header("dhat_s", i, sub.nx());
      csv << ",s" << i << "_eps_bar";
    }
    csv << "\n";
    for (const auto& log : result.steps) {
      csv << log.k << "," << fmt(log.k * cfg.model.dt);
      auto put = [&](const Eigen::VectorXd& v) {
        for (int c = 0; c < v.size(); ++c) csv << "," << fmt(v(c));
      };
      for (int i = 0; i < count; ++i) {
        put(log.x[i]);
        put(log.r[i]);
        put(log.u0[i]);
        put(log.a_u[i]);
        put(log.d_true[i]);
        put(log.d_hat_l[i]);
        put(log.d_hat_la[i]);
        put(log.d_hat_s[i]);
        csv << "," << fmt(log.eps_bar(i));
      }
      csv << "\n";
    }
    write_file(fs::path(out_dir) / "timeseries.csv", csv.str(), outputs);
  }

  // --- detection.csv ---
  {
    std::ostringstream csv;
    csv << "k,t_seconds,empty,i_f";
    for (int c = 0; c < cfg.model.total_states(); ++c) csv << ",w" << c;
    csv << "\n";
    for (const auto& log : result.steps) {
      csv << log.k << "," << fmt(log.k * cfg.model.dt) << ","
          << (log.record.empty ? 1 : 0) << ","
          << (std::isnan(log.record.i_f) ? "" : fmt(log.record.i_f));
      if (log.record.witness) {
        for (int c = 0; c < log.record.witness->size(); ++c)
          csv << "," << fmt((*log.record.witness)(c));
      } else {
        for (int c = 0; c < cfg.model.total_states(); ++c) csv << ",";
      }
      csv << "\n";
    }
    write_file(fs::path(out_dir) / "detection.csv", csv.str(), outputs);
  }

  // --- projections_<i>_<j>.csv, one per configured pair ---
  for (const auto& pr : cfg.projections) {
    std::ostringstream csv;
    csv << "k,set,vertex,x,y\n";
    for (const auto& frame : result.projections) {
      if (frame.coords != pr) continue;
      for (size_t t = 0; t < frame.local_polygon.size(); ++t)
        csv << frame.k << ",local," << t << ","
            << fmt(frame.local_polygon[t].x()) << ","
            << fmt(frame.local_polygon[t].y()) << "\n";
      for (size_t t = 0; t < frame.sup_polygon.size(); ++t)
        csv << frame.k << ",sup," << t << "," << fmt(frame.sup_polygon[t].x())
            << "," << fmt(frame.sup_polygon[t].y()) << "\n";
    }
    write_file(fs::path(out_dir) / ("projections_" + std::to_string(pr.first) +
                                    "_" + std::to_string(pr.second) + ".csv"),
               csv.str(), outputs);
  }

  // --- summary.json ---
  {
    nlohmann::json j;
    j["horizon"] = cfg.horizon;
    j["dt"] = cfg.model.dt;
    j["first_detection_step"] = result.first_detection;
    j["first_detection_seconds"] =
        result.first_detection < 0
            ? -1.0
            : result.first_detection * cfg.model.dt;
    j["detection_duty_cycle"] = result.duty_cycle;
    if (!std::isnan(result.min_if)) j["min_intersection_fraction"] = result.min_if;
    long violations_sup = 0, violations_local = 0;
    double worst_eps = 0.0;
    for (const auto& log : result.steps) {
      if (!log.d_in_sup) ++violations_sup;
      if (!log.d_in_local) ++violations_local;
      worst_eps = std::max(worst_eps, log.eps_ratio);
    }
    j["containment"] = {{"sup_violations", violations_sup},
                        {"local_violations", violations_local},
                        {"worst_eps_ratio", worst_eps}};
    outputs.summary_json = j.dump(2) + "\n";
    write_file(fs::path(out_dir) / "summary.json", outputs.summary_json,
               outputs);
  }
  return outputs;
}

std::string debug_record(const ConstrainedZonotope& z) {
  nlohmann::json j;
  auto mat = [](const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (int r = 0; r < m.rows(); ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
      rows.push_back(row);
    }
    return rows;
  };
  nlohmann::json center = nlohmann::json::array();
  for (int i = 0; i < z.center().size(); ++i) center.push_back(z.center()(i));
  nlohmann::json con_vec = nlohmann::json::array();
  for (int i = 0; i < z.con_vector().size(); ++i)
    con_vec.push_back(z.con_vector()(i));
  j["center"] = center;
  j["generators"] = mat(z.generators());
  j["con_matrix"] = mat(z.con_matrix());
  j["con_vector"] = con_vec;
  return j.dump(2);
}

}  // namespace hsad
