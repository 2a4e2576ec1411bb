#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <system_error>

#include <json.hpp>

#include "ruinlab/cohort.hpp"
#include "ruinlab/config.hpp"
#include "ruinlab/errors.hpp"
#include "ruinlab/solver.hpp"

// Serialization of policies, histograms and summaries. CSV numbers use 17
// significant digits; JSON numbers use the shortest exact round-trip form.
namespace ruinlab {

using Json = nlohmann::ordered_json;

inline std::string csv_number(double v) { return detail::format_number(v); }

/// Writes `contents` to a sibling temporary file and renames it over `path`.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw ResourceError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ResourceError("cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw ResourceError("failed writing " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw ResourceError("cannot rename onto " + path.string());
  }
}

inline std::string policy_csv(const Policy& policy) {
  std::string out = "asset,value,consumption\n";
  for (std::size_t i = 0; i < policy.grid.size(); ++i) {
    out += csv_number(policy.grid[i]);
    out += ',';
    out += csv_number(policy.values[i]);
    out += ',';
    out += csv_number(policy.consumption[i]);
    out += '\n';
  }
  return out;
}

inline Json solver_diagnostics(long iterations, double residual, bool converged, const GridSpec& spec,
                               std::size_t infeasible_points) {
  Json j;
  j["converged"] = converged;
  j["iterations"] = iterations;
  j["final_residual"] = residual;
  j["tolerance"] = spec.tolerance;
  j["max_iterations"] = spec.max_iterations;
  j["n_points"] = spec.n_points;
  j["n_consumption_points"] = spec.n_consumption_points;
  j["n_income_nodes"] = spec.n_income_nodes;
  j["a_min"] = spec.a_min;
  j["a_max"] = spec.a_max;
  j["c_floor"] = spec.effective_c_floor();
  j["infeasible_points"] = infeasible_points;
  return j;
}

inline Json solver_diagnostics(const Policy& policy, const GridSpec& spec) {
  return solver_diagnostics(policy.iterations, policy.residual, true, spec, policy.infeasible_points.size());
}

inline std::string histogram_csv(const RuinHistogram& h) {
  std::string out = "ruin_time,count\n";
  for (const auto& [t, c] : h.counts) out += std::to_string(t) + "," + std::to_string(c) + "\n";
  out += "survived," + std::to_string(h.survivors) + "\n";
  return out;
}

inline Json histogram_json(const RuinHistogram& h) {
  Json j;
  j["ruin_time"] = Json::array();
  for (const auto& [t, c] : h.counts) j["ruin_time"].push_back(Json{{"t", t}, {"count", c}});
  j["survived"] = h.survivors;
  return j;
}

inline Json config_echo(const RunConfig& cfg) {
  Json j = Json::object();
  for (const auto& [section, key, value] : config_entries(cfg)) j[section][key] = value;
  return j;
}

inline Json summary_json(const RuinHistogram& h, const RunConfig& cfg) {
  const CohortSummary s = summarize(h);
  Json j;
  j["n_agents"] = h.n_agents;
  j["horizon"] = h.horizon;
  j["master_seed"] = cfg.master_seed;
  j["ruin_fraction"] = s.ruin_fraction;
  j["survivor_fraction"] = s.survivor_fraction;
  j["median_ruin_time"] = s.median_ruin_time ? Json(*s.median_ruin_time) : Json(nullptr);
  j["mode_ruin_time"] = s.mode_ruin_time ? Json(*s.mode_ruin_time) : Json(nullptr);
  j["fraction_ruined_first_10"] = s.fraction_ruined_first_10;
  j["config_echo"] = config_echo(cfg);
  return j;
}

inline std::string to_text(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace ruinlab
