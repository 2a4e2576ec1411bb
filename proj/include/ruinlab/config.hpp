#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ruinlab/cohort.hpp"
#include "ruinlab/errors.hpp"
#include "ruinlab/model.hpp"
#include "ruinlab/presets.hpp"
#include "ruinlab/solver.hpp"
#include "ruinlab/utility.hpp"

// Run configuration documents: INI-style sections of `key = value` lines.
//
//   [scenario]    preset, kind, c_fixed, use_policy, fixed_expense
//   [utility]     kind, lambda
//   [model]       beta, return_rate, initial_assets
//   [income]      kind, mean, std, half_width, sequence, k
//   [subsistence] kind, mean, half_width, std
//   [grid]        a_min, a_max, n_points, n_consumption_points, tolerance,
//                 max_iterations, n_income_nodes, c_floor
//   [simulation]  n_agents, horizon, master_seed
//   [output]      format, path
//
// `#` and `;` start comments. Unknown sections or keys are errors.
namespace ruinlab {

enum class ScenarioKind { obligatory, impulsive, true_agency, custom };

inline std::string_view to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::obligatory: return "obligatory";
    case ScenarioKind::impulsive: return "impulsive";
    case ScenarioKind::true_agency: return "true_agency";
    case ScenarioKind::custom: return "custom";
  }
  return "?";
}

struct RunConfig {
  std::optional<std::string> preset;
  ScenarioKind scenario = ScenarioKind::obligatory;
  double c_fixed = 0.0;
  bool use_policy = true;
  double fixed_expense = 0.0;
  UtilityFunction utility = UtilityFunction::sqrt();
  ModelParams model;
  IncomeProcess income = IncomeProcess::constant(0.0);
  std::optional<SubsistenceProcess> subsistence;
  GridSpec grid;
  std::size_t n_agents = 1000;
  std::size_t horizon = 100;
  std::uint64_t master_seed = 0;
  std::string output_format = "csv";
  std::string output_path = "ruinlab_out";

  // Whether the scenario consults a solved policy.
  bool needs_policy() const {
    switch (scenario) {
      case ScenarioKind::obligatory: return false;
      case ScenarioKind::impulsive: return use_policy;
      default: return true;
    }
  }

  // Consumption floor handed to the solver.
  std::optional<SubsistenceProcess> solver_floor() const {
    if (scenario == ScenarioKind::impulsive) return subsistence;
    if (scenario == ScenarioKind::true_agency && fixed_expense > 0.0)
      return SubsistenceProcess::constant(fixed_expense);
    return std::nullopt;
  }

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

namespace detail {

struct Entry {
  std::string value;
  int line = 0;  // 0 for command-line overrides
};

using EntryMap = std::map<std::string, Entry>;  // "section.key" -> entry

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> table{
      {"scenario", {"preset", "kind", "c_fixed", "use_policy", "fixed_expense"}},
      {"utility", {"kind", "lambda"}},
      {"model", {"beta", "return_rate", "initial_assets"}},
      {"income", {"kind", "mean", "std", "half_width", "sequence", "k"}},
      {"subsistence", {"kind", "mean", "half_width", "std"}},
      {"grid",
       {"a_min", "a_max", "n_points", "n_consumption_points", "tolerance", "max_iterations", "n_income_nodes",
        "c_floor"}},
      {"simulation", {"n_agents", "horizon", "master_seed"}},
      {"output", {"format", "path"}},
  };
  return table;
}

inline std::string where(const std::string& key, const Entry& e) {
  if (e.line > 0) return "line " + std::to_string(e.line) + ": '" + key + "'";
  return "override '" + key + "'";
}

inline void check_known(const std::string& key, const Entry& e) {
  const auto dot = key.find('.');
  const auto section = key.substr(0, dot);
  const auto name = key.substr(dot + 1);
  const auto it = schema().find(section);
  if (it == schema().end()) throw ConfigError(where(key, e) + ": unknown section [" + section + "]");
  if (!it->second.count(name)) throw ConfigError(where(key, e) + ": unknown key '" + name + "' in [" + section + "]");
}

inline EntryMap read_entries(std::string_view text) {
  EntryMap entries;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(line_no) + ": malformed section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (!schema().count(section))
        throw ConfigError("line " + std::to_string(line_no) + ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    if (section.empty()) throw ConfigError("line " + std::to_string(line_no) + ": key outside of any section");
    const std::string key = section + "." + trim(std::string_view(line).substr(0, eq));
    Entry e{trim(std::string_view(line).substr(eq + 1)), line_no};
    check_known(key, e);
    if (entries.count(key)) throw ConfigError(where(key, e) + ": duplicate key");
    entries.emplace(key, std::move(e));
  }
  return entries;
}

// Typed access with line/key context in every error.
class Reader {
 public:
  explicit Reader(const EntryMap& entries) : entries_(entries) {}

  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  std::optional<std::string> text(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second.value;
  }

  std::optional<double> number(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return parse_double(key, it->second, it->second.value);
  }

  std::optional<std::uint64_t> integer(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    const std::string& v = it->second.value;
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size())
      throw ConfigError(where(key, it->second) + ": expected a non-negative integer, got '" + v + "'");
    return out;
  }

  std::optional<bool> boolean(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    const std::string& v = it->second.value;
    if (v == "true") return true;
    if (v == "false") return false;
    throw ConfigError(where(key, it->second) + ": expected true or false, got '" + v + "'");
  }

  std::optional<std::vector<double>> numbers(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    std::vector<double> out;
    std::string item;
    std::istringstream in(it->second.value);
    while (std::getline(in, item, ',')) out.push_back(parse_double(key, it->second, trim(item)));
    return out;
  }

  double required_number(const std::string& key) const {
    auto v = number(key);
    if (!v) throw ConfigError("missing required key '" + key + "'");
    return *v;
  }

  // Re-raises an invariant violation with the key's location attached.
  template <typename Fn>
  auto guarded(const std::string& key, Fn&& fn) const {
    try {
      return fn();
    } catch (const ConfigError& e) {
      throw ConfigError(context(key) + e.what());
    } catch (const DomainError& e) {
      throw ConfigError(context(key) + e.what());
    }
  }

  std::string context(const std::string& key) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? key + ": " : where(key, it->second) + ": ";
  }

 private:
  static double parse_double(const std::string& key, const Entry& e, const std::string& v) {
    try {
      std::size_t used = 0;
      const double out = std::stod(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
      return out;
    } catch (const std::exception&) {
      throw ConfigError(where(key, e) + ": expected a number, got '" + v + "'");
    }
  }

  const EntryMap& entries_;
};

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

/// Parses and validates a run configuration. `overrides` are `section.key=value`
/// strings that replace (or add) document entries.
inline RunConfig parse_config(std::string_view text, const std::vector<std::string>& overrides = {}) {
  using detail::Entry;
  detail::EntryMap entries = detail::read_entries(text);
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + o + "' must look like section.key=value");
    const std::string key = detail::trim(std::string_view(o).substr(0, eq));
    if (key.find('.') == std::string::npos) throw ConfigError("override '" + o + "' must look like section.key=value");
    Entry e{detail::trim(std::string_view(o).substr(eq + 1)), 0};
    detail::check_known(key, e);
    entries[key] = e;
  }
  const detail::Reader r(entries);
  RunConfig cfg;

  // Preset values first; explicit keys override them below.
  const Preset* preset = nullptr;
  if (auto name = r.text("scenario.preset")) {
    preset = r.guarded("scenario.preset", [&]() -> const Preset* { return &find_preset(*name); });
    cfg.preset = *name;
    cfg.scenario = ScenarioKind::impulsive;
    cfg.use_policy = true;
    cfg.utility = UtilityFunction::make(preset->utility, preset->lambda);
    cfg.model = {preset->beta, 1.0, preset->initial_assets};
    cfg.income = IncomeProcess::lognormal(preset->income_mean, preset->income_std);
    cfg.subsistence =
        SubsistenceProcess::lognormal(preset->expenditure_mean, preset->expenditure_cv * preset->expenditure_mean);
    cfg.n_agents = 50000;
    cfg.horizon = 100;
  }

  // [scenario]
  if (auto kind = r.text("scenario.kind")) {
    if (*kind == "obligatory") cfg.scenario = ScenarioKind::obligatory;
    else if (*kind == "impulsive") cfg.scenario = ScenarioKind::impulsive;
    else if (*kind == "true_agency") cfg.scenario = ScenarioKind::true_agency;
    else if (*kind == "custom") cfg.scenario = ScenarioKind::custom;
    else throw ConfigError(r.context("scenario.kind") + "unknown scenario kind '" + *kind + "'");
  } else if (!preset) {
    throw ConfigError("missing required key 'scenario.kind'");
  }
  if (auto v = r.number("scenario.c_fixed")) cfg.c_fixed = *v;
  if (auto v = r.boolean("scenario.use_policy")) cfg.use_policy = *v;
  if (auto v = r.number("scenario.fixed_expense")) cfg.fixed_expense = *v;
  if (cfg.scenario == ScenarioKind::obligatory && !r.has("scenario.c_fixed"))
    throw ConfigError("missing required key 'scenario.c_fixed' for the obligatory scenario");
  if (!(cfg.c_fixed >= 0.0)) throw ConfigError(r.context("scenario.c_fixed") + "c_fixed must be >= 0");
  if (!(cfg.fixed_expense >= 0.0))
    throw ConfigError(r.context("scenario.fixed_expense") + "fixed_expense must be >= 0");

  // [utility]
  if (auto kind = r.text("utility.kind")) {
    const UtilityKind k = r.guarded("utility.kind", [&] { return utility_kind_from_string(*kind); });
    const double lambda = r.number("utility.lambda").value_or(cfg.utility.lambda());
    cfg.utility = r.guarded("utility.lambda", [&] { return UtilityFunction::make(k, lambda); });
  } else if (r.has("utility.lambda")) {
    const double lambda = *r.number("utility.lambda");
    cfg.utility = r.guarded("utility.lambda", [&] { return UtilityFunction::make(cfg.utility.kind(), lambda); });
  } else if (!preset) {
    throw ConfigError("missing required key 'utility.kind'");
  }

  // [model]
  if (!preset) {
    cfg.model.beta = r.required_number("model.beta");
    cfg.model.initial_assets = r.required_number("model.initial_assets");
  }
  if (auto v = r.number("model.beta")) cfg.model.beta = *v;
  if (auto v = r.number("model.return_rate")) cfg.model.return_rate = *v;
  if (auto v = r.number("model.initial_assets")) cfg.model.initial_assets = *v;
  if (!(cfg.model.beta > 0.0 && cfg.model.beta < 1.0))
    throw ConfigError(r.context("model.beta") + "beta = " + detail::format_number(cfg.model.beta) +
                      " must lie in the open interval (0,1)");
  r.guarded("model.return_rate", [&] { cfg.model.validate(); return 0; });

  // [income]
  if (auto kind = r.text("income.kind")) {
    const IncomeKind k = r.guarded("income.kind", [&] { return income_kind_from_string(*kind); });
    cfg.income = r.guarded("income.kind", [&] {
      switch (k) {
        case IncomeKind::constant: return IncomeProcess::constant(r.required_number("income.mean"));
        case IncomeKind::lognormal:
          return IncomeProcess::lognormal(r.required_number("income.mean"), r.required_number("income.std"));
        case IncomeKind::bounded_uniform:
          return IncomeProcess::bounded_uniform(r.required_number("income.mean"),
                                                r.required_number("income.half_width"));
        case IncomeKind::fixed_sequence: {
          auto seq = r.numbers("income.sequence");
          if (!seq) throw ConfigError("missing required key 'income.sequence'");
          return IncomeProcess::fixed_sequence(*seq);
        }
        case IncomeKind::lookahead_instance: {
          auto k_val = r.integer("income.k");
          if (!k_val) throw ConfigError("missing required key 'income.k'");
          return IncomeProcess::lookahead_instance(static_cast<int>(*k_val), r.number("income.mean").value_or(1.0));
        }
      }
      return IncomeProcess::constant(0.0);
    });
  } else if (!preset) {
    throw ConfigError("missing required key 'income.kind'");
  } else {
    for (const char* key : {"income.mean", "income.std", "income.half_width", "income.sequence", "income.k"})
      if (r.has(key)) throw ConfigError(r.context(key) + "set income.kind when overriding preset income values");
  }

  // [subsistence]
  if (auto kind = r.text("subsistence.kind")) {
    if (*kind == "none") {
      cfg.subsistence.reset();
    } else {
      const SubsistenceKind k = r.guarded("subsistence.kind", [&] { return subsistence_kind_from_string(*kind); });
      cfg.subsistence = r.guarded("subsistence.kind", [&] {
        switch (k) {
          case SubsistenceKind::constant: return SubsistenceProcess::constant(r.required_number("subsistence.mean"));
          case SubsistenceKind::bounded_uniform:
            return SubsistenceProcess::bounded_uniform(r.required_number("subsistence.mean"),
                                                       r.required_number("subsistence.half_width"));
          case SubsistenceKind::lognormal:
            return SubsistenceProcess::lognormal(r.required_number("subsistence.mean"),
                                                 r.required_number("subsistence.std"));
        }
        return SubsistenceProcess::constant(0.0);
      });
    }
  }
  if (cfg.scenario == ScenarioKind::impulsive && !cfg.subsistence)
    throw ConfigError("the impulsive scenario needs a [subsistence] section");

  // [grid]: defaults depend on the model, then explicit keys override.
  cfg.grid = r.guarded("income.mean", [&] { return default_grid_spec(cfg.model, cfg.income, cfg.utility); });
  if (auto v = r.number("grid.a_min")) cfg.grid.a_min = *v;
  if (auto v = r.number("grid.a_max")) cfg.grid.a_max = *v;
  if (auto v = r.integer("grid.n_points")) cfg.grid.n_points = static_cast<int>(*v);
  if (auto v = r.integer("grid.n_consumption_points")) cfg.grid.n_consumption_points = static_cast<int>(*v);
  if (auto v = r.number("grid.tolerance")) cfg.grid.tolerance = *v;
  if (auto v = r.integer("grid.max_iterations")) cfg.grid.max_iterations = static_cast<long>(*v);
  if (auto v = r.integer("grid.n_income_nodes")) cfg.grid.n_income_nodes = static_cast<int>(*v);
  if (auto v = r.number("grid.c_floor")) cfg.grid.c_floor = *v;
  r.guarded("grid.a_max", [&] { cfg.grid.validate(); return 0; });

  // [simulation]
  if (auto v = r.integer("simulation.n_agents")) cfg.n_agents = *v;
  if (auto v = r.integer("simulation.horizon")) cfg.horizon = *v;
  if (auto v = r.integer("simulation.master_seed")) cfg.master_seed = *v;
  if (cfg.n_agents < 1) throw ConfigError(r.context("simulation.n_agents") + "n_agents must be >= 1");
  if (cfg.horizon < 1) throw ConfigError(r.context("simulation.horizon") + "horizon must be >= 1");

  // [output]
  if (auto v = r.text("output.format")) cfg.output_format = *v;
  if (auto v = r.text("output.path")) cfg.output_path = *v;
  if (cfg.output_format != "csv" && cfg.output_format != "json")
    throw ConfigError(r.context("output.format") + "format must be csv or json");
  if (cfg.output_path.empty()) throw ConfigError(r.context("output.path") + "path must not be empty");

  if (cfg.scenario == ScenarioKind::true_agency) {
    if (!(cfg.model.beta > 0.5)) throw ConfigError("true_agency scenario needs beta > 1/2");
    if (!(cfg.model.return_rate >= 1.0)) throw ConfigError("true_agency scenario needs return_rate >= 1");
    if (cfg.income.lower_bound() < cfg.fixed_expense)
      throw ConfigError("true_agency scenario needs every income draw >= scenario.fixed_expense");
  }
  return cfg;
}

/// Ordered (section, key, value) triples of the fully resolved configuration.
inline std::vector<std::tuple<std::string, std::string, std::string>> config_entries(const RunConfig& cfg) {
  using detail::format_number;
  std::vector<std::tuple<std::string, std::string, std::string>> out;
  auto add = [&](const char* s, const char* k, std::string v) { out.emplace_back(s, k, std::move(v)); };
  if (cfg.preset) add("scenario", "preset", *cfg.preset);
  add("scenario", "kind", std::string(to_string(cfg.scenario)));
  add("scenario", "c_fixed", format_number(cfg.c_fixed));
  add("scenario", "use_policy", cfg.use_policy ? "true" : "false");
  add("scenario", "fixed_expense", format_number(cfg.fixed_expense));
  add("utility", "kind", std::string(to_string(cfg.utility.kind())));
  if (cfg.utility.is_isoelastic()) add("utility", "lambda", format_number(cfg.utility.lambda()));
  add("model", "beta", format_number(cfg.model.beta));
  add("model", "return_rate", format_number(cfg.model.return_rate));
  add("model", "initial_assets", format_number(cfg.model.initial_assets));
  const auto& inc = cfg.income;
  add("income", "kind", std::string(to_string(inc.kind())));
  switch (inc.kind()) {
    case IncomeKind::constant: add("income", "mean", format_number(inc.mean())); break;
    case IncomeKind::lognormal:
      add("income", "mean", format_number(inc.mean()));
      add("income", "std", format_number(inc.std()));
      break;
    case IncomeKind::bounded_uniform:
      add("income", "mean", format_number(inc.mean()));
      add("income", "half_width", format_number(inc.half_width()));
      break;
    case IncomeKind::fixed_sequence: {
      std::string seq;
      for (std::size_t i = 0; i < inc.sequence().size(); ++i) {
        if (i) seq += ",";
        seq += format_number(inc.sequence()[i]);
      }
      add("income", "sequence", seq);
      break;
    }
    case IncomeKind::lookahead_instance:
      add("income", "mean", format_number(inc.mean()));
      add("income", "k", std::to_string(inc.k()));
      break;
  }
  if (!cfg.subsistence) {
    add("subsistence", "kind", "none");
  } else {
    const auto& s = *cfg.subsistence;
    add("subsistence", "kind", std::string(to_string(s.kind())));
    add("subsistence", "mean", format_number(s.mean()));
    if (s.kind() == SubsistenceKind::bounded_uniform) add("subsistence", "half_width", format_number(s.spread()));
    if (s.kind() == SubsistenceKind::lognormal) add("subsistence", "std", format_number(s.spread()));
  }
  add("grid", "a_min", format_number(cfg.grid.a_min));
  add("grid", "a_max", format_number(cfg.grid.a_max));
  add("grid", "n_points", std::to_string(cfg.grid.n_points));
  add("grid", "n_consumption_points", std::to_string(cfg.grid.n_consumption_points));
  add("grid", "tolerance", format_number(cfg.grid.tolerance));
  add("grid", "max_iterations", std::to_string(cfg.grid.max_iterations));
  add("grid", "n_income_nodes", std::to_string(cfg.grid.n_income_nodes));
  add("grid", "c_floor", format_number(cfg.grid.c_floor));
  add("simulation", "n_agents", std::to_string(cfg.n_agents));
  add("simulation", "horizon", std::to_string(cfg.horizon));
  add("simulation", "master_seed", std::to_string(cfg.master_seed));
  add("output", "format", cfg.output_format);
  add("output", "path", cfg.output_path);
  return out;
}

/// Normalized document with every default spelled out; parse_config of the
/// result reproduces `cfg`.
inline std::string dump_config(const RunConfig& cfg) {
  std::string out;
  std::string section;
  for (const auto& [s, k, v] : config_entries(cfg)) {
    if (s != section) {
      if (!section.empty()) out += "\n";
      out += "[" + s + "]\n";
      section = s;
    }
    out += k + " = " + v + "\n";
  }
  return out;
}

/// Cohort configuration for `cfg`; `policy` is required when cfg.needs_policy().
inline CohortConfig make_cohort_config(const RunConfig& cfg, std::shared_ptr<const Policy> policy) {
  if (cfg.needs_policy() && !policy) throw ConfigError("this scenario needs a solved policy");
  CohortConfig c;
  c.n_agents = cfg.n_agents;
  c.horizon = cfg.horizon;
  c.master_seed = cfg.master_seed;
  c.model = cfg.model;
  c.income = cfg.income;
  switch (cfg.scenario) {
    case ScenarioKind::obligatory: c.scenario = scenario::Obligatory{cfg.c_fixed}; break;
    case ScenarioKind::impulsive:
      c.scenario = scenario::Impulsive{cfg.use_policy ? policy : nullptr, *cfg.subsistence};
      break;
    case ScenarioKind::true_agency: c.scenario = scenario::TrueAgency{policy, cfg.fixed_expense}; break;
    case ScenarioKind::custom: c.scenario = scenario::Custom{policy}; break;
  }
  c.validate();
  return c;
}

}  // namespace ruinlab
