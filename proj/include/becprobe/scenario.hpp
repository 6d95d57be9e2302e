#pragma once

// JSON scenario: SI units with explicit suffixes on physical fields, internal
// units (sigma, E_sigma, hbar/E_sigma) on grids. Every field has a default, so
// "{}" is a valid Model-I 3D scenario.

#include <becprobe/decoherence.hpp>
#include <becprobe/dispersion.hpp>
#include <becprobe/nonmarkov.hpp>
#include <becprobe/roots.hpp>
#include <becprobe/spectral.hpp>
#include <becprobe/units.hpp>

#include <json.hpp>

#include <cmath>
#include <cstddef>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace becprobe {

inline constexpr const char* version = "1.0.0";

/// Validation failure tied to a config field ("gas.density_per_um_D: ...").
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& field, const std::string& msg)
      : std::invalid_argument(field + ": " + msg), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

namespace defaults {
inline constexpr double sigma_nm = 120.0;
inline constexpr double separation_sigma = 1.5;
inline constexpr double scattering_length_nm = constants::rb87_scattering_length * 1e9;
/// Densities per um^D for D = 1, 2, 3.
inline constexpr double density_per_um_d[3] = {0.4, 2.0, 10.0};
}  // namespace defaults

struct TimeGridSpec {
  double t_min = 1e-3;
  double t_max = 50.0;
  std::size_t points = 400;
  numeric::GridSpacing spacing = numeric::GridSpacing::logarithmic;
  /// Prepend t = 0 to the grid.
  bool include_zero = false;

  std::vector<double> grid() const {
    auto g = numeric::make_grid(t_min, t_max, points, spacing);
    if (include_zero) g.insert(g.begin(), 0.0);
    return g;
  }
};

struct FrequencyGridSpec {
  double omega_min = 1e-3;
  double omega_max = 60.0;
  std::size_t points = 600;
  numeric::GridSpacing spacing = numeric::GridSpacing::logarithmic;

  std::vector<double> grid() const { return numeric::make_grid(omega_min, omega_max, points, spacing); }
};

struct ScanSpec {
  double a_min_nm = 0.05 * defaults::scattering_length_nm;
  double a_max_nm = 5.0 * defaults::scattering_length_nm;
  std::size_t points = 16;
  numeric::GridSpacing spacing = numeric::GridSpacing::logarithmic;
  double bisect_tol_nm = 1e-3 * defaults::scattering_length_nm;
  bool bisect = true;

  std::vector<double> values_m() const {
    auto v = numeric::make_grid(a_min_nm, a_max_nm, points, spacing);
    for (double& x : v) x *= 1e-9;
    return v;
  }
};

enum class RunKind { gamma, spectrum, crossover };

inline std::string to_string(RunKind k) {
  switch (k) {
    case RunKind::gamma: return "gamma";
    case RunKind::spectrum: return "spectrum";
    case RunKind::crossover: return "crossover";
  }
  return "unknown";
}

struct SweepSpec {
  RunKind kind = RunKind::gamma;
  std::vector<ProbeModel> models;
  std::vector<int> dimensions;
  std::vector<double> scattering_lengths_nm;
  std::vector<double> temperatures_nK;
};

struct Scenario {
  std::string name = "scenario";
  GasParameters gas;
  ProbeGeometry probe;
  TimeGridSpec time_grid;
  FrequencyGridSpec frequency_grid;
  OhmicityOptions ohmicity;
  BackflowSettings backflow;
  ScanSpec scan;
  DecoherenceOptions decoherence;
  std::optional<SweepSpec> sweep;
  /// The document this scenario was parsed from, after default resolution.
  nlohmann::ordered_json resolved;
  /// The document as given, used to derive sweep cells.
  nlohmann::ordered_json source;

  UnitSystem units() const { return UnitSystem(probe.sigma, gas.boson_mass); }
  ReducedMedium medium() const { return reduce(gas, probe); }
};

namespace detail {

using json = nlohmann::ordered_json;

/// Reads one object section, rejecting unknown keys.
class Section {
 public:
  Section(const json& parent, std::string name, const std::set<std::string>& allowed)
      : name_(std::move(name)) {
    if (parent.contains(name_)) {
      node_ = parent.at(name_);
      if (!node_.is_object()) throw ConfigError(name_, "must be an object");
    } else {
      node_ = json::object();
    }
    for (const auto& [k, v] : node_.items()) {
      if (!allowed.count(k)) throw ConfigError(path(k), "unknown field");
    }
  }

  bool has(const std::string& key) const { return node_.contains(key); }
  std::string path(const std::string& key) const { return name_ + "." + key; }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return record(key, fallback);
    const auto& v = node_.at(key);
    if (!v.is_number()) throw ConfigError(path(key), "must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(path(key), "must be finite");
    return record(key, x);
  }

  double positive(const std::string& key, double fallback) {
    const double x = number(key, fallback);
    if (!(x > 0.0)) throw ConfigError(path(key), "must be > 0");
    return x;
  }

  double non_negative(const std::string& key, double fallback) {
    const double x = number(key, fallback);
    if (!(x >= 0.0)) throw ConfigError(path(key), "must be >= 0");
    return x;
  }

  std::size_t count(const std::string& key, std::size_t fallback, std::size_t minimum) {
    std::size_t n = fallback;
    if (has(key)) {
      const auto& v = node_.at(key);
      if (!v.is_number_integer() || v.get<long long>() < 0) {
        throw ConfigError(path(key), "must be a non-negative integer");
      }
      n = v.get<std::size_t>();
    }
    if (n < minimum) throw ConfigError(path(key), "must be >= " + std::to_string(minimum));
    out_[key] = n;
    return n;
  }

  std::string text(const std::string& key, const std::string& fallback, const std::set<std::string>& choices) {
    std::string s = fallback;
    if (has(key)) {
      if (!node_.at(key).is_string()) throw ConfigError(path(key), "must be a string");
      s = node_.at(key).get<std::string>();
    }
    if (!choices.empty() && !choices.count(s)) {
      std::string list;
      for (const auto& c : choices) list += (list.empty() ? "" : ", ") + c;
      throw ConfigError(path(key), "must be one of {" + list + "}");
    }
    out_[key] = s;
    return s;
  }

  bool flag(const std::string& key, bool fallback) {
    bool b = fallback;
    if (has(key)) {
      if (!node_.at(key).is_boolean()) throw ConfigError(path(key), "must be true or false");
      b = node_.at(key).get<bool>();
    }
    out_[key] = b;
    return b;
  }

  const json& raw(const std::string& key) const { return node_.at(key); }
  void echo(const std::string& key, json v) { out_[key] = std::move(v); }
  json resolved() const { return out_; }

 private:
  double record(const std::string& key, double x) {
    out_[key] = x;
    return x;
  }

  std::string name_;
  json node_;
  json out_ = json::object();
};

inline numeric::GridSpacing parse_spacing(Section& s, const std::string& fallback) {
  return s.text("spacing", fallback, {"log", "linear"}) == "log" ? numeric::GridSpacing::logarithmic
                                                                 : numeric::GridSpacing::linear;
}

inline ProbeModel parse_model(const std::string& field, const json& v) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "I") return ProbeModel::double_well;
    if (s == "II") return ProbeModel::internal_state;
  }
  throw ConfigError(field, "must be \"I\" or \"II\"");
}

template <class T, class Parse>
std::vector<T> parse_list(const Section& s, const std::string& key, Parse parse) {
  std::vector<T> out;
  if (!s.has(key)) return out;
  const auto& v = s.raw(key);
  if (!v.is_array() || v.empty()) throw ConfigError(s.path(key), "must be a non-empty array");
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(parse(s.path(key) + "[" + std::to_string(i) + "]", v[i]));
  return out;
}

inline double parse_number(const std::string& field, const json& v) {
  if (!v.is_number() || !std::isfinite(v.get<double>())) throw ConfigError(field, "must be a finite number");
  return v.get<double>();
}

}  // namespace detail

inline Scenario parse_scenario(const nlohmann::ordered_json& doc) {
  using detail::Section;
  if (!doc.is_object()) throw ConfigError("(root)", "scenario must be a JSON object");
  const std::set<std::string> top = {"name",     "gas",        "probe", "time_grid", "frequency_grid", "ohmicity",
                                     "backflow", "quadrature", "scan",  "sweep"};
  for (const auto& [k, v] : doc.items()) {
    if (!top.count(k)) throw ConfigError(k, "unknown field");
  }
  Scenario sc;
  nlohmann::ordered_json out = nlohmann::ordered_json::object();
  if (doc.contains("name")) {
    if (!doc["name"].is_string() || doc["name"].get<std::string>().empty()) {
      throw ConfigError("name", "must be a non-empty string");
    }
    sc.name = doc["name"].get<std::string>();
    if (sc.name.find_first_of("/\\") != std::string::npos) throw ConfigError("name", "must not contain path separators");
  }
  out["name"] = sc.name;

  Section gas(doc, "gas",
              {"dimension", "boson_mass_u", "scattering_length_nm", "density_per_um_D", "temperature_nK",
               "transverse_length_nm"});
  Section probe(doc, "probe",
                {"model", "impurity_mass_u", "coupling_scattering_length_nm", "sigma_nm", "separation_nm",
                 "convention"});

  // Probe first: sigma is the default transverse length.
  const std::string model = probe.text("model", "I", {"I", "II"});
  sc.probe.model = model == "I" ? ProbeModel::double_well : ProbeModel::internal_state;
  const double sigma_nm = probe.positive("sigma_nm", defaults::sigma_nm);
  sc.probe.sigma = sigma_nm * 1e-9;
  sc.probe.impurity_mass = probe.positive("impurity_mass_u", constants::rb87_mass / constants::atomic_mass_unit) *
                           constants::atomic_mass_unit;
  sc.probe.coupling_scattering_length =
      probe.number("coupling_scattering_length_nm", defaults::scattering_length_nm) * 1e-9;
  if (sc.probe.model == ProbeModel::double_well) {
    sc.probe.separation = probe.positive("separation_nm", defaults::separation_sigma * sigma_nm) * 1e-9;
  } else if (probe.has("separation_nm")) {
    throw ConfigError(probe.path("separation_nm"), "only defined for Model I");
  }
  sc.probe.convention = probe.text("convention", "full", {"full", "half"}) == "full"
                            ? InterferenceConvention::full_separation
                            : InterferenceConvention::half_separation;

  const double dim = gas.number("dimension", 3);
  if (dim != 1 && dim != 2 && dim != 3) throw ConfigError(gas.path("dimension"), "must be 1, 2 or 3");
  sc.gas.dimension = static_cast<int>(dim);
  gas.echo("dimension", sc.gas.dimension);
  sc.gas.boson_mass = gas.positive("boson_mass_u", constants::rb87_mass / constants::atomic_mass_unit) *
                      constants::atomic_mass_unit;
  sc.gas.scattering_length = gas.non_negative("scattering_length_nm", defaults::scattering_length_nm) * 1e-9;
  const double density = gas.positive("density_per_um_D", defaults::density_per_um_d[sc.gas.dimension - 1]);
  sc.gas.density = density * std::pow(1e6, sc.gas.dimension);
  sc.gas.temperature = gas.non_negative("temperature_nK", 0.0) * 1e-9;
  if (sc.gas.dimension < 3) {
    sc.gas.transverse_length = gas.positive("transverse_length_nm", sigma_nm) * 1e-9;
  } else if (gas.has("transverse_length_nm")) {
    throw ConfigError(gas.path("transverse_length_nm"), "only used for dimension 1 or 2");
  }
  out["gas"] = gas.resolved();
  out["probe"] = probe.resolved();

  Section tg(doc, "time_grid", {"t_min", "t_max", "points", "spacing", "include_zero"});
  sc.time_grid.t_min = tg.positive("t_min", sc.time_grid.t_min);
  sc.time_grid.t_max = tg.positive("t_max", sc.time_grid.t_max);
  sc.time_grid.points = tg.count("points", sc.time_grid.points, 2);
  sc.time_grid.spacing = detail::parse_spacing(tg, "log");
  sc.time_grid.include_zero = tg.flag("include_zero", false);
  if (!(sc.time_grid.t_max > sc.time_grid.t_min)) throw ConfigError(tg.path("t_max"), "must exceed t_min");
  out["time_grid"] = tg.resolved();

  Section fg(doc, "frequency_grid", {"omega_min", "omega_max", "points", "spacing"});
  sc.frequency_grid.omega_min = fg.positive("omega_min", sc.frequency_grid.omega_min);
  sc.frequency_grid.omega_max = fg.positive("omega_max", sc.frequency_grid.omega_max);
  sc.frequency_grid.points = fg.count("points", sc.frequency_grid.points, 2);
  sc.frequency_grid.spacing = detail::parse_spacing(fg, "log");
  if (!(sc.frequency_grid.omega_max > sc.frequency_grid.omega_min)) {
    throw ConfigError(fg.path("omega_max"), "must exceed omega_min");
  }
  out["frequency_grid"] = fg.resolved();

  Section oh(doc, "ohmicity", {"window_lo", "window_hi", "points", "classification_tol"});
  sc.ohmicity.window_lo = oh.positive("window_lo", sc.ohmicity.window_lo);
  sc.ohmicity.window_hi = oh.positive("window_hi", sc.ohmicity.window_hi);
  sc.ohmicity.points = oh.count("points", sc.ohmicity.points, 50);
  sc.ohmicity.classification_tol = oh.positive("classification_tol", sc.ohmicity.classification_tol);
  if (!(sc.ohmicity.window_hi > sc.ohmicity.window_lo)) throw ConfigError(oh.path("window_hi"), "must exceed window_lo");
  out["ohmicity"] = oh.resolved();

  Section bf(doc, "backflow", {"t_min", "t_max", "points", "threshold", "root_rel_tol"});
  sc.backflow.t_min = bf.positive("t_min", sc.backflow.t_min);
  sc.backflow.t_max = bf.positive("t_max", sc.backflow.t_max);
  sc.backflow.grid_points = bf.count("points", sc.backflow.grid_points, 2);
  sc.backflow.threshold = bf.positive("threshold", sc.backflow.threshold);
  sc.backflow.root_rel_tol = bf.positive("root_rel_tol", sc.backflow.root_rel_tol);
  if (!(sc.backflow.t_max > sc.backflow.t_min)) throw ConfigError(bf.path("t_max"), "must exceed t_min");
  out["backflow"] = bf.resolved();

  Section q(doc, "quadrature", {"rel_tol", "abs_tol", "max_evaluations", "momentum_split"});
  sc.decoherence.quadrature.rel_tol = q.positive("rel_tol", sc.decoherence.quadrature.rel_tol);
  sc.decoherence.quadrature.abs_tol = q.positive("abs_tol", sc.decoherence.quadrature.abs_tol);
  sc.decoherence.quadrature.max_evaluations =
      q.count("max_evaluations", sc.decoherence.quadrature.max_evaluations, 15);
  sc.decoherence.momentum_split = q.positive("momentum_split", sc.decoherence.momentum_split);
  out["quadrature"] = q.resolved();

  Section sn(doc, "scan", {"a_min_nm", "a_max_nm", "points", "spacing", "bisect_tol_nm", "bisect"});
  sc.scan.a_min_nm = sn.positive("a_min_nm", sc.scan.a_min_nm);
  sc.scan.a_max_nm = sn.positive("a_max_nm", sc.scan.a_max_nm);
  sc.scan.points = sn.count("points", sc.scan.points, 2);
  sc.scan.spacing = detail::parse_spacing(sn, "log");
  sc.scan.bisect_tol_nm = sn.positive("bisect_tol_nm", sc.scan.bisect_tol_nm);
  sc.scan.bisect = sn.flag("bisect", true);
  if (!(sc.scan.a_max_nm > sc.scan.a_min_nm)) throw ConfigError(sn.path("a_max_nm"), "must exceed a_min_nm");
  out["scan"] = sn.resolved();

  if (doc.contains("sweep")) {
    Section sw(doc, "sweep", {"kind", "models", "dimensions", "scattering_lengths_nm", "temperatures_nK"});
    SweepSpec spec;
    const auto kind = sw.text("kind", "gamma", {"gamma", "spectrum", "crossover"});
    spec.kind = kind == "gamma" ? RunKind::gamma : kind == "spectrum" ? RunKind::spectrum : RunKind::crossover;
    spec.models = detail::parse_list<ProbeModel>(sw, "models", detail::parse_model);
    spec.dimensions = detail::parse_list<int>(sw, "dimensions", [](const std::string& f, const nlohmann::ordered_json& v) {
      if (!v.is_number_integer() || v.get<int>() < 1 || v.get<int>() > 3) throw ConfigError(f, "must be 1, 2 or 3");
      return v.get<int>();
    });
    spec.scattering_lengths_nm = detail::parse_list<double>(sw, "scattering_lengths_nm", [](const std::string& f, const nlohmann::ordered_json& v) {
      const double x = detail::parse_number(f, v);
      if (x < 0.0) throw ConfigError(f, "must be >= 0");
      return x;
    });
    spec.temperatures_nK = detail::parse_list<double>(sw, "temperatures_nK", [](const std::string& f, const nlohmann::ordered_json& v) {
      const double x = detail::parse_number(f, v);
      if (x < 0.0) throw ConfigError(f, "must be >= 0");
      return x;
    });
    for (const char* key : {"models", "dimensions", "scattering_lengths_nm", "temperatures_nK"}) {
      if (sw.has(key)) sw.echo(key, sw.raw(key));
    }
    sc.sweep = spec;
    out["sweep"] = sw.resolved();
  }

  try {
    validate(sc.gas);
    validate(sc.probe);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("(physics)", e.what());
  }
  sc.resolved = out;
  sc.source = doc;
  return sc;
}

inline Scenario parse_scenario_text(const std::string& text) {
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("(document)", std::string("invalid JSON: ") + e.what());
  }
  return parse_scenario(doc);
}

}  // namespace becprobe
