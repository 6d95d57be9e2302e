#pragma once

// Scenario execution and file emission. Each run writes CSV data plus a JSON
// sidecar; the sidecar is written last, so its presence marks a finished cell.

#include <becprobe/decoherence.hpp>
#include <becprobe/nonmarkov.hpp>
#include <becprobe/parallel.hpp>
#include <becprobe/scenario.hpp>
#include <becprobe/spectral.hpp>

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace becprobe {

struct RunOptions {
  std::filesystem::path out_dir = ".";
  unsigned threads = 1;
  bool resume = false;
};

struct RunOutcome {
  std::vector<std::filesystem::path> files;
  std::size_t cells = 0;
  std::size_t failed_cells = 0;
  std::size_t skipped_cells = 0;

  bool numerical_failure() const { return failed_cells > 0; }

  void merge(const RunOutcome& o) {
    files.insert(files.end(), o.files.begin(), o.files.end());
    cells += o.cells;
    failed_cells += o.failed_cells;
    skipped_cells += o.skipped_cells;
  }
};

namespace io {

using json = nlohmann::ordered_json;

inline std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Write through a temporary so an interrupted run never leaves a truncated file.
inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    f << content;
    if (!f) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline json read_json(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path.string());
  return json::parse(f);
}

inline std::vector<std::string> assumption_log(const Scenario& sc) {
  std::vector<std::string> log = {
      "thermal factor: T = 0 integrand multiplied by coth(E_k / 2 k_B T)",
      "continuum limit: Omega^-1 sum_k -> (2 pi)^-D int d^D k",
      "spectral density: delta(omega - E_k / hbar), Bogoliubov frequency",
      "prefactor: Model I and Model II share g_AB^2 n0; Model I carries the direction-averaged interference factor",
      std::string("Model I interference: ") +
          (sc.probe.convention == InterferenceConvention::full_separation ? "sin^2(k.L)" : "sin^2(k.L/2)"),
      "couplings: g = 4 pi hbar^2 a / m; for D < 3 divided by transverse_length^(3-D)",
      "non-Markovianity: N = sum over Gamma' < 0 intervals of Gamma(start) - Gamma(end); Markovian iff N < " +
          fmt(sc.backflow.threshold),
      "fractional measure: (e^-Gamma(b) - e^-Gamma(a)) / (1 - e^-Gamma(a)), maximising interval",
      "parameter defaults are illustrative and not fitted to any measurement",
  };
  return log;
}

inline json unit_system(const Scenario& sc) {
  const auto u = sc.units();
  json j;
  j["length_m"] = u.length_unit();
  j["energy_J"] = u.energy_unit();
  j["time_s"] = u.time_unit();
  j["momentum_per_m"] = u.momentum_unit();
  j["temperature_K"] = u.temperature_unit();
  j["frequency_rad_per_s"] = u.frequency_unit();
  return j;
}

inline json reduced(const ReducedMedium& m) {
  json j;
  j["dimension"] = m.dimension;
  j["model"] = std::string(to_string(m.model));
  j["nu"] = m.nu;
  j["prefactor"] = m.prefactor;
  j["separation_sigma"] = m.separation;
  j["temperature"] = m.temperature;
  return j;
}

inline json metadata(const Scenario& sc, RunKind kind) {
  json j;
  j["version"] = version;
  j["kind"] = to_string(kind);
  j["config"] = sc.resolved;
  j["unit_system"] = unit_system(sc);
  j["reduced"] = reduced(sc.medium());
  j["assumptions"] = assumption_log(sc);
  return j;
}

inline std::string csv_preamble(const json& meta) {
  std::string s = "# becprobe " + meta["version"].get<std::string>() + " " + meta["kind"].get<std::string>() + "\n";
  s += "# config: " + meta["config"].dump() + "\n";
  s += "# unit_system: " + meta["unit_system"].dump() + "\n";
  s += "# reduced: " + meta["reduced"].dump() + "\n";
  for (const auto& a : meta["assumptions"]) s += "# assumption: " + a.get<std::string>() + "\n";
  return s;
}

inline json to_json(const BackflowReport& r) {
  json j;
  j["N"] = r.measure;
  j["N_frac"] = r.fractional;
  j["markovian"] = r.markovian;
  j["complete"] = r.complete;
  j["multiple_intervals"] = r.multiple_intervals;
  j["intervals"] = json::array();
  for (const auto& iv : r.intervals) {
    j["intervals"].push_back({{"t_start", iv.t_start},
                              {"t_end", iv.t_end},
                              {"gamma_start", iv.gamma_start},
                              {"gamma_end", iv.gamma_end},
                              {"truncated", iv.truncated}});
  }
  j["scan"] = {{"t_min", r.settings.t_min},
               {"t_max", r.settings.t_max},
               {"points", r.settings.grid_points},
               {"threshold", r.settings.threshold}};
  return j;
}

inline BackflowReport backflow_from_json(const json& j, const BackflowSettings& s) {
  BackflowReport r;
  r.settings = s;
  r.measure = j.at("N").get<double>();
  r.fractional = j.at("N_frac").get<double>();
  r.markovian = j.at("markovian").get<bool>();
  r.complete = j.at("complete").get<bool>();
  r.multiple_intervals = j.at("multiple_intervals").get<bool>();
  for (const auto& iv : j.at("intervals")) {
    r.intervals.push_back({iv.at("t_start").get<double>(), iv.at("t_end").get<double>(),
                           iv.at("gamma_start").get<double>(), iv.at("gamma_end").get<double>(),
                           iv.at("truncated").get<bool>()});
  }
  return r;
}

inline std::filesystem::path sidecar_path(const RunOptions& o, const std::string& name) {
  return o.out_dir / (name + ".json");
}

}  // namespace io

inline RunOutcome run_gamma(const Scenario& sc, const RunOptions& opt) {
  RunOutcome out;
  out.cells = 1;
  const auto sidecar = io::sidecar_path(opt, sc.name);
  if (opt.resume && std::filesystem::exists(sidecar)) {
    out.skipped_cells = 1;
    return out;
  }
  const auto m = sc.medium();
  check_infrared(m);
  const auto curve = gamma_curve(m, sc.time_grid.grid(), sc.decoherence, opt.threads);

  auto meta = io::metadata(sc, RunKind::gamma);
  std::string csv = io::csv_preamble(meta) + "t,gamma,gamma_prime,coherence,err\n";
  io::json failed = io::json::array();
  for (std::size_t i = 0; i < curve.times.size(); ++i) {
    csv += io::fmt(curve.times[i]) + "," + io::fmt(curve.gamma[i]) + "," + io::fmt(curve.gamma_prime[i]) + "," +
           io::fmt(curve.coherence[i]) + "," + io::fmt(curve.error_estimates[i]) + "\n";
    if (!curve.converged[i]) failed.push_back(curve.times[i]);
  }
  const auto csv_path = opt.out_dir / (sc.name + ".csv");
  io::write_file(csv_path, csv);

  meta["results"] = {{"points", curve.times.size()},
                     {"failures", curve.failures()},
                     {"failed_times", failed},
                     {"gamma_final", curve.gamma.back()},
                     {"coherence_final", curve.coherence.back()},
                     {"data", csv_path.filename().string()}};
  io::write_file(sidecar, meta.dump(2) + "\n");
  out.files = {csv_path, sidecar};
  out.failed_cells = curve.failures() > 0 ? 1 : 0;
  return out;
}

inline RunOutcome run_spectrum(const Scenario& sc, const RunOptions& opt) {
  RunOutcome out;
  out.cells = 1;
  const auto sidecar = io::sidecar_path(opt, sc.name);
  if (opt.resume && std::filesystem::exists(sidecar)) {
    out.skipped_cells = 1;
    return out;
  }
  const auto m = sc.medium();
  const auto meta_base = io::metadata(sc, RunKind::spectrum);
  auto meta = meta_base;
  const std::string header = io::csv_preamble(meta) + "omega,J\n";

  const auto full = sample_spectrum(m, sc.frequency_grid.grid());
  std::string csv = header;
  for (std::size_t i = 0; i < full.omegas.size(); ++i) {
    csv += io::fmt(full.omegas[i]) + "," + io::fmt(full.values[i]) + "\n";
  }
  const auto full_path = opt.out_dir / (sc.name + ".csv");
  io::write_file(full_path, csv);

  io::json results;
  bool failed = false;
  double lo = sc.ohmicity.window_lo;
  double hi = sc.ohmicity.window_hi;
  try {
    const auto rep = ohmicity(m, sc.ohmicity);
    lo = rep.fit.window_lo;
    hi = rep.fit.window_hi;
    results["ohmicity"] = {{"s", rep.s},
                           {"amplitude", rep.fit.amplitude},
                           {"r_squared", rep.fit.r_squared},
                           {"window", {rep.fit.window_lo, rep.fit.window_hi}},
                           {"points", rep.fit.points},
                           {"classification", std::string(to_string(rep.classification))},
                           {"supercritical", rep.supercritical},
                           {"window_adjusted", rep.window_adjusted},
                           {"classification_tol", sc.ohmicity.classification_tol}};
  } catch (const std::exception& e) {
    failed = true;
    results["ohmicity"] = nullptr;
    results["ohmicity_error"] = e.what();
  }

  const auto low = sample_spectrum(m, numeric::make_grid(lo, hi, sc.ohmicity.points, numeric::GridSpacing::logarithmic));
  std::string low_csv = header;
  for (std::size_t i = 0; i < low.omegas.size(); ++i) {
    low_csv += io::fmt(low.omegas[i]) + "," + io::fmt(low.values[i]) + "\n";
  }
  const auto low_path = opt.out_dir / (sc.name + "_low.csv");
  io::write_file(low_path, low_csv);

  results["roots"] = io::json::array();
  if (m.model == ProbeModel::double_well && m.dimension == 1) {
    const auto roots = spectrum_roots(m, sc.frequency_grid.omega_max);
    io::json closed = io::json::array();
    for (std::size_t n = 1; n <= roots.size(); ++n) {
      closed.push_back(bogoliubov_energy(static_cast<double>(n) * std::numbers::pi / m.separation, m.nu));
    }
    results["roots"] = roots;
    results["roots_closed_form"] = closed;
  }
  results["data"] = full_path.filename().string();
  results["low_frequency_data"] = low_path.filename().string();
  meta["results"] = results;
  io::write_file(sidecar, meta.dump(2) + "\n");
  out.files = {full_path, low_path, sidecar};
  out.failed_cells = failed ? 1 : 0;
  return out;
}

inline RunOutcome run_crossover(const Scenario& sc, const RunOptions& opt) {
  RunOutcome out;
  out.cells = 1;
  const auto sidecar = io::sidecar_path(opt, sc.name);
  if (opt.resume && std::filesystem::exists(sidecar)) {
    out.skipped_cells = 1;
    return out;
  }
  const auto family = scattering_length_family(sc.gas, sc.probe);
  const auto as = sc.scan.values_m();
  const auto cell_dir = opt.out_dir / (sc.name + ".cells");
  const auto config_dump = sc.resolved.dump();

  auto cell_path = [&](std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "a_%03zu.json", i);
    return cell_dir / buf;
  };
  auto settings = sc.backflow;
  settings.threads = 1;
  const auto rows = parallel_map(as.size(), opt.threads, [&](std::size_t i) {
    const auto path = cell_path(i);
    if (opt.resume && std::filesystem::exists(path)) {
      try {
        const auto j = io::read_json(path);
        if (j.at("config").get<std::string>() == config_dump && j.at("a_B_m").get<double>() == as[i]) {
          ScanRow r;
          r.scattering_length = as[i];
          r.ok = j.at("ok").get<bool>();
          r.error = j.at("error").get<std::string>();
          r.report = io::backflow_from_json(j.at("report"), settings);
          return r;
        }
      } catch (const std::exception&) {
        // Unreadable or stale cell: recompute.
      }
    }
    ScanRow r = crossover_scan(family, {as[i]}, settings, sc.decoherence, 1).front();
    io::json j;
    j["config"] = config_dump;
    j["a_B_m"] = as[i];
    j["ok"] = r.ok;
    j["error"] = r.error;
    j["report"] = io::to_json(r.report);
    io::write_file(path, j.dump(2) + "\n");
    return r;
  });

  auto meta = io::metadata(sc, RunKind::crossover);
  std::string csv = io::csv_preamble(meta) + "a_B_nm,N,N_frac,markovian,ok\n";
  io::json table = io::json::array();
  for (const auto& r : rows) {
    csv += io::fmt(r.scattering_length * 1e9) + "," + io::fmt(r.report.measure) + "," + io::fmt(r.report.fractional) +
           "," + (r.report.markovian ? "1" : "0") + "," + (r.ok ? "1" : "0") + "\n";
    auto j = io::to_json(r.report);
    j["a_B_nm"] = r.scattering_length * 1e9;
    j["ok"] = r.ok;
    if (!r.ok) j["error"] = r.error;
    table.push_back(j);
    if (!r.ok) ++out.failed_cells;
  }
  const auto csv_path = opt.out_dir / (sc.name + ".csv");
  io::write_file(csv_path, csv);

  io::json cross;
  const auto bracket = first_crossing(rows);
  cross["present"] = bracket.has_value();
  if (bracket) {
    cross["scan_bracket_nm"] = {bracket->lo * 1e9, bracket->hi * 1e9};
    if (sc.scan.bisect) {
      try {
        const auto c = crossover_bisect(family, *bracket, sc.scan.bisect_tol_nm * 1e-9, sc.backflow, sc.decoherence);
        cross["a_crit_nm"] = c.a_crit * 1e9;
        cross["bracket_nm"] = {c.a_lo * 1e9, c.a_hi * 1e9};
        cross["evaluations"] = c.evaluations;
        cross["non_monotone"] = c.non_monotone;
        io::json st = io::json::array();
        for (const auto& [a, n] : c.scan_table) st.push_back({a * 1e9, n});
        cross["scan_table"] = st;
      } catch (const std::exception& e) {
        cross["error"] = e.what();
        ++out.failed_cells;
      }
    }
  }
  meta["results"] = {{"rows", table}, {"crossover", cross}, {"data", csv_path.filename().string()}};
  io::write_file(sidecar, meta.dump(2) + "\n");
  out.files = {csv_path, sidecar};
  return out;
}

inline RunOutcome run(const Scenario& sc, RunKind kind, const RunOptions& opt) {
  switch (kind) {
    case RunKind::gamma: return run_gamma(sc, opt);
    case RunKind::spectrum: return run_spectrum(sc, opt);
    case RunKind::crossover: return run_crossover(sc, opt);
  }
  throw std::logic_error("run: unknown kind");
}

// ---------------------------------------------------------------------------
// Sweeps: the Cartesian product of the listed overrides, one scenario per cell.

struct SweepCell {
  std::string name;
  Scenario scenario;
};

inline std::vector<SweepCell> expand_sweep(const Scenario& base) {
  if (!base.sweep) throw ConfigError("sweep", "missing: the sweep subcommand needs a \"sweep\" section");
  const auto& sw = *base.sweep;
  const auto& src = base.source;
  if (!sw.dimensions.empty() && src.contains("gas") && src["gas"].contains("density_per_um_D")) {
    throw ConfigError("gas.density_per_um_D", "has per-dimension units; omit it when sweeping dimensions");
  }
  auto or_base = [](const auto& list, auto fallback) {
    using T = std::decay_t<decltype(fallback)>;
    return list.empty() ? std::vector<T>{fallback} : std::vector<T>(list.begin(), list.end());
  };
  const auto models = or_base(sw.models, base.probe.model);
  const auto dims = or_base(sw.dimensions, base.gas.dimension);
  const auto as = or_base(sw.scattering_lengths_nm, base.gas.scattering_length * 1e9);
  const auto ts = or_base(sw.temperatures_nK, base.gas.temperature * 1e9);

  std::vector<SweepCell> cells;
  for (auto model : models) {
    for (int d : dims) {
      for (double a : as) {
        for (double t : ts) {
          auto doc = src;
          doc.erase("sweep");
          // ordered_json stores members in a vector: create both before taking references.
          if (!doc.contains("gas")) doc["gas"] = io::json::object();
          if (!doc.contains("probe")) doc["probe"] = io::json::object();
          auto& gas = doc["gas"];
          auto& probe = doc["probe"];
          probe["model"] = std::string(to_string(model));
          if (model == ProbeModel::internal_state) probe.erase("separation_nm");
          gas["dimension"] = d;
          if (d == 3) gas.erase("transverse_length_nm");
          gas["scattering_length_nm"] = a;
          gas["temperature_nK"] = t;
          char buf[160];
          std::snprintf(buf, sizeof buf, "%s_model%s_D%d_aB%.6gnm_T%.6gnK", base.name.c_str(),
                        std::string(to_string(model)).c_str(), d, a, t);
          doc["name"] = buf;
          Scenario sc;
          try {
            sc = parse_scenario(doc);
            check_infrared(sc.medium());
          } catch (const std::exception& e) {
            throw ConfigError(std::string("sweep cell ") + buf, e.what());
          }
          cells.push_back({buf, std::move(sc)});
        }
      }
    }
  }
  return cells;
}

inline RunOutcome run_sweep(const Scenario& base, const RunOptions& opt) {
  const auto cells = expand_sweep(base);
  const RunKind kind = base.sweep->kind;
  RunOptions cell_opt = opt;
  cell_opt.threads = 1;
  struct CellResult {
    RunOutcome outcome;
    std::string error;
  };
  const auto results = parallel_map(cells.size(), opt.threads, [&](std::size_t i) {
    CellResult r;
    try {
      r.outcome = run(cells[i].scenario, kind, cell_opt);
    } catch (const std::exception& e) {
      r.outcome.cells = 1;
      r.outcome.failed_cells = 1;
      r.error = e.what();
    }
    return r;
  });

  RunOutcome total;
  io::json index;
  index["version"] = version;
  index["kind"] = to_string(kind);
  index["config"] = base.resolved;
  index["cells"] = io::json::array();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& r = results[i];
    total.merge(r.outcome);
    io::json c;
    c["name"] = cells[i].name;
    c["sidecar"] = cells[i].name + ".json";
    c["status"] = !r.error.empty() ? "error" : r.outcome.failed_cells ? "numerical_failure" : "ok";
    if (!r.error.empty()) c["error"] = r.error;
    index["cells"].push_back(c);
  }
  // Skipped cells finished in an earlier run; their status comes from their own sidecars.
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (results[i].outcome.skipped_cells == 0) continue;
    const auto side = io::read_json(opt.out_dir / (cells[i].name + ".json"));
    const auto& res = side["results"];
    bool failed = false;
    if (res.contains("failures")) failed = res["failures"].get<std::size_t>() > 0;
    if (res.contains("ohmicity")) failed = res["ohmicity"].is_null();
    if (res.contains("rows")) {
      for (const auto& row : res["rows"]) failed = failed || !row["ok"].get<bool>();
      failed = failed || res["crossover"].contains("error");
    }
    index["cells"][i]["status"] = failed ? "numerical_failure" : "ok";
    if (failed) ++total.failed_cells;
  }
  const auto index_path = opt.out_dir / (base.name + "_sweep.json");
  io::write_file(index_path, index.dump(2) + "\n");
  total.files.push_back(index_path);
  return total;
}

}  // namespace becprobe
