#pragma once

// Information backflow for pure dephasing: intervals with Gamma'(t) < 0, the
// measure N = sum over intervals of Gamma(start) - Gamma(end), and the
// fractional measure (information regained / information lost before).

#include <becprobe/decoherence.hpp>
#include <becprobe/dispersion.hpp>
#include <becprobe/parallel.hpp>
#include <becprobe/quadrature.hpp>
#include <becprobe/roots.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace becprobe {

/// Gamma and Gamma' as functions of time; lets synthetic curves share the
/// pipeline with the physical ones.
struct DecoherenceFunctions {
  std::function<PointValue(double)> gamma;
  std::function<PointValue(double)> gamma_prime;
};

inline DecoherenceFunctions decoherence_functions(const ReducedMedium& m, const DecoherenceOptions& o = {}) {
  return {[m, o](double t) { return gamma_at(m, t, o); },
          [m, o](double t) { return gamma_prime_at(m, t, o); }};
}

struct BackflowSettings {
  double t_min = 1e-2;
  double t_max = 50.0;
  std::size_t grid_points = 512;
  double threshold = 1e-8;
  double root_rel_tol = 1e-10;
  unsigned threads = 1;
};

struct BackflowInterval {
  double t_start = 0.0;
  double t_end = 0.0;
  double gamma_start = 0.0;
  double gamma_end = 0.0;
  /// Still decreasing at t_max; t_end is the scan horizon, not a root.
  bool truncated = false;
};

struct BackflowReport {
  std::vector<BackflowInterval> intervals;
  double measure = 0.0;
  double fractional = 0.0;
  bool markovian = true;
  /// Every quadrature in the scan converged.
  bool complete = true;
  /// More than one interval; the fractional measure used the maximising one.
  bool multiple_intervals = false;
  BackflowSettings settings;
};

/// Fraction of the lost information regained over one interval [a, b]:
/// (e^-G(b) - e^-G(a)) / (1 - e^-G(a)).
inline double fractional_recovery(double gamma_start, double gamma_end) {
  if (!(gamma_start > 0.0)) {
    throw std::domain_error("fractional measure undefined: no information lost before backflow");
  }
  const double regained = std::exp(-gamma_end) * -std::expm1(-(gamma_start - gamma_end));
  const double lost = -std::expm1(-gamma_start);
  return std::clamp(regained / lost, 0.0, 1.0);
}

struct FractionalMeasure {
  double value = 0.0;
  std::size_t interval = 0;
  bool multiple = false;
};

/// Maximising single-interval fraction; Gamma is re-evaluated at the interval ends.
inline FractionalMeasure fractional_measure(const BackflowReport& report, const DecoherenceFunctions& f) {
  FractionalMeasure out;
  out.multiple = report.intervals.size() > 1;
  for (std::size_t i = 0; i < report.intervals.size(); ++i) {
    const auto& iv = report.intervals[i];
    const double v = fractional_recovery(f.gamma(iv.t_start).value, f.gamma(iv.t_end).value);
    if (i == 0 || v > out.value) {
      out.value = v;
      out.interval = i;
    }
  }
  return out;
}

inline BackflowReport find_backflow(const DecoherenceFunctions& f, const BackflowSettings& s = {}) {
  if (!(s.t_max > 0.0)) throw std::invalid_argument("find_backflow: t_max must be > 0");
  if (!(s.t_min > 0.0 && s.t_min < s.t_max)) throw std::invalid_argument("find_backflow: need 0 < t_min < t_max");
  BackflowReport rep;
  rep.settings = s;
  const auto ts = numeric::make_grid(s.t_min, s.t_max, s.grid_points, numeric::GridSpacing::logarithmic);
  const auto scan = parallel_map(ts.size(), s.threads, [&](std::size_t i) { return f.gamma_prime(ts[i]); });
  std::vector<double> gp(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    gp[i] = scan[i].value;
    rep.complete = rep.complete && scan[i].converged;
  }

  auto derivative = [&](double t) {
    const auto v = f.gamma_prime(t);
    rep.complete = rep.complete && v.converged;
    return v.value;
  };
  const auto brackets = numeric::sign_change_brackets(ts, gp);
  std::vector<double> roots;
  roots.reserve(brackets.size());
  for (const auto& b : brackets) roots.push_back(numeric::refine_root(derivative, b, s.root_rel_tol));

  // Sign of Gamma' at the start of the scan, then it alternates at each root.
  std::size_t first_nonzero = 0;
  while (first_nonzero < gp.size() && gp[first_nonzero] == 0.0) ++first_nonzero;
  if (first_nonzero == gp.size()) return rep;
  bool negative = gp[first_nonzero] < 0.0;
  double start = s.t_min;
  std::vector<std::pair<double, bool>> spans;  // (end, truncated)
  std::vector<double> starts;
  for (double r : roots) {
    if (negative) {
      starts.push_back(start);
      spans.emplace_back(r, false);
    }
    start = r;
    negative = !negative;
  }
  if (negative) {
    starts.push_back(start);
    spans.emplace_back(s.t_max, true);
  }

  auto gamma = [&](double t) {
    const auto v = f.gamma(t);
    rep.complete = rep.complete && v.converged;
    return v.value;
  };
  for (std::size_t i = 0; i < starts.size(); ++i) {
    BackflowInterval iv;
    iv.t_start = starts[i];
    iv.t_end = spans[i].first;
    iv.truncated = spans[i].second;
    iv.gamma_start = gamma(iv.t_start);
    iv.gamma_end = gamma(iv.t_end);
    rep.measure += std::max(0.0, iv.gamma_start - iv.gamma_end);
    rep.intervals.push_back(iv);
  }
  rep.markovian = rep.measure < s.threshold;
  rep.multiple_intervals = rep.intervals.size() > 1;
  if (!rep.intervals.empty()) {
    double best = 0.0;
    for (const auto& iv : rep.intervals) {
      if (iv.gamma_start > 0.0) best = std::max(best, fractional_recovery(iv.gamma_start, iv.gamma_end));
    }
    rep.fractional = best;
  }
  return rep;
}

inline BackflowReport find_backflow(const ReducedMedium& m, const BackflowSettings& s = {},
                                    const DecoherenceOptions& o = {}) {
  check_infrared(m);
  return find_backflow(decoherence_functions(m, o), s);
}

/// N recomputed by integrating -Gamma' over the detected intervals; an
/// independent route to the endpoint-difference value.
inline double backflow_by_integration(const BackflowReport& report, const DecoherenceFunctions& f,
                                      const numeric::QuadratureOptions& quad = {1e-9, 1e-14}) {
  double total = 0.0;
  for (const auto& iv : report.intervals) {
    const auto r = numeric::integrate([&f](double t) { return -f.gamma_prime(t).value; }, iv.t_start, iv.t_end,
                                      quad);
    total += std::max(0.0, r.value);
  }
  return total;
}

// ---------------------------------------------------------------------------
// Crossover in the boson-boson scattering length.

/// Maps a_B (m) to the reduced medium, everything else fixed.
using MediumFamily = std::function<ReducedMedium(double)>;

inline MediumFamily scattering_length_family(GasParameters gas, ProbeGeometry probe) {
  validate(probe);
  return [gas, probe](double a_b) {
    GasParameters g = gas;
    g.scattering_length = a_b;
    return reduce(g, probe);
  };
}

struct ScanRow {
  double scattering_length = 0.0;
  BackflowReport report;
  bool ok = true;
  std::string error;
};

inline std::vector<ScanRow> crossover_scan(const MediumFamily& family, const std::vector<double>& a_values,
                                           const BackflowSettings& s = {}, const DecoherenceOptions& o = {},
                                           unsigned threads = 1) {
  for (std::size_t i = 0; i < a_values.size(); ++i) {
    if (!(a_values[i] > 0.0)) throw std::invalid_argument("crossover_scan: scattering lengths must be > 0");
    if (i > 0 && !(a_values[i] > a_values[i - 1])) {
      throw std::invalid_argument("crossover_scan: scattering lengths must be increasing");
    }
  }
  return parallel_map(a_values.size(), threads, [&](std::size_t i) {
    ScanRow row;
    row.scattering_length = a_values[i];
    try {
      row.report = find_backflow(family(a_values[i]), s, o);
      row.ok = row.report.complete;
      if (!row.ok) row.error = "quadrature did not converge everywhere in the scan";
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
    }
    return row;
  });
}

/// First Markovian -> non-Markovian transition between consecutive rows.
inline std::optional<numeric::Bracket> first_crossing(const std::vector<ScanRow>& rows) {
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i - 1].ok && rows[i].ok && rows[i - 1].report.markovian && !rows[i].report.markovian) {
      return numeric::Bracket{rows[i - 1].scattering_length, rows[i].scattering_length};
    }
  }
  return std::nullopt;
}

struct CrossoverResult {
  double a_crit = 0.0;
  double a_lo = 0.0;
  double a_hi = 0.0;
  std::size_t evaluations = 0;
  /// (a_B, N) for every evaluation, in evaluation order.
  std::vector<std::pair<double, double>> scan_table;
  bool non_monotone = false;
};

class InvalidBracket : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Bisection on the indicator N(a) >= threshold. A short pre-scan inside the
/// bracket checks the indicator pattern; a violation is flagged and the
/// smallest crossing is kept.
inline CrossoverResult crossover_bisect(const MediumFamily& family, numeric::Bracket bracket, double tol,
                                        const BackflowSettings& s = {}, const DecoherenceOptions& o = {},
                                        std::size_t prescan = 4) {
  if (!(bracket.lo > 0.0 && bracket.hi > bracket.lo)) throw InvalidBracket("crossover_bisect: invalid bracket");
  if (!(tol > 0.0)) throw std::invalid_argument("crossover_bisect: tol must be > 0");
  CrossoverResult res;
  auto non_markovian = [&](double a) {
    const auto rep = find_backflow(family(a), s, o);
    ++res.evaluations;
    res.scan_table.emplace_back(a, rep.measure);
    return !rep.markovian;
  };
  if (non_markovian(bracket.lo)) {
    throw InvalidBracket("crossover_bisect: lower end of the bracket is already non-Markovian");
  }
  if (!non_markovian(bracket.hi)) {
    throw InvalidBracket("crossover_bisect: upper end of the bracket is Markovian");
  }
  double lo = bracket.lo;
  double hi = bracket.hi;
  if (prescan > 0 && hi - lo > tol) {
    std::vector<std::pair<double, bool>> pts;
    for (std::size_t i = 1; i <= prescan; ++i) {
      const double a = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(prescan + 1);
      pts.emplace_back(a, non_markovian(a));
    }
    bool seen_true = false;
    for (const auto& [a, nm] : pts) {
      if (nm) seen_true = true;
      else if (seen_true) res.non_monotone = true;
    }
    double new_lo = lo;
    for (const auto& [a, nm] : pts) {
      if (nm) {
        hi = a;
        break;
      }
      new_lo = a;
    }
    lo = new_lo;
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (non_markovian(mid)) hi = mid;
    else lo = mid;
  }
  res.a_lo = lo;
  res.a_hi = hi;
  res.a_crit = 0.5 * (lo + hi);
  return res;
}

}  // namespace becprobe
