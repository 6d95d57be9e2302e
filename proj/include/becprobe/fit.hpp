#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace becprobe::numeric {

struct FitResult {
  double exponent = 0.0;
  double amplitude = 0.0;
  double r_squared = 0.0;
  double window_lo = 0.0;
  double window_hi = 0.0;
  std::size_t points = 0;
};

struct Sample {
  double x = 0.0;
  double y = 0.0;
};

/// Least-squares line through (log x, log y) for samples with x in [lo, hi]:
/// y = amplitude * x^exponent.
inline FitResult fit_power_law(std::span<const Sample> samples, double lo, double hi) {
  if (!(lo > 0.0 && hi > lo)) throw std::invalid_argument("fit_power_law: invalid window");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
  std::size_t n = 0;
  for (const auto& s : samples) {
    if (s.x < lo || s.x > hi) continue;
    if (!(s.y > 0.0) || !std::isfinite(s.y)) {
      throw std::domain_error("fit_power_law: non-positive value inside the window");
    }
    const double lx = std::log(s.x);
    const double ly = std::log(s.y);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    syy += ly * ly;
    ++n;
  }
  if (n < 5) throw std::domain_error("fit_power_law: fewer than 5 points inside the window");
  const double dn = static_cast<double>(n);
  const double vx = sxx - sx * sx / dn;
  const double vy = syy - sy * sy / dn;
  const double cxy = sxy - sx * sy / dn;
  if (!(vx > 0.0)) throw std::domain_error("fit_power_law: degenerate abscissae");
  FitResult r;
  r.exponent = cxy / vx;
  r.amplitude = std::exp((sy - r.exponent * sx) / dn);
  r.r_squared = vy > 0.0 ? std::min(1.0, std::max(0.0, cxy * cxy / (vx * vy))) : 1.0;
  r.window_lo = lo;
  r.window_hi = hi;
  r.points = n;
  return r;
}

}  // namespace becprobe::numeric
