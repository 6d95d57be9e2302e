#pragma once

// Spectral density J(w) = sum_k |g_k|^2 delta(w - E_k), obtained from the
// k-space integrand by the change of variables k -> E_k. Its normalisation is
// the one for which Gamma(t) = int dw J(w) (1 - cos wt) / (2 w^2).

#include <becprobe/decoherence.hpp>
#include <becprobe/dispersion.hpp>
#include <becprobe/fit.hpp>
#include <becprobe/roots.hpp>

#include <cmath>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace becprobe {

class UnsupportedConfiguration : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class SpectralDensity {
 public:
  explicit SpectralDensity(const ReducedMedium& m, double momentum_split = 9.0)
      : m_(m), split_(bogoliubov_energy(momentum_split, m.nu)) {}

  const ReducedMedium& medium() const { return m_; }

  double operator()(double omega) const {
    if (!(omega > 0.0)) throw std::domain_error("spectral_density: omega must be > 0");
    const double kappa = invert_bogoliubov(omega, m_.nu);
    if (!(kappa > 0.0)) return 0.0;
    return m_.prefactor * envelope(kappa, omega) * m_.interference(kappa);
  }

  /// sqrt(J) carrying the sign of sin(kL): changes sign at every root of the
  /// one-dimensional Model-I spectrum.
  double signed_amplitude(double omega) const {
    if (!(omega > 0.0)) throw std::domain_error("signed_amplitude: omega must be > 0");
    const double kappa = invert_bogoliubov(omega, m_.nu);
    const double base = std::sqrt(m_.prefactor * envelope(kappa, omega));
    if (m_.model == ProbeModel::internal_state) return base;
    if (m_.dimension == 1) return base * std::sin(kappa * m_.separation);
    return base * std::sqrt(m_.interference(kappa));
  }

  /// Angular rate (per unit omega) of the interference oscillation.
  double oscillation_rate(double omega) const {
    if (m_.model == ProbeModel::internal_state || omega <= 0.0) return 0.0;
    const double kappa = invert_bogoliubov(omega, m_.nu);
    if (kappa * m_.separation < 1.0) return 0.0;
    return 2.0 * m_.separation / group_velocity(kappa, m_.nu);
  }

  double split_point() const { return split_; }

 private:
  // kappa^(D-1) (dkappa/domega) e^(-kappa^2/2) (eps/E).
  double envelope(double kappa, double omega) const {
    double measure = 1.0;
    if (m_.dimension == 2) measure = kappa;
    if (m_.dimension == 3) measure = kappa * kappa;
    return measure * std::exp(-0.5 * kappa * kappa) * (kappa * kappa / omega) /
           group_velocity(kappa, m_.nu);
  }

  ReducedMedium m_;
  double split_;
};

inline double spectral_density(const ReducedMedium& m, double omega) { return SpectralDensity(m)(omega); }

struct SpectralCurve {
  std::vector<double> omegas;
  std::vector<double> values;
  ReducedMedium medium;
};

inline SpectralCurve sample_spectrum(const ReducedMedium& m, const std::vector<double>& omegas) {
  const SpectralDensity j(m);
  SpectralCurve c{omegas, {}, m};
  c.values.reserve(omegas.size());
  for (double w : omegas) c.values.push_back(j(w));
  return c;
}

enum class Ohmicity { sub_ohmic, ohmic, super_ohmic };

inline std::string_view to_string(Ohmicity o) {
  switch (o) {
    case Ohmicity::sub_ohmic: return "sub-Ohmic";
    case Ohmicity::ohmic: return "Ohmic";
    case Ohmicity::super_ohmic: return "super-Ohmic";
  }
  return "unknown";
}

struct OhmicityOptions {
  double window_lo = 1e-3;
  double window_hi = 1e-2;
  std::size_t points = 64;
  double classification_tol = 0.05;
};

struct OhmicityReport {
  double s = 0.0;
  numeric::FitResult fit;
  Ohmicity classification = Ohmicity::ohmic;
  /// s > 2 (beyond the tolerance): the regime where dephasing backflow is possible.
  bool supercritical = false;
  bool window_adjusted = false;
};

inline Ohmicity classify(double s, double tol) {
  if (s < 1.0 - tol) return Ohmicity::sub_ohmic;
  if (s > 1.0 + tol) return Ohmicity::super_ohmic;
  return Ohmicity::ohmic;
}

/// Roots of the 1D Model-I spectrum in (0, omega_max]; they sit at
/// E(n pi / L) because sin^2(kL) vanishes there.
inline std::vector<double> spectrum_roots(const ReducedMedium& m, double omega_max) {
  if (m.model != ProbeModel::double_well || m.dimension != 1) {
    throw UnsupportedConfiguration(
        "spectrum_roots: only the one-dimensional Model-I spectrum has roots");
  }
  if (!(omega_max > 0.0)) throw std::invalid_argument("spectrum_roots: omega_max must be > 0");
  const SpectralDensity j(m);
  const double kappa_max = invert_bogoliubov(omega_max, m.nu);
  // 16 samples per half period of sin(kL), uniform in kappa.
  const double step = std::numbers::pi / (16.0 * m.separation);
  const auto n = static_cast<std::size_t>(std::ceil(kappa_max / step)) + 1;
  std::vector<double> ws, vals;
  ws.reserve(n);
  for (std::size_t i = 1; i <= n; ++i) {
    const double kappa = std::min(kappa_max, static_cast<double>(i) * step);
    const double w = std::min(omega_max, bogoliubov_energy(kappa, m.nu));
    if (!ws.empty() && w <= ws.back()) continue;
    ws.push_back(w);
    vals.push_back(j.signed_amplitude(w));
  }
  std::vector<double> roots;
  for (const auto& b : numeric::sign_change_brackets(ws, vals)) {
    roots.push_back(numeric::refine_root([&j](double w) { return j.signed_amplitude(w); }, b, 1e-14));
  }
  return roots;
}

inline OhmicityReport ohmicity(const ReducedMedium& m, const OhmicityOptions& o = {}) {
  if (!(o.window_lo > 0.0 && o.window_hi > o.window_lo)) {
    throw std::invalid_argument("ohmicity: invalid window");
  }
  OhmicityReport rep;
  double hi = o.window_hi;
  if (m.model == ProbeModel::double_well && m.dimension == 1) {
    const auto roots = spectrum_roots(m, o.window_hi);
    if (!roots.empty()) {
      hi = 0.5 * roots.front();
      rep.window_adjusted = true;
      if (!(hi > o.window_lo)) {
        throw std::domain_error("ohmicity: first spectral root lies below the fit window");
      }
    }
  }
  const SpectralDensity j(m);
  const auto ws = numeric::make_grid(o.window_lo, hi, o.points, numeric::GridSpacing::logarithmic);
  std::vector<numeric::Sample> samples;
  samples.reserve(ws.size());
  for (double w : ws) samples.push_back({w, j(w)});
  rep.fit = numeric::fit_power_law(samples, o.window_lo, hi);
  rep.s = rep.fit.exponent;
  rep.classification = classify(rep.s, o.classification_tol);
  rep.supercritical = rep.s > 2.0 + o.classification_tol;
  return rep;
}

}  // namespace becprobe
