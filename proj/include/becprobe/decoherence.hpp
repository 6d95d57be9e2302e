#pragma once

// Decoherence function Gamma(t) of the two probe models in the continuum limit,
//
//   Gamma(t) = A_D int_0^inf dk k^(D-1) e^(-k^2/2) (eps_k/E_k) W(k) coth(E_k/2T)
//              * sin^2(E_k t / 2) / E_k^2
//
// in internal units, with W the direction-averaged interference factor (1 for
// Model II). The derivative replaces the time factor by sin(E_k t)/(2 E_k).

#include <becprobe/dispersion.hpp>
#include <becprobe/parallel.hpp>
#include <becprobe/quadrature.hpp>
#include <becprobe/roots.hpp>

#include <cmath>
#include <concepts>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace becprobe {

struct PointValue {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
  std::size_t evaluations = 0;
};

struct DecoherenceOptions {
  numeric::QuadratureOptions quadrature{};
  /// Momentum split point (units of 1/sigma); e^(-k^2/2) ~ 3e-18 at 9.
  double momentum_split = 9.0;
};

/// 1 at T = 0, coth(E / 2T) otherwise. T in units of E (k_B T / E_sigma).
inline double thermal_factor(double energy, double temperature) {
  if (!(temperature >= 0.0)) throw std::domain_error("thermal_factor: negative temperature");
  if (temperature == 0.0) return 1.0;
  if (!(energy > 0.0)) throw std::domain_error("thermal_factor: coth(E/2T) diverges at E = 0");
  // coth(x) = 1 + 2 / (e^(2x) - 1), which keeps the thermal excess exact.
  return 1.0 + 2.0 / std::expm1(energy / temperature);
}

namespace detail {

/// Everything in the k-space integrand except the time factor.
inline double momentum_kernel(const ReducedMedium& m, double kappa) {
  const double e = bogoliubov_energy(kappa, m.nu);
  double measure = 1.0;
  if (m.dimension == 2) measure = kappa;
  if (m.dimension == 3) measure = kappa * kappa;
  double k = measure * std::exp(-0.5 * kappa * kappa) * free_to_bogoliubov_ratio(kappa, m.nu) *
             m.interference(kappa);
  if (m.thermal()) k *= thermal_factor(e, m.temperature);
  return k;
}

inline double velocity_or_free(double kappa, double nu) {
  if (kappa > 0.0) return group_velocity(kappa, nu);
  return std::sqrt(2.0 * nu);
}

/// Local angular frequency (per unit kappa) of the k-space integrand at time t.
inline double momentum_rate(const ReducedMedium& m, double kappa, double t) {
  double r = t * velocity_or_free(kappa, m.nu);
  if (m.model == ProbeModel::double_well) r += 2.0 * m.separation;
  return r;
}

enum class TimeFactor { gamma, derivative };

inline PointValue integrate_momentum(const ReducedMedium& m, double t, TimeFactor which,
                                     const DecoherenceOptions& o) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw std::domain_error("decoherence: t must be >= 0");
  check_infrared(m);
  if (t == 0.0 || m.prefactor == 0.0) return {};
  if (m.model == ProbeModel::double_well && m.separation == 0.0) return {};

  auto integrand = [&m, t, which](double kappa) {
    if (kappa <= 0.0) return 0.0;
    const double e = bogoliubov_energy(kappa, m.nu);
    double tf;
    if (which == TimeFactor::gamma) {
      const double s = std::sin(0.5 * e * t) / e;
      tf = s * s;
    } else {
      tf = std::sin(e * t) / (2.0 * e);
    }
    return momentum_kernel(m, kappa) * tf;
  };
  numeric::SemiInfiniteOptions so;
  static_cast<numeric::QuadratureOptions&>(so) = o.quadrature;
  so.split = o.momentum_split;
  if (so.max_panel_width <= 0.0) so.max_panel_width = 0.25;
  const auto r = numeric::integrate_semi_infinite(
      integrand, so, [&m, t](double kappa) { return momentum_rate(m, kappa, t); });
  return {m.prefactor * r.value, m.prefactor * r.abs_error_estimate, r.converged(), r.evaluations};
}

}  // namespace detail

inline PointValue gamma_at(const ReducedMedium& m, double t, const DecoherenceOptions& o = {}) {
  return detail::integrate_momentum(m, t, detail::TimeFactor::gamma, o);
}

/// Analytic time derivative of gamma_at (never a finite difference).
inline PointValue gamma_prime_at(const ReducedMedium& m, double t, const DecoherenceOptions& o = {}) {
  return detail::integrate_momentum(m, t, detail::TimeFactor::derivative, o);
}

struct DecoherenceCurve {
  std::vector<double> times;
  std::vector<double> gamma;
  std::vector<double> gamma_prime;
  std::vector<double> coherence;
  std::vector<double> error_estimates;
  std::vector<double> gamma_prime_errors;
  std::vector<bool> converged;

  std::size_t failures() const {
    std::size_t n = 0;
    for (bool c : converged) n += c ? 0 : 1;
    return n;
  }
};

inline std::vector<double> default_time_grid() {
  return numeric::make_grid(1e-3, 50.0, 400, numeric::GridSpacing::logarithmic);
}

inline DecoherenceCurve gamma_curve(const ReducedMedium& m, const std::vector<double>& times,
                                    const DecoherenceOptions& o = {}, unsigned threads = 1) {
  if (times.empty()) throw std::invalid_argument("gamma_curve: empty time grid");
  if (!(times.front() >= 0.0)) throw std::invalid_argument("gamma_curve: times must be >= 0");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) {
      throw std::invalid_argument("gamma_curve: time grid must be strictly increasing");
    }
  }
  check_infrared(m);
  struct Cell {
    PointValue g, gp;
  };
  const auto cells = parallel_map(times.size(), threads, [&](std::size_t i) {
    return Cell{gamma_at(m, times[i], o), gamma_prime_at(m, times[i], o)};
  });
  DecoherenceCurve c;
  c.times = times;
  for (const auto& cell : cells) {
    const double g = std::max(0.0, cell.g.value);
    c.gamma.push_back(g);
    c.gamma_prime.push_back(cell.gp.value);
    c.coherence.push_back(std::exp(-g));
    c.error_estimates.push_back(cell.g.error);
    c.gamma_prime_errors.push_back(cell.gp.error);
    c.converged.push_back(cell.g.converged && cell.gp.converged);
  }
  return c;
}

/// A spectral density the frequency-space route can integrate.
template <class S>
concept SpectrumProvider = requires(const S& s, double w) {
  { s(w) } -> std::convertible_to<double>;
  { s.oscillation_rate(w) } -> std::convertible_to<double>;
  { s.split_point() } -> std::convertible_to<double>;
};

/// Wraps any callable J(omega) with a fixed split point and no intrinsic oscillation.
template <class F>
struct FunctionSpectrum {
  F f;
  double split = 80.0;
  double operator()(double w) const { return f(w); }
  double oscillation_rate(double) const { return 0.0; }
  double split_point() const { return split; }
};

template <class F>
FunctionSpectrum(F, double) -> FunctionSpectrum<F>;

/// Gamma(t) = int_0^inf dw J(w) th(w, T) (1 - cos wt) / (2 w^2).
template <SpectrumProvider S>
PointValue gamma_via_spectrum(const S& spectrum, double t, double temperature,
                              const numeric::QuadratureOptions& quad = {}) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw std::domain_error("gamma_via_spectrum: t must be >= 0");
  if (t == 0.0) return {};
  auto integrand = [&spectrum, t, temperature](double w) {
    if (w <= 0.0) return 0.0;
    const double s = std::sin(0.5 * w * t) / w;
    return spectrum(w) * thermal_factor(w, temperature) * s * s;
  };
  numeric::SemiInfiniteOptions so;
  static_cast<numeric::QuadratureOptions&>(so) = quad;
  so.split = spectrum.split_point();
  if (so.max_panel_width <= 0.0) so.max_panel_width = 0.25;
  const auto r = numeric::integrate_semi_infinite(
      integrand, so, [&spectrum, t](double w) { return t + spectrum.oscillation_rate(w); });
  return {r.value, r.abs_error_estimate, r.converged(), r.evaluations};
}

}  // namespace becprobe
