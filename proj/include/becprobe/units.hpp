#pragma once

// Physical constants and the internal unit system.
//
// Internal units: length sigma (Wannier width), energy E_sigma = hbar^2/(2 m_B sigma^2),
// time hbar/E_sigma, momentum 1/sigma, temperature E_sigma/k_B. Every integrand
// downstream is written in these units so that k*sigma, E_k/E_sigma and
// t*E_sigma/hbar are all of order one.

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

namespace becprobe {

/// CODATA 2018 values, SI.
namespace constants {
inline constexpr double hbar = 1.054571817e-34;           // J s
inline constexpr double boltzmann = 1.380649e-23;         // J / K
inline constexpr double bohr_radius = 5.29177210903e-11;  // m
inline constexpr double atomic_mass_unit = 1.66053906660e-27;  // kg
inline constexpr double rb87_mass = 86.909180531 * atomic_mass_unit;  // kg
/// Reference scattering length a_Rb = 100 a0 used to express a_B.
inline constexpr double rb87_scattering_length = 100.0 * bohr_radius;
}  // namespace constants

enum class QuantityKind { length, energy, time, momentum, temperature };

inline std::string_view to_string(QuantityKind kind) {
  switch (kind) {
    case QuantityKind::length: return "length";
    case QuantityKind::energy: return "energy";
    case QuantityKind::time: return "time";
    case QuantityKind::momentum: return "momentum";
    case QuantityKind::temperature: return "temperature";
  }
  return "unknown";
}

class UnitSystem {
 public:
  UnitSystem(double sigma, double boson_mass) : sigma_(sigma), boson_mass_(boson_mass) {
    if (!(std::isfinite(sigma) && sigma > 0.0)) {
      throw std::invalid_argument("UnitSystem: sigma must be finite and positive");
    }
    if (!(std::isfinite(boson_mass) && boson_mass > 0.0)) {
      throw std::invalid_argument("UnitSystem: boson mass must be finite and positive");
    }
    energy_ = constants::hbar * constants::hbar / (2.0 * boson_mass_ * sigma_ * sigma_);
    time_ = constants::hbar / energy_;
  }

  double sigma() const { return sigma_; }
  double boson_mass() const { return boson_mass_; }

  double length_unit() const { return sigma_; }
  double energy_unit() const { return energy_; }
  double time_unit() const { return time_; }
  double momentum_unit() const { return 1.0 / sigma_; }
  /// E_sigma / k_B in kelvin.
  double temperature_unit() const { return energy_ / constants::boltzmann; }
  /// Angular frequency unit E_sigma/hbar in rad/s.
  double frequency_unit() const { return 1.0 / time_; }

  double unit(QuantityKind kind) const {
    switch (kind) {
      case QuantityKind::length: return length_unit();
      case QuantityKind::energy: return energy_unit();
      case QuantityKind::time: return time_unit();
      case QuantityKind::momentum: return momentum_unit();
      case QuantityKind::temperature: return temperature_unit();
    }
    throw std::invalid_argument("UnitSystem: unknown quantity kind");
  }

  double to_internal(double q, QuantityKind kind) const {
    require_finite(q, kind);
    // k_B T / E_sigma, written so that the constant cancels exactly.
    if (kind == QuantityKind::temperature) return constants::boltzmann * q / energy_;
    if (kind == QuantityKind::momentum) return q * sigma_;
    return q / unit(kind);
  }

  double from_internal(double x, QuantityKind kind) const {
    require_finite(x, kind);
    if (kind == QuantityKind::temperature) return x * energy_ / constants::boltzmann;
    if (kind == QuantityKind::momentum) return x / sigma_;
    return x * unit(kind);
  }

 private:
  static void require_finite(double v, QuantityKind kind) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("UnitSystem: non-finite " + std::string(to_string(kind)) +
                                  " value");
    }
  }

  double sigma_;
  double boson_mass_;
  double energy_ = 0.0;
  double time_ = 0.0;
};

}  // namespace becprobe
