#pragma once

// Bogoliubov dispersion, coupling constants and the double-well interference
// factor. SI-facing records (GasParameters, ProbeGeometry) are reduced once to a
// dimensionless ReducedMedium; everything numerical works on the reduced form.

#include <becprobe/units.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

namespace becprobe {

enum class ProbeModel {
  double_well,     ///< Model I: impurity in a double well, qubit = which well.
  internal_state,  ///< Model II: single site, qubit = internal level.
};

/// How the well separation enters the Model-I interference factor.
enum class InterferenceConvention {
  full_separation,  ///< sin^2(k.L)
  half_separation,  ///< sin^2(k.L/2)
};

inline std::string_view to_string(ProbeModel m) {
  return m == ProbeModel::double_well ? "I" : "II";
}

inline std::string_view to_string(InterferenceConvention c) {
  return c == InterferenceConvention::full_separation ? "full" : "half";
}

/// Background gas, SI units. density is per m^D.
struct GasParameters {
  double boson_mass = constants::rb87_mass;
  double scattering_length = constants::rb87_scattering_length;
  double density = 0.0;
  int dimension = 3;
  double temperature = 0.0;
  /// Transverse confinement length for D < 3; low-dimensional couplings are
  /// g / transverse_length^(3-D). Ignored in 3D.
  double transverse_length = 0.0;
};

/// Impurity qubit, SI units.
struct ProbeGeometry {
  ProbeModel model = ProbeModel::internal_state;
  double impurity_mass = constants::rb87_mass;
  double coupling_scattering_length = constants::rb87_scattering_length;
  double sigma = 0.0;
  /// Well separation |L|; only meaningful for the double well.
  double separation = 0.0;
  InterferenceConvention convention = InterferenceConvention::full_separation;
};

inline void validate(const GasParameters& gas) {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("gas: " + msg); };
  if (!(std::isfinite(gas.boson_mass) && gas.boson_mass > 0.0)) fail("boson_mass must be > 0");
  if (!(std::isfinite(gas.density) && gas.density > 0.0)) fail("density must be > 0");
  if (!(std::isfinite(gas.scattering_length) && gas.scattering_length >= 0.0)) {
    fail("scattering_length must be >= 0");
  }
  if (!(std::isfinite(gas.temperature) && gas.temperature >= 0.0)) {
    fail("temperature must be >= 0");
  }
  if (gas.dimension < 1 || gas.dimension > 3) fail("dimension must be 1, 2 or 3");
  if (gas.dimension < 3 && !(std::isfinite(gas.transverse_length) && gas.transverse_length > 0.0)) {
    fail("transverse_length must be > 0 for dimension < 3");
  }
}

inline void validate(const ProbeGeometry& probe) {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("probe: " + msg); };
  if (!(std::isfinite(probe.sigma) && probe.sigma > 0.0)) fail("sigma must be > 0");
  if (!(std::isfinite(probe.impurity_mass) && probe.impurity_mass > 0.0)) {
    fail("impurity_mass must be > 0");
  }
  if (!std::isfinite(probe.coupling_scattering_length)) {
    fail("coupling_scattering_length must be finite");
  }
  const bool has_separation = std::isfinite(probe.separation) && probe.separation > 0.0;
  if (probe.model == ProbeModel::double_well && !has_separation) {
    fail("separation must be > 0 for Model I");
  }
  if (probe.model == ProbeModel::internal_state && probe.separation != 0.0) {
    fail("separation is only defined for Model I");
  }
}

/// g_B = 4 pi hbar^2 a_B / m_B (3D form, J m^3).
inline double boson_coupling(const GasParameters& gas) {
  return 4.0 * std::numbers::pi * constants::hbar * constants::hbar * gas.scattering_length /
         gas.boson_mass;
}

inline double reduced_mass(double m_a, double m_b) { return m_a * m_b / (m_a + m_b); }

/// g_AB = 4 pi hbar^2 a_AB / m_AB (3D form, J m^3).
inline double impurity_coupling(const ProbeGeometry& probe, const GasParameters& gas) {
  return 4.0 * std::numbers::pi * constants::hbar * constants::hbar *
         probe.coupling_scattering_length / reduced_mass(probe.impurity_mass, gas.boson_mass);
}

/// Unit sphere surface in D dimensions: 2, 2 pi, 4 pi.
inline double sphere_surface(int dimension) {
  switch (dimension) {
    case 1: return 2.0;
    case 2: return 2.0 * std::numbers::pi;
    case 3: return 4.0 * std::numbers::pi;
  }
  throw std::invalid_argument("sphere_surface: dimension must be 1, 2 or 3");
}

// ---------------------------------------------------------------------------
// Dimensionless dispersion. kappa = k sigma, energies in E_sigma, nu = n0 g_B / E_sigma.

/// Free-particle energy; exactly kappa^2 in internal units.
inline double free_energy(double kappa) {
  if (!(kappa >= 0.0)) throw std::domain_error("free_energy: negative momentum");
  return kappa * kappa;
}

inline double bogoliubov_energy(double kappa, double nu) {
  if (!(kappa >= 0.0)) throw std::domain_error("bogoliubov_energy: negative momentum");
  return kappa * std::sqrt(kappa * kappa + 2.0 * nu);
}

/// Unique kappa >= 0 with E(kappa) = omega. Uses eps = w^2 / (nu + sqrt(nu^2 + w^2)),
/// which has no cancellation for w << nu.
inline double invert_bogoliubov(double omega, double nu) {
  if (!(omega >= 0.0)) throw std::domain_error("invert_bogoliubov: negative frequency");
  const double eps = omega * omega / (nu + std::hypot(nu, omega));
  return std::sqrt(eps);
}

/// dE/dkappa = 2 (kappa^2 + nu) / sqrt(kappa^2 + 2 nu).
inline double group_velocity(double kappa, double nu) {
  if (!(kappa > 0.0)) throw std::domain_error("group_velocity: momentum must be > 0");
  return 2.0 * (kappa * kappa + nu) / std::sqrt(kappa * kappa + 2.0 * nu);
}

/// eps_k / E_k = kappa / sqrt(kappa^2 + 2 nu), in (0, 1].
inline double free_to_bogoliubov_ratio(double kappa, double nu) {
  return kappa / std::sqrt(kappa * kappa + 2.0 * nu);
}

namespace detail {

// 1 - J0(y) by its power series, used where the direct form cancels.
inline double one_minus_j0_series(double y) {
  const double q = 0.25 * y * y;
  double term = q;
  double sum = q;
  for (int m = 2; m < 30; ++m) {
    term *= -q / (static_cast<double>(m) * m);
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

// 1 - sin(y)/y by its power series.
inline double one_minus_sinc_series(double y) {
  const double y2 = y * y;
  double term = y2 / 6.0;
  double sum = term;
  for (int n = 2; n < 30; ++n) {
    term *= -y2 / ((2.0 * n) * (2.0 * n + 1.0));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

}  // namespace detail

/// Direction average of sin^2(k.L) at fixed |k||L| = x.
///   D=1: sin^2 x,  D=2: (1 - J0(2x))/2,  D=3: (1 - sin(2x)/(2x))/2.
inline double angular_interference(double x, int dimension) {
  if (!(x >= 0.0)) throw std::domain_error("angular_interference: negative argument");
  const double y = 2.0 * x;
  switch (dimension) {
    case 1: {
      const double s = std::sin(x);
      return s * s;
    }
    case 2:
      return 0.5 * (y < 1.0 ? detail::one_minus_j0_series(y) : 1.0 - std::cyl_bessel_j(0.0, y));
    case 3:
      return 0.5 * (y < 0.5 ? detail::one_minus_sinc_series(y) : 1.0 - std::sin(y) / y);
  }
  throw std::invalid_argument("angular_interference: dimension must be 1, 2 or 3");
}

// ---------------------------------------------------------------------------

/// Everything the integrands need, in internal units.
struct ReducedMedium {
  int dimension = 3;
  ProbeModel model = ProbeModel::internal_state;
  /// n0 g_B / E_sigma (with the low-dimensional transverse reduction).
  double nu = 0.0;
  /// A_D = g_AB^2 n0 S_D / ((2 pi)^D sigma^D E_sigma^2), dimensionless.
  double prefactor = 0.0;
  /// Effective separation entering the interference factor, in units of sigma.
  double separation = 0.0;
  /// k_B T / E_sigma.
  double temperature = 0.0;

  bool thermal() const { return temperature > 0.0; }

  double interference(double kappa) const {
    if (model == ProbeModel::internal_state) return 1.0;
    return angular_interference(kappa * separation, dimension);
  }
};

/// Infrared-divergent configuration (free gas at T > 0 for Model II, D <= 2).
class InfraredDivergence : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Throws InfraredDivergence when the finite-temperature integrand is not
/// integrable at k -> 0. For nu > 0 the coth ~ 2T/E pole is cancelled by
/// eps/E ~ kappa for every D; at nu = 0 the Model-II integrand goes as
/// kappa^(D-3), which diverges for D = 1, 2.
inline void check_infrared(const ReducedMedium& m) {
  if (m.thermal() && m.nu == 0.0 && m.model == ProbeModel::internal_state && m.dimension <= 2) {
    throw InfraredDivergence(
        "finite-temperature dephasing of Model II in a free (a_B = 0) gas diverges in the "
        "infrared for D = " + std::to_string(m.dimension) + "; use a_B > 0 or T = 0");
  }
}

inline ReducedMedium reduce(const GasParameters& gas, const ProbeGeometry& probe) {
  validate(gas);
  validate(probe);
  const UnitSystem units(probe.sigma, gas.boson_mass);
  const int d = gas.dimension;
  const double transverse = d == 3 ? 1.0 : std::pow(gas.transverse_length, 3 - d);
  const double e_sigma = units.energy_unit();

  ReducedMedium m;
  m.dimension = d;
  m.model = probe.model;
  m.nu = boson_coupling(gas) / transverse * gas.density / e_sigma;
  const double g_ab = impurity_coupling(probe, gas) / transverse / e_sigma;
  m.prefactor = g_ab * g_ab * gas.density * sphere_surface(d) /
                std::pow(2.0 * std::numbers::pi * probe.sigma, d);
  if (probe.model == ProbeModel::double_well) {
    const double l = probe.separation / probe.sigma;
    m.separation = probe.convention == InterferenceConvention::half_separation ? 0.5 * l : l;
  }
  m.temperature = units.to_internal(gas.temperature, QuantityKind::temperature);
  return m;
}

/// SI-facing view of the dispersion for one gas.
class Dispersion {
 public:
  Dispersion(const GasParameters& gas, const UnitSystem& units) : units_(units) {
    validate(gas);
    const double transverse = gas.dimension == 3 ? 1.0 : std::pow(gas.transverse_length, 3 - gas.dimension);
    nu_ = boson_coupling(gas) / transverse * gas.density / units.energy_unit();
  }

  double nu() const { return nu_; }

  /// hbar^2 k^2 / (2 m_B), J.
  double epsilon(double k) const {
    return units_.from_internal(free_energy(to_kappa(k)), QuantityKind::energy);
  }

  /// sqrt(eps (eps + 2 n0 g_B)), J.
  double bogoliubov(double k) const {
    return units_.from_internal(bogoliubov_energy(to_kappa(k), nu_), QuantityKind::energy);
  }

  /// k (1/m) with E_k / hbar = omega (rad/s).
  double invert(double omega) const {
    const double w = omega * units_.time_unit();
    return units_.from_internal(invert_bogoliubov(w, nu_), QuantityKind::momentum);
  }

  /// dE/dk, J m.
  double group_velocity(double k) const {
    return becprobe::group_velocity(to_kappa(k), nu_) * units_.energy_unit() * units_.sigma();
  }

 private:
  double to_kappa(double k) const {
    if (!std::isfinite(k)) throw std::domain_error("Dispersion: non-finite momentum");
    return units_.to_internal(k, QuantityKind::momentum);
  }

  UnitSystem units_;
  double nu_ = 0.0;
};

}  // namespace becprobe
