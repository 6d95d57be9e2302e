#pragma once

// Default configuration used across the suites: 87Rb gas and impurity,
// sigma = 120 nm, L = 1.5 sigma, transverse length sigma.

#include <becprobe/dispersion.hpp>
#include <becprobe/units.hpp>

#include <cmath>

namespace fixtures {

using namespace becprobe;

inline constexpr double sigma = 120e-9;
inline constexpr double a_rb = constants::rb87_scattering_length;

inline double density(int d) {
  const double per_um[3] = {0.4, 2.0, 10.0};
  return per_um[d - 1] * std::pow(1e6, d);
}

inline GasParameters gas(int d, double a_rel = 1.0, double temperature = 0.0) {
  GasParameters g;
  g.dimension = d;
  g.density = density(d);
  g.scattering_length = a_rel * a_rb;
  g.temperature = temperature;
  g.transverse_length = sigma;
  return g;
}

inline ProbeGeometry probe(ProbeModel model, double separation_sigma = 1.5) {
  ProbeGeometry p;
  p.model = model;
  p.sigma = sigma;
  if (model == ProbeModel::double_well) p.separation = separation_sigma * sigma;
  return p;
}

inline ReducedMedium medium(int d, ProbeModel model, double a_rel = 1.0, double temperature = 0.0,
                            double separation_sigma = 1.5) {
  return reduce(gas(d, a_rel, temperature), probe(model, separation_sigma));
}

inline constexpr ProbeModel models[] = {ProbeModel::double_well, ProbeModel::internal_state};

}  // namespace fixtures
