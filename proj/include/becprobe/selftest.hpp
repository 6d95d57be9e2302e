#pragma once

// Built-in smoke table: closed-form checks of every module plus the k-space /
// frequency-space identity at one configuration.

#include <becprobe/decoherence.hpp>
#include <becprobe/dispersion.hpp>
#include <becprobe/fit.hpp>
#include <becprobe/nonmarkov.hpp>
#include <becprobe/quadrature.hpp>
#include <becprobe/roots.hpp>
#include <becprobe/spectral.hpp>
#include <becprobe/units.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

namespace becprobe {

struct SelftestOptions {
  /// Multiplies the spectral-density normalisation on the frequency-space side
  /// of the dual-path check. Anything but 1 must make that check fail.
  double tamper = 1.0;
};

struct SelftestCheck {
  std::string module;
  std::string name;
  bool pass = false;
  std::string detail;
};

struct SelftestReport {
  std::vector<SelftestCheck> checks;
  double seconds = 0.0;

  bool passed() const {
    for (const auto& c : checks) {
      if (!c.pass) return false;
    }
    return !checks.empty();
  }
};

namespace detail {

class SelftestTable {
 public:
  void check(const std::string& module, const std::string& name, const std::function<bool(std::string&)>& fn) {
    SelftestCheck c{module, name, false, {}};
    try {
      c.pass = fn(c.detail);
    } catch (const std::exception& e) {
      c.detail = std::string("threw: ") + e.what();
    }
    checks_.push_back(std::move(c));
  }

  void close(const std::string& module, const std::string& name, double got, double want, double rel) {
    check(module, name, [=](std::string& d) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "got %.12g want %.12g", got, want);
      d = buf;
      return std::abs(got - want) <= rel * std::max(1.0, std::abs(want));
    });
  }

  std::vector<SelftestCheck> take() { return std::move(checks_); }

 private:
  std::vector<SelftestCheck> checks_;
};

inline std::string short_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

inline ReducedMedium selftest_medium(int d, ProbeModel model, double a_rel) {
  GasParameters gas;
  gas.dimension = d;
  gas.scattering_length = a_rel * constants::rb87_scattering_length;
  const double per_um[3] = {0.4, 2.0, 10.0};
  gas.density = per_um[d - 1] * std::pow(1e6, d);
  gas.transverse_length = 120e-9;
  ProbeGeometry probe;
  probe.model = model;
  probe.sigma = 120e-9;
  if (model == ProbeModel::double_well) probe.separation = 180e-9;
  return reduce(gas, probe);
}

}  // namespace detail

inline SelftestReport run_selftest(const SelftestOptions& opt = {}) {
  using namespace numeric;
  const auto start = std::chrono::steady_clock::now();
  becprobe::detail::SelftestTable t;
  const double pi = std::numbers::pi;

  const UnitSystem u(45e-9, constants::rb87_mass);
  t.close("units", "sigma -> 1", u.to_internal(45e-9, QuantityKind::length), 1.0, 1e-15);
  t.close("units", "hbar/E -> 1", u.to_internal(u.time_unit(), QuantityKind::time), 1.0, 1e-15);
  t.close("units", "from_internal(0) = 0", u.from_internal(0.0, QuantityKind::energy), 0.0, 0.0);
  t.close("units", "round trip", u.to_internal(u.from_internal(1.0, QuantityKind::temperature), QuantityKind::temperature),
          1.0, 1e-12);

  t.close("dispersion", "eps(0) = 0", free_energy(0.0), 0.0, 0.0);
  t.close("dispersion", "eps(2) = 4", free_energy(2.0), 4.0, 1e-15);
  t.close("dispersion", "free gas E = eps", bogoliubov_energy(1.7, 0.0), free_energy(1.7), 1e-15);
  t.close("dispersion", "E(0) = 0", bogoliubov_energy(0.0, 0.3), 0.0, 0.0);
  t.close("dispersion", "invert round trip", bogoliubov_energy(invert_bogoliubov(3.3, 0.05), 0.05), 3.3, 1e-12);
  t.close("dispersion", "free-gas inverse", invert_bogoliubov(2.25, 0.0), 1.5, 1e-14);
  t.close("dispersion", "free group velocity", group_velocity(1.5, 0.0), 3.0, 1e-14);
  for (int d = 1; d <= 3; ++d) {
    t.close("dispersion", "W(0) = 0, D=" + std::to_string(d), angular_interference(0.0, d), 0.0, 0.0);
  }
  t.close("dispersion", "D=1 W(pi/2) = 1", angular_interference(pi / 2, 1), 1.0, 1e-15);

  t.close("quadrature", "int e^-x", integrate_semi_infinite([](double x) { return std::exp(-x); }, {}).value, 1.0,
          1e-10);
  t.close("quadrature", "int e^-x^2",
          integrate_semi_infinite([](double x) { return std::exp(-x * x); }, {}).value, std::sqrt(pi) / 2, 1e-10);
  t.check("quadrature", "x-1 sign change", [](std::string&) {
    const auto b = find_sign_changes([](double x) { return x - 1; }, 0.0, 2.0, 8, GridSpacing::linear);
    return b.size() == 1 && b[0].lo <= 1.0 && b[0].hi >= 1.0;
  });
  t.check("quadrature", "sin sign changes on [0,7]", [pi](std::string&) {
    const auto b = find_sign_changes([](double x) { return std::sin(x); }, 0.0, 7.0, 64, GridSpacing::linear);
    return b.size() == 2 && b[0].lo < pi && pi < b[0].hi && b[1].lo < 2 * pi && 2 * pi < b[1].hi;
  });
  t.check("quadrature", "constant has no sign change", [](std::string&) {
    return find_sign_changes([](double) { return 1.0; }, 0.0, 1.0, 16, GridSpacing::linear).empty();
  });
  t.close("quadrature", "root x-1", refine_root([](double x) { return x - 1; }, {0, 2}), 1.0, 1e-10);
  t.close("quadrature", "root sin on [3,4]", refine_root([](double x) { return std::sin(x); }, {3, 4}), pi, 1e-10);
  {
    std::vector<Sample> s;
    for (double x : make_grid(0.1, 10.0, 20, GridSpacing::logarithmic)) s.push_back({x, 3.0 * std::sqrt(x)});
    const auto f = fit_power_law(s, 0.1, 10.0);
    t.close("quadrature", "fit 3 x^0.5 exponent", f.exponent, 0.5, 1e-10);
    t.close("quadrature", "fit 3 x^0.5 amplitude", f.amplitude, 3.0, 1e-10);
  }

  const auto m3 = becprobe::detail::selftest_medium(3, ProbeModel::internal_state, 0.5);
  t.close("decoherence", "Gamma(0) = 0", gamma_at(m3, 0.0).value, 0.0, 0.0);
  t.close("decoherence", "Gamma'(0) = 0", gamma_prime_at(m3, 0.0).value, 0.0, 0.0);
  t.check("decoherence", "Gamma'(small t) > 0", [&](std::string&) { return gamma_prime_at(m3, 1e-3).value > 0.0; });
  {
    auto m0 = becprobe::detail::selftest_medium(3, ProbeModel::double_well, 0.5);
    m0.separation = 0.0;
    t.close("decoherence", "Model I, L = 0 -> 0", gamma_at(m0, 5.0).value, 0.0, 0.0);
    auto mz = m3;
    mz.prefactor = 0.0;
    t.close("decoherence", "g_AB = 0 -> 0", gamma_at(mz, 5.0).value, 0.0, 0.0);
  }
  t.close("decoherence", "thermal factor T = 0", thermal_factor(3.0, 0.0), 1.0, 0.0);

  t.check("spectral", "synthetic w^1.5 exponent", [](std::string& d) {
    std::vector<Sample> s;
    for (double w : make_grid(1e-3, 1e-2, 64, GridSpacing::logarithmic)) s.push_back({w, std::pow(w, 1.5)});
    const double e = fit_power_law(s, 1e-3, 1e-2).exponent;
    d = "s = " + std::to_string(e);
    return std::abs(e - 1.5) <= 0.01;
  });
  t.check("spectral", "Model II has no roots", [&](std::string&) {
    try {
      spectrum_roots(m3, 10.0);
    } catch (const UnsupportedConfiguration&) {
      return true;
    }
    return false;
  });

  {
    const DecoherenceFunctions cosine{[](double s) { return PointValue{1.0 - std::cos(s)}; },
                                      [](double s) { return PointValue{std::sin(s)}; }};
    BackflowSettings bs;
    bs.t_max = 2 * pi;
    const auto rep = find_backflow(cosine, bs);
    t.check("nonmarkov", "1 - cos t: one interval (pi, 2 pi)", [&](std::string&) {
      return rep.intervals.size() == 1 && std::abs(rep.intervals[0].t_start - pi) < 1e-9 &&
             std::abs(rep.intervals[0].t_end - 2 * pi) < 1e-12;
    });
    t.close("nonmarkov", "1 - cos t: N = 2", rep.measure, 2.0, 1e-9);
    t.close("nonmarkov", "1 - cos t: N_frac = 1", fractional_measure(rep, cosine).value, 1.0, 1e-9);
    const DecoherenceFunctions monotone{[](double s) { return PointValue{s * s}; },
                                        [](double s) { return PointValue{2 * s}; }};
    const auto none = find_backflow(monotone, bs);
    t.check("nonmarkov", "monotone: no backflow", [&](std::string&) {
      return none.intervals.empty() && none.measure == 0.0 && none.markovian && none.fractional == 0.0;
    });
  }

  {
    const SpectralDensity j(m3);
    auto tampered = FunctionSpectrum{[&j, f = opt.tamper](double w) { return f * j(w); }, j.split_point()};
    for (double time : {1.0, 5.0, 20.0}) {
      const double k = gamma_at(m3, time).value;
      const double w = gamma_via_spectrum(tampered, time, m3.temperature).value;
      t.check("dual-path", "Model II 3D a_B = 0.5 a_Rb, t = " + becprobe::detail::short_number(time), [=](std::string& d) {
        const double rel = std::abs(k - w) / std::abs(k);
        char buf[64];
        std::snprintf(buf, sizeof buf, "relative gap %.3e", rel);
        d = buf;
        return rel <= 1e-6;
      });
    }
  }

  SelftestReport rep;
  rep.checks = t.take();
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

inline void print(const SelftestReport& r, std::ostream& os) {
  std::size_t failed = 0;
  for (const auto& c : r.checks) {
    os << (c.pass ? "PASS  " : "FAIL  ") << c.module << " | " << c.name;
    if (!c.pass && !c.detail.empty()) os << "  (" << c.detail << ")";
    os << "\n";
    failed += c.pass ? 0 : 1;
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "%zu/%zu checks passed in %.2f s\n", r.checks.size() - failed, r.checks.size(),
                r.seconds);
  os << buf;
}

}  // namespace becprobe
