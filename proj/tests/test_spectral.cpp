#include <becprobe/decoherence.hpp>
#include <becprobe/spectral.hpp>

#include <fixtures.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace becprobe;
using fixtures::medium;
using fixtures::models;

TEST(Spectral, NonNegativeAndCutOff) {
  for (int d = 1; d <= 3; ++d) {
    for (auto model : models) {
      const auto m = medium(d, model);
      const SpectralDensity j(m);
      double peak = 0.0;
      for (double w : numeric::make_grid(1e-4, 200.0, 2000, numeric::GridSpacing::logarithmic)) {
        const double v = j(w);
        ASSERT_GE(v, 0.0);
        peak = std::max(peak, v);
      }
      // Beyond k sigma = 5 the envelope e^(-k^2/2) < 4e-6.
      for (double kappa : {5.0, 6.0, 8.0}) {
        EXPECT_LT(j(bogoliubov_energy(kappa, m.nu)) / peak, 1e-3) << d << " kappa=" << kappa;
      }
    }
  }
}

TEST(Spectral, VanishesAtZeroFrequencyForInteractingGas) {
  for (int d = 1; d <= 3; ++d) {
    for (auto model : models) {
      const SpectralDensity j(medium(d, model));
      // Phononic J goes at least linearly in omega.
      EXPECT_LT(j(1e-8), 1e-3 * j(1e-2)) << d;
      EXPECT_LT(j(1e-10), 2e-2 * j(1e-8)) << d;
    }
  }
  EXPECT_THROW(spectral_density(medium(3, ProbeModel::internal_state), 0.0), std::domain_error);
  EXPECT_THROW(spectral_density(medium(3, ProbeModel::internal_state), -1.0), std::domain_error);
}

TEST(Spectral, ChangeOfVariablesIdentity) {
  // Pointwise: J(E) dE = (k-space integrand without the time factor) dk, so J(E) v_g equals it.
  for (int d = 1; d <= 3; ++d) {
    for (auto model : models) {
      const auto m = medium(d, model);
      for (double kappa : {0.05, 0.7, 2.0}) {
        const double w = bogoliubov_energy(kappa, m.nu);
        const double k_side = m.prefactor * detail::momentum_kernel(m, kappa);
        EXPECT_NEAR(spectral_density(m, w) * group_velocity(kappa, m.nu) / k_side, 1.0, 1e-12);
      }
    }
  }
}

TEST(Spectral, OneDimensionalModelOneRoots) {
  const auto m = medium(1, ProbeModel::double_well, 1.0, 0.0, 3.0);
  const auto roots = spectrum_roots(m, 25.0);
  ASSERT_FALSE(roots.empty());
  for (std::size_t n = 1; n <= roots.size(); ++n) {
    const double want = bogoliubov_energy(n * std::numbers::pi / m.separation, m.nu);
    EXPECT_NEAR(roots[n - 1] / want, 1.0, 1e-9) << n;
  }
  // Every closed-form root below 25 is found.
  const double next = bogoliubov_energy((roots.size() + 1) * std::numbers::pi / m.separation, m.nu);
  EXPECT_GT(next, 25.0);
  const SpectralDensity j(m);
  const double scale = j(0.5 * (roots[0] + roots[1]));
  for (double r : roots) EXPECT_LT(j(r) / scale, 1e-20);
}

TEST(Spectral, RootCountGrowsWithSeparation) {
  for (double l : {1.5, 3.0, 6.0}) {
    const auto a = spectrum_roots(medium(1, ProbeModel::double_well, 1.0, 0.0, l), 25.0).size();
    const auto b = spectrum_roots(medium(1, ProbeModel::double_well, 1.0, 0.0, 2.0 * l), 25.0).size();
    EXPECT_GE(b, 2 * a) << l;
  }
}

TEST(Spectral, RootsUnsupportedElsewhere) {
  EXPECT_THROW(spectrum_roots(medium(1, ProbeModel::internal_state), 10.0), UnsupportedConfiguration);
  EXPECT_THROW(spectrum_roots(medium(2, ProbeModel::double_well), 10.0), UnsupportedConfiguration);
  EXPECT_THROW(spectrum_roots(medium(3, ProbeModel::double_well), 10.0), UnsupportedConfiguration);
}

TEST(Spectral, ModelTwoHasNoZeros) {
  for (int d = 1; d <= 3; ++d) {
    const SpectralDensity j(medium(d, ProbeModel::internal_state));
    for (double w : numeric::make_grid(1e-4, 30.0, 3000, numeric::GridSpacing::logarithmic)) ASSERT_GT(j(w), 0.0);
  }
}

TEST(Spectral, HigherDimensionalModelOneHasNoZeros) {
  for (int d : {2, 3}) {
    const SpectralDensity j(medium(d, ProbeModel::double_well, 1.0, 0.0, 6.0));
    for (double w : numeric::make_grid(1e-4, 30.0, 3000, numeric::GridSpacing::logarithmic)) ASSERT_GT(j(w), 0.0);
  }
}

TEST(Ohmicity, SyntheticPowerLaw) {
  std::vector<numeric::Sample> s;
  for (double w : numeric::make_grid(1e-3, 1e-2, 64, numeric::GridSpacing::logarithmic)) {
    s.push_back({w, 0.7 * std::pow(w, 1.5)});
  }
  EXPECT_NEAR(numeric::fit_power_law(s, 1e-3, 1e-2).exponent, 1.5, 0.01);
}

TEST(Ohmicity, ClassificationThresholds) {
  EXPECT_EQ(classify(0.5, 0.05), Ohmicity::sub_ohmic);
  EXPECT_EQ(classify(0.96, 0.05), Ohmicity::ohmic);
  EXPECT_EQ(classify(1.04, 0.05), Ohmicity::ohmic);
  EXPECT_EQ(classify(1.2, 0.05), Ohmicity::super_ohmic);
  const auto r = ohmicity(medium(3, ProbeModel::internal_state, 1.0));
  EXPECT_EQ(r.classification, classify(r.s, 0.05));
  EXPECT_EQ(r.supercritical, r.s > 2.05);
}

TEST(Ohmicity, FreeGasExponents) {
  // a_B -> 0: E = k^2 and J ~ k^(D-1) dk/dw W, i.e. w^(D/2 - 1) for Model II and,
  // with W ~ k^2 at small k, w^(D/2) for Model I. The window sits a decade lower
  // than the default so the e^(-k^2/2) and sin^2 curvature stay below 1e-3.
  OhmicityOptions o;
  o.window_lo = 1e-4;
  o.window_hi = 1e-3;
  for (int d = 1; d <= 3; ++d) {
    const double s2 = ohmicity(medium(d, ProbeModel::internal_state, 1e-7), o).s;
    const double s1 = ohmicity(medium(d, ProbeModel::double_well, 1e-7), o).s;
    EXPECT_NEAR(s2, 0.5 * d - 1.0, 0.01) << d;
    EXPECT_NEAR(s1, 0.5 * d, 0.01) << d;
  }
}

TEST(Ohmicity, PhononExponents) {
  // Deep in the phonon regime (w << nu): J ~ w^D for Model II, w^(D+2) for Model I.
  OhmicityOptions o;
  o.window_lo = 1e-6;
  o.window_hi = 1e-5;
  for (int d = 1; d <= 3; ++d) {
    EXPECT_NEAR(ohmicity(medium(d, ProbeModel::internal_state), o).s, d, 0.01) << d;
    EXPECT_NEAR(ohmicity(medium(d, ProbeModel::double_well), o).s, d + 2.0, 0.01) << d;
  }
}

TEST(Ohmicity, OneDimensionalFreeGasIsSubOhmic) {
  const auto r = ohmicity(medium(1, ProbeModel::internal_state, 1e-3));
  EXPECT_LT(r.s, 1.0);
  EXPECT_EQ(r.classification, Ohmicity::sub_ohmic);
}

TEST(Ohmicity, ThreeDimensionalFreeGasModelTwoIsOhmic) {
  // Claimed behaviour of the free gas in three dimensions; see the free-gas exponent test for
  // what the spectral-density formula yields.
  EXPECT_NEAR(ohmicity(medium(3, ProbeModel::internal_state, 1e-3)).s, 1.0, 0.1);
}

TEST(Ohmicity, NonDecreasingInScatteringLength) {
  const double grid[] = {1e-3, 1e-2, 1e-1, 0.25, 0.5, 1.0};
  for (int d = 1; d <= 3; ++d) {
    for (auto model : models) {
      double prev = -1e300;
      for (double a : grid) {
        const double s = ohmicity(medium(d, model, a)).s;
        EXPECT_GE(s, prev - 1e-9) << "D=" << d << " model " << to_string(model) << " a=" << a;
        prev = s;
      }
    }
  }
}

TEST(Ohmicity, WindowShrinksBelowFirstRoot) {
  const auto m = medium(1, ProbeModel::double_well, 1.0, 0.0, 200.0);
  const auto roots = spectrum_roots(m, 1e-2);
  ASSERT_FALSE(roots.empty());
  const auto r = ohmicity(m);
  EXPECT_TRUE(r.window_adjusted);
  EXPECT_NEAR(r.fit.window_hi, 0.5 * roots.front(), 1e-15);
  EXPECT_GE(r.fit.points, 5u);
  EXPECT_FALSE(ohmicity(medium(1, ProbeModel::double_well)).window_adjusted);
  // First root below the window: nothing to fit.
  EXPECT_THROW(ohmicity(medium(1, ProbeModel::double_well, 1.0, 0.0, 5000.0)), std::domain_error);
}

TEST(Spectral, DualPathAcrossConfigurations) {
  for (int d = 1; d <= 3; ++d) {
    for (auto model : models) {
      for (double a : {1e-3, 0.25, 1.0}) {
        const auto m = medium(d, model, a);
        const SpectralDensity j(m);
        for (double t : {1.0, 5.0, 20.0}) {
          const auto k = gamma_at(m, t);
          const auto w = gamma_via_spectrum(j, t, 0.0);
          ASSERT_TRUE(k.converged && w.converged);
          EXPECT_NEAR(w.value / k.value, 1.0, 1e-6) << "D=" << d << " model " << to_string(model) << " a=" << a;
        }
      }
    }
  }
}

TEST(Spectral, SampleCurve) {
  const auto m = medium(2, ProbeModel::double_well);
  const auto c = sample_spectrum(m, {0.1, 1.0, 10.0});
  ASSERT_EQ(c.values.size(), 3u);
  EXPECT_EQ(c.values[1], spectral_density(m, 1.0));
  EXPECT_EQ(c.medium.dimension, 2);
}
