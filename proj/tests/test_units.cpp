#include <becprobe/units.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace becprobe;

namespace {

constexpr QuantityKind kinds[] = {QuantityKind::length, QuantityKind::energy, QuantityKind::time,
                                  QuantityKind::momentum, QuantityKind::temperature};

const UnitSystem rb45(45e-9, constants::rb87_mass);

}  // namespace

TEST(Units, ConstantsArePositiveCodata2018) {
  EXPECT_EQ(constants::hbar, 1.054571817e-34);
  EXPECT_EQ(constants::boltzmann, 1.380649e-23);
  EXPECT_EQ(constants::bohr_radius, 5.29177210903e-11);
  EXPECT_GT(constants::rb87_mass, 0.0);
  EXPECT_NEAR(constants::rb87_mass / constants::atomic_mass_unit, 86.909180531, 1e-9);
}

TEST(Units, DefinitionOfUnits) {
  EXPECT_DOUBLE_EQ(rb45.to_internal(45e-9, QuantityKind::length), 1.0);
  EXPECT_DOUBLE_EQ(rb45.to_internal(rb45.time_unit(), QuantityKind::time), 1.0);
  EXPECT_DOUBLE_EQ(rb45.to_internal(1.0 / 45e-9, QuantityKind::momentum), 1.0);
  EXPECT_DOUBLE_EQ(rb45.to_internal(rb45.energy_unit(), QuantityKind::energy), 1.0);
}

TEST(Units, EnergyTimesTimeIsHbar) {
  EXPECT_NEAR(rb45.energy_unit() * rb45.time_unit() / constants::hbar, 1.0, 1e-15);
}

TEST(Units, TemperatureByHand) {
  // k_B T / E_sigma, E_sigma = hbar^2 / (2 m sigma^2), evaluated term by term.
  const double hbar = 1.054571817e-34;
  const double kb = 1.380649e-23;
  const double m = 86.909180531 * 1.66053906660e-27;
  const double sigma = 45e-9;
  const double e_sigma = hbar * hbar / (2.0 * m * sigma * sigma);
  const double expected = kb * 1.38e-7 / e_sigma;
  EXPECT_NEAR(rb45.to_internal(1.38e-7, QuantityKind::temperature), expected, 1e-12 * expected);
  EXPECT_NEAR(rb45.temperature_unit(), e_sigma / kb, 1e-12 * e_sigma / kb);
}

TEST(Units, FromInternalZeroIsZero) {
  for (auto k : kinds) EXPECT_EQ(rb45.from_internal(0.0, k), 0.0) << to_string(k);
}

TEST(Units, RoundTripOfOne) {
  for (auto k : kinds) EXPECT_NEAR(rb45.to_internal(rb45.from_internal(1.0, k), k), 1.0, 1e-15) << to_string(k);
}

TEST(Units, RandomRoundTripProperty) {
  std::mt19937_64 rng(20261014);
  std::uniform_real_distribution<double> expo(-30.0, 30.0);
  for (int i = 0; i < 2000; ++i) {
    const double q = std::pow(10.0, expo(rng));
    for (auto k : kinds) {
      const double back = rb45.from_internal(rb45.to_internal(q, k), k);
      ASSERT_NEAR(back / q, 1.0, 1e-12) << to_string(k) << " q=" << q;
      const double x = rb45.to_internal(rb45.from_internal(q, k), k);
      ASSERT_NEAR(x / q, 1.0, 1e-12) << to_string(k) << " x=" << q;
    }
  }
}

TEST(Units, SigmaScaling) {
  const UnitSystem a(40e-9, constants::rb87_mass);
  const UnitSystem b(80e-9, constants::rb87_mass);
  const double len = 1e-6;
  const double en = 1e-32;
  EXPECT_NEAR(a.to_internal(len, QuantityKind::length) / b.to_internal(len, QuantityKind::length), 2.0, 1e-14);
  // E_sigma ~ sigma^-2, so the internal value of a fixed energy grows as sigma^2.
  EXPECT_NEAR(b.to_internal(en, QuantityKind::energy) / a.to_internal(en, QuantityKind::energy), 4.0, 1e-14);
}

TEST(Units, RejectsBadConstruction) {
  EXPECT_THROW(UnitSystem(0.0, constants::rb87_mass), std::invalid_argument);
  EXPECT_THROW(UnitSystem(-1e-9, constants::rb87_mass), std::invalid_argument);
  EXPECT_THROW(UnitSystem(45e-9, 0.0), std::invalid_argument);
  EXPECT_THROW(UnitSystem(std::numeric_limits<double>::infinity(), 1.0), std::invalid_argument);
}

TEST(Units, RejectsNonFiniteInput) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double inf = std::numeric_limits<double>::infinity();
  for (auto k : kinds) {
    EXPECT_THROW(rb45.to_internal(nan, k), std::invalid_argument);
    EXPECT_THROW(rb45.to_internal(inf, k), std::invalid_argument);
    EXPECT_THROW(rb45.from_internal(-inf, k), std::invalid_argument);
  }
}
