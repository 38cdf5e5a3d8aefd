#include "entrokit/errors.hpp"
#include "entrokit/matter_models.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace entrokit;

namespace {

SystemState gas(double E, double V, double n) { return SystemState{E, Parameters::volume(V), Composition{n}}; }

} // namespace

TEST(IdealGas, ReferenceStateEntropy)
{
  const auto m = ideal_gas_model(3.0);
  EXPECT_NEAR(entropy_of(*m, gas(1.5, 1, 1)), 1.5 * std::log(1.5), 1e-15);
  EXPECT_NEAR(entropy_of(*m, gas(1.5, 1, 1)), 0.60820, 5e-6);
}

TEST(IdealGas, EntropyAgreesWithQuadratureOfInverseTemperature)
{
  const auto m = ideal_gas_model(5.0);
  const double dS = entropy_of(*m, gas(4.0, 2, 1.3)) - entropy_of(*m, gas(1.0, 2, 1.3));
  EXPECT_NEAR(dS, oracle::quadrature_dS(1.0, 4.0, 1.3, 5.0), 1e-10);
}

TEST(IdealGas, VolumeDoublingAndExtensivity)
{
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.5, 3.0);
  for (double dof : {3.0, 5.0, 7.0}) {
    const auto m = ideal_gas_model(dof);
    for (int t = 0; t < 50; ++t) {
      const double E = u(rng), V = u(rng), n = u(rng), lam = u(rng);
      EXPECT_NEAR(entropy_of(*m, gas(E, 2 * V, n)) - entropy_of(*m, gas(E, V, n)), n * std::log(2.0), 1e-12);
      EXPECT_NEAR(entropy_of(*m, gas(lam * E, lam * V, lam * n)), lam * entropy_of(*m, gas(E, V, n)), 1e-12);
      EXPECT_NEAR(entropy_of(*m, gas(E, V, n)), oracle::gas_entropy(E, V, n, dof), 1e-12);
    }
  }
}

TEST(IdealGas, DomainErrors)
{
  const auto m = ideal_gas_model(3.0);
  EXPECT_THROW(entropy_of(*m, gas(0.0, 1, 1)), DomainError);
  EXPECT_THROW(entropy_of(*m, gas(1.0, -1, 1)), DomainError);
  EXPECT_THROW(entropy_of(*m, gas(1.0, 1, 0)), DomainError);
  EXPECT_THROW(ideal_gas_model(0.5), std::invalid_argument);
  auto st = gas(1.0, 1, 1);
  st.correlated = true;
  EXPECT_THROW(entropy_of(*m, st), DomainError);
}

TEST(EnergyOf, InvertsTheRelation)
{
  const auto m = ideal_gas_model(3.0);
  EXPECT_NEAR(energy_of(*m, 1.5 * std::log(1.5), Parameters::volume(1), Composition{1}), 1.5, 1e-12);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  for (int t = 0; t < 200; ++t) {
    const double E = u(rng), V = u(rng), n = u(rng);
    const double S = entropy_of(*m, gas(E, V, n));
    EXPECT_NEAR(energy_of(*m, S, Parameters::volume(V), Composition{n}), E, 1e-10 * E);
  }
}

TEST(EnergyOf, IsentropicVolumeDoubling)
{
  for (double dof : {3.0, 5.0}) {
    const auto m = ideal_gas_model(dof);
    const double S = entropy_of(*m, gas(2.0, 1, 1));
    EXPECT_NEAR(energy_of(*m, S, Parameters::volume(2), Composition{1}), oracle::isentrope_energy(2.0, 1, 2, dof),
                1e-12);
  }
}

TEST(EnergyOf, UnattainableEntropyIsRangeError)
{
  const auto m = ideal_gas_model(3.0);
  EXPECT_THROW(energy_of(*m, -200.0, Parameters::volume(1), Composition{1}), RangeError);
  EXPECT_THROW(energy_of(*m, 1e6, Parameters::volume(1), Composition{1}), RangeError);
}

TEST(Temperature, IdealGasClosedFormAndFiniteDifference)
{
  const auto m = ideal_gas_model(3.0);
  EXPECT_NEAR(temperature_of(*m, gas(1.5, 1, 1)), 1.0, 1e-15);
  // finite-difference cross-check of the analytic derivative
  const double h = 1e-5;
  const double fd = 2 * h / (entropy_of(*m, gas(1.5 + h, 1, 1)) - entropy_of(*m, gas(1.5 - h, 1, 1)));
  EXPECT_NEAR(fd, 1.0, 1e-8);
}

TEST(Temperature, ReservoirIsIsothermal)
{
  const ReservoirModel r(2.5, -10, 10);
  for (double E : {-9.0, 0.0, 7.5})
    EXPECT_DOUBLE_EQ(temperature_of(r, SystemState{E, Parameters{}, Composition{}}), 2.5);
  EXPECT_NEAR(r.entropy(3.0, Parameters{}, Composition{}) - r.entropy(1.0, Parameters{}, Composition{}), 2.0 / 2.5,
              1e-15);
}

TEST(Mixture, EntropyAndGradientMatchIndependentForms)
{
  const std::vector<oracle::Species> sp{{3, 0.0, 0.0}, {5, -1.0, 0.3}, {6, 0.5, -0.2}};
  const IdealGasMixture mix({{"a", 3, 0.0, 0.0}, {"b", 5, -1.0, 0.3}, {"c", 6, 0.5, -0.2}});
  const Composition n{0.7, 1.1, 0.4};
  const Parameters V = Parameters::volume(2.0);
  const double E = 3.0;
  EXPECT_NEAR(mix.entropy(E, V, n), oracle::mixture_entropy(sp, E, V[0], n.amounts()), 1e-12);
  const auto g = mix.entropy_gradient_amounts(E, V, n);
  ASSERT_TRUE(g);
  for (Eigen::Index k = 0; k < 3; ++k) {
    const double h = 1e-6;
    Eigen::VectorXd up = n.amounts(), dn = n.amounts();
    up[k] += h;
    dn[k] -= h;
    const double fd = (oracle::mixture_entropy(sp, E, 2.0, up) - oracle::mixture_entropy(sp, E, 2.0, dn)) / (2 * h);
    EXPECT_NEAR((*g)[k], fd, 1e-7);
  }
}

TEST(Weight, WorkFormula)
{
  const Weight w{1.0, 9.81, 0.0};
  EXPECT_DOUBLE_EQ(weight_work(w, 0.0, 2.0), 19.62);
  EXPECT_EQ(weight_work(w, 1.0, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(weight_work(w, 3.0, 1.0), -weight_work(w, 1.0, 3.0));
}

TEST(Reservoir, ExchangeLedgerAndRange)
{
  const auto R = ThermalReservoir::make(1.0, 0.0, -1.0, 1.0);
  const auto R2 = reservoir_exchange(R, -std::log(2.0));
  EXPECT_DOUBLE_EQ(R2.entropy_change, -std::log(2.0));
  const auto R3 = reservoir_exchange(R, 0.0);
  EXPECT_EQ(R3.energy, R.energy);
  EXPECT_EQ(R3.entropy_change, 0.0);
  EXPECT_THROW(reservoir_exchange(R, 1.5), RangeExceeded);
  EXPECT_THROW(ThermalReservoir::make(-1.0), std::invalid_argument);
}

TEST(Composite, EnergyIsAdditive)
{
  const ModelPtr a = ideal_gas_model(3.0), b = ideal_gas_model(5.0);
  const CompositeState c{{a, b}, {gas(1.25, 1, 1), gas(2.5, 2, 1)}};
  EXPECT_EQ(c.energy(), 3.75);
  EXPECT_NEAR(c.entropy(), entropy_of(*a, c.states[0]) + entropy_of(*b, c.states[1]), 1e-15);
}

TEST(Properties, MonotoneAndSmoothOnBuiltInModels)
{
  for (double dof : {1.0, 3.0, 5.0, 7.0}) {
    const auto m = ideal_gas_model(dof);
    const auto scan = check_energy_monotone(*m, Parameters::volume(1.0), Composition{1.0}, 1000);
    EXPECT_TRUE(scan.increasing);
    EXPECT_EQ(scan.points, 1000u);
    const auto ratio = richardson_ratio_dSdE(*m, gas(1.0, 1, 1), 1e-2);
    ASSERT_TRUE(ratio);
    EXPECT_NEAR(*ratio, 4.0, 0.5);
  }
  const ReservoirModel r(1.0, -5, 5);
  EXPECT_TRUE(check_energy_monotone(r, Parameters{}, Composition{}, 1000).increasing);
  EXPECT_FALSE(richardson_ratio_dSdE(r, SystemState{0.0, Parameters{}, Composition{}}, 1e-2));
}

namespace {

// S decreasing on part of its range; the scan must notice
class BrokenModel final : public MatterModel
{
public:
  std::string kind() const override { return "broken"; }
  std::size_t constituents() const override { return 1; }
  std::size_t parameter_count() const override { return 1; }
  double ground_energy(const Parameters&, const Composition&) const override { return 0.0; }
  double entropy(double E, const Parameters&, const Composition&) const override { return std::sin(std::log(E)); }
};

} // namespace

TEST(Properties, MonotoneScanDetectsViolation)
{
  const BrokenModel m;
  const auto scan = check_energy_monotone(m, Parameters::volume(1.0), Composition{1.0}, 1000);
  EXPECT_FALSE(scan.increasing);
  EXPECT_TRUE(scan.first_violation.has_value());
}
