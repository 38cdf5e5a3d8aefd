#pragma once

#include "entrokit/stoichiometry.hpp"

#include <Eigen/Dense>

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace entrokit {

/// Ideal-gas states must keep at least this much energy above the ground bound.
inline constexpr double min_excess_energy = 1e-12;
inline constexpr double tol_inv = 1e-10;
inline constexpr double boltzmann_si = 1.380649e-23;

inline double energy_step(double E) { return 1e-6 * std::max(1.0, std::abs(E)); }

/// Geometric parameters of a closed system. For the built-in models this is a
/// single volume entry, which must be positive.
struct Parameters
{
  Eigen::VectorXd beta;

  Parameters() = default;
  explicit Parameters(Eigen::VectorXd b)
    : beta(std::move(b))
  {
  }
  static Parameters volume(double V);

  double operator[](std::size_t j) const { return beta[static_cast<Eigen::Index>(j)]; }
  std::size_t size() const { return static_cast<std::size_t>(beta.size()); }
};

struct SystemState
{
  double energy = 0.0;
  Parameters params;
  Composition comp;
  /// True while the system is correlated with its environment. Entropy and the
  /// operational measurements are defined only for uncorrelated states.
  bool correlated = false;
};

/// An analytic fundamental relation S(E, beta, n).
///
/// Implementations must be strictly increasing in E and smooth on their
/// domain; both properties are probed by check_energy_monotone() and
/// richardson_ratio_dSdE().
class MatterModel
{
public:
  virtual ~MatterModel() = default;

  virtual std::string kind() const = 0;
  virtual std::size_t constituents() const = 0;
  virtual std::size_t parameter_count() const = 0;

  /// Infimum of admissible energies at fixed (beta, n).
  virtual double ground_energy(const Parameters& params, const Composition& comp) const = 0;
  /// Supremum of admissible energies; +inf for normal systems.
  virtual double max_energy(const Parameters&, const Composition&) const;

  /// Throws DomainError when (E, beta, n) is outside the model domain.
  virtual void check_domain(double E, const Parameters& params, const Composition& comp) const;

  virtual double entropy(double E, const Parameters& params, const Composition& comp) const = 0;

  /// Analytic (dS/dE) at fixed (beta, n), when the model has one.
  virtual std::optional<double> inverse_temperature(double, const Parameters&, const Composition&) const
  {
    return std::nullopt;
  }
  /// Analytic (dS/dn_k) at fixed (E, beta, n'), when the model has one.
  virtual std::optional<Eigen::VectorXd> entropy_gradient_amounts(double, const Parameters&,
                                                                  const Composition&) const
  {
    return std::nullopt;
  }
};

using ModelPtr = std::shared_ptr<const MatterModel>;

struct GasSpecies
{
  std::string name;
  double dof = 3.0;
  /// Energy per particle carried at zero temperature (formation energy).
  double formation_energy = 0.0;
  /// Additive entropy per particle.
  double entropy_constant = 0.0;
};

/// Ideal-gas mixture in one volume with reduced units (k_B = 1):
///
///   T = (E - sum n_k u_k) / sum n_k c_k,   c_k = dof_k / 2
///   S = sum n_k [ c_k ln(c_k T) + ln(V / n_k) + s_k ]
///
/// A single species with u = s = 0 reduces to S = n [ (dof/2) ln(E/n) + ln(V/n) ].
class IdealGasMixture final : public MatterModel
{
public:
  explicit IdealGasMixture(std::vector<GasSpecies> species);

  std::string kind() const override { return species_.size() == 1 ? "ideal_gas" : "ideal_gas_mixture"; }
  std::size_t constituents() const override { return species_.size(); }
  std::size_t parameter_count() const override { return 1; }

  double ground_energy(const Parameters& params, const Composition& comp) const override;
  void check_domain(double E, const Parameters& params, const Composition& comp) const override;
  double entropy(double E, const Parameters& params, const Composition& comp) const override;
  std::optional<double> inverse_temperature(double E, const Parameters& params,
                                            const Composition& comp) const override;
  std::optional<Eigen::VectorXd> entropy_gradient_amounts(double E, const Parameters& params,
                                                          const Composition& comp) const override;

  const std::vector<GasSpecies>& species() const { return species_; }
  /// Heat capacity at constant volume, sum n_k c_k.
  double heat_capacity(const Composition& comp) const;
  /// Single-species model for constituent k.
  std::shared_ptr<const IdealGasMixture> restricted_to(std::size_t k) const;

private:
  double temperature_unchecked(double E, const Composition& comp) const;

  std::vector<GasSpecies> species_;
};

/// Built-in single-species ideal gas with the given degrees of freedom per particle.
/// Throws std::invalid_argument when dof < 1.
std::shared_ptr<const IdealGasMixture> ideal_gas_model(double dof_per_particle);

/// A thermal reservoir viewed as a matter model: S = E / T_R on [E_min, E_max],
/// no parameters and no constituents.
class ReservoirModel final : public MatterModel
{
public:
  ReservoirModel(double temperature, double e_min, double e_max);

  std::string kind() const override { return "thermal_reservoir"; }
  std::size_t constituents() const override { return 0; }
  std::size_t parameter_count() const override { return 0; }
  double ground_energy(const Parameters&, const Composition&) const override { return e_min_; }
  double max_energy(const Parameters&, const Composition&) const override { return e_max_; }
  void check_domain(double E, const Parameters& params, const Composition& comp) const override;
  double entropy(double E, const Parameters& params, const Composition& comp) const override;
  std::optional<double> inverse_temperature(double, const Parameters&, const Composition&) const override
  {
    return 1.0 / temperature_;
  }

  double temperature() const { return temperature_; }

private:
  double temperature_;
  double e_min_;
  double e_max_;
};

/// Fixed-temperature energy sink with a finite admissible energy range.
struct ThermalReservoir
{
  double temperature = 1.0;
  double energy = 0.0;
  double e_min = -1e12;
  double e_max = 1e12;
  /// Accumulated entropy change, dE / T_R per exchange.
  double entropy_change = 0.0;

  /// Throws std::invalid_argument on a non-positive temperature or an energy outside the range.
  static ThermalReservoir make(double temperature, double energy = 0.0, double e_min = -1e12, double e_max = 1e12);
  ReservoirModel model() const { return ReservoirModel(temperature, e_min, e_max); }
};

struct Weight
{
  double mass = 1.0;
  double gravity = 9.81;
  double height = 0.0;
};

double entropy_of(const MatterModel& model, const SystemState& st);

/// Inverse of the fundamental relation at fixed (beta, n), by bracketed
/// monotone root finding. Throws RangeError when S is not attained.
double energy_of(const MatterModel& model, double S, const Parameters& params, const Composition& comp);

/// T = 1 / (dS/dE) at fixed (beta, n); analytic when the model provides it.
double temperature_of(const MatterModel& model, const SystemState& st);

/// Work done by the system on the weight when it moves from z1 to z2.
double weight_work(const Weight& w, double z1, double z2);

/// Returns the reservoir after absorbing dE; throws RangeExceeded outside [E_min, E_max].
ThermalReservoir reservoir_exchange(const ThermalReservoir& R, double dE);

/// Uncorrelated, separable composite of independent subsystems.
struct CompositeState
{
  std::vector<ModelPtr> models;
  std::vector<SystemState> states;

  double energy() const;
  double entropy() const;
};

struct MonotonicityScan
{
  bool increasing = true;
  std::size_t points = 0;
  std::optional<double> first_violation;
};

/// Checks S(E) strictly increasing over a log-spaced grid of excess energies
/// (or a linear grid across a bounded range).
MonotonicityScan check_energy_monotone(const MatterModel& model, const Parameters& params, const Composition& comp,
                                       std::size_t points = 1000);

/// Ratio (D(2h) - D(h)) / (D(h) - D(h/2)) of central-difference estimates of
/// dS/dE; approaches 4 for a smooth relation. Empty when the relation is
/// linear in E to rounding (all estimates coincide).
std::optional<double> richardson_ratio_dSdE(const MatterModel& model, const SystemState& st, double h);

} // namespace entrokit
