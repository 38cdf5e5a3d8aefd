#pragma once

#include "entrokit/equilibrium.hpp"
#include "entrokit/matter_models.hpp"
#include "entrokit/stoichiometry.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace entrokit {

enum class ReferenceConvention
{
  /// E0_i + p0 V0_i = 0 and S0_i = 0 for every elemental species.
  Chemical,
  /// Per-particle reference energy and entropy given explicitly.
  Explicit,
};

struct ElementalSpecies
{
  /// Index of the species among the constituents of the network.
  std::size_t constituent = 0;
  /// Single-constituent model of the species, on the same energy scale as
  /// the mixture model used for open states.
  ModelPtr model;
  /// Per-particle reference values; used only with ReferenceConvention::Explicit.
  double energy_per_particle = 0.0;
  double entropy_per_particle = 0.0;
};

/// Elemental species, each held in its own box at temperature T0 and
/// pressure p0, that fix the energy and entropy scales of open systems.
class ReferenceEnvironment
{
public:
  /// Throws std::invalid_argument unless the species form a complete and
  /// independent elemental set of the network and T0, p0 > 0.
  ReferenceEnvironment(ReactionNetwork network, std::vector<ElementalSpecies> species, double T0, double p0,
                       ReferenceConvention convention = ReferenceConvention::Chemical);

  const ReactionNetwork& network() const { return network_; }
  const std::vector<ElementalSpecies>& species() const { return species_; }
  double T0() const { return T0_; }
  double p0() const { return p0_; }
  ReferenceConvention convention() const { return convention_; }

  /// Amounts of each elemental species that a composition is made of.
  /// Throws NotExpressible when the composition cannot be formed from them.
  Eigen::VectorXd elemental_content(const Composition& comp) const;

  /// Stable equilibrium state of `amount` particles of species i at (T0, p0).
  SystemState reference_state(std::size_t i, double amount) const;

  /// Reference values E0_i, S0_i of species i for the given amount.
  std::pair<double, double> species_reference(std::size_t i, double amount) const;

  ThermalReservoir reservoir() const { return ThermalReservoir::make(T0_); }

private:
  ReactionNetwork network_;
  std::vector<ElementalSpecies> species_;
  double T0_;
  double p0_;
  ReferenceConvention convention_;
};

/// Volume at which the model has pressure p at temperature T.
double volume_at_pressure(const MatterModel& model, double T, double p, const Composition& comp,
                          double hint = 1.0);

struct OpenState
{
  Composition comp;
  double energy = 0.0;
  Parameters params;
  /// Carried for bookkeeping only; never integrated.
  Eigen::VectorXd inflow;
};

/// (E0, S0): sums of the elemental reference values weighted by content.
std::pair<double, double> reference_values(const ReferenceEnvironment& env, const Composition& comp);

/// Energy and entropy of an open state on the reference scale, through a
/// closed proxy with the same composition.
///
/// The proxy is first placed at (T0, p0); its entropy relative to the
/// separated elemental references follows from the fundamental relations.
/// The remaining step to the open state is measured by a reversible standard
/// process against a reservoir at T0.
std::pair<double, double> open_energy_entropy(const ReferenceEnvironment& env, const MatterModel& model,
                                              const OpenState& ost);

struct TotalPotential
{
  double value = 0.0;
  /// Forward difference used because the amount is below the step.
  bool one_sided = false;
};

/// mu_k = (dE/dn_k) at constant S, beta and other amounts, on the model
/// energy scale, by central difference with step 1e-6 max(1, n_k).
TotalPotential total_potential(const ReferenceEnvironment& env, const MatterModel& model, const OpenState& ost,
                               std::size_t k);

/// |dE - T dS - sum mu_i dn_i - sum F_j dbeta_j| along a finite perturbation.
double open_gibbs_residual(const MatterModel& model, const SystemState& st, double dS, const Eigen::VectorXd& dn,
                           const Eigen::VectorXd& dbeta);

struct RelationGrid
{
  std::vector<double> energies;
  /// Compositions (non-reactive) or initial compositions (reactive).
  std::vector<Composition> compositions;
  std::vector<Parameters> params;
  /// When set, each point is a chemical-equilibrium solve over this network.
  std::optional<ReactionNetwork> network;
};

struct RelationRow
{
  double energy = 0.0;
  Composition comp;
  Parameters params;
  double entropy = 0.0;
  Eigen::VectorXd eps_se;
  double temperature = 0.0;
  double pressure = 0.0;
  Eigen::VectorXd potentials;
  bool ok = true;
  std::string error;
};

/// Tabulates S_se over the grid in (composition, parameters, energy) order.
/// Failed points are kept with ok = false.
std::vector<RelationRow> open_fundamental_relation(const ReferenceEnvironment& env, const MatterModel& model,
                                                   const RelationGrid& grid);

} // namespace entrokit
