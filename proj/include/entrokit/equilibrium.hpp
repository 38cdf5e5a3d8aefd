#pragma once

#include "entrokit/errors.hpp"
#include "entrokit/matter_models.hpp"
#include "entrokit/stoichiometry.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace entrokit {

inline constexpr double tol_kkt = 1e-10;
inline constexpr std::size_t equilibrium_max_iter = 200;

/// One subsystem of an equilibrium problem. Parts exchange energy with each
/// other; reactions act within a part.
struct EquilibriumPart
{
  ModelPtr model;
  Parameters params;
  Composition initial;
  ReactionNetwork network;
};

struct EquilibriumProblem
{
  std::vector<EquilibriumPart> parts;
  /// Total energy shared by the parts.
  double energy = 0.0;

  std::size_t reaction_count() const;
};

struct EquilibriumOptions
{
  std::size_t max_iter = equilibrium_max_iter;
  double tol = tol_kkt;
  /// Randomizes the starting point (energy split and reaction extents).
  std::optional<std::uint64_t> seed;
};

struct EquilibriumSolution
{
  /// Reaction coordinates of every part, concatenated; minimum-norm per part.
  ReactionCoordinates eps_se;
  std::vector<Composition> compositions;
  std::vector<double> energies;
  std::vector<double> temperatures;
  double entropy = 0.0;
  /// Common 1/T at the optimum.
  double inverse_temperature = 0.0;
  /// sum_k nu_k dS/dn_k per reaction (the affinity over T), concatenated.
  Eigen::VectorXd reaction_multipliers;
  /// Largest first-order stationarity violation in the free directions.
  double stationarity = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  /// Some part has linearly dependent reactions; eps_se is then one of many.
  bool degenerate = false;
  /// (part, constituent) pairs pinned at zero amount.
  std::vector<std::pair<std::size_t, std::size_t>> boundary;
};

class EquilibriumNonConvergence : public NonConvergence
{
public:
  EquilibriumNonConvergence(const std::string& what, EquilibriumSolution best)
    : NonConvergence(what)
    , best_(std::move(best))
  {
  }
  const EquilibriumSolution& best() const { return best_; }

private:
  EquilibriumSolution best_;
};

/// Maximizes total entropy over the energy split and the reaction extents at
/// fixed total energy, parameters and initial compositions.
///
/// Throws Infeasible when no admissible state exists and
/// EquilibriumNonConvergence (carrying the best iterate) when the first-order
/// conditions are not met within max_iter Newton steps.
EquilibriumSolution stable_equilibrium(const EquilibriumProblem& prob, const EquilibriumOptions& opts = {});

/// Compositions reached by applying the concatenated coordinates part by part.
std::vector<Composition> compositions_at(const EquilibriumProblem& prob, const ReactionCoordinates& eps);

/// max over reactions of |sum_k nu_k mu_k| / T, with mu_k = -T dS/dn_k from
/// central differences (forward differences at near-zero amounts).
double equilibrium_residual(const EquilibriumSolution& sol, const EquilibriumProblem& prob);

bool mutual_equilibrium(const MatterModel& model_a, const SystemState& st_a, const MatterModel& model_b,
                        const SystemState& st_b);

/// |dE - T dS - sum_j F_j dbeta_j| for the actual energy change along
/// (dS, dbeta) on the fundamental relation E(S, beta).
double gibbs_residual(const MatterModel& model, const SystemState& st, double dS, const Eigen::VectorXd& dbeta);

/// p = -(dE/dV) at constant S and n, volume being the first parameter.
double pressure_of(const MatterModel& model, const SystemState& st);

/// Generalized force (dE/dbeta_j) at constant S and n.
double generalized_force(const MatterModel& model, const SystemState& st, std::size_t j);

/// Groups states of one model into classes of equal energy and equal entropy.
std::vector<std::vector<std::size_t>> esev_partition(const MatterModel& model, const std::vector<SystemState>& states,
                                                     double rel_tol = 1e-9);

} // namespace entrokit
