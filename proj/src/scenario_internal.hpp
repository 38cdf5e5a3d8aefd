#pragma once

// Conversion of scenario specs into library objects, shared by validation and
// the run dispatcher. Energies, entropies and pressures are divided by the
// energy unit on the way in.

#include "entrokit/correlations.hpp"
#include "entrokit/errors.hpp"
#include "entrokit/matter_models.hpp"
#include "entrokit/open_systems.hpp"
#include "entrokit/scenario.hpp"
#include "entrokit/stoichiometry.hpp"

#include <string>
#include <vector>

namespace entrokit::scenario::detail {

template <class T>
const T* find(const std::vector<T>& items, const std::string& name)
{
  for (const auto& it : items)
    if (it.name == name)
      return &it;
  return nullptr;
}

/// Throws IntegrityError naming `what` when the item is not declared.
template <class T>
const T& require(const std::vector<T>& items, const std::string& name, const std::string& what)
{
  if (const T* p = find(items, name))
    return *p;
  throw IntegrityError(what + " is not declared", name);
}

std::shared_ptr<const IdealGasMixture> build_model(const ModelSpec& m, double unit);
ReactionNetwork build_network(const NetworkSpec& n);
SystemState build_state(const Scenario& s, const StateSpec& st, double unit);
ThermalReservoir build_reservoir(const ReservoirSpec& r, double unit);
ReferenceEnvironment build_reference(const Scenario& s, double unit);
JointState build_joint(const Scenario& s, const CorrelationSpec& c, double unit);

} // namespace entrokit::scenario::detail
