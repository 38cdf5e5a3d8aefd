#pragma once

#include "entrokit/matter_models.hpp"
#include "entrokit/process_engine.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace entrokit {

/// Random schedules over a single ideal gas, used by the invariant suites.
namespace fuzz {

struct FuzzedProcess
{
  ModelPtr model;
  SystemState initial;
  ThermalReservoir reservoir;
  Schedule schedule;
  /// True when the schedule uses only isentropic and isothermal legs.
  bool reversible_by_construction = true;
};

/// Random ideal-gas state: dof in {3, 5, 7}, n in [0.5, 2], T in [0.3, 3], V in [0.5, 4].
SystemState random_gas_state(std::mt19937_64& rng, const Composition& comp, double dof);

/// A standard weight process: 1 to 5 legs drawn from isentropic, isothermal,
/// direct-contact and stirring steps against a reservoir with T_R in [0.5, 3].
/// Irreversible legs are sized to generate a clearly non-zero entropy.
FuzzedProcess standard_weight_process(std::mt19937_64& rng);

/// A weight process without reservoir exchange: isentropic and stirring legs only.
FuzzedProcess weight_process(std::mt19937_64& rng);

} // namespace fuzz

struct SuiteResult
{
  std::string name;
  bool passed = false;
  std::size_t cases = 0;
  /// Largest violation metric observed (suite specific).
  double worst = 0.0;
  std::string detail;
};

struct SuiteOptions
{
  std::uint64_t seed = 0;
  /// Random cases per suite.
  std::size_t cases = 200;
};

/// Runs every invariant suite of the library and reports one row per suite.
std::vector<SuiteResult> run_theorem_suite(const SuiteOptions& opts = {});

} // namespace entrokit
