#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace entrokit::scenario {

struct SpeciesSpec
{
  std::string name;
  double dof = 3.0;
  double formation_energy = 0.0;
  double entropy_constant = 0.0;
};

/// `ideal_gas` (one species) or `ideal_gas_mixture`.
struct ModelSpec
{
  std::string name;
  std::string kind;
  std::vector<SpeciesSpec> species;
};

/// Reactions are listed one mechanism per entry, one coefficient per constituent.
struct NetworkSpec
{
  std::string name;
  std::vector<std::string> constituents;
  std::vector<std::vector<double>> reactions;
};

struct ReservoirSpec
{
  std::string name;
  double temperature = 1.0;
  double energy = 0.0;
  double e_min = -1e12;
  double e_max = 1e12;
};

struct WeightSpec
{
  std::string name;
  double mass = 1.0;
  double gravity = 9.81;
  double height = 0.0;
};

struct StateSpec
{
  std::string name;
  std::string model;
  double energy = 0.0;
  double volume = 1.0;
  std::vector<double> amounts;
};

/// One leg of a schedule. `kind` is isentropic, isothermal, direct_contact or stir.
struct StepSpec
{
  std::string kind;
  std::optional<double> volume;
  std::optional<double> energy;
  /// q for direct_contact, work for stir.
  double amount = 0.0;
};

struct ProcessSpec
{
  std::string name;
  std::string initial;
  std::string reservoir;
  std::string weight;
  std::vector<StepSpec> steps;
};

struct MeasurementSpec
{
  std::string name;
  std::string from;
  std::string to;
  std::string reservoir;
  std::optional<double> reference_entropy;
};

struct TemperatureRatioSpec
{
  std::string name;
  std::string reservoir;
  std::string reference;
  double reference_temperature = 273.16;
  /// Probe states; the built-in probe when empty.
  std::string probe_from;
  std::string probe_to;
};

/// Smallest reservoir energy change over the staged direct-contact family.
struct BoundSpec
{
  std::string name;
  std::string from;
  std::string to;
  std::string reservoir;
  std::size_t stages = 1;
  std::size_t budget = 64;
};

struct PartSpec
{
  std::string model;
  /// Empty for a non-reactive part.
  std::string network;
  double volume = 1.0;
  std::vector<double> amounts;
};

struct EquilibriumSpec
{
  std::string name;
  double energy = 0.0;
  std::vector<PartSpec> parts;
};

struct ElementalSpec
{
  std::string constituent;
  double energy = 0.0;
  double entropy = 0.0;
};

struct ReferenceSpec
{
  std::string model;
  std::string network;
  double T0 = 1.0;
  double p0 = 1.0;
  /// `chemical` or `explicit`.
  std::string convention = "chemical";
  std::vector<ElementalSpec> elemental;
};

struct OpenStateSpec
{
  std::string name;
  double energy = 0.0;
  double volume = 1.0;
  std::vector<double> amounts;
};

struct OpenTableSpec
{
  std::string name;
  std::vector<double> energies;
  std::vector<std::vector<double>> amounts;
  std::vector<double> volumes;
  bool reactive = false;
};

struct CorrelationSpec
{
  std::string name;
  /// CSV joint table, relative to the scenario file; or an inline table.
  std::string file;
  std::vector<std::vector<double>> table;
  std::vector<double> energies_a;
  std::vector<double> energies_b;
};

struct OutputSpec
{
  std::string directory = "out";
  std::string prefix;
};

struct Scenario
{
  std::string name;
  std::uint64_t seed = 0;
  /// `reduced` (k_B = 1) or `si`.
  std::string units = "reduced";
  std::vector<ModelSpec> models;
  std::vector<NetworkSpec> networks;
  std::vector<ReservoirSpec> reservoirs;
  std::vector<WeightSpec> weights;
  std::vector<StateSpec> states;
  std::vector<ProcessSpec> processes;
  std::vector<MeasurementSpec> measurements;
  std::vector<TemperatureRatioSpec> temperature_ratios;
  std::vector<BoundSpec> bounds;
  std::vector<EquilibriumSpec> equilibria;
  std::optional<ReferenceSpec> reference;
  std::vector<OpenStateSpec> open_states;
  std::vector<OpenTableSpec> open_tables;
  std::vector<CorrelationSpec> correlations;
  OutputSpec output;
  /// Directory of the source file; relative paths resolve against it. Not serialized.
  std::string base_dir = ".";
};

/// Parses a scenario document. Throws ParseError (with line and column) on
/// syntax errors, unknown keys, wrong types and schema violations such as a
/// non-positive volume.
Scenario parse(const std::string& text, const std::string& base_dir = ".");
Scenario load(const std::string& path);

/// YAML text that parses back to an equivalent scenario.
std::string serialize(const Scenario& s);

struct ValidationReport
{
  std::vector<std::string> lines;
};

/// Referential integrity, elemental-set validity and model domains. Throws
/// IntegrityError for dangling or inconsistent references and DomainError for
/// states outside their model.
ValidationReport validate(const Scenario& s);

/// Energy unit factor: 1 in reduced units, k_B in SI (temperatures in K).
double energy_unit(const std::string& units);

struct RunOptions
{
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> units;
  std::vector<std::string> measure_entropy;
  std::vector<std::string> run_process;
  std::vector<std::string> equilibrate;
  std::vector<std::string> open_table;
  std::vector<std::string> decorrelate;
  std::vector<std::string> temperature_ratio;
  std::vector<std::string> bound;
  bool open_states = false;
  bool theorem_suite = false;
  std::size_t suite_cases = 200;
  /// Everything declared in the scenario (the theorem suite only when flagged).
  bool all = false;
};

/// Runs the selected computations and writes one CSV per output group.
/// Returns the paths written, in order.
std::vector<std::string> run(const Scenario& s, const RunOptions& opts);

} // namespace entrokit::scenario
