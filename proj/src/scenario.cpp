#include "entrokit/scenario.hpp"

#include "entrokit/csv.hpp"
#include "entrokit/errors.hpp"
#include "scenario_internal.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace entrokit::scenario {

namespace {

// --- reading ----------------------------------------------------------------

[[noreturn]] void fail(const YAML::Node& n, const std::string& msg)
{
  const YAML::Mark m = n.Mark();
  if (m.is_null())
    throw ParseError(msg);
  throw ParseError(msg, m.line + 1, m.column + 1);
}

void expect_map(const YAML::Node& n, const std::string& where, std::initializer_list<const char*> keys)
{
  if (!n.IsMap())
    fail(n, where + ": expected a mapping");
  for (const auto& kv : n) {
    const auto key = kv.first.as<std::string>();
    if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return key == k; }))
      fail(kv.first, where + ": unknown key '" + key + "'");
  }
}

double as_double(const YAML::Node& n, const std::string& where)
{
  if (!n.IsScalar())
    fail(n, where + ": expected a number");
  try {
    const double v = n.as<double>();
    if (!std::isfinite(v))
      fail(n, where + ": expected a finite number");
    return v;
  } catch (const YAML::BadConversion&) {
    fail(n, where + ": expected a number, got '" + n.Scalar() + "'");
  }
}

std::string as_string(const YAML::Node& n, const std::string& where)
{
  if (!n.IsScalar())
    fail(n, where + ": expected a string");
  return n.Scalar();
}

std::vector<double> as_doubles(const YAML::Node& n, const std::string& where)
{
  if (!n.IsSequence())
    fail(n, where + ": expected a list of numbers");
  std::vector<double> out;
  for (const auto& v : n)
    out.push_back(as_double(v, where));
  return out;
}

std::vector<std::vector<double>> as_matrix(const YAML::Node& n, const std::string& where)
{
  if (!n.IsSequence())
    fail(n, where + ": expected a list of lists");
  std::vector<std::vector<double>> out;
  for (const auto& row : n)
    out.push_back(as_doubles(row, where));
  return out;
}

double number(const YAML::Node& parent, const char* key, const std::string& where, std::optional<double> fallback = {})
{
  const YAML::Node n = parent[key];
  if (!n) {
    if (fallback)
      return *fallback;
    fail(parent, where + ": missing '" + key + "'");
  }
  return as_double(n, where + "." + key);
}

std::string text(const YAML::Node& parent, const char* key, const std::string& where,
                 std::optional<std::string> fallback = {})
{
  const YAML::Node n = parent[key];
  if (!n) {
    if (fallback)
      return *fallback;
    fail(parent, where + ": missing '" + key + "'");
  }
  return as_string(n, where + "." + key);
}

double positive(const YAML::Node& parent, const char* key, const std::string& where,
                std::optional<double> fallback = {})
{
  const double v = number(parent, key, where, fallback);
  if (!(v > 0.0))
    fail(parent[key] ? parent[key] : parent, where + "." + key + " must be positive");
  return v;
}

std::vector<double> amounts(const YAML::Node& parent, const std::string& where)
{
  const YAML::Node n = parent["amounts"];
  if (!n)
    fail(parent, where + ": missing 'amounts'");
  auto out = as_doubles(n, where + ".amounts");
  for (double a : out)
    if (a < 0.0)
      fail(n, where + ".amounts must be non-negative");
  return out;
}

std::size_t count(const YAML::Node& parent, const char* key, const std::string& where, std::size_t fallback)
{
  const double v = number(parent, key, where, static_cast<double>(fallback));
  if (!(v >= 1.0) || v != std::floor(v))
    fail(parent[key], where + "." + key + " must be a positive integer");
  return static_cast<std::size_t>(v);
}

template <class F>
void each_named(const YAML::Node& root, const char* section, F&& body)
{
  const YAML::Node sec = root[section];
  if (!sec)
    return;
  if (!sec.IsMap())
    fail(sec, std::string(section) + ": expected a mapping of named entries");
  for (const auto& kv : sec) {
    const auto name = kv.first.as<std::string>();
    body(name, kv.second, std::string(section) + "." + name);
  }
}

SpeciesSpec parse_species(const YAML::Node& n, const std::string& where, const std::string& fallback_name)
{
  expect_map(n, where, {"name", "dof", "formation_energy", "entropy_constant", "kind"});
  SpeciesSpec sp;
  sp.name = text(n, "name", where, fallback_name);
  sp.dof = number(n, "dof", where, 3.0);
  if (!(sp.dof >= 1.0))
    fail(n["dof"], where + ".dof must be at least 1");
  sp.formation_energy = number(n, "formation_energy", where, 0.0);
  sp.entropy_constant = number(n, "entropy_constant", where, 0.0);
  return sp;
}

StepSpec parse_step(const YAML::Node& n, const std::string& where)
{
  if (!n.IsMap() || n.size() != 1)
    fail(n, where + ": a step is a single-key mapping such as 'isentropic: {volume: 2}'");
  const auto kind = n.begin()->first.as<std::string>();
  const YAML::Node body = n.begin()->second;
  StepSpec st;
  st.kind = kind;
  if (kind == "isentropic") {
    expect_map(body, where, {"volume"});
    st.volume = positive(body, "volume", where);
  } else if (kind == "isothermal") {
    expect_map(body, where, {"volume", "energy"});
    if (body["volume"] && body["energy"])
      fail(body, where + ": give either volume or energy");
    if (body["volume"])
      st.volume = positive(body, "volume", where);
    else
      st.energy = number(body, "energy", where);
  } else if (kind == "direct_contact") {
    expect_map(body, where, {"q"});
    st.amount = number(body, "q", where);
  } else if (kind == "stir") {
    expect_map(body, where, {"work"});
    st.amount = number(body, "work", where);
    if (st.amount < 0.0)
      fail(body["work"], where + ".work must be non-negative");
  } else {
    fail(n, where + ": unknown step kind '" + kind + "'");
  }
  return st;
}

std::vector<double> parse_energies(const YAML::Node& n, const std::string& where)
{
  if (n.IsSequence())
    return as_doubles(n, where);
  expect_map(n, where, {"from", "to", "count"});
  const double a = number(n, "from", where), b = number(n, "to", where);
  const std::size_t k = count(n, "count", where, 2);
  std::vector<double> out(k);
  for (std::size_t i = 0; i < k; ++i)
    out[i] = k == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(k - 1);
  return out;
}

Scenario from_node(const YAML::Node& root, const std::string& base_dir)
{
  expect_map(root, "scenario",
             {"name", "seed", "units", "models", "networks", "reservoirs", "weights", "states", "processes",
              "measurements", "temperature_ratios", "bounds", "equilibria", "reference_environment", "open_states",
              "open_tables", "correlations", "output"});
  Scenario s;
  s.base_dir = base_dir;
  s.name = text(root, "name", "scenario", std::string("scenario"));
  {
    const double seed = number(root, "seed", "scenario", 0.0);
    if (seed < 0.0 || seed != std::floor(seed))
      fail(root["seed"], "scenario.seed must be a non-negative integer");
    s.seed = static_cast<std::uint64_t>(seed);
  }
  s.units = text(root, "units", "scenario", std::string("reduced"));
  if (s.units != "reduced" && s.units != "si")
    fail(root["units"], "scenario.units must be 'reduced' or 'si'");

  each_named(root, "models", [&](const std::string& name, const YAML::Node& n, const std::string& where) {
    ModelSpec m;
    m.name = name;
    if (!n.IsMap())
      fail(n, where + ": expected a mapping");
    m.kind = text(n, "kind", where);
    if (m.kind == "ideal_gas") {
      m.species.push_back(parse_species(n, where, name));
    } else if (m.kind == "ideal_gas_mixture") {
      expect_map(n, where, {"kind", "species"});
      const YAML::Node sp = n["species"];
      if (!sp || !sp.IsSequence() || sp.size() == 0)
        fail(n, where + ": 'species' must be a non-empty list");
      for (std::size_t i = 0; i < sp.size(); ++i)
        m.species.push_back(parse_species(sp[i], where + ".species", "s" + std::to_string(i)));
    } else {
      fail(n["kind"], where + ": unknown model kind '" + m.kind + "'");
    }
    s.models.push_back(std::move(m));
  });

  each_named(root, "networks", [&](const std::string& name, const YAML::Node& n, const std::string& where) {
    expect_map(n, where, {"constituents", "reactions"});
    NetworkSpec net;
    net.name = name;
    const YAML::Node c = n["constituents"];
    if (!c || !c.IsSequence() || c.size() == 0)
      fail(n, where + ": 'constituents' must be a non-empty list");
    for (const auto& v : c)
      net.constituents.push_back(as_string(v, where + ".constituents"));
    if (n["reactions"])
      net.reactions = as_matrix(n["reactions"], where + ".reactions");
    for (const auto& r : net.reactions)
      if (r.size() != net.constituents.size())
        fail(n["reactions"], where + ": each reaction needs one coefficient per constituent");
    s.networks.push_back(std::move(net));
  });

  each_named(root, "reservoirs", [&](const std::string& name, const YAML::Node& n, const std::string& where) {
    expect_map(n, where, {"temperature", "energy", "range"});
    ReservoirSpec r;
    r.name = name;
    r.temperature = positive(n, "temperature", where);
    r.energy = number(n, "energy", where, 0.0);
    if (n["range"]) {
      const auto range = as_doubles(n["range"], where + ".range");
      if (range.size() != 2 || !(range[0] < range[1]))
        fail(n["range"], where + ".range must be [min, max] with min < max");
      r.e_min = range[0];
      r.e_max = range[1];
    }
    if (r.energy < r.e_min || r.energy > r.e_max)
      fail(n, where + ": energy outside the declared range");
    s.reservoirs.push_back(r);
  });

  each_named(root, "weights", [&](const std::string& name, const YAML::Node& n, const std::string& where) {
    expect_map(n, where, {"mass", "gravity", "height"});
    s.weights.push_back(WeightSpec{name, positive(n, "mass", where, 1.0), positive(n, "gravity", where, 9.81),
                                   number(n, "height", where, 0.0)});
  });

  each_named(root, "states", [&](const std::string& name, const YAML::Node& n, const std::string& where) {
    expect_map(n, where, {"model", "energy", "volume", "amounts"});
    s.states.push_back(StateSpec{name, text(n, "model", where), number(n, "energy", where),
                                 positive(n, "volume", where), amounts(n, where)});
  });

  each_named(root, "processes", [&](const std::string& name, const YAML::Node& n, const std::string& where) {
    expect_map(n, where, {"initial", "reservoir", "weight", "steps"});
    ProcessSpec p;
    p.name = name;
    p.initial = text(n, "initial", where);
    p.reservoir = text(n, "reservoir", where);
    p.weight = text(n, "weight", where, std::string());
    const YAML::Node steps = n["steps"];
    if (!steps || !steps.IsSequence() || steps.size() == 0)
      fail(n, where + ": 'steps' must be a non-empty list");
    for (const auto& st : steps)
      p.steps.push_back(parse_step(st, where + ".steps"));
    s.processes.push_back(std::move(p));
  });

  each_named(root, "measurements", [&](const std::string& name, const YAML::Node& n, const std::string& where) {
    expect_map(n, where, {"from", "to", "reservoir", "reference_entropy"});
    MeasurementSpec m{name, text(n, "from", where), text(n, "to", where), text(n, "reservoir", where), {}};
    if (n["reference_entropy"])
      m.reference_entropy = number(n, "reference_entropy", where);
    s.measurements.push_back(std::move(m));
  });

  each_named(root, "temperature_ratios", [&](const std::string& name, const YAML::Node& n, const std::string& where) {
    expect_map(n, where, {"reservoir", "reference", "reference_temperature", "probe_from", "probe_to"});
    TemperatureRatioSpec t{name,
                           text(n, "reservoir", where),
                           text(n, "reference", where),
                           positive(n, "reference_temperature", where, 273.16),
                           text(n, "probe_from", where, std::string()),
                           text(n, "probe_to", where, std::string())};
    if (t.probe_from.empty() != t.probe_to.empty())
      fail(n, where + ": give both probe_from and probe_to or neither");
    s.temperature_ratios.push_back(std::move(t));
  });

  each_named(root, "bounds", [&](const std::string& name, const YAML::Node& n, const std::string& where) {
    expect_map(n, where, {"from", "to", "reservoir", "stages", "budget"});
    s.bounds.push_back(BoundSpec{name, text(n, "from", where), text(n, "to", where), text(n, "reservoir", where),
                                 count(n, "stages", where, 1), count(n, "budget", where, 64)});
  });

  each_named(root, "equilibria", [&](const std::string& name, const YAML::Node& n, const std::string& where) {
    expect_map(n, where, {"energy", "parts"});
    EquilibriumSpec e;
    e.name = name;
    e.energy = number(n, "energy", where);
    const YAML::Node parts = n["parts"];
    if (!parts || !parts.IsSequence() || parts.size() == 0)
      fail(n, where + ": 'parts' must be a non-empty list");
    for (const auto& p : parts) {
      expect_map(p, where + ".parts", {"model", "network", "volume", "amounts"});
      e.parts.push_back(PartSpec{text(p, "model", where), text(p, "network", where, std::string()),
                                 positive(p, "volume", where), amounts(p, where)});
    }
    s.equilibria.push_back(std::move(e));
  });

  if (const YAML::Node n = root["reference_environment"]) {
    const std::string where = "reference_environment";
    expect_map(n, where, {"model", "network", "T0", "p0", "convention", "elemental"});
    ReferenceSpec r;
    r.model = text(n, "model", where);
    r.network = text(n, "network", where);
    r.T0 = positive(n, "T0", where);
    r.p0 = positive(n, "p0", where);
    r.convention = text(n, "convention", where, std::string("chemical"));
    if (r.convention != "chemical" && r.convention != "explicit")
      fail(n["convention"], where + ".convention must be 'chemical' or 'explicit'");
    const YAML::Node el = n["elemental"];
    if (!el || !el.IsSequence() || el.size() == 0)
      fail(n, where + ": 'elemental' must be a non-empty list");
    for (const auto& e : el) {
      if (e.IsScalar()) {
        r.elemental.push_back(ElementalSpec{e.Scalar(), 0.0, 0.0});
        continue;
      }
      expect_map(e, where + ".elemental", {"constituent", "energy", "entropy"});
      r.elemental.push_back(ElementalSpec{text(e, "constituent", where), number(e, "energy", where, 0.0),
                                          number(e, "entropy", where, 0.0)});
    }
    s.reference = std::move(r);
  }

  each_named(root, "open_states", [&](const std::string& name, const YAML::Node& n, const std::string& where) {
    expect_map(n, where, {"energy", "volume", "amounts"});
    s.open_states.push_back(
      OpenStateSpec{name, number(n, "energy", where), positive(n, "volume", where), amounts(n, where)});
  });

  each_named(root, "open_tables", [&](const std::string& name, const YAML::Node& n, const std::string& where) {
    expect_map(n, where, {"energies", "amounts", "volumes", "reactive"});
    OpenTableSpec t;
    t.name = name;
    if (!n["energies"] || !n["amounts"] || !n["volumes"])
      fail(n, where + ": needs energies, amounts and volumes");
    t.energies = parse_energies(n["energies"], where + ".energies");
    t.amounts = as_matrix(n["amounts"], where + ".amounts");
    for (const auto& a : t.amounts)
      for (double v : a)
        if (v < 0.0)
          fail(n["amounts"], where + ".amounts must be non-negative");
    t.volumes = as_doubles(n["volumes"], where + ".volumes");
    for (double v : t.volumes)
      if (!(v > 0.0))
        fail(n["volumes"], where + ".volumes must be positive");
    if (n["reactive"]) {
      try {
        t.reactive = n["reactive"].as<bool>();
      } catch (const YAML::BadConversion&) {
        fail(n["reactive"], where + ".reactive must be true or false");
      }
    }
    s.open_tables.push_back(std::move(t));
  });

  each_named(root, "correlations", [&](const std::string& name, const YAML::Node& n, const std::string& where) {
    expect_map(n, where, {"file", "table", "energies_a", "energies_b"});
    CorrelationSpec c;
    c.name = name;
    c.file = text(n, "file", where, std::string());
    if (n["table"])
      c.table = as_matrix(n["table"], where + ".table");
    if (n["energies_a"])
      c.energies_a = as_doubles(n["energies_a"], where + ".energies_a");
    if (n["energies_b"])
      c.energies_b = as_doubles(n["energies_b"], where + ".energies_b");
    if (c.file.empty() == c.table.empty())
      fail(n, where + ": give exactly one of 'file' or 'table'");
    s.correlations.push_back(std::move(c));
  });

  if (const YAML::Node n = root["output"]) {
    expect_map(n, "output", {"directory", "prefix"});
    s.output.directory = text(n, "directory", "output", std::string("out"));
    s.output.prefix = text(n, "prefix", "output", std::string());
  }
  if (s.output.prefix.empty())
    s.output.prefix = s.name;
  return s;
}

// --- writing ----------------------------------------------------------------

void emit_num(YAML::Emitter& e, double x) { e << csv::format(x); }

void emit_list(YAML::Emitter& e, const std::vector<double>& v)
{
  e << YAML::Flow << YAML::BeginSeq;
  for (double x : v)
    emit_num(e, x);
  e << YAML::EndSeq;
}

void emit_matrix(YAML::Emitter& e, const std::vector<std::vector<double>>& m)
{
  e << YAML::BeginSeq;
  for (const auto& row : m)
    emit_list(e, row);
  e << YAML::EndSeq;
}

void emit_species(YAML::Emitter& e, const SpeciesSpec& sp)
{
  e << YAML::Key << "name" << YAML::Value << sp.name;
  e << YAML::Key << "dof" << YAML::Value;
  emit_num(e, sp.dof);
  e << YAML::Key << "formation_energy" << YAML::Value;
  emit_num(e, sp.formation_energy);
  e << YAML::Key << "entropy_constant" << YAML::Value;
  emit_num(e, sp.entropy_constant);
}

template <class T, class F>
void emit_section(YAML::Emitter& e, const char* key, const std::vector<T>& items, F&& body)
{
  if (items.empty())
    return;
  e << YAML::Key << key << YAML::Value << YAML::BeginMap;
  for (const auto& it : items) {
    e << YAML::Key << it.name << YAML::Value << YAML::BeginMap;
    body(it);
    e << YAML::EndMap;
  }
  e << YAML::EndMap;
}

} // namespace

Scenario parse(const std::string& text, const std::string& base_dir)
{
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& ex) {
    throw ParseError(ex.msg, ex.mark.line + 1, ex.mark.column + 1);
  }
  if (!root || root.IsNull())
    throw ParseError("empty scenario document");
  return from_node(root, base_dir);
}

Scenario load(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw ParseError("cannot open scenario file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const auto dir = std::filesystem::path(path).parent_path();
  return parse(buf.str(), dir.empty() ? "." : dir.string());
}

std::string serialize(const Scenario& s)
{
  YAML::Emitter e;
  e << YAML::BeginMap;
  e << YAML::Key << "name" << YAML::Value << s.name;
  e << YAML::Key << "seed" << YAML::Value << std::to_string(s.seed);
  e << YAML::Key << "units" << YAML::Value << s.units;

  emit_section(e, "models", s.models, [&](const ModelSpec& m) {
    e << YAML::Key << "kind" << YAML::Value << m.kind;
    if (m.kind == "ideal_gas") {
      emit_species(e, m.species.front());
      return;
    }
    e << YAML::Key << "species" << YAML::Value << YAML::BeginSeq;
    for (const auto& sp : m.species) {
      e << YAML::Flow << YAML::BeginMap;
      emit_species(e, sp);
      e << YAML::EndMap;
    }
    e << YAML::EndSeq;
  });
  emit_section(e, "networks", s.networks, [&](const NetworkSpec& n) {
    e << YAML::Key << "constituents" << YAML::Value << YAML::Flow << n.constituents;
    if (!n.reactions.empty()) {
      e << YAML::Key << "reactions" << YAML::Value;
      emit_matrix(e, n.reactions);
    }
  });
  emit_section(e, "reservoirs", s.reservoirs, [&](const ReservoirSpec& r) {
    e << YAML::Key << "temperature" << YAML::Value;
    emit_num(e, r.temperature);
    e << YAML::Key << "energy" << YAML::Value;
    emit_num(e, r.energy);
    e << YAML::Key << "range" << YAML::Value;
    emit_list(e, {r.e_min, r.e_max});
  });
  emit_section(e, "weights", s.weights, [&](const WeightSpec& w) {
    e << YAML::Key << "mass" << YAML::Value;
    emit_num(e, w.mass);
    e << YAML::Key << "gravity" << YAML::Value;
    emit_num(e, w.gravity);
    e << YAML::Key << "height" << YAML::Value;
    emit_num(e, w.height);
  });
  emit_section(e, "states", s.states, [&](const StateSpec& st) {
    e << YAML::Key << "model" << YAML::Value << st.model;
    e << YAML::Key << "energy" << YAML::Value;
    emit_num(e, st.energy);
    e << YAML::Key << "volume" << YAML::Value;
    emit_num(e, st.volume);
    e << YAML::Key << "amounts" << YAML::Value;
    emit_list(e, st.amounts);
  });
  emit_section(e, "processes", s.processes, [&](const ProcessSpec& p) {
    e << YAML::Key << "initial" << YAML::Value << p.initial;
    e << YAML::Key << "reservoir" << YAML::Value << p.reservoir;
    if (!p.weight.empty())
      e << YAML::Key << "weight" << YAML::Value << p.weight;
    e << YAML::Key << "steps" << YAML::Value << YAML::BeginSeq;
    for (const auto& st : p.steps) {
      e << YAML::Flow << YAML::BeginMap << YAML::Key << st.kind << YAML::Value << YAML::BeginMap;
      if (st.volume) {
        e << YAML::Key << "volume" << YAML::Value;
        emit_num(e, *st.volume);
      } else if (st.energy) {
        e << YAML::Key << "energy" << YAML::Value;
        emit_num(e, *st.energy);
      } else {
        e << YAML::Key << (st.kind == "stir" ? "work" : "q") << YAML::Value;
        emit_num(e, st.amount);
      }
      e << YAML::EndMap << YAML::EndMap;
    }
    e << YAML::EndSeq;
  });
  emit_section(e, "measurements", s.measurements, [&](const MeasurementSpec& m) {
    e << YAML::Key << "from" << YAML::Value << m.from;
    e << YAML::Key << "to" << YAML::Value << m.to;
    e << YAML::Key << "reservoir" << YAML::Value << m.reservoir;
    if (m.reference_entropy) {
      e << YAML::Key << "reference_entropy" << YAML::Value;
      emit_num(e, *m.reference_entropy);
    }
  });
  emit_section(e, "temperature_ratios", s.temperature_ratios, [&](const TemperatureRatioSpec& t) {
    e << YAML::Key << "reservoir" << YAML::Value << t.reservoir;
    e << YAML::Key << "reference" << YAML::Value << t.reference;
    e << YAML::Key << "reference_temperature" << YAML::Value;
    emit_num(e, t.reference_temperature);
    if (!t.probe_from.empty()) {
      e << YAML::Key << "probe_from" << YAML::Value << t.probe_from;
      e << YAML::Key << "probe_to" << YAML::Value << t.probe_to;
    }
  });
  emit_section(e, "bounds", s.bounds, [&](const BoundSpec& b) {
    e << YAML::Key << "from" << YAML::Value << b.from;
    e << YAML::Key << "to" << YAML::Value << b.to;
    e << YAML::Key << "reservoir" << YAML::Value << b.reservoir;
    e << YAML::Key << "stages" << YAML::Value << std::to_string(b.stages);
    e << YAML::Key << "budget" << YAML::Value << std::to_string(b.budget);
  });
  emit_section(e, "equilibria", s.equilibria, [&](const EquilibriumSpec& q) {
    e << YAML::Key << "energy" << YAML::Value;
    emit_num(e, q.energy);
    e << YAML::Key << "parts" << YAML::Value << YAML::BeginSeq;
    for (const auto& p : q.parts) {
      e << YAML::BeginMap;
      e << YAML::Key << "model" << YAML::Value << p.model;
      if (!p.network.empty())
        e << YAML::Key << "network" << YAML::Value << p.network;
      e << YAML::Key << "volume" << YAML::Value;
      emit_num(e, p.volume);
      e << YAML::Key << "amounts" << YAML::Value;
      emit_list(e, p.amounts);
      e << YAML::EndMap;
    }
    e << YAML::EndSeq;
  });
  if (s.reference) {
    const auto& r = *s.reference;
    e << YAML::Key << "reference_environment" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "model" << YAML::Value << r.model;
    e << YAML::Key << "network" << YAML::Value << r.network;
    e << YAML::Key << "T0" << YAML::Value;
    emit_num(e, r.T0);
    e << YAML::Key << "p0" << YAML::Value;
    emit_num(e, r.p0);
    e << YAML::Key << "convention" << YAML::Value << r.convention;
    e << YAML::Key << "elemental" << YAML::Value << YAML::BeginSeq;
    for (const auto& el : r.elemental) {
      e << YAML::Flow << YAML::BeginMap;
      e << YAML::Key << "constituent" << YAML::Value << el.constituent;
      e << YAML::Key << "energy" << YAML::Value;
      emit_num(e, el.energy);
      e << YAML::Key << "entropy" << YAML::Value;
      emit_num(e, el.entropy);
      e << YAML::EndMap;
    }
    e << YAML::EndSeq << YAML::EndMap;
  }
  emit_section(e, "open_states", s.open_states, [&](const OpenStateSpec& o) {
    e << YAML::Key << "energy" << YAML::Value;
    emit_num(e, o.energy);
    e << YAML::Key << "volume" << YAML::Value;
    emit_num(e, o.volume);
    e << YAML::Key << "amounts" << YAML::Value;
    emit_list(e, o.amounts);
  });
  emit_section(e, "open_tables", s.open_tables, [&](const OpenTableSpec& t) {
    e << YAML::Key << "energies" << YAML::Value;
    emit_list(e, t.energies);
    e << YAML::Key << "amounts" << YAML::Value;
    emit_matrix(e, t.amounts);
    e << YAML::Key << "volumes" << YAML::Value;
    emit_list(e, t.volumes);
    e << YAML::Key << "reactive" << YAML::Value << (t.reactive ? "true" : "false");
  });
  emit_section(e, "correlations", s.correlations, [&](const CorrelationSpec& c) {
    if (!c.file.empty()) {
      e << YAML::Key << "file" << YAML::Value << c.file;
      return;
    }
    e << YAML::Key << "table" << YAML::Value;
    emit_matrix(e, c.table);
    if (!c.energies_a.empty()) {
      e << YAML::Key << "energies_a" << YAML::Value;
      emit_list(e, c.energies_a);
    }
    if (!c.energies_b.empty()) {
      e << YAML::Key << "energies_b" << YAML::Value;
      emit_list(e, c.energies_b);
    }
  });
  e << YAML::Key << "output" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "directory" << YAML::Value << s.output.directory;
  e << YAML::Key << "prefix" << YAML::Value << s.output.prefix;
  e << YAML::EndMap;
  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

double energy_unit(const std::string& units)
{
  if (units == "reduced")
    return 1.0;
  if (units == "si")
    return boltzmann_si;
  throw std::invalid_argument("unknown unit system '" + units + "'");
}

// --- builders -----------------------------------------------------------------

namespace detail {

std::shared_ptr<const IdealGasMixture> build_model(const ModelSpec& m, double unit)
{
  std::vector<GasSpecies> species;
  for (const auto& sp : m.species)
    species.push_back(GasSpecies{sp.name, sp.dof, sp.formation_energy / unit, sp.entropy_constant});
  return std::make_shared<IdealGasMixture>(std::move(species));
}

ReactionNetwork build_network(const NetworkSpec& n)
{
  const auto r = static_cast<Eigen::Index>(n.constituents.size());
  Eigen::MatrixXd nu(r, static_cast<Eigen::Index>(n.reactions.size()));
  for (std::size_t j = 0; j < n.reactions.size(); ++j)
    for (Eigen::Index i = 0; i < r; ++i)
      nu(i, static_cast<Eigen::Index>(j)) = n.reactions[j][static_cast<std::size_t>(i)];
  try {
    return ReactionNetwork(nu, n.constituents);
  } catch (const std::invalid_argument& e) {
    throw IntegrityError(e.what(), n.name);
  }
}

SystemState build_state(const Scenario& s, const StateSpec& st, double unit)
{
  const auto& m = require(s.models, st.model, "model");
  if (st.amounts.size() != m.species.size())
    throw IntegrityError("state has " + std::to_string(st.amounts.size()) + " amounts but model '" + m.name +
                           "' has " + std::to_string(m.species.size()) + " species",
                         st.name);
  Eigen::VectorXd n(static_cast<Eigen::Index>(st.amounts.size()));
  for (std::size_t i = 0; i < st.amounts.size(); ++i)
    n[static_cast<Eigen::Index>(i)] = st.amounts[i];
  return SystemState{st.energy / unit, Parameters::volume(st.volume), Composition(n)};
}

ThermalReservoir build_reservoir(const ReservoirSpec& r, double unit)
{
  return ThermalReservoir::make(r.temperature, r.energy / unit, r.e_min / unit, r.e_max / unit);
}

ReferenceEnvironment build_reference(const Scenario& s, double unit)
{
  if (!s.reference)
    throw IntegrityError("no reference environment declared", "reference_environment");
  const auto& r = *s.reference;
  const auto& m = require(s.models, r.model, "model");
  const auto& n = require(s.networks, r.network, "network");
  if (n.constituents.size() != m.species.size())
    throw IntegrityError("reference model and network disagree on the number of constituents", r.model);
  for (std::size_t i = 0; i < m.species.size(); ++i)
    if (m.species[i].name != n.constituents[i])
      throw IntegrityError("model species and network constituents differ", m.species[i].name);
  const auto model = build_model(m, unit);
  std::vector<ElementalSpecies> species;
  for (const auto& el : r.elemental) {
    const auto it = std::find(n.constituents.begin(), n.constituents.end(), el.constituent);
    if (it == n.constituents.end())
      throw IntegrityError("elemental species is not a constituent of the network", el.constituent);
    const auto k = static_cast<std::size_t>(it - n.constituents.begin());
    species.push_back(ElementalSpecies{k, model->restricted_to(k), el.energy / unit, el.entropy / unit});
  }
  try {
    return ReferenceEnvironment(build_network(n), std::move(species), r.T0, r.p0 / unit,
                                r.convention == "explicit" ? ReferenceConvention::Explicit
                                                           : ReferenceConvention::Chemical);
  } catch (const std::invalid_argument& e) {
    throw IntegrityError(e.what(), "reference_environment");
  }
}

JointState build_joint(const Scenario& s, const CorrelationSpec& c, double unit)
{
  if (!c.file.empty()) {
    const auto path = std::filesystem::path(s.base_dir) / c.file;
    JointState j = read_joint_csv(path.string());
    return JointState(j.table(), j.energies_a() / unit, j.energies_b() / unit);
  }
  const auto rows = static_cast<Eigen::Index>(c.table.size());
  const auto cols = static_cast<Eigen::Index>(c.table.front().size());
  Eigen::MatrixXd t(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (static_cast<Eigen::Index>(c.table[static_cast<std::size_t>(i)].size()) != cols)
      throw IntegrityError("ragged joint table", c.name);
    for (Eigen::Index k = 0; k < cols; ++k)
      t(i, k) = c.table[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
  }
  auto vec = [&](const std::vector<double>& v, Eigen::Index size) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(size);
    if (!v.empty()) {
      if (static_cast<Eigen::Index>(v.size()) != size)
        throw IntegrityError("energy list does not match the table shape", c.name);
      for (Eigen::Index i = 0; i < size; ++i)
        out[i] = v[static_cast<std::size_t>(i)] / unit;
    }
    return out;
  };
  try {
    return JointState(t, vec(c.energies_a, rows), vec(c.energies_b, cols));
  } catch (const std::invalid_argument& e) {
    throw IntegrityError(e.what(), c.name);
  }
}

} // namespace detail

// --- validation -----------------------------------------------------------------

ValidationReport validate(const Scenario& s)
{
  using namespace detail;
  ValidationReport rep;
  const double unit = energy_unit(s.units);

  std::set<std::string> names;
  auto unique = [&](const std::string& kind, const std::string& name) {
    if (!names.insert(kind + "/" + name).second)
      throw IntegrityError("duplicate " + kind, name);
  };
  for (const auto& m : s.models)
    unique("model", m.name);
  for (const auto& n : s.networks) {
    unique("network", n.name);
    const auto net = build_network(n);
    rep.lines.push_back("network " + n.name + ": " + std::to_string(net.reactions()) + " reactions, rank " +
                        std::to_string(net.rank()));
  }
  for (const auto& r : s.reservoirs)
    unique("reservoir", r.name);
  for (const auto& w : s.weights)
    unique("weight", w.name);

  for (const auto& st : s.states) {
    unique("state", st.name);
    const auto sys = build_state(s, st, unit);
    build_model(require(s.models, st.model, "model"), unit)->check_domain(sys.energy, sys.params, sys.comp);
  }
  auto same_system = [&](const std::string& a, const std::string& b, const std::string& owner) {
    const auto& sa = require(s.states, a, "state");
    const auto& sb = require(s.states, b, "state");
    if (sa.model != sb.model)
      throw IntegrityError("states '" + a + "' and '" + b + "' belong to different models", owner);
    if (sa.amounts != sb.amounts)
      throw IntegrityError("states '" + a + "' and '" + b + "' have different compositions", owner);
  };
  for (const auto& p : s.processes) {
    unique("process", p.name);
    require(s.states, p.initial, "state");
    require(s.reservoirs, p.reservoir, "reservoir");
    if (!p.weight.empty())
      require(s.weights, p.weight, "weight");
  }
  for (const auto& m : s.measurements) {
    unique("measurement", m.name);
    same_system(m.from, m.to, m.name);
    require(s.reservoirs, m.reservoir, "reservoir");
  }
  for (const auto& t : s.temperature_ratios) {
    unique("temperature_ratio", t.name);
    require(s.reservoirs, t.reservoir, "reservoir");
    require(s.reservoirs, t.reference, "reservoir");
    if (!t.probe_from.empty())
      same_system(t.probe_from, t.probe_to, t.name);
  }
  for (const auto& b : s.bounds) {
    unique("bound", b.name);
    same_system(b.from, b.to, b.name);
    require(s.reservoirs, b.reservoir, "reservoir");
  }
  for (const auto& e : s.equilibria) {
    unique("equilibrium", e.name);
    for (const auto& p : e.parts) {
      const auto& m = require(s.models, p.model, "model");
      if (p.amounts.size() != m.species.size())
        throw IntegrityError("part amounts do not match model '" + m.name + "'", e.name);
      if (!p.network.empty()) {
        const auto& n = require(s.networks, p.network, "network");
        if (n.constituents.size() != m.species.size())
          throw IntegrityError("network '" + n.name + "' and model '" + m.name + "' differ in constituents", e.name);
      }
    }
  }
  if (s.reference) {
    const auto env = build_reference(s, unit);
    rep.lines.push_back("reference environment: " + std::to_string(env.species().size()) +
                        " elemental species, complete and independent");
  }
  for (const auto& o : s.open_states) {
    unique("open_state", o.name);
    const auto env = build_reference(s, unit);
    if (o.amounts.size() != env.network().constituents())
      throw IntegrityError("open state amounts do not match the reference network", o.name);
  }
  for (const auto& t : s.open_tables) {
    unique("open_table", t.name);
    const auto env = build_reference(s, unit);
    for (const auto& a : t.amounts)
      if (a.size() != env.network().constituents())
        throw IntegrityError("open table amounts do not match the reference network", t.name);
  }
  for (const auto& c : s.correlations) {
    unique("correlation", c.name);
    build_joint(s, c, unit);
  }

  rep.lines.insert(rep.lines.begin(),
                   "scenario " + s.name + ": " + std::to_string(s.states.size()) + " states, " +
                     std::to_string(s.processes.size()) + " processes, " + std::to_string(s.equilibria.size()) +
                     " equilibria");
  return rep;
}

} // namespace entrokit::scenario
