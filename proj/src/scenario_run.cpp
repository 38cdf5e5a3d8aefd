#include "entrokit/csv.hpp"
#include "entrokit/equilibrium.hpp"
#include "entrokit/process_engine.hpp"
#include "entrokit/scenario.hpp"
#include "entrokit/theorem_suite.hpp"
#include "scenario_internal.hpp"

#include <cmath>
#include <filesystem>
#include <limits>

namespace entrokit::scenario {

namespace {

using namespace detail;
namespace fs = std::filesystem;

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

template <class T>
std::vector<const T*> selected(const std::vector<T>& items, const std::vector<std::string>& names, bool all,
                               const std::string& what)
{
  std::vector<const T*> out;
  if (all) {
    for (const auto& it : items)
      out.push_back(&it);
    return out;
  }
  for (const auto& n : names)
    out.push_back(&require(items, n, what));
  return out;
}

struct Context
{
  const Scenario& s;
  double unit;
  std::uint64_t seed;
  fs::path dir;
  std::vector<std::string> written;

  void write(const csv::Table& t, const std::string& stem)
  {
    const auto path = dir / (s.output.prefix + "_" + stem + ".csv");
    t.write(path.string());
    written.push_back(path.string());
  }

  std::shared_ptr<const IdealGasMixture> model_of(const std::string& state) const
  {
    return build_model(require(s.models, require(s.states, state, "state").model, "model"), unit);
  }
  SystemState state(const std::string& name) const { return build_state(s, require(s.states, name, "state"), unit); }
  ThermalReservoir reservoir(const std::string& name) const
  {
    return build_reservoir(require(s.reservoirs, name, "reservoir"), unit);
  }
};

void run_measurements(Context& cx, const std::vector<const MeasurementSpec*>& items)
{
  csv::Table t({"name", "from", "to", "reservoir_temperature", "dE_res", "delta_S_measured", "delta_S_analytic",
                "entropy"});
  for (const auto* m : items) {
    const auto model = cx.model_of(m->from);
    const auto a = cx.state(m->from), b = cx.state(m->to);
    const auto R = cx.reservoir(m->reservoir);
    const auto rec = reversible_standard_process(*model, a, b, R);
    const double dS = -rec.dE_res / R.temperature;
    const double S = m->reference_entropy ? *m->reference_entropy / cx.unit + dS : nan;
    t.add({m->name, m->from, m->to, R.temperature, rec.dE_res * cx.unit, dS * cx.unit,
           (entropy_of(*model, b) - entropy_of(*model, a)) * cx.unit, S * cx.unit});
  }
  cx.write(t, "entropy");
}

Primitive to_primitive(const StepSpec& st, double unit)
{
  if (st.kind == "isentropic")
    return Isentropic{Parameters::volume(*st.volume)};
  if (st.kind == "isothermal") {
    if (st.volume)
      return IsothermalContact{Parameters::volume(*st.volume)};
    return IsothermalContact{*st.energy / unit};
  }
  if (st.kind == "direct_contact")
    return DirectContact{st.amount / unit};
  return Stir{st.amount / unit};
}

void run_process(Context& cx, const ProcessSpec& p)
{
  const auto model = cx.model_of(p.initial);
  const auto st0 = cx.state(p.initial);
  Schedule sched;
  for (const auto& st : p.steps)
    sched.steps.push_back(to_primitive(st, cx.unit));
  const auto rec = run_schedule(*model, st0, cx.reservoir(p.reservoir), sched);

  Weight w;
  if (!p.weight.empty()) {
    const auto& ws = require(cx.s.weights, p.weight, "weight");
    w = Weight{ws.mass, ws.gravity, ws.height};
  }
  csv::Table t({"step", "kind", "energy", "volume", "entropy", "temperature", "dE_system", "dE_res", "work", "sigma",
                "weight_height"});
  // replay leg by leg to report the intermediate states
  SystemState cur = st0;
  ThermalReservoir R = cx.reservoir(p.reservoir);
  const double u = cx.unit;
  t.add({0LL, std::string("initial"), cur.energy * u, cur.params[0], entropy_of(*model, cur) * u,
         temperature_of(*model, cur), 0.0, 0.0, 0.0, 0.0, w.height});
  for (std::size_t i = 0; i < sched.steps.size(); ++i) {
    const auto leg = run_schedule(*model, cur, R, Schedule{{sched.steps[i]}});
    cur = leg.final;
    R = leg.reservoir_final;
    const auto& l = rec.steps[i];
    w = lift(w, l.work * u);
    t.add({static_cast<long long>(i + 1), l.kind, cur.energy * u, cur.params[0], entropy_of(*model, cur) * u,
           temperature_of(*model, cur), l.dE_system * u, l.dE_res * u, l.work * u, l.sigma * u, w.height});
  }
  t.add({static_cast<long long>(sched.steps.size() + 1), std::string("total"), rec.final.energy * u,
         rec.final.params[0], entropy_of(*model, rec.final) * u, temperature_of(*model, rec.final),
         (rec.final.energy - rec.initial.energy) * u, rec.dE_res * u, rec.work * u, rec.sigma_gen * u, w.height});
  cx.write(t, "process_" + p.name);
}

void run_bounds(Context& cx, const std::vector<const BoundSpec*>& items)
{
  csv::Table t({"name", "stages", "lambda", "dE_res_min", "dE_res_reversible", "lower_bound", "gap", "evaluations"});
  for (const auto* b : items) {
    const auto model = cx.model_of(b->from);
    const auto a = cx.state(b->from), z = cx.state(b->to);
    const auto R = cx.reservoir(b->reservoir);
    const ScheduleFamily fam{ScheduleFamily::Kind::StagedDirectContact, b->stages};
    const auto best = minimize_reservoir_energy(*model, a, z, R, fam, b->budget, cx.seed);
    const double rev = reversible_standard_process(*model, a, z, R).dE_res;
    const double bound = -R.temperature * (entropy_of(*model, z) - entropy_of(*model, a));
    t.add({b->name, static_cast<long long>(b->stages), best.lambda, best.dE_res * cx.unit, rev * cx.unit,
           bound * cx.unit, (best.dE_res - bound) * cx.unit, static_cast<long long>(best.evaluations)});
  }
  cx.write(t, "bounds");
}

void run_temperatures(Context& cx, const std::vector<const TemperatureRatioSpec*>& items)
{
  csv::Table t({"name", "declared_temperature", "ratio", "assigned_temperature", "relative_error"});
  for (const auto* tr : items) {
    const auto R = cx.reservoir(tr->reservoir), Rref = cx.reservoir(tr->reference);
    ProbePair probe = default_probe();
    if (!tr->probe_from.empty())
      probe = ProbePair{cx.model_of(tr->probe_from), cx.state(tr->probe_from), cx.state(tr->probe_to)};
    const double ratio = measure_temperature_ratio(R, Rref, *probe.model, probe.first, probe.second);
    const double T = assign_temperature(R, Rref, tr->reference_temperature, probe);
    // the declared values are only compared against, never used by the measurement
    const double declared = R.temperature * tr->reference_temperature / Rref.temperature;
    t.add({tr->name, declared, ratio, T, std::abs(T - declared) / declared});
  }
  cx.write(t, "temperature");
}

void run_equilibrium(Context& cx, const EquilibriumSpec& e)
{
  EquilibriumProblem prob;
  prob.energy = e.energy / cx.unit;
  std::vector<std::string> constituent_names;
  for (const auto& p : e.parts) {
    const auto& ms = require(cx.s.models, p.model, "model");
    const auto model = build_model(ms, cx.unit);
    Eigen::VectorXd n(static_cast<Eigen::Index>(p.amounts.size()));
    for (std::size_t i = 0; i < p.amounts.size(); ++i)
      n[static_cast<Eigen::Index>(i)] = p.amounts[i];
    const ReactionNetwork net =
      p.network.empty() ? ReactionNetwork::inert(p.amounts.size()) : build_network(require(cx.s.networks, p.network, "network"));
    prob.parts.push_back(EquilibriumPart{model, Parameters::volume(p.volume), Composition(n), net});
  }
  EquilibriumOptions opts;
  opts.seed = cx.seed;
  const auto sol = stable_equilibrium(prob, opts);
  const double u = cx.unit;

  csv::Table t({"quantity", "part", "index", "name", "value"});
  t.add({std::string("entropy"), -1LL, -1LL, std::string(), sol.entropy * u});
  t.add({std::string("kkt_residual"), -1LL, -1LL, std::string(), equilibrium_residual(sol, prob)});
  t.add({std::string("stationarity"), -1LL, -1LL, std::string(), sol.stationarity});
  t.add({std::string("iterations"), -1LL, -1LL, std::string(), static_cast<double>(sol.iterations)});
  t.add({std::string("degenerate"), -1LL, -1LL, std::string(), sol.degenerate ? 1.0 : 0.0});
  Eigen::Index eps_at = 0;
  for (std::size_t k = 0; k < prob.parts.size(); ++k) {
    const auto& part = prob.parts[k];
    const auto pk = static_cast<long long>(k);
    const SystemState st{sol.energies[k], part.params, sol.compositions[k]};
    t.add({std::string("energy"), pk, -1LL, std::string(), sol.energies[k] * u});
    t.add({std::string("temperature"), pk, -1LL, std::string(), sol.temperatures[k]});
    t.add({std::string("pressure"), pk, -1LL, std::string(), pressure_of(*part.model, st) * u});
    const auto& names = require(cx.s.models, e.parts[k].model, "model").species;
    for (std::size_t i = 0; i < sol.compositions[k].size(); ++i)
      t.add({std::string("amount"), pk, static_cast<long long>(i), names[i].name, sol.compositions[k][i]});
    for (std::size_t j = 0; j < part.network.reactions(); ++j, ++eps_at)
      t.add({std::string("epsilon"), pk, static_cast<long long>(j), std::string(), sol.eps_se.epsilon[eps_at]});
  }
  cx.write(t, "equilibrium_" + e.name);
}

void run_open_states(Context& cx)
{
  const auto env = build_reference(cx.s, cx.unit);
  const auto model = build_model(require(cx.s.models, cx.s.reference->model, "model"), cx.unit);
  csv::Table t({"name", "energy_open", "entropy_open", "E0", "S0", "temperature", "pressure"});
  for (const auto& o : cx.s.open_states) {
    Eigen::VectorXd n(static_cast<Eigen::Index>(o.amounts.size()));
    for (std::size_t i = 0; i < o.amounts.size(); ++i)
      n[static_cast<Eigen::Index>(i)] = o.amounts[i];
    const OpenState ost{Composition(n), o.energy / cx.unit, Parameters::volume(o.volume), {}};
    const auto [E, S] = open_energy_entropy(env, *model, ost);
    const auto [E0, S0] = reference_values(env, ost.comp);
    const SystemState st{ost.energy, ost.params, ost.comp};
    const double u = cx.unit;
    t.add({o.name, E * u, S * u, E0 * u, S0 * u, temperature_of(*model, st), pressure_of(*model, st) * u});
  }
  cx.write(t, "open_states");
}

void run_open_table(Context& cx, const OpenTableSpec& spec)
{
  const auto env = build_reference(cx.s, cx.unit);
  const auto model = build_model(require(cx.s.models, cx.s.reference->model, "model"), cx.unit);
  RelationGrid grid;
  for (double E : spec.energies)
    grid.energies.push_back(E / cx.unit);
  for (const auto& a : spec.amounts) {
    Eigen::VectorXd n(static_cast<Eigen::Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i)
      n[static_cast<Eigen::Index>(i)] = a[i];
    grid.compositions.emplace_back(n);
  }
  for (double V : spec.volumes)
    grid.params.push_back(Parameters::volume(V));
  if (spec.reactive)
    grid.network = env.network();
  const auto rows = open_fundamental_relation(env, *model, grid);

  const auto& names = env.network().names();
  const std::size_t r = env.network().constituents(), nr = spec.reactive ? env.network().reactions() : 0;
  std::vector<std::string> header{"E"};
  for (std::size_t i = 0; i < r; ++i)
    header.push_back((spec.reactive ? "n0_" : "n_") + names[i]);
  header.push_back("V");
  header.push_back("S_se");
  for (std::size_t j = 0; j < nr; ++j)
    header.push_back("eps_" + std::to_string(j));
  header.push_back("T");
  header.push_back("p");
  for (std::size_t i = 0; i < r; ++i)
    header.push_back("mu_" + names[i]);
  header.push_back("ok");
  csv::Table t(header);
  const double u = cx.unit;
  for (const auto& row : rows) {
    std::vector<csv::Cell> cells{row.energy * u};
    for (std::size_t i = 0; i < r; ++i)
      cells.emplace_back(row.comp[i]);
    cells.emplace_back(row.params[0]);
    cells.emplace_back(row.ok ? row.entropy * u : nan);
    for (std::size_t j = 0; j < nr; ++j)
      cells.emplace_back(row.ok ? row.eps_se[static_cast<Eigen::Index>(j)] : nan);
    cells.emplace_back(row.ok ? row.temperature : nan);
    cells.emplace_back(row.ok ? row.pressure * u : nan);
    for (std::size_t i = 0; i < r; ++i)
      cells.emplace_back(row.ok ? row.potentials[static_cast<Eigen::Index>(i)] * u : nan);
    cells.emplace_back(row.ok ? 1LL : 0LL);
    t.add(std::move(cells));
  }
  cx.write(t, "open_" + spec.name);
}

void run_correlations(Context& cx, const std::vector<const CorrelationSpec*>& items)
{
  csv::Table t({"name", "H_A", "H_B", "H_joint", "sigma", "energy", "energy_decorrelated", "dS_decorrelation"});
  for (const auto* c : items) {
    const auto j = build_joint(cx.s, *c, cx.unit);
    const auto m = marginals(j);
    const auto prod = decorrelate(j);
    const double u = cx.unit;
    t.add({c->name, shannon(m.pA) * u, shannon(m.pB) * u, shannon(j.table()) * u, decorrelation_entropy(j) * u,
           joint_energy(j) * u, joint_energy(prod) * u, entropy_difference_correlated(j, prod) * u});
  }
  cx.write(t, "correlations");
}

void run_suite(Context& cx, std::size_t cases)
{
  csv::Table t({"suite", "passed", "cases", "worst", "detail"});
  for (const auto& r : run_theorem_suite(SuiteOptions{cx.seed, cases}))
    t.add({r.name, r.passed ? 1LL : 0LL, static_cast<long long>(r.cases), r.worst, r.detail});
  cx.write(t, "theorem_suite");
}

} // namespace

std::vector<std::string> run(const Scenario& s, const RunOptions& opts)
{
  const bool any = !opts.measure_entropy.empty() || !opts.run_process.empty() || !opts.equilibrate.empty() ||
                   !opts.open_table.empty() || !opts.decorrelate.empty() || !opts.temperature_ratio.empty() ||
                   !opts.bound.empty() || opts.open_states || opts.theorem_suite;
  const bool all = opts.all || !any;

  Context cx{s, energy_unit(opts.units.value_or(s.units)), opts.seed.value_or(s.seed),
             fs::path(opts.out_dir.empty() ? s.output.directory : opts.out_dir), {}};
  fs::create_directories(cx.dir);

  if (auto m = selected(s.measurements, opts.measure_entropy, all, "measurement"); !m.empty())
    run_measurements(cx, m);
  for (const auto* p : selected(s.processes, opts.run_process, all, "process"))
    run_process(cx, *p);
  if (auto b = selected(s.bounds, opts.bound, all, "bound"); !b.empty())
    run_bounds(cx, b);
  if (auto tr = selected(s.temperature_ratios, opts.temperature_ratio, all, "temperature ratio"); !tr.empty())
    run_temperatures(cx, tr);
  for (const auto* e : selected(s.equilibria, opts.equilibrate, all, "equilibrium"))
    run_equilibrium(cx, *e);
  if ((all || opts.open_states) && !s.open_states.empty())
    run_open_states(cx);
  for (const auto* t : selected(s.open_tables, opts.open_table, all, "open table"))
    run_open_table(cx, *t);
  if (auto c = selected(s.correlations, opts.decorrelate, all, "correlation"); !c.empty())
    run_correlations(cx, c);
  if (opts.theorem_suite)
    run_suite(cx, opts.suite_cases);
  return cx.written;
}

} // namespace entrokit::scenario
