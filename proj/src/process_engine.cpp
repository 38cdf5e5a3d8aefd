#include "entrokit/process_engine.hpp"

#include "entrokit/errors.hpp"
#include "entrokit/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace entrokit {

namespace {

std::string num(double x)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string encode_params(const Parameters& p)
{
  std::string s = "[";
  for (std::size_t j = 0; j < p.size(); ++j)
    s += (j ? "," : "") + num(p[j]);
  return s + "]";
}

Parameters with_first(const Parameters& p, double value)
{
  Parameters out = p;
  out.beta[0] = value;
  return out;
}

bool same_state(const SystemState& a, const SystemState& b)
{
  return a.energy == b.energy && a.params.beta == b.params.beta && a.comp == b.comp;
}

struct Stepper
{
  const MatterModel& model;
  SystemState state;
  ThermalReservoir reservoir;
  StepLedger ledger;

  void finish(SystemState next, double dE_res, double work, double sigma, const char* kind)
  {
    ledger = StepLedger{kind, next.energy - state.energy, dE_res, work, sigma};
    reservoir = reservoir_exchange(reservoir, dE_res);
    state = std::move(next);
  }

  void operator()(const Isentropic& step)
  {
    const double S = entropy_of(model, state);
    SystemState next = state;
    next.params = step.target;
    next.energy = energy_of(model, S, step.target, state.comp);
    const double sigma = entropy_of(model, next) - S;
    const double work = state.energy - next.energy;
    finish(std::move(next), 0.0, work, sigma, "isentropic");
  }

  void operator()(const IsothermalContact& step)
  {
    const double T_R = reservoir.temperature;
    const double T = temperature_of(model, state);
    if (std::abs(T - T_R) > tol_T * T_R)
      throw DomainError("isothermal contact: system at T=" + num(T) + " but reservoir at T=" + num(T_R));
    SystemState next = state;
    if (const auto* params = std::get_if<Parameters>(&step.target)) {
      next.params = *params;
      next.energy = energy_at_temperature(model, T_R, *params, state.comp);
    } else {
      const double E = std::get<double>(step.target);
      // move along the isotherm until the energy matches
      auto g = [&](double x) {
        return std::log(temperature_of(model, SystemState{E, with_first(state.params, std::exp(x)), state.comp})) -
               std::log(T_R);
      };
      const double x0 = std::log(state.params[0]);
      double lo = x0 - 1.0, hi = x0 + 1.0;
      for (int i = 0; i < 40 && std::signbit(g(lo)) == std::signbit(g(hi)); ++i) {
        lo -= 2.0;
        hi += 2.0;
      }
      if (std::signbit(g(lo)) == std::signbit(g(hi)))
        throw DomainError("isothermal contact: energy " + num(E) + " not reachable at T=" + num(T_R));
      next.params = with_first(state.params, std::exp(numeric::find_root(g, lo, hi)));
      next.energy = E;
    }
    const double dS = entropy_of(model, next) - entropy_of(model, state);
    const double q = T_R * dS;
    const double work = q - (next.energy - state.energy);
    finish(std::move(next), -q, work, 0.0, "isothermal");
  }

  void operator()(const DirectContact& step)
  {
    const double T_R = reservoir.temperature;
    SystemState next = state;
    next.energy = state.energy + step.q;
    const double T0 = temperature_of(model, state);
    const double T1 = temperature_of(model, next);
    if (step.q > 0.0 && (T0 > T_R * (1.0 + tol_T) || T1 > T_R * (1.0 + tol_T)))
      throw DomainError("direct contact: heating from T=" + num(T0) + " to T=" + num(T1) +
                        " exceeds reservoir temperature " + num(T_R));
    if (step.q < 0.0 && (T0 < T_R * (1.0 - tol_T) || T1 < T_R * (1.0 - tol_T)))
      throw DomainError("direct contact: cooling from T=" + num(T0) + " to T=" + num(T1) +
                        " falls below reservoir temperature " + num(T_R));
    const double dS = entropy_of(model, next) - entropy_of(model, state);
    finish(std::move(next), -step.q, 0.0, dS - step.q / T_R, "direct_contact");
  }

  void operator()(const Stir& step)
  {
    if (step.work < 0.0)
      throw DomainError("stir: work must be non-negative");
    SystemState next = state;
    next.energy = state.energy + step.work;
    const double dS = entropy_of(model, next) - entropy_of(model, state);
    finish(std::move(next), 0.0, -step.work, dS, "stir");
  }
};

} // namespace

std::string encode(const Primitive& step)
{
  return std::visit(
    [](const auto& s) -> std::string {
      using T = std::decay_t<decltype(s)>;
      if constexpr (std::is_same_v<T, Isentropic>)
        return "isentropic" + encode_params(s.target);
      else if constexpr (std::is_same_v<T, IsothermalContact>) {
        if (const auto* p = std::get_if<Parameters>(&s.target))
          return "isothermal" + encode_params(*p);
        return "isothermal(E=" + num(std::get<double>(s.target)) + ")";
      } else if constexpr (std::is_same_v<T, DirectContact>)
        return "direct_contact(q=" + num(s.q) + ")";
      else
        return "stir(w=" + num(s.work) + ")";
    },
    step);
}

std::string encode(const Schedule& schedule)
{
  std::string out;
  for (std::size_t i = 0; i < schedule.steps.size(); ++i)
    out += (i ? ";" : "") + encode(schedule.steps[i]);
  return out;
}

ProcessRecord run_schedule(const MatterModel& model, const SystemState& st0, const ThermalReservoir& R,
                           const Schedule& sched)
{
  if (sched.steps.empty())
    throw std::invalid_argument("run_schedule: empty schedule");
  if (st0.correlated)
    throw DomainError("run_schedule: initial state is correlated with its environment");
  model.check_domain(st0.energy, st0.params, st0.comp);

  Stepper stepper{model, st0, R, {}};
  ProcessRecord rec;
  rec.initial = st0;
  rec.reservoir_initial = R;
  for (const auto& step : sched.steps) {
    std::visit(stepper, step);
    rec.dE_res += stepper.ledger.dE_res;
    rec.work += stepper.ledger.work;
    rec.sigma_gen += stepper.ledger.sigma;
    rec.steps.push_back(stepper.ledger);
  }
  rec.final = stepper.state;
  rec.reservoir_final = stepper.reservoir;
  rec.reversible = rec.sigma_gen <= tol_rev;
  return rec;
}

Weight lift(const Weight& w, double work)
{
  Weight out = w;
  out.height += work / (w.mass * w.gravity);
  return out;
}

double energy_at_temperature(const MatterModel& model, double T, const Parameters& params, const Composition& comp)
{
  if (!(T > 0.0))
    throw DomainError("energy_at_temperature: temperature must be positive");
  const double ground = model.ground_energy(params, comp);
  const double top = model.max_energy(params, comp);
  if (std::isfinite(top))
    throw DomainError(model.kind() + ": temperature does not fix the energy of a bounded model");
  auto g = [&](double x) {
    return std::log(temperature_of(model, SystemState{ground + std::exp(x), params, comp})) - std::log(T);
  };
  double lo = std::log(2.0 * (min_excess_energy + 8.0 * std::numeric_limits<double>::epsilon() * std::abs(ground)));
  double hi = std::max(0.0, lo + 1.0);
  if (g(lo) > 0.0)
    throw DomainError("energy_at_temperature: T=" + num(T) + " below the attainable range");
  while (g(hi) < 0.0) {
    lo = hi;
    hi += 4.0;
    if (hi > 700.0)
      throw DomainError("energy_at_temperature: T=" + num(T) + " not attained");
  }
  return ground + std::exp(numeric::find_root(g, lo, hi));
}

Parameters parameters_at_temperature(const MatterModel& model, double S, double T, const Parameters& hint,
                                     const Composition& comp)
{
  if (hint.size() == 0)
    throw DomainError(model.kind() + ": no parameter to vary");
  const double logT = std::log(T);
  auto g = [&](double x) {
    const Parameters p = with_first(hint, std::exp(x));
    const double E = energy_of(model, S, p, comp);
    return std::log(temperature_of(model, SystemState{E, p, comp})) - logT;
  };
  auto safe_g = [&](double x) -> std::optional<double> {
    try {
      return g(x);
    } catch (const Error&) {
      return std::nullopt;
    }
  };

  const double x0 = std::log(hint[0]);
  const auto g0 = safe_g(x0);
  if (!g0)
    throw DomainError("parameters_at_temperature: hint outside the model domain");
  if (*g0 == 0.0)
    return hint;
  double lo = x0, hi = x0;
  double glo = *g0, ghi = *g0;
  for (double d = 0.5; d <= 256.0; d *= 2.0) {
    if (auto v = safe_g(x0 - d)) {
      lo = x0 - d;
      glo = *v;
    }
    if (std::signbit(glo) != std::signbit(*g0))
      return with_first(hint, std::exp(numeric::find_root(g, lo, x0)));
    if (auto v = safe_g(x0 + d)) {
      hi = x0 + d;
      ghi = *v;
    }
    if (std::signbit(ghi) != std::signbit(*g0))
      return with_first(hint, std::exp(numeric::find_root(g, x0, hi)));
  }
  throw DomainError("parameters_at_temperature: T=" + num(T) + " not reachable on the isentrope S=" + num(S));
}

Schedule reversible_schedule(const MatterModel& model, const SystemState& st1, const SystemState& st2,
                             const ThermalReservoir& R)
{
  if (!(st1.comp == st2.comp))
    throw DomainError("reversible_standard_process: process primitives preserve composition");
  if (same_state(st1, st2))
    return Schedule{{Isentropic{st1.params}}};
  const double S1 = entropy_of(model, st1);
  const double S2 = entropy_of(model, st2);
  const Parameters pa = parameters_at_temperature(model, S1, R.temperature, st1.params, st1.comp);
  const Parameters pb = parameters_at_temperature(model, S2, R.temperature, pa, st1.comp);
  return Schedule{{Isentropic{pa}, IsothermalContact{pb}, Isentropic{st2.params}}};
}

ProcessRecord reversible_standard_process(const MatterModel& model, const SystemState& st1, const SystemState& st2,
                                          const ThermalReservoir& R)
{
  return run_schedule(model, st1, R, reversible_schedule(model, st1, st2, R));
}

Schedule staged_direct_contact_schedule(const MatterModel& model, const SystemState& st1, const SystemState& st2,
                                        const ThermalReservoir& R, std::size_t stages, double lambda)
{
  if (!(st1.comp == st2.comp))
    throw DomainError("staged schedule: process primitives preserve composition");
  if (stages == 0 || !(lambda > 0.0 && lambda <= 1.0))
    throw std::invalid_argument("staged schedule: need stages >= 1 and lambda in (0, 1]");
  const double S1 = entropy_of(model, st1);
  const double S2 = entropy_of(model, st2);
  const double dS = S2 - S1;
  Schedule out;
  if (dS != 0.0) {
    const double T_end = dS > 0.0 ? lambda * R.temperature : R.temperature / lambda;
    SystemState cur = st1;
    double S_cur = S1;
    for (std::size_t j = 0; j < stages; ++j) {
      const double S_next = j + 1 == stages ? S2 : S1 + dS * static_cast<double>(j + 1) / static_cast<double>(stages);
      const Parameters pre = parameters_at_temperature(model, S_next, T_end, cur.params, cur.comp);
      const double E_pre = energy_of(model, S_cur, pre, cur.comp);
      const double E_post = energy_of(model, S_next, pre, cur.comp);
      out.steps.emplace_back(Isentropic{pre});
      out.steps.emplace_back(DirectContact{E_post - E_pre});
      cur = SystemState{E_post, pre, cur.comp};
      S_cur = S_next;
    }
  }
  out.steps.emplace_back(Isentropic{st2.params});
  return out;
}

ReservoirMinimum minimize_reservoir_energy(const MatterModel& model, const SystemState& st1, const SystemState& st2,
                                           const ThermalReservoir& R, const ScheduleFamily& family,
                                           std::size_t budget, std::uint64_t seed)
{
  if (family.kind == ScheduleFamily::Kind::ReversibleThreeLeg) {
    ReservoirMinimum out;
    out.schedule = reversible_schedule(model, st1, st2, R);
    out.dE_res = run_schedule(model, st1, R, out.schedule).dE_res;
    out.evaluations = 1;
    return out;
  }

  budget = std::max<std::size_t>(budget, 2);
  const std::size_t grid = (budget + 1) / 2;
  std::vector<double> lambdas(budget);
  for (std::size_t i = 0; i < grid; ++i)
    lambdas[i] = grid == 1 ? 1.0
                           : family.lambda_min + (1.0 - family.lambda_min) * static_cast<double>(i) /
                                                   static_cast<double>(grid - 1);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(family.lambda_min, 1.0);
  for (std::size_t i = grid; i < budget; ++i)
    lambdas[i] = uni(rng);

  struct Candidate
  {
    double dE = std::numeric_limits<double>::infinity();
    Schedule schedule;
    std::string key;
    bool ok = false;
  };
  std::vector<Candidate> results(budget);
  numeric::parallel_for(budget, [&](std::size_t i) {
    try {
      Candidate c;
      c.schedule = staged_direct_contact_schedule(model, st1, st2, R, family.stages, lambdas[i]);
      c.dE = run_schedule(model, st1, R, c.schedule).dE_res;
      c.key = encode(c.schedule);
      c.ok = true;
      results[i] = std::move(c);
    } catch (const Error&) {
      // infeasible member of the family, skipped
    }
  });

  ReservoirMinimum best;
  best.dE_res = std::numeric_limits<double>::infinity();
  std::string best_key;
  for (std::size_t i = 0; i < budget; ++i) {
    const auto& c = results[i];
    if (!c.ok)
      continue;
    ++best.evaluations;
    if (c.dE < best.dE_res || (c.dE == best.dE_res && c.key < best_key)) {
      best.dE_res = c.dE;
      best.lambda = lambdas[i];
      best.schedule = c.schedule;
      best_key = c.key;
    }
  }
  if (best.evaluations == 0)
    throw DomainError("minimize_reservoir_energy: no feasible schedule in the family");
  return best;
}

double measure_entropy_difference(const MatterModel& model, const SystemState& st1, const SystemState& st2,
                                  const ThermalReservoir& R)
{
  const ProcessRecord rec = reversible_standard_process(model, st1, st2, R);
  return -rec.dE_res / R.temperature;
}

double measure_entropy(const MatterModel& model, const SystemState& st, const SystemState& ref, double S_ref,
                       const ThermalReservoir& R)
{
  return S_ref + measure_entropy_difference(model, ref, st, R);
}

double measure_entropy_difference_composite(const CompositeState& c1, const CompositeState& c2,
                                            const ThermalReservoir& R)
{
  if (c1.states.size() != c2.states.size() || c1.models.size() != c1.states.size())
    throw std::invalid_argument("composite measurement: subsystem count mismatch");
  ThermalReservoir shared = R;
  double dE_res = 0.0;
  for (std::size_t i = 0; i < c1.states.size(); ++i) {
    const ProcessRecord rec = reversible_standard_process(*c1.models[i], c1.states[i], c2.states[i], shared);
    shared = rec.reservoir_final;
    dE_res += rec.dE_res;
  }
  return -dE_res / R.temperature;
}

double measure_temperature_ratio(const ThermalReservoir& R1, const ThermalReservoir& R2, const MatterModel& model,
                                 const SystemState& st1, const SystemState& st2)
{
  const double d1 = reversible_standard_process(model, st1, st2, R1).dE_res;
  const double d2 = reversible_standard_process(model, st1, st2, R2).dE_res;
  const double floor = tol_E * std::max({1.0, std::abs(st1.energy), std::abs(st2.energy)});
  if (std::abs(d1) <= floor || std::abs(d2) <= floor)
    throw DegenerateStates("temperature ratio: probe states have equal entropy");
  return d1 / d2;
}

ProbePair default_probe()
{
  const Composition n{1.0};
  return ProbePair{ideal_gas_model(3.0), SystemState{1.5, Parameters::volume(1.0), n},
                   SystemState{1.5, Parameters::volume(2.0), n}};
}

double assign_temperature(const ThermalReservoir& R, const ThermalReservoir& R_ref, double T_ref,
                          const ProbePair& probe)
{
  if (!(T_ref > 0.0))
    throw std::invalid_argument("assign_temperature: reference temperature must be positive");
  const double T = T_ref * measure_temperature_ratio(R, R_ref, *probe.model, probe.first, probe.second);
  if (!(T > 0.0))
    throw DomainError("assign_temperature: non-positive temperature");
  return T;
}

EntropyVerdict check_entropy_nondecrease(const ProcessRecord& record, const MatterModel& model)
{
  const double scale = std::max({1.0, std::abs(record.initial.energy), std::abs(record.final.energy)});
  if (std::abs(record.dE_res) > tol_E * scale)
    throw NotWeightProcess("process exchanged " + num(record.dE_res) + " with a reservoir");
  EntropyVerdict v;
  v.delta_S = entropy_of(model, record.final) - entropy_of(model, record.initial);
  v.nondecreasing = v.delta_S >= -tol_rev;
  v.reversible = std::abs(v.delta_S) <= tol_rev;
  v.irreversible = v.delta_S > tol_rev;
  return v;
}

} // namespace entrokit
