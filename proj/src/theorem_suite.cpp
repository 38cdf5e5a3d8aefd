#include "entrokit/theorem_suite.hpp"

#include "entrokit/correlations.hpp"
#include "entrokit/equilibrium.hpp"
#include "entrokit/errors.hpp"
#include "entrokit/open_systems.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>

namespace entrokit {

namespace fuzz {

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi)
{
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

double random_dof(std::mt19937_64& rng)
{
  static constexpr double dofs[] = {3.0, 5.0, 7.0};
  return dofs[std::uniform_int_distribution<int>(0, 2)(rng)];
}

// Appends a step and advances the tracked state; failed steps are dropped.
bool push(FuzzedProcess& fp, SystemState& cur, ThermalReservoir& R, const Primitive& step)
{
  try {
    const auto rec = run_schedule(*fp.model, cur, R, Schedule{{step}});
    cur = rec.final;
    R = rec.reservoir_final;
    fp.schedule.steps.push_back(step);
    return true;
  } catch (const Error&) {
    return false;
  }
}

Parameters scaled_volume(std::mt19937_64& rng, const Parameters& p)
{
  return Parameters::volume(p[0] * std::exp(uniform(rng, -1.0, 1.0)));
}

FuzzedProcess build(std::mt19937_64& rng, bool with_reservoir)
{
  FuzzedProcess fp;
  const double dof = random_dof(rng);
  fp.model = ideal_gas_model(dof);
  fp.initial = random_gas_state(rng, Composition{uniform(rng, 0.5, 2.0)}, dof);
  fp.reservoir = ThermalReservoir::make(with_reservoir ? uniform(rng, 0.5, 3.0) : 1.0);

  SystemState cur = fp.initial;
  ThermalReservoir R = fp.reservoir;
  const int legs = std::uniform_int_distribution<int>(1, 5)(rng);
  for (int leg = 0; leg < legs; ++leg) {
    const int kind = with_reservoir ? std::uniform_int_distribution<int>(0, 3)(rng)
                                    : 3 * std::uniform_int_distribution<int>(0, 1)(rng);
    const MatterModel& m = *fp.model;
    try {
      switch (kind) {
        case 0:
          push(fp, cur, R, Isentropic{scaled_volume(rng, cur.params)});
          break;
        case 1: {
          const double S = entropy_of(m, cur);
          push(fp, cur, R, Isentropic{parameters_at_temperature(m, S, R.temperature, cur.params, cur.comp)});
          push(fp, cur, R, IsothermalContact{scaled_volume(rng, cur.params)});
          break;
        }
        case 2: {
          const double u = uniform(rng, 0.3, 0.8);
          const double T_start = uniform(rng, 0.0, 1.0) < 0.5 ? R.temperature * u : R.temperature / u;
          const double S = entropy_of(m, cur);
          if (!push(fp, cur, R, Isentropic{parameters_at_temperature(m, S, T_start, cur.params, cur.comp)}))
            break;
          const double E_R = energy_at_temperature(m, R.temperature, cur.params, cur.comp);
          if (push(fp, cur, R, DirectContact{(E_R - cur.energy) * uniform(rng, 0.2, 0.8)}))
            fp.reversible_by_construction = false;
          break;
        }
        default:
          if (push(fp, cur, R, Stir{cur.energy * uniform(rng, 0.01, 1.0)}))
            fp.reversible_by_construction = false;
          break;
      }
    } catch (const Error&) {
      // leg not constructible from this state; try the next one
    }
  }
  if (fp.schedule.steps.empty())
    fp.schedule.steps.push_back(Isentropic{fp.initial.params});
  return fp;
}

} // namespace

SystemState random_gas_state(std::mt19937_64& rng, const Composition& comp, double dof)
{
  const double T = uniform(rng, 0.3, 3.0);
  return SystemState{0.5 * dof * comp.total() * T, Parameters::volume(uniform(rng, 0.5, 4.0)), comp};
}

FuzzedProcess standard_weight_process(std::mt19937_64& rng) { return build(rng, true); }

FuzzedProcess weight_process(std::mt19937_64& rng) { return build(rng, false); }

} // namespace fuzz

namespace {

std::string fmt(const char* pattern, double x)
{
  char buf[96];
  std::snprintf(buf, sizeof buf, pattern, x);
  return buf;
}

struct Tracker
{
  SuiteResult r;
  explicit Tracker(std::string name)
  {
    r.name = std::move(name);
    r.passed = true;
  }
  void check(bool ok, double metric)
  {
    ++r.cases;
    r.worst = std::max(r.worst, metric);
    r.passed = r.passed && ok;
  }
};

SuiteResult operational_entropy(std::mt19937_64& rng, std::size_t n)
{
  Tracker t("operational_entropy");
  for (std::size_t i = 0; i < n; ++i) {
    const double dof = std::uniform_int_distribution<int>(0, 2)(rng) * 2.0 + 3.0;
    const auto model = ideal_gas_model(dof);
    const Composition comp{std::uniform_real_distribution<double>(0.5, 2.0)(rng)};
    const auto a = fuzz::random_gas_state(rng, comp, dof);
    const auto b = fuzz::random_gas_state(rng, comp, dof);
    const auto R = ThermalReservoir::make(std::uniform_real_distribution<double>(0.5, 3.0)(rng));
    const double err =
      std::abs(measure_entropy_difference(*model, a, b, R) - (entropy_of(*model, b) - entropy_of(*model, a)));
    t.check(err <= 1e-9, err);
  }
  t.r.detail = fmt("max |measured - analytic| = %.3g", t.r.worst);
  return t.r;
}

SuiteResult work_lower_bound(std::mt19937_64& rng, std::size_t n)
{
  Tracker t("work_lower_bound");
  std::size_t equal = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto fp = fuzz::standard_weight_process(rng);
    const auto rec = run_schedule(*fp.model, fp.initial, fp.reservoir, fp.schedule);
    const double dS = entropy_of(*fp.model, rec.final) - entropy_of(*fp.model, rec.initial);
    const double T_R = fp.reservoir.temperature;
    const double gap = rec.dE_res + T_R * dS;
    const bool at_bound = std::abs(gap) <= 1e-9 * T_R;
    const bool reversible = rec.sigma_gen <= 1e-9;
    equal += at_bound;
    t.check(gap >= -1e-12 && at_bound == reversible, std::max(0.0, -gap));
  }
  t.r.detail = std::to_string(equal) + " at the bound" + fmt(", worst undershoot %.3g", t.r.worst);
  return t.r;
}

SuiteResult entropy_nondecrease(std::mt19937_64& rng, std::size_t n)
{
  Tracker t("entropy_nondecrease");
  for (std::size_t i = 0; i < n; ++i) {
    const auto fp = fuzz::weight_process(rng);
    const auto rec = run_schedule(*fp.model, fp.initial, fp.reservoir, fp.schedule);
    const auto v = check_entropy_nondecrease(rec, *fp.model);
    bool ok = v.delta_S >= -1e-12;
    if (fp.reversible_by_construction)
      ok = ok && std::abs(v.delta_S) <= 1e-9;
    t.check(ok, std::max(0.0, -v.delta_S));
  }
  t.r.detail = fmt("largest decrease %.3g", t.r.worst);
  return t.r;
}

SuiteResult temperature_ratio(std::mt19937_64& rng)
{
  Tracker t("temperature_ratio");
  const auto R1 = ThermalReservoir::make(0.5), R2 = ThermalReservoir::make(2.0);
  const auto model = ideal_gas_model(3.0);
  for (int i = 0; i < 10; ++i) {
    const Composition comp{std::uniform_real_distribution<double>(0.5, 2.0)(rng)};
    const auto a = fuzz::random_gas_state(rng, comp, 3.0);
    auto b = a;
    b.params = Parameters::volume(a.params[0] * std::uniform_real_distribution<double>(1.5, 3.0)(rng));
    const double err = std::abs(measure_temperature_ratio(R1, R2, *model, a, b) - 0.25);
    t.check(err <= 1e-9, err);
  }
  const double T_ref = 273.16;
  for (double T : {100.0, 273.16, 300.476, 1000.0}) {
    const double rel = std::abs(assign_temperature(ThermalReservoir::make(T), ThermalReservoir::make(T_ref), T_ref) - T) / T;
    t.check(rel <= 1e-9, rel);
  }
  t.r.detail = fmt("max deviation %.3g", t.r.worst);
  return t.r;
}

SuiteResult additivity(std::mt19937_64& rng, std::size_t n)
{
  Tracker t("additivity");
  const ModelPtr a = ideal_gas_model(3.0), b = ideal_gas_model(5.0);
  for (std::size_t i = 0; i < n; ++i) {
    const Composition na{std::uniform_real_distribution<double>(0.5, 2.0)(rng)};
    const Composition nb{std::uniform_real_distribution<double>(0.5, 2.0)(rng)};
    CompositeState c1{{a, b}, {fuzz::random_gas_state(rng, na, 3.0), fuzz::random_gas_state(rng, nb, 5.0)}};
    CompositeState c2{{a, b}, {fuzz::random_gas_state(rng, na, 3.0), fuzz::random_gas_state(rng, nb, 5.0)}};
    const auto R = ThermalReservoir::make(1.0);
    const double sum = measure_entropy_difference(*a, c1.states[0], c2.states[0], R) +
                       measure_entropy_difference(*b, c1.states[1], c2.states[1], R);
    const double err = std::abs(measure_entropy_difference_composite(c1, c2, R) - sum);
    t.check(err <= 1e-12, err);
  }
  t.r.detail = fmt("max |composite - sum| = %.3g", t.r.worst);
  return t.r;
}

SuiteResult monotonicity_smoothness()
{
  Tracker t("monotonicity_smoothness");
  const Composition one{1.0};
  std::vector<std::pair<ModelPtr, SystemState>> cases;
  for (double dof : {3.0, 5.0, 7.0})
    cases.emplace_back(ideal_gas_model(dof), SystemState{1.0, Parameters::volume(1.0), one});
  auto mix = std::make_shared<IdealGasMixture>(
    std::vector<GasSpecies>{{"A", 3.0, 0.0, 0.0}, {"B", 5.0, -1.0, 0.5}});
  cases.emplace_back(mix, SystemState{0.5, Parameters::volume(2.0), Composition{1.0, 0.5}});
  cases.emplace_back(std::make_shared<ReservoirModel>(1.0, -10.0, 10.0), SystemState{0.0, Parameters{}, Composition{}});
  for (const auto& [model, st] : cases) {
    const auto scan = check_energy_monotone(*model, st.params, st.comp, 1000);
    t.check(scan.increasing, 0.0);
    const auto ratio = richardson_ratio_dSdE(*model, st, 1e-2);
    const bool smooth = !ratio || (*ratio >= 3.5 && *ratio <= 4.5);
    t.check(smooth, ratio ? std::abs(*ratio - 4.0) : 0.0);
  }
  t.r.detail = fmt("max |ratio - 4| = %.3g", t.r.worst);
  return t.r;
}

SuiteResult decorrelation(std::mt19937_64& rng, std::size_t n)
{
  Tracker t("decorrelation");
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::MatrixXd p(3, 4);
    for (Eigen::Index r = 0; r < p.rows(); ++r)
      for (Eigen::Index c = 0; c < p.cols(); ++c)
        p(r, c) = uni(rng);
    p /= p.sum();
    const JointState j(p, Eigen::VectorXd::LinSpaced(3, 0.0, 2.0), Eigen::VectorXd::LinSpaced(4, 0.0, 3.0));
    const double sigma = decorrelation_entropy(j);
    const double sigma_product = std::abs(decorrelation_entropy(decorrelate(j)));
    const double dE = std::abs(joint_energy(decorrelate(j)) - joint_energy(j));
    t.check(sigma >= 0.0 && sigma_product <= 1e-12 && dE <= 1e-12, std::max(sigma_product, dE));
  }
  Eigen::MatrixXd bell(2, 2);
  bell << 0.5, 0.0, 0.0, 0.5;
  const double err = std::abs(decorrelation_entropy(JointState(bell, Eigen::Vector2d(0, 1), Eigen::Vector2d(0, 1))) -
                              std::log(2.0));
  t.check(err <= 1e-12, err);
  t.r.detail = fmt("worst product sigma / energy shift %.3g", t.r.worst);
  return t.r;
}

SuiteResult isomerization()
{
  Tracker t("equilibrium_isomerization");
  auto mix = std::make_shared<IdealGasMixture>(std::vector<GasSpecies>{{"A", 3.0, 0.0, 0.0}, {"B", 3.0, 0.0, 0.0}});
  Eigen::MatrixXd nu(2, 1);
  nu << -1.0, 1.0;
  EquilibriumProblem prob{{EquilibriumPart{mix, Parameters::volume(1.0), Composition{1.0, 0.0}, ReactionNetwork(nu)}},
                          1.5};
  const auto sol = stable_equilibrium(prob);
  const double err = std::abs(sol.eps_se.epsilon[0] - 0.5);
  t.check(err <= 1e-10, err);
  const double kkt = equilibrium_residual(sol, prob);
  t.check(kkt <= 1e-8, kkt);
  t.r.detail = fmt("|eps - 0.5| = %.3g", err);
  return t.r;
}

// r(h) / r(h/2) for a residual that should vanish quadratically in h.
double richardson(const std::function<double(double)>& residual, double h)
{
  return residual(h) / residual(0.5 * h);
}

SuiteResult gibbs(std::mt19937_64& rng, std::size_t n, bool open)
{
  Tracker t(open ? "gibbs_open" : "gibbs_closed");
  std::uniform_real_distribution<double> dir(-1.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double dof = std::uniform_int_distribution<int>(0, 2)(rng) * 2.0 + 3.0;
    const auto model = ideal_gas_model(dof);
    const auto st = fuzz::random_gas_state(rng, Composition{std::uniform_real_distribution<double>(0.5, 2.0)(rng)}, dof);
    const double uS = dir(rng), uV = dir(rng), un = dir(rng);
    const double S = std::abs(entropy_of(*model, st));
    auto residual = [&](double h) {
      Eigen::VectorXd dV(1), dn(1);
      dV[0] = h * uV * st.params[0];
      dn[0] = h * un * st.comp[0];
      if (open)
        return open_gibbs_residual(*model, st, h * uS * std::max(1.0, S), dn, dV);
      return gibbs_residual(*model, st, h * uS * std::max(1.0, S), dV);
    };
    const double ratio = richardson(residual, 0.02);
    t.check(ratio >= 3.5 && ratio <= 4.5, std::abs(ratio - 4.0));
  }
  t.r.detail = fmt("max |ratio - 4| = %.3g", t.r.worst);
  return t.r;
}

} // namespace

std::vector<SuiteResult> run_theorem_suite(const SuiteOptions& opts)
{
  std::mt19937_64 rng(opts.seed);
  const std::size_t n = std::max<std::size_t>(opts.cases, 1);
  std::vector<SuiteResult> out;
  auto guarded = [&](const std::string& name, const std::function<SuiteResult()>& suite) {
    try {
      out.push_back(suite());
    } catch (const std::exception& e) {
      out.push_back(SuiteResult{name, false, 0, 0.0, std::string("error: ") + e.what()});
    }
  };
  guarded("operational_entropy", [&] { return operational_entropy(rng, n); });
  guarded("work_lower_bound", [&] { return work_lower_bound(rng, n); });
  guarded("entropy_nondecrease", [&] { return entropy_nondecrease(rng, n); });
  guarded("temperature_ratio", [&] { return temperature_ratio(rng); });
  guarded("additivity", [&] { return additivity(rng, n); });
  guarded("monotonicity_smoothness", [&] { return monotonicity_smoothness(); });
  guarded("decorrelation", [&] { return decorrelation(rng, n); });
  guarded("equilibrium_isomerization", [&] { return isomerization(); });
  guarded("gibbs_closed", [&] { return gibbs(rng, n, false); });
  guarded("gibbs_open", [&] { return gibbs(rng, n, true); });
  return out;
}

} // namespace entrokit
