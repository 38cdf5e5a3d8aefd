#include "entrokit/open_systems.hpp"

#include "entrokit/errors.hpp"
#include "entrokit/numeric.hpp"
#include "entrokit/process_engine.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace entrokit {

namespace {

Parameters with_first(Parameters p, double v)
{
  p.beta[0] = v;
  return p;
}

double mu_at(const MatterModel& model, const SystemState& st, std::size_t k, bool* one_sided)
{
  const double S = entropy_of(model, st);
  const double nk = st.comp[k];
  const double h = 1e-6 * std::max(1.0, nk);
  auto E_at = [&](double x) {
    Eigen::VectorXd n = st.comp.amounts();
    n[static_cast<Eigen::Index>(k)] = x;
    return energy_of(model, S, st.params, Composition(n));
  };
  if (nk - h > 0.0) {
    if (one_sided)
      *one_sided = false;
    return numeric::central_difference(E_at, nk, h);
  }
  if (one_sided)
    *one_sided = true;
  // second-order forward difference
  return (-3.0 * E_at(nk) + 4.0 * E_at(nk + h) - E_at(nk + 2.0 * h)) / (2.0 * h);
}

} // namespace

ReferenceEnvironment::ReferenceEnvironment(ReactionNetwork network, std::vector<ElementalSpecies> species, double T0,
                                           double p0, ReferenceConvention convention)
  : network_(std::move(network))
  , species_(std::move(species))
  , T0_(T0)
  , p0_(p0)
  , convention_(convention)
{
  if (!(T0_ > 0.0) || !(p0_ > 0.0))
    throw std::invalid_argument("reference environment: T0 and p0 must be positive");
  std::vector<std::size_t> idx;
  for (const auto& s : species_) {
    if (!s.model)
      throw std::invalid_argument("reference environment: elemental species without a model");
    if (s.model->constituents() != 1)
      throw std::invalid_argument("reference environment: species models must have one constituent");
    if (s.constituent >= network_.constituents())
      throw std::invalid_argument("reference environment: species index out of range");
    idx.push_back(s.constituent);
  }
  const auto report = validate_elemental_set(idx, network_);
  if (!report.complete)
    throw std::invalid_argument("reference environment: elemental set is not complete");
  if (!report.independent)
    throw std::invalid_argument("reference environment: elemental set is not independent");
}

Eigen::VectorXd ReferenceEnvironment::elemental_content(const Composition& comp) const
{
  const auto r = static_cast<Eigen::Index>(network_.constituents());
  if (static_cast<Eigen::Index>(comp.size()) != r)
    throw std::invalid_argument("elemental_content: composition size does not match the network");
  const auto nr = static_cast<Eigen::Index>(network_.reactions());
  const auto m = static_cast<Eigen::Index>(species_.size());
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(r, nr + m);
  M.leftCols(nr) = network_.stoich();
  for (Eigen::Index i = 0; i < m; ++i)
    M(static_cast<Eigen::Index>(species_[static_cast<std::size_t>(i)].constituent), nr + i) = 1.0;
  const Eigen::VectorXd& n = comp.amounts();
  const Eigen::VectorXd x = linalg::min_norm_solve(M, n);
  const double scale = std::max(1.0, n.cwiseAbs().maxCoeff());
  if ((M * x - n).cwiseAbs().maxCoeff() > tol_compat * scale)
    throw NotExpressible("composition cannot be formed from the elemental species");
  Eigen::VectorXd w = x.tail(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (w[i] < -tol_compat * scale)
      throw NotExpressible("composition needs a negative amount of elemental species " + std::to_string(i));
    w[i] = std::max(0.0, w[i]);
  }
  return w;
}

double volume_at_pressure(const MatterModel& model, double T, double p, const Composition& comp, double hint)
{
  if (!(p > 0.0) || !(T > 0.0))
    throw DomainError("volume_at_pressure: T and p must be positive");
  Parameters base = Parameters::volume(1.0);
  if (model.parameter_count() != 1)
    throw DomainError(model.kind() + ": volume search needs a single volume parameter");
  auto g = [&](double x) {
    const Parameters prm = with_first(base, std::exp(x));
    const SystemState st{energy_at_temperature(model, T, prm, comp), prm, comp};
    return std::log(pressure_of(model, st)) - std::log(p);
  };
  const double x0 = std::log(hint > 0.0 ? hint : 1.0);
  double lo = x0 - 0.5, hi = x0 + 0.5;
  for (int i = 0; i < 60 && std::signbit(g(lo)) == std::signbit(g(hi)); ++i) {
    lo -= 2.0;
    hi += 2.0;
  }
  if (std::signbit(g(lo)) == std::signbit(g(hi)))
    throw DomainError(model.kind() + ": pressure not attained at the given temperature");
  return std::exp(numeric::find_root(g, lo, hi));
}

SystemState ReferenceEnvironment::reference_state(std::size_t i, double amount) const
{
  const auto& s = species_.at(i);
  const Composition comp{amount};
  const double V = volume_at_pressure(*s.model, T0_, p0_, comp, amount * T0_ / p0_);
  const Parameters prm = Parameters::volume(V);
  return SystemState{energy_at_temperature(*s.model, T0_, prm, comp), prm, comp};
}

std::pair<double, double> ReferenceEnvironment::species_reference(std::size_t i, double amount) const
{
  if (amount == 0.0)
    return {0.0, 0.0};
  const auto& s = species_.at(i);
  if (convention_ == ReferenceConvention::Explicit)
    return {amount * s.energy_per_particle, amount * s.entropy_per_particle};
  return {-p0_ * reference_state(i, amount).params[0], 0.0};
}

std::pair<double, double> reference_values(const ReferenceEnvironment& env, const Composition& comp)
{
  const Eigen::VectorXd w = env.elemental_content(comp);
  double E0 = 0.0, S0 = 0.0;
  for (std::size_t i = 0; i < env.species().size(); ++i) {
    const auto [e, s] = env.species_reference(i, w[static_cast<Eigen::Index>(i)]);
    E0 += e;
    S0 += s;
  }
  return {E0, S0};
}

std::pair<double, double> open_energy_entropy(const ReferenceEnvironment& env, const MatterModel& model,
                                              const OpenState& ost)
{
  if (model.constituents() != env.network().constituents())
    throw DomainError("open state: model and reference network disagree on constituents");
  model.check_domain(ost.energy, ost.params, ost.comp);
  const Eigen::VectorXd w = env.elemental_content(ost.comp);

  double E0 = 0.0, S0 = 0.0, E_ref = 0.0, S_ref = 0.0, volume_hint = 0.0;
  for (std::size_t i = 0; i < env.species().size(); ++i) {
    const double wi = w[static_cast<Eigen::Index>(i)];
    if (wi == 0.0)
      continue;
    const auto [e, s] = env.species_reference(i, wi);
    E0 += e;
    S0 += s;
    const SystemState ref = env.reference_state(i, wi);
    E_ref += ref.energy;
    S_ref += entropy_of(*env.species()[i].model, ref);
    volume_hint += ref.params[0];
  }
  if (ost.comp.total() == 0.0)
    return {E0 + ost.energy, S0};

  // closed proxy at (T0, p0): links the open state to the separated references
  const double Va = volume_at_pressure(model, env.T0(), env.p0(), ost.comp, volume_hint);
  const Parameters pa = with_first(ost.params, Va);
  const SystemState anchor{energy_at_temperature(model, env.T0(), pa, ost.comp), pa, ost.comp};
  const SystemState proxy{ost.energy, ost.params, ost.comp};
  const double S_anchor = S0 + (entropy_of(model, anchor) - S_ref);
  return {E0 + (ost.energy - E_ref), measure_entropy(model, proxy, anchor, S_anchor, env.reservoir())};
}

TotalPotential total_potential(const ReferenceEnvironment& env, const MatterModel& model, const OpenState& ost,
                               std::size_t k)
{
  if (k >= ost.comp.size())
    throw DomainError("total_potential: constituent index out of range");
  env.elemental_content(ost.comp);
  TotalPotential out;
  out.value = mu_at(model, SystemState{ost.energy, ost.params, ost.comp}, k, &out.one_sided);
  return out;
}

double open_gibbs_residual(const MatterModel& model, const SystemState& st, double dS, const Eigen::VectorXd& dn,
                           const Eigen::VectorXd& dbeta)
{
  if (static_cast<std::size_t>(dn.size()) != st.comp.size() || static_cast<std::size_t>(dbeta.size()) != st.params.size())
    throw DomainError("open_gibbs_residual: perturbation has wrong size");
  const double S = entropy_of(model, st);
  const double E0 = energy_of(model, S, st.params, st.comp);
  Parameters moved = st.params;
  moved.beta += dbeta;
  const double E1 = energy_of(model, S + dS, moved, Composition(Eigen::VectorXd(st.comp.amounts() + dn)));
  const double hS = 1e-3 * std::max(1.0, std::abs(S));
  const double T =
    numeric::derivative_5pt([&](double s) { return energy_of(model, s, st.params, st.comp); }, S, hS);
  double linear = T * dS;
  for (std::size_t j = 0; j < st.params.size(); ++j)
    linear += generalized_force(model, st, j) * dbeta[static_cast<Eigen::Index>(j)];
  for (std::size_t k = 0; k < st.comp.size(); ++k)
    if (dn[static_cast<Eigen::Index>(k)] != 0.0)
      linear += mu_at(model, st, k, nullptr) * dn[static_cast<Eigen::Index>(k)];
  return std::abs((E1 - E0) - linear);
}

std::vector<RelationRow> open_fundamental_relation(const ReferenceEnvironment& env, const MatterModel& model,
                                                   const RelationGrid& grid)
{
  const std::size_t nE = grid.energies.size(), nP = grid.params.size(), nC = grid.compositions.size();
  std::vector<RelationRow> rows(nE * nP * nC);
  // non-owning handle; the solver only borrows the model for this call
  const ModelPtr handle(ModelPtr(), &model);

  numeric::parallel_for(rows.size(), [&](std::size_t idx) {
    const std::size_t e = idx % nE, p = (idx / nE) % nP, c = idx / (nE * nP);
    RelationRow& row = rows[idx];
    row.energy = grid.energies[e];
    row.params = grid.params[p];
    row.comp = grid.compositions[c];
    try {
      env.elemental_content(row.comp);
      SystemState st{row.energy, row.params, row.comp};
      if (grid.network) {
        EquilibriumProblem prob{{EquilibriumPart{handle, row.params, row.comp, *grid.network}}, row.energy};
        const auto sol = stable_equilibrium(prob);
        row.entropy = sol.entropy;
        row.eps_se = sol.eps_se.epsilon;
        st.comp = sol.compositions[0];
      } else {
        row.entropy = entropy_of(model, st);
      }
      row.temperature = temperature_of(model, st);
      row.pressure = model.parameter_count() > 0 ? pressure_of(model, st) : 0.0;
      row.potentials.resize(static_cast<Eigen::Index>(st.comp.size()));
      for (std::size_t k = 0; k < st.comp.size(); ++k)
        row.potentials[static_cast<Eigen::Index>(k)] = mu_at(model, st, k, nullptr);
    } catch (const std::exception& ex) {
      row.ok = false;
      row.error = ex.what();
    }
  });
  return rows;
}

} // namespace entrokit
