#include "entrokit/matter_models.hpp"

#include "entrokit/errors.hpp"
#include "entrokit/numeric.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace entrokit {

namespace {

std::string num(double x)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

} // namespace

Parameters Parameters::volume(double V)
{
  Eigen::VectorXd b(1);
  b[0] = V;
  return Parameters(b);
}

double MatterModel::max_energy(const Parameters&, const Composition&) const
{
  return std::numeric_limits<double>::infinity();
}

void MatterModel::check_domain(double E, const Parameters& params, const Composition& comp) const
{
  if (params.size() != parameter_count())
    throw DomainError(kind() + ": expected " + std::to_string(parameter_count()) + " parameters");
  if (comp.size() != constituents())
    throw DomainError(kind() + ": expected " + std::to_string(constituents()) + " constituents");
  if (!std::isfinite(E))
    throw DomainError(kind() + ": non-finite energy");
}

// --- ideal gas mixture -----------------------------------------------------

IdealGasMixture::IdealGasMixture(std::vector<GasSpecies> species)
  : species_(std::move(species))
{
  if (species_.empty())
    throw std::invalid_argument("ideal gas mixture needs at least one species");
  for (const auto& s : species_)
    if (!(s.dof >= 1.0))
      throw std::invalid_argument("ideal gas species '" + s.name + "': dof must be >= 1");
}

double IdealGasMixture::ground_energy(const Parameters&, const Composition& comp) const
{
  double g = 0.0;
  for (std::size_t k = 0; k < species_.size(); ++k)
    g += comp[k] * species_[k].formation_energy;
  return g;
}

double IdealGasMixture::heat_capacity(const Composition& comp) const
{
  double C = 0.0;
  for (std::size_t k = 0; k < species_.size(); ++k)
    C += comp[k] * 0.5 * species_[k].dof;
  return C;
}

void IdealGasMixture::check_domain(double E, const Parameters& params, const Composition& comp) const
{
  MatterModel::check_domain(E, params, comp);
  if (!(params[0] > 0.0))
    throw DomainError(kind() + ": volume must be positive, got " + num(params[0]));
  if (!(comp.total() > 0.0))
    throw DomainError(kind() + ": total amount must be positive");
  const double excess = E - ground_energy(params, comp);
  if (!(excess >= min_excess_energy))
    throw DomainError(kind() + ": energy " + num(E) + " not above ground bound " + num(E - excess));
}

double IdealGasMixture::temperature_unchecked(double E, const Composition& comp) const
{
  return (E - ground_energy(Parameters{}, comp)) / heat_capacity(comp);
}

double IdealGasMixture::entropy(double E, const Parameters& params, const Composition& comp) const
{
  check_domain(E, params, comp);
  const double T = temperature_unchecked(E, comp);
  const double V = params[0];
  double S = 0.0;
  for (std::size_t k = 0; k < species_.size(); ++k) {
    const double n = comp[k];
    if (n == 0.0)
      continue;
    const double c = 0.5 * species_[k].dof;
    S += n * (c * std::log(c * T) + std::log(V / n) + species_[k].entropy_constant);
  }
  return S;
}

std::optional<double> IdealGasMixture::inverse_temperature(double E, const Parameters& params,
                                                           const Composition& comp) const
{
  check_domain(E, params, comp);
  return 1.0 / temperature_unchecked(E, comp);
}

std::optional<Eigen::VectorXd> IdealGasMixture::entropy_gradient_amounts(double E, const Parameters& params,
                                                                         const Composition& comp) const
{
  check_domain(E, params, comp);
  const double T = temperature_unchecked(E, comp);
  const double V = params[0];
  Eigen::VectorXd g(static_cast<Eigen::Index>(species_.size()));
  for (std::size_t k = 0; k < species_.size(); ++k) {
    const auto& sp = species_[k];
    const double c = 0.5 * sp.dof;
    const double n = comp[k];
    const double log_v = n > 0.0 ? std::log(V / n) : std::numeric_limits<double>::infinity();
    g[static_cast<Eigen::Index>(k)] = c * std::log(c * T) + log_v + sp.entropy_constant - 1.0 - c -
                                      sp.formation_energy / T;
  }
  return g;
}

std::shared_ptr<const IdealGasMixture> IdealGasMixture::restricted_to(std::size_t k) const
{
  return std::make_shared<IdealGasMixture>(std::vector<GasSpecies>{species_.at(k)});
}

std::shared_ptr<const IdealGasMixture> ideal_gas_model(double dof_per_particle)
{
  return std::make_shared<IdealGasMixture>(std::vector<GasSpecies>{{"gas", dof_per_particle, 0.0, 0.0}});
}

// --- reservoir --------------------------------------------------------------

ReservoirModel::ReservoirModel(double temperature, double e_min, double e_max)
  : temperature_(temperature)
  , e_min_(e_min)
  , e_max_(e_max)
{
  if (!(temperature > 0.0))
    throw std::invalid_argument("reservoir temperature must be positive");
  if (!(e_min < e_max))
    throw std::invalid_argument("reservoir energy range is empty");
}

void ReservoirModel::check_domain(double E, const Parameters& params, const Composition& comp) const
{
  MatterModel::check_domain(E, params, comp);
  if (E < e_min_ || E > e_max_)
    throw DomainError("thermal reservoir: energy " + num(E) + " outside [" + num(e_min_) + ", " + num(e_max_) + "]");
}

double ReservoirModel::entropy(double E, const Parameters& params, const Composition& comp) const
{
  check_domain(E, params, comp);
  return E / temperature_;
}

ThermalReservoir ThermalReservoir::make(double temperature, double energy, double e_min, double e_max)
{
  if (!(temperature > 0.0))
    throw std::invalid_argument("reservoir temperature must be positive");
  if (!(e_min <= energy && energy <= e_max))
    throw std::invalid_argument("reservoir energy outside its range");
  return ThermalReservoir{temperature, energy, e_min, e_max, 0.0};
}

// --- free functions ---------------------------------------------------------

double entropy_of(const MatterModel& model, const SystemState& st)
{
  if (st.correlated)
    throw DomainError("entropy is defined only for states uncorrelated from the environment");
  return model.entropy(st.energy, st.params, st.comp);
}

double energy_of(const MatterModel& model, double S, const Parameters& params, const Composition& comp)
{
  if (!std::isfinite(S))
    throw RangeError("energy_of: non-finite entropy");
  const double ground = model.ground_energy(params, comp);
  const double top = model.max_energy(params, comp);
  const bool bounded = std::isfinite(top);

  // bracket in x = ln(E - ground) for unbounded models, E itself otherwise
  auto energy_at = [&](double x) { return bounded ? x : ground + std::exp(x); };
  auto f = [&](double x) { return model.entropy(energy_at(x), params, comp) - S; };

  // keep the lowest trial energy resolvable above the ground bound after rounding
  const double floor = 2.0 * (min_excess_energy + 8.0 * std::numeric_limits<double>::epsilon() * std::abs(ground));
  double lo = bounded ? ground : std::log(floor);
  double hi = bounded ? top : 0.0;
  const double f_lo = f(lo);
  if (f_lo > 0.0)
    throw RangeError("energy_of: entropy " + num(S) + " below attainable minimum " + num(f_lo + S));
  if (!bounded) {
    // S -> inf as E -> inf for normal systems
    while (f(hi) < 0.0) {
      lo = hi;
      hi += 2.0;
      if (hi > 700.0)
        throw RangeError("energy_of: entropy " + num(S) + " not attained");
    }
  } else if (f(hi) < 0.0) {
    throw RangeError("energy_of: entropy " + num(S) + " above attainable maximum");
  }
  // single root: a monotone relation cannot decrease across the bracket
  if (!(f(hi) >= f(lo)))
    throw DomainError(model.kind() + ": fundamental relation not increasing in energy");

  const double x = numeric::find_root(f, lo, hi);
  const double E = energy_at(x);
  if (std::abs(model.entropy(E, params, comp) - S) > tol_inv * std::max(1.0, std::abs(S)))
    throw RangeError("energy_of: inversion did not reach tolerance");
  return E;
}

double temperature_of(const MatterModel& model, const SystemState& st)
{
  if (auto beta = model.inverse_temperature(st.energy, st.params, st.comp))
    return 1.0 / *beta;
  model.check_domain(st.energy, st.params, st.comp);
  const double h = energy_step(st.energy);
  const double dSdE = numeric::central_difference(
    [&](double E) { return model.entropy(E, st.params, st.comp); }, st.energy, h);
  if (!(dSdE > 0.0))
    throw DomainError(model.kind() + ": non-positive dS/dE");
  return 1.0 / dSdE;
}

double weight_work(const Weight& w, double z1, double z2)
{
  return w.mass * w.gravity * (z2 - z1);
}

ThermalReservoir reservoir_exchange(const ThermalReservoir& R, double dE)
{
  const double E = R.energy + dE;
  if (E < R.e_min || E > R.e_max)
    throw RangeExceeded("reservoir at T=" + num(R.temperature) + ": energy " + num(E) + " outside [" +
                        num(R.e_min) + ", " + num(R.e_max) + "]");
  ThermalReservoir out = R;
  out.energy = E;
  out.entropy_change += dE / R.temperature;
  return out;
}

double CompositeState::energy() const
{
  double E = 0.0;
  for (const auto& s : states)
    E += s.energy;
  return E;
}

double CompositeState::entropy() const
{
  double S = 0.0;
  for (std::size_t i = 0; i < states.size(); ++i)
    S += entropy_of(*models.at(i), states[i]);
  return S;
}

MonotonicityScan check_energy_monotone(const MatterModel& model, const Parameters& params, const Composition& comp,
                                       std::size_t points)
{
  MonotonicityScan scan;
  const double ground = model.ground_energy(params, comp);
  const double top = model.max_energy(params, comp);
  double prev = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points; ++i) {
    const double t = points > 1 ? static_cast<double>(i) / static_cast<double>(points - 1) : 0.0;
    const double E = std::isfinite(top) ? ground + t * (top - ground)
                                        : ground + std::pow(10.0, -6.0 + 12.0 * t);
    const double S = model.entropy(E, params, comp);
    ++scan.points;
    if (!(S > prev)) {
      scan.increasing = false;
      if (!scan.first_violation)
        scan.first_violation = E;
    }
    prev = S;
  }
  return scan;
}

std::optional<double> richardson_ratio_dSdE(const MatterModel& model, const SystemState& st, double h)
{
  auto D = [&](double step) {
    return numeric::central_difference([&](double E) { return model.entropy(E, st.params, st.comp); },
                                       st.energy, step);
  };
  const double d2h = D(2.0 * h);
  const double dh = D(h);
  const double dh2 = D(0.5 * h);
  const double num_diff = d2h - dh;
  const double den_diff = dh - dh2;
  // differences at rounding level mean no measurable truncation error
  const double S = model.entropy(st.energy, st.params, st.comp);
  const double noise = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(S)) / (0.5 * h) +
                       1e-13 * std::max(1.0, std::abs(dh));
  if (std::abs(num_diff) <= noise && std::abs(den_diff) <= noise)
    return std::nullopt;
  return num_diff / den_diff;
}

} // namespace entrokit
