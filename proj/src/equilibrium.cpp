#include "entrokit/equilibrium.hpp"

#include "entrokit/numeric.hpp"
#include "simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

namespace entrokit {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

/// Stacked view of all parts: block-diagonal stoichiometry, stacked amounts.
struct Layout
{
  std::vector<Eigen::Index> species_offset;
  std::vector<Eigen::Index> reaction_offset;
  Eigen::Index species = 0;
  Eigen::Index reactions = 0;
  Eigen::MatrixXd nu;
  Eigen::VectorXd n0;

  explicit Layout(const EquilibriumProblem& prob)
  {
    for (const auto& part : prob.parts) {
      if (!part.model)
        throw std::invalid_argument("equilibrium: part without a model");
      if (part.initial.size() != part.model->constituents() || part.network.constituents() != part.initial.size())
        throw std::invalid_argument("equilibrium: composition, network and model disagree on constituent count");
      species_offset.push_back(species);
      reaction_offset.push_back(reactions);
      species += static_cast<Eigen::Index>(part.initial.size());
      reactions += static_cast<Eigen::Index>(part.network.reactions());
    }
    nu = Eigen::MatrixXd::Zero(species, reactions);
    n0 = Eigen::VectorXd::Zero(species);
    for (std::size_t i = 0; i < prob.parts.size(); ++i) {
      const auto& part = prob.parts[i];
      const auto r = static_cast<Eigen::Index>(part.initial.size());
      const auto t = static_cast<Eigen::Index>(part.network.reactions());
      if (t > 0)
        nu.block(species_offset[i], reaction_offset[i], r, t) = part.network.stoich();
      n0.segment(species_offset[i], r) = part.initial.amounts();
    }
  }

  std::size_t part_of_species(Eigen::Index k) const
  {
    std::size_t i = 0;
    while (i + 1 < species_offset.size() && species_offset[i + 1] <= k)
      ++i;
    return i;
  }
};

struct Point
{
  Eigen::VectorXd eps;
  Eigen::VectorXd energies;
};

class Evaluator
{
public:
  Evaluator(const EquilibriumProblem& prob, const Layout& layout)
    : prob_(prob)
    , L_(layout)
    , pinned_(static_cast<std::size_t>(layout.species), false)
  {
  }

  void set_pinned(const std::vector<bool>& pinned) { pinned_ = pinned; }
  const std::vector<bool>& pinned() const { return pinned_; }

  Eigen::VectorXd amounts(const Eigen::VectorXd& eps) const
  {
    Eigen::VectorXd n = L_.reactions > 0 ? (L_.n0 + L_.nu * eps).eval() : L_.n0;
    for (Eigen::Index k = 0; k < n.size(); ++k)
      if (pinned_[static_cast<std::size_t>(k)])
        n[k] = 0.0;
    return n;
  }

  Composition part_comp(const Eigen::VectorXd& n, std::size_t i) const
  {
    Eigen::VectorXd seg = n.segment(L_.species_offset[i], static_cast<Eigen::Index>(prob_.parts[i].initial.size()));
    for (Eigen::Index k = 0; k < seg.size(); ++k)
      if (seg[k] < 0.0)
        seg[k] = 0.0;
    return Composition(seg);
  }

  bool feasible(const Point& p) const
  {
    const Eigen::VectorXd n = amounts(p.eps);
    for (Eigen::Index k = 0; k < n.size(); ++k)
      if (!pinned_[static_cast<std::size_t>(k)] && !(n[k] > 0.0))
        return false;
    for (std::size_t i = 0; i < prob_.parts.size(); ++i) {
      const auto& part = prob_.parts[i];
      const Composition c = part_comp(n, i);
      if (!(p.energies[static_cast<Eigen::Index>(i)] - part.model->ground_energy(part.params, c) >= min_excess_energy))
        return false;
    }
    return true;
  }

  /// Total entropy, or -inf outside the domain.
  double value(const Point& p) const
  {
    if (!feasible(p))
      return -inf;
    const Eigen::VectorXd n = amounts(p.eps);
    double S = 0.0;
    try {
      for (std::size_t i = 0; i < prob_.parts.size(); ++i) {
        const auto& part = prob_.parts[i];
        S += part.model->entropy(p.energies[static_cast<Eigen::Index>(i)], part.params, part_comp(n, i));
      }
    } catch (const Error&) {
      return -inf;
    }
    return S;
  }

  /// dS/dE per part and dS/dn stacked; pinned entries of dS/dn are left at 0.
  void gradient(const Point& p, Eigen::VectorXd& dSdE, Eigen::VectorXd& dSdn) const
  {
    const Eigen::VectorXd n = amounts(p.eps);
    dSdE.resize(static_cast<Eigen::Index>(prob_.parts.size()));
    dSdn = Eigen::VectorXd::Zero(L_.species);
    for (std::size_t i = 0; i < prob_.parts.size(); ++i) {
      const auto& part = prob_.parts[i];
      const double E = p.energies[static_cast<Eigen::Index>(i)];
      const Composition c = part_comp(n, i);
      const auto& model = *part.model;
      dSdE[static_cast<Eigen::Index>(i)] = 1.0 / temperature_of(model, SystemState{E, part.params, c});
      Eigen::VectorXd g;
      if (auto analytic = model.entropy_gradient_amounts(E, part.params, c))
        g = *analytic;
      else
        g = fd_amount_gradient(model, E, part.params, c);
      for (Eigen::Index k = 0; k < g.size(); ++k) {
        const Eigen::Index gk = L_.species_offset[i] + k;
        if (!pinned_[static_cast<std::size_t>(gk)])
          dSdn[gk] = g[k];
      }
    }
  }

  static Eigen::VectorXd fd_amount_gradient(const MatterModel& model, double E, const Parameters& params,
                                            const Composition& c)
  {
    Eigen::VectorXd g(static_cast<Eigen::Index>(c.size()));
    for (std::size_t k = 0; k < c.size(); ++k) {
      const double h = 1e-6 * std::max(1.0, c[k]);
      auto S_at = [&](double nk) {
        Eigen::VectorXd a = c.amounts();
        a[static_cast<Eigen::Index>(k)] = nk;
        return model.entropy(E, params, Composition(a));
      };
      g[static_cast<Eigen::Index>(k)] =
        c[k] > h ? (S_at(c[k] + h) - S_at(c[k] - h)) / (2.0 * h) : (S_at(c[k] + h) - S_at(c[k])) / h;
    }
    return g;
  }

private:
  const EquilibriumProblem& prob_;
  const Layout& L_;
  std::vector<bool> pinned_;
};

/// Reduced coordinates x = [y; z]: y moves energy from the last part to the
/// others, z moves along B (row-space directions that keep pinned species at zero).
struct Reduced
{
  Eigen::MatrixXd B;
  std::size_t parts = 1;

  Eigen::Index dim() const { return static_cast<Eigen::Index>(parts - 1) + B.cols(); }

  Point move(const Point& p, const Eigen::VectorXd& x) const
  {
    Point out = p;
    const auto q = static_cast<Eigen::Index>(parts);
    for (Eigen::Index i = 0; i + 1 < q; ++i) {
      out.energies[i] += x[i];
      out.energies[q - 1] -= x[i];
    }
    if (B.cols() > 0)
      out.eps += B * x.tail(B.cols());
    return out;
  }

  Eigen::VectorXd reduce(const Eigen::VectorXd& dSdE, const Eigen::VectorXd& dSdn, const Eigen::MatrixXd& nu) const
  {
    const auto q = static_cast<Eigen::Index>(parts);
    Eigen::VectorXd g(dim());
    for (Eigen::Index i = 0; i + 1 < q; ++i)
      g[i] = dSdE[i] - dSdE[q - 1];
    if (B.cols() > 0)
      g.tail(B.cols()) = B.transpose() * (nu.transpose() * dSdn);
    return g;
  }
};

Eigen::MatrixXd free_directions(const Layout& L, const std::vector<bool>& pinned)
{
  if (L.reactions == 0)
    return Eigen::MatrixXd(0, 0);
  std::vector<Eigen::Index> rows;
  for (Eigen::Index k = 0; k < L.species; ++k)
    if (pinned[static_cast<std::size_t>(k)])
      rows.push_back(k);
  Eigen::MatrixXd N1;
  if (rows.empty()) {
    N1 = Eigen::MatrixXd::Identity(L.reactions, L.reactions);
  } else {
    Eigen::MatrixXd nuP(static_cast<Eigen::Index>(rows.size()), L.reactions);
    for (std::size_t i = 0; i < rows.size(); ++i)
      nuP.row(static_cast<Eigen::Index>(i)) = L.nu.row(rows[i]);
    N1 = linalg::null_space(nuP);
  }
  if (N1.cols() == 0)
    return Eigen::MatrixXd(L.reactions, 0);
  const Eigen::MatrixXd R = linalg::row_space(L.nu * N1);
  return N1 * R;
}

/// Reaction coordinates maximizing amount k (capped), via the LP
/// max nu_k.eps s.t. n0 + nu eps >= 0, nu_k.eps <= cap.
Eigen::VectorXd maximize_amount(const Layout& L, Eigen::Index k, double cap)
{
  const Eigen::Index t = L.reactions;
  Eigen::MatrixXd A(L.species + 1, 2 * t);
  A.leftCols(t) = -L.nu;
  A.rightCols(t) = L.nu;
  A.block(L.species, 0, 1, t) = L.nu.row(k);
  A.block(L.species, t, 1, t) = -L.nu.row(k);
  Eigen::VectorXd b(L.species + 1);
  b.head(L.species) = L.n0;
  b[L.species] = cap;
  Eigen::VectorXd c(2 * t);
  c.head(t) = L.nu.row(k).transpose();
  c.tail(t) = -L.nu.row(k).transpose();
  const auto res = detail::maximize_slack_feasible(A, b, c);
  if (res.status != detail::LpResult::Status::Optimal)
    throw Infeasible("equilibrium: phase-one linear program failed");
  return res.x.head(t) - res.x.tail(t);
}

double stationarity_of(const Eigen::VectorXd& g, const Eigen::VectorXd& dSdE, std::size_t parts)
{
  double r = 0.0;
  const auto q = static_cast<Eigen::Index>(parts);
  // energy components are differences of 1/T; report them relative to 1/T_q
  for (Eigen::Index i = 0; i + 1 < q; ++i)
    r = std::max(r, std::abs(g[i]) / dSdE[q - 1]);
  for (Eigen::Index j = q - 1; j < g.size(); ++j)
    r = std::max(r, std::abs(g[j]));
  return r;
}

} // namespace

std::size_t EquilibriumProblem::reaction_count() const
{
  std::size_t t = 0;
  for (const auto& p : parts)
    t += p.network.reactions();
  return t;
}

std::vector<Composition> compositions_at(const EquilibriumProblem& prob, const ReactionCoordinates& eps)
{
  std::vector<Composition> out;
  Eigen::Index offset = 0;
  for (const auto& part : prob.parts) {
    const auto t = static_cast<Eigen::Index>(part.network.reactions());
    out.push_back(apply_reactions(part.initial, part.network, ReactionCoordinates{eps.epsilon.segment(offset, t)}));
    offset += t;
  }
  return out;
}

EquilibriumSolution stable_equilibrium(const EquilibriumProblem& prob, const EquilibriumOptions& opts)
{
  if (prob.parts.empty())
    throw std::invalid_argument("equilibrium: no parts");
  const Layout L(prob);
  const std::size_t q = prob.parts.size();

  // ground bound at the initial composition
  double ground0 = 0.0;
  for (const auto& part : prob.parts)
    ground0 += part.model->ground_energy(part.params, part.initial);
  if (!(prob.energy - ground0 > q * min_excess_energy))
    throw Infeasible("equilibrium: total energy not above the ground bound of the initial composition");

  // phase one: which amounts can become positive, and a relative-interior point
  const double cap = 1.0 + L.n0.sum();
  std::vector<bool> pinned(static_cast<std::size_t>(L.species), false);
  Eigen::VectorXd eps_int = Eigen::VectorXd::Zero(L.reactions);
  int contributors = 1;
  for (Eigen::Index k = 0; k < L.species; ++k) {
    if (L.n0[k] > 0.0)
      continue;
    if (L.reactions == 0 || L.nu.row(k).cwiseAbs().maxCoeff() == 0.0) {
      pinned[static_cast<std::size_t>(k)] = true;
      continue;
    }
    const Eigen::VectorXd e = maximize_amount(L, k, cap);
    if ((L.nu.row(k) * e)(0) <= 1e-12 * cap) {
      pinned[static_cast<std::size_t>(k)] = true;
    } else {
      eps_int += e;
      ++contributors;
    }
  }
  eps_int /= contributors;
  const std::vector<bool> structural = pinned;

  Evaluator ev(prob, L);
  ev.set_pinned(pinned);

  std::mt19937_64 rng(opts.seed.value_or(0));
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const bool randomized = opts.seed.has_value();

  auto excess_at = [&](const Eigen::VectorXd& eps) {
    const Eigen::VectorXd n = ev.amounts(eps);
    double g = 0.0;
    for (std::size_t i = 0; i < q; ++i)
      g += prob.parts[i].model->ground_energy(prob.parts[i].params, ev.part_comp(n, i));
    return prob.energy - g;
  };

  Point cur;
  {
    double theta = randomized ? 0.05 + 0.95 * uni(rng) : 1.0;
    const double x0 = prob.energy - ground0;
    while (theta > 1e-12 && !(excess_at(theta * eps_int) >= 0.5 * x0))
      theta *= 0.5;
    cur.eps = theta * eps_int;
    const Eigen::VectorXd n = ev.amounts(cur.eps);
    std::vector<double> w(q, 1.0);
    if (randomized)
      for (auto& wi : w)
        wi = 0.2 + uni(rng);
    double wsum = 0.0;
    for (double wi : w)
      wsum += wi;
    const double X = excess_at(cur.eps);
    cur.energies.resize(static_cast<Eigen::Index>(q));
    for (std::size_t i = 0; i < q; ++i)
      cur.energies[static_cast<Eigen::Index>(i)] =
        prob.parts[i].model->ground_energy(prob.parts[i].params, ev.part_comp(n, i)) + X * w[i] / wsum;
  }
  if (!ev.feasible(cur))
    throw Infeasible("equilibrium: no strictly feasible starting point");

  Reduced red{free_directions(L, pinned), q};
  const double amount_scale = std::max(1.0, L.n0.cwiseAbs().maxCoeff());
  const double pin_floor = 1e-13 * amount_scale;
  std::map<Eigen::Index, int> releases;

  EquilibriumSolution sol;
  Eigen::VectorXd dSdE, dSdn;
  double f = ev.value(cur);
  double stat = inf;
  std::size_t iter = 0;
  for (; iter < opts.max_iter; ++iter) {
    ev.gradient(cur, dSdE, dSdn);
    const Eigen::VectorXd g = red.reduce(dSdE, dSdn, L.nu);
    stat = g.size() ? stationarity_of(g, dSdE, q) : 0.0;

    if (stat <= opts.tol) {
      // boundary sign check: a pinned species must not be worth producing
      bool released = false;
      for (Eigen::Index k = 0; k < L.species; ++k) {
        if (!pinned[static_cast<std::size_t>(k)] || structural[static_cast<std::size_t>(k)] || releases[k] > 3)
          continue;
        std::vector<bool> others = pinned;
        others[static_cast<std::size_t>(k)] = false;
        const Eigen::MatrixXd dirs = free_directions(L, others);
        if (dirs.cols() == 0)
          continue;
        // direction that raises n_k at unit rate with the other pinned species fixed
        const Eigen::VectorXd growth = (L.nu * dirs).row(k).transpose();
        if (growth.norm() == 0.0)
          continue;
        const Eigen::VectorXd d = dirs * (growth / growth.squaredNorm());
        const std::size_t part = L.part_of_species(k);
        const Eigen::VectorXd n = ev.amounts(cur.eps);
        Eigen::VectorXd a = ev.part_comp(n, part).amounts();
        a[k - L.species_offset[part]] = pin_floor;
        const auto& pm = prob.parts[part];
        const double E = cur.energies[static_cast<Eigen::Index>(part)];
        const Composition probe(a);
        Eigen::VectorXd gk = pm.model->entropy_gradient_amounts(E, pm.params, probe).value_or(
          Evaluator::fd_amount_gradient(*pm.model, E, pm.params, probe));
        Eigen::VectorXd full = dSdn;
        full.segment(L.species_offset[part], gk.size()) = gk;
        if (full.dot(L.nu * d) > opts.tol) {
          pinned[static_cast<std::size_t>(k)] = false;
          ++releases[k];
          released = true;
        }
      }
      if (!released)
        break;
      ev.set_pinned(pinned);
      red.B = free_directions(L, pinned);
      f = ev.value(cur);
      continue;
    }

    // finite-difference Hessian of the reduced gradient
    const Eigen::Index m = red.dim();
    Eigen::MatrixXd H(m, m);
    for (Eigen::Index j = 0; j < m; ++j) {
      double h = 1e-6 * (j < static_cast<Eigen::Index>(q) - 1 ? std::max(1.0, std::abs(cur.energies[j])) : amount_scale);
      Eigen::VectorXd e = Eigen::VectorXd::Zero(m);
      Point plus, minus;
      bool ok_p = false, ok_m = false;
      for (int tries = 0; tries < 60; ++tries, h *= 0.5) {
        e[j] = h;
        plus = red.move(cur, e);
        minus = red.move(cur, -e);
        ok_p = ev.feasible(plus);
        ok_m = ev.feasible(minus);
        if (ok_p || ok_m)
          break;
      }
      Eigen::VectorXd gp, gm, a, b;
      if (ok_p && ok_m) {
        ev.gradient(plus, a, b);
        gp = red.reduce(a, b, L.nu);
        ev.gradient(minus, a, b);
        gm = red.reduce(a, b, L.nu);
        H.col(j) = (gp - gm) / (2.0 * h);
      } else if (ok_p) {
        ev.gradient(plus, a, b);
        H.col(j) = (red.reduce(a, b, L.nu) - g) / h;
      } else if (ok_m) {
        ev.gradient(minus, a, b);
        H.col(j) = (g - red.reduce(a, b, L.nu)) / h;
      } else {
        throw EquilibriumNonConvergence("equilibrium: iterate on the domain boundary", sol);
      }
    }
    H = 0.5 * (H + H.transpose()).eval();

    // modified Newton: force a negative definite model
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(H);
    Eigen::VectorXd lam = eig.eigenvalues();
    const double lam_scale = std::max(1e-300, lam.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < lam.size(); ++i)
      lam[i] = std::min(lam[i], -1e-10 * lam_scale);
    const Eigen::VectorXd d =
      -(eig.eigenvectors() * (eig.eigenvectors().transpose() * g).cwiseQuotient(lam)).eval();

    // fraction to the boundary
    double alpha = 1.0;
    {
      const Eigen::VectorXd n = ev.amounts(cur.eps);
      Eigen::VectorXd dn = Eigen::VectorXd::Zero(L.species);
      if (red.B.cols() > 0)
        dn = L.nu * (red.B * d.tail(red.B.cols()));
      for (Eigen::Index k = 0; k < L.species; ++k)
        if (!pinned[static_cast<std::size_t>(k)] && dn[k] < 0.0)
          alpha = std::min(alpha, 0.99 * n[k] / -dn[k]);
    }

    const double slope = g.dot(d);
    bool accepted = false;
    Point next;
    for (int ls = 0; ls < 80; ++ls, alpha *= 0.5) {
      next = red.move(cur, alpha * d);
      const double fn = ev.value(next);
      if (!std::isfinite(fn))
        continue;
      if (fn >= f + 1e-4 * alpha * slope) {
        accepted = true;
        f = fn;
        break;
      }
      // near the optimum entropy changes drop below rounding; accept on gradient decrease
      if (fn >= f - 1e-14 * std::max(1.0, std::abs(f))) {
        Eigen::VectorXd a, b;
        ev.gradient(next, a, b);
        const Eigen::VectorXd gn = red.reduce(a, b, L.nu);
        if (stationarity_of(gn, a, q) < stat) {
          accepted = true;
          f = fn;
          break;
        }
      }
    }

    bool pinned_now = false;
    const Eigen::VectorXd n_check = ev.amounts(accepted ? next.eps : cur.eps);
    for (Eigen::Index k = 0; k < L.species; ++k) {
      if (!pinned[static_cast<std::size_t>(k)] && n_check[k] < pin_floor) {
        pinned[static_cast<std::size_t>(k)] = true;
        pinned_now = true;
      }
    }
    if (accepted)
      cur = next;
    if (pinned_now) {
      // project onto the face where the newly pinned amounts vanish exactly
      std::vector<Eigen::Index> rows;
      for (Eigen::Index k = 0; k < L.species; ++k)
        if (pinned[static_cast<std::size_t>(k)] && !structural[static_cast<std::size_t>(k)])
          rows.push_back(k);
      Eigen::MatrixXd nuP(static_cast<Eigen::Index>(rows.size()), L.reactions);
      Eigen::VectorXd target(static_cast<Eigen::Index>(rows.size()));
      const Eigen::VectorXd raw = L.n0 + L.nu * cur.eps;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        nuP.row(static_cast<Eigen::Index>(i)) = L.nu.row(rows[i]);
        target[static_cast<Eigen::Index>(i)] = -raw[rows[i]];
      }
      cur.eps += linalg::min_norm_solve(nuP, target);
      ev.set_pinned(pinned);
      red.B = free_directions(L, pinned);
      f = ev.value(cur);
      if (!std::isfinite(f))
        throw EquilibriumNonConvergence("equilibrium: projection onto the boundary left the domain", sol);
      continue;
    }
    if (!accepted)
      break;
  }

  // assemble the solution at the final iterate
  ev.gradient(cur, dSdE, dSdn);
  const Eigen::VectorXd n = ev.amounts(cur.eps);
  sol.iterations = iter;
  sol.entropy = ev.value(cur);
  sol.stationarity = red.dim() ? stationarity_of(red.reduce(dSdE, dSdn, L.nu), dSdE, q) : 0.0;
  sol.converged = sol.stationarity <= opts.tol;
  sol.eps_se.epsilon = Eigen::VectorXd::Zero(L.reactions);
  for (std::size_t i = 0; i < q; ++i) {
    const auto& part = prob.parts[i];
    const Composition c = ev.part_comp(n, i);
    sol.compositions.push_back(c);
    const double E = cur.energies[static_cast<Eigen::Index>(i)];
    sol.energies.push_back(E);
    sol.temperatures.push_back(temperature_of(*part.model, SystemState{E, part.params, c}));
    const auto t = static_cast<Eigen::Index>(part.network.reactions());
    if (t > 0) {
      sol.eps_se.epsilon.segment(L.reaction_offset[i], t) =
        linalg::min_norm_solve(part.network.stoich(), c.amounts() - part.initial.amounts());
      if (part.network.rank() < part.network.reactions())
        sol.degenerate = true;
    }
    for (std::size_t k = 0; k < c.size(); ++k)
      if (pinned[static_cast<std::size_t>(L.species_offset[i]) + k])
        sol.boundary.emplace_back(i, k);
  }
  sol.inverse_temperature = dSdE[static_cast<Eigen::Index>(q) - 1];
  sol.reaction_multipliers = L.reactions > 0 ? (L.nu.transpose() * dSdn).eval() : Eigen::VectorXd();
  if (!sol.converged)
    throw EquilibriumNonConvergence("equilibrium: stationarity " + std::to_string(sol.stationarity) + " after " +
                                      std::to_string(iter) + " iterations",
                                    sol);
  return sol;
}

double equilibrium_residual(const EquilibriumSolution& sol, const EquilibriumProblem& prob)
{
  const auto comps = compositions_at(prob, sol.eps_se);
  double worst = 0.0;
  for (std::size_t i = 0; i < prob.parts.size(); ++i) {
    const auto& part = prob.parts[i];
    if (part.network.reactions() == 0)
      continue;
    const double E = sol.energies.at(i);
    const Eigen::VectorXd dSdn = [&] {
      const Composition& c = comps[i];
      Eigen::VectorXd g(static_cast<Eigen::Index>(c.size()));
      for (std::size_t k = 0; k < c.size(); ++k) {
        const double h = 1e-6 * std::max(1.0, c[k]);
        auto S_at = [&](double nk) {
          Eigen::VectorXd a = c.amounts();
          a[static_cast<Eigen::Index>(k)] = nk;
          return part.model->entropy(E, part.params, Composition(a));
        };
        g[static_cast<Eigen::Index>(k)] =
          c[k] > h ? (S_at(c[k] + h) - S_at(c[k] - h)) / (2.0 * h) : (S_at(c[k] + h) - S_at(c[k])) / h;
      }
      return g;
    }();
    // |sum nu mu| / T with mu = -T dS/dn
    const Eigen::VectorXd affinity = part.network.stoich().transpose() * dSdn;
    worst = std::max(worst, affinity.cwiseAbs().maxCoeff());
  }
  return worst;
}

bool mutual_equilibrium(const MatterModel& model_a, const SystemState& st_a, const MatterModel& model_b,
                        const SystemState& st_b)
{
  const double Ta = temperature_of(model_a, st_a);
  const double Tb = temperature_of(model_b, st_b);
  return std::abs(Ta - Tb) <= 1e-9 * std::max(Ta, Tb);
}

double generalized_force(const MatterModel& model, const SystemState& st, std::size_t j)
{
  if (j >= st.params.size())
    throw DomainError("generalized_force: parameter index out of range");
  const double S = entropy_of(model, st);
  const double beta = st.params[j];
  const double h = 1e-3 * std::max(std::abs(beta), 1e-12);
  return numeric::derivative_5pt(
    [&](double b) {
      Parameters p = st.params;
      p.beta[static_cast<Eigen::Index>(j)] = b;
      return energy_of(model, S, p, st.comp);
    },
    beta, h);
}

double pressure_of(const MatterModel& model, const SystemState& st)
{
  if (st.params.size() == 0)
    throw DomainError("pressure_of: model has no volume parameter");
  return -generalized_force(model, st, 0);
}

double gibbs_residual(const MatterModel& model, const SystemState& st, double dS, const Eigen::VectorXd& dbeta)
{
  if (static_cast<std::size_t>(dbeta.size()) != st.params.size())
    throw DomainError("gibbs_residual: parameter perturbation has wrong size");
  const double S = entropy_of(model, st);
  const double E0 = energy_of(model, S, st.params, st.comp);
  Parameters moved = st.params;
  moved.beta += dbeta;
  const double E1 = energy_of(model, S + dS, moved, st.comp);
  const double hS = 1e-3 * std::max(1.0, std::abs(S));
  const double T =
    numeric::derivative_5pt([&](double s) { return energy_of(model, s, st.params, st.comp); }, S, hS);
  double work = 0.0;
  for (std::size_t j = 0; j < st.params.size(); ++j)
    work += generalized_force(model, st, j) * dbeta[static_cast<Eigen::Index>(j)];
  return std::abs((E1 - E0) - T * dS - work);
}

std::vector<std::vector<std::size_t>> esev_partition(const MatterModel& model, const std::vector<SystemState>& states,
                                                     double rel_tol)
{
  std::vector<std::vector<std::size_t>> classes;
  std::vector<std::pair<double, double>> reps;
  for (std::size_t i = 0; i < states.size(); ++i) {
    const double E = states[i].energy;
    const double S = entropy_of(model, states[i]);
    bool placed = false;
    for (std::size_t c = 0; c < classes.size(); ++c) {
      const auto [Ec, Sc] = reps[c];
      if (std::abs(E - Ec) <= rel_tol * std::max(1.0, std::abs(Ec)) &&
          std::abs(S - Sc) <= rel_tol * std::max(1.0, std::abs(Sc))) {
        classes[c].push_back(i);
        placed = true;
        break;
      }
    }
    if (!placed) {
      classes.push_back({i});
      reps.emplace_back(E, S);
    }
  }
  return classes;
}

} // namespace entrokit
