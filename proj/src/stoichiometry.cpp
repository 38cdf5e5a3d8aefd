#include "entrokit/stoichiometry.hpp"

#include "entrokit/errors.hpp"

#include <algorithm>
#include <stdexcept>

namespace entrokit {

namespace linalg {

namespace {

Eigen::JacobiSVD<Eigen::MatrixXd> full_svd(const Eigen::MatrixXd& A)
{
  return Eigen::JacobiSVD<Eigen::MatrixXd>(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
}

Eigen::Index numerical_rank(const Eigen::VectorXd& sv)
{
  if (sv.size() == 0 || sv[0] == 0.0)
    return 0;
  const double cutoff = tol_rank * sv[0];
  Eigen::Index r = 0;
  while (r < sv.size() && sv[r] > cutoff)
    ++r;
  return r;
}

} // namespace

Eigen::VectorXd min_norm_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b)
{
  Eigen::VectorXd x = Eigen::VectorXd::Zero(A.cols());
  if (A.rows() == 0 || A.cols() == 0)
    return x;
  auto svd = full_svd(A);
  const auto& sv = svd.singularValues();
  const Eigen::Index r = numerical_rank(sv);
  const Eigen::VectorXd utb = svd.matrixU().leftCols(r).transpose() * b;
  for (Eigen::Index i = 0; i < r; ++i)
    x += svd.matrixV().col(i) * (utb[i] / sv[i]);
  return x;
}

Eigen::MatrixXd null_space(const Eigen::MatrixXd& A)
{
  if (A.cols() == 0)
    return Eigen::MatrixXd(0, 0);
  if (A.rows() == 0)
    return Eigen::MatrixXd::Identity(A.cols(), A.cols());
  auto svd = full_svd(A);
  const Eigen::Index r = numerical_rank(svd.singularValues());
  return svd.matrixV().rightCols(A.cols() - r);
}

Eigen::MatrixXd row_space(const Eigen::MatrixXd& A)
{
  if (A.cols() == 0 || A.rows() == 0)
    return Eigen::MatrixXd(A.cols(), 0);
  auto svd = full_svd(A);
  const Eigen::Index r = numerical_rank(svd.singularValues());
  return svd.matrixV().leftCols(r);
}

} // namespace linalg

NegativeAmount::NegativeAmount(std::size_t index, double value)
  : Error("negative amount " + std::to_string(value) + " for constituent " + std::to_string(index))
  , index_(index)
{
}

Composition::Composition(Eigen::VectorXd amounts)
  : amounts_(std::move(amounts))
{
  for (Eigen::Index i = 0; i < amounts_.size(); ++i) {
    if (!(amounts_[i] >= -tol_neg))
      throw NegativeAmount(static_cast<std::size_t>(i), amounts_[i]);
    if (amounts_[i] < 0.0)
      amounts_[i] = 0.0;
  }
}

Composition::Composition(std::initializer_list<double> amounts)
  : Composition(Eigen::Map<const Eigen::VectorXd>(amounts.begin(), static_cast<Eigen::Index>(amounts.size())))
{
}

Composition Composition::scaled(double factor) const
{
  return Composition(amounts_ * factor);
}

ReactionNetwork::ReactionNetwork(Eigen::MatrixXd stoich, std::vector<std::string> constituents)
  : stoich_(std::move(stoich))
  , names_(std::move(constituents))
{
  if (!names_.empty() && names_.size() != static_cast<std::size_t>(stoich_.rows()))
    throw std::invalid_argument("reaction network: name count does not match constituent rows");
  for (Eigen::Index j = 0; j < stoich_.cols(); ++j)
    if (stoich_.col(j).cwiseAbs().maxCoeff() == 0.0)
      throw std::invalid_argument("reaction network: reaction " + std::to_string(j) + " changes no amount");
}

ReactionNetwork ReactionNetwork::inert(std::size_t constituents)
{
  return ReactionNetwork(Eigen::MatrixXd(static_cast<Eigen::Index>(constituents), 0));
}

std::size_t ReactionNetwork::rank() const
{
  return static_cast<std::size_t>(linalg::row_space(stoich_).cols());
}

Composition apply_reactions(const Composition& n0, const ReactionNetwork& net, const ReactionCoordinates& eps)
{
  if (n0.size() != net.constituents() || static_cast<std::size_t>(eps.epsilon.size()) != net.reactions())
    throw std::invalid_argument("apply_reactions: dimension mismatch");
  if (net.reactions() == 0)
    return n0;
  return Composition(Eigen::VectorXd(n0.amounts() + net.stoich() * eps.epsilon));
}

std::optional<ReactionCoordinates> compatibility(const Composition& n1, const Composition& n2,
                                                 const ReactionNetwork& net)
{
  if (n1.size() != n2.size() || n1.size() != net.constituents())
    throw std::invalid_argument("compatibility: dimension mismatch");
  const Eigen::VectorXd diff = n2.amounts() - n1.amounts();
  ReactionCoordinates eps{linalg::min_norm_solve(net.stoich(), diff)};
  const Eigen::VectorXd residual = (net.reactions() == 0 ? Eigen::VectorXd::Zero(diff.size()).eval()
                                                          : (net.stoich() * eps.epsilon).eval()) -
                                   diff;
  if (residual.size() > 0 && residual.cwiseAbs().maxCoeff() > tol_compat)
    return std::nullopt;
  return eps;
}

Eigen::VectorXd balance_rate(const ReactionNetwork& net, const Eigen::VectorXd& eps_rate,
                             const Eigen::VectorXd& inflow_rate)
{
  if (static_cast<std::size_t>(inflow_rate.size()) != net.constituents() ||
      static_cast<std::size_t>(eps_rate.size()) != net.reactions())
    throw std::invalid_argument("balance_rate: dimension mismatch");
  if (net.reactions() == 0)
    return inflow_rate;
  return inflow_rate + net.stoich() * eps_rate;
}

ElementalSetReport validate_elemental_set(const std::vector<std::size_t>& species, const ReactionNetwork& net)
{
  const std::size_t r = net.constituents();
  std::vector<bool> in_set(r, false);
  for (auto s : species) {
    if (s >= r)
      throw std::out_of_range("validate_elemental_set: species index " + std::to_string(s));
    in_set[s] = true;
  }
  std::vector<Eigen::Index> outside;
  for (std::size_t k = 0; k < r; ++k)
    if (!in_set[k])
      outside.push_back(static_cast<Eigen::Index>(k));

  const Eigen::MatrixXd& nu = net.stoich();
  const Eigen::Index tau = nu.cols();
  Eigen::MatrixXd nu_out(static_cast<Eigen::Index>(outside.size()), tau);
  for (std::size_t i = 0; i < outside.size(); ++i)
    nu_out.row(static_cast<Eigen::Index>(i)) = nu.row(outside[i]);

  ElementalSetReport report;

  // completeness: one unit of each outside constituent, every other outside
  // constituent unchanged, set members free to change
  for (std::size_t i = 0; i < outside.size(); ++i) {
    Eigen::VectorXd target = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(outside.size()));
    target[static_cast<Eigen::Index>(i)] = 1.0;
    const Eigen::VectorXd eps = linalg::min_norm_solve(nu_out, target);
    const double residual = tau == 0 ? 1.0 : (nu_out * eps - target).cwiseAbs().maxCoeff();
    const auto k = static_cast<std::size_t>(outside[i]);
    if (residual > tol_compat)
      report.unreachable.push_back(k);
    else
      report.production.emplace_back(k, eps);
  }
  report.complete = report.unreachable.empty();

  // independence: no combination of reactions acts on the set alone
  report.independent = true;
  if (tau > 0) {
    for (Eigen::Index j = 0; j < tau; ++j) {
      if (nu_out.rows() == 0 || nu_out.col(j).cwiseAbs().maxCoeff() <= tol_compat) {
        report.witness_reaction = static_cast<std::size_t>(j);
        break;
      }
    }
    const Eigen::MatrixXd basis = linalg::null_space(nu_out);
    if (basis.cols() > 0) {
      const Eigen::MatrixXd image = nu * basis;
      const Eigen::MatrixXd dirs = linalg::row_space(image);
      if (dirs.cols() > 0) {
        report.independent = false;
        Eigen::VectorXd eps = basis * dirs.col(0);
        if (report.witness_reaction) {
          eps = Eigen::VectorXd::Zero(tau);
          eps[static_cast<Eigen::Index>(*report.witness_reaction)] = 1.0;
        }
        Eigen::VectorXd column = nu * eps;
        const double scale = column.cwiseAbs().maxCoeff();
        report.witness_epsilon = eps / scale;
        report.witness_column = column / scale;
      }
    }
  }
  return report;
}

} // namespace entrokit
