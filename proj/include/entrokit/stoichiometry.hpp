#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace entrokit {

inline constexpr double tol_neg = 1e-12;
inline constexpr double tol_compat = 1e-9;
inline constexpr double tol_rank = 1e-10;

/// Amounts of constituents, one entry per single-constituent region.
/// Entries are non-negative; values in [-tol_neg, 0) are snapped to zero.
class Composition
{
public:
  Composition() = default;
  explicit Composition(Eigen::VectorXd amounts);
  Composition(std::initializer_list<double> amounts);

  const Eigen::VectorXd& amounts() const { return amounts_; }
  std::size_t size() const { return static_cast<std::size_t>(amounts_.size()); }
  double operator[](std::size_t i) const { return amounts_[static_cast<Eigen::Index>(i)]; }
  double total() const { return amounts_.sum(); }

  Composition scaled(double factor) const;

  friend bool operator==(const Composition& a, const Composition& b) { return a.amounts_ == b.amounts_; }

private:
  Eigen::VectorXd amounts_;
};

/// Stoichiometric matrix: rows are constituents, columns reaction mechanisms.
class ReactionNetwork
{
public:
  ReactionNetwork() = default;
  /// Throws std::invalid_argument on an all-zero column.
  explicit ReactionNetwork(Eigen::MatrixXd stoich, std::vector<std::string> constituents = {});

  /// Network with r constituents and no reactions.
  static ReactionNetwork inert(std::size_t constituents);

  const Eigen::MatrixXd& stoich() const { return stoich_; }
  std::size_t constituents() const { return static_cast<std::size_t>(stoich_.rows()); }
  std::size_t reactions() const { return static_cast<std::size_t>(stoich_.cols()); }
  const std::vector<std::string>& names() const { return names_; }
  /// Numerical rank of the stoichiometric matrix.
  std::size_t rank() const;

private:
  Eigen::MatrixXd stoich_;
  std::vector<std::string> names_;
};

struct ReactionCoordinates
{
  Eigen::VectorXd epsilon;
};

/// n0 + stoich * eps; throws NegativeAmount if an entry falls below -tol_neg.
Composition apply_reactions(const Composition& n0, const ReactionNetwork& net, const ReactionCoordinates& eps);

/// Minimum-norm reaction coordinates connecting n1 to n2, or nullopt when the
/// difference is outside the column space of the network.
std::optional<ReactionCoordinates> compatibility(const Composition& n1, const Composition& n2,
                                                 const ReactionNetwork& net);

/// Net rate of change of the amounts: inflow + stoich * reaction rates.
Eigen::VectorXd balance_rate(const ReactionNetwork& net, const Eigen::VectorXd& eps_rate,
                             const Eigen::VectorXd& inflow_rate);

struct ElementalSetReport
{
  bool complete = false;
  bool independent = false;
  /// Constituents outside the set that cannot be produced from it.
  std::vector<std::size_t> unreachable;
  /// For each constituent outside the set: reaction coordinates producing one
  /// unit of it while changing only set members (empty when unreachable).
  std::vector<std::pair<std::size_t, Eigen::VectorXd>> production;
  /// When independence fails: reaction coordinates whose net change is
  /// non-zero and supported entirely on the set, and that net change.
  std::optional<Eigen::VectorXd> witness_epsilon;
  std::optional<Eigen::VectorXd> witness_column;
  /// Index of a single reaction column supported on the set, when one exists.
  std::optional<std::size_t> witness_reaction;
};

ElementalSetReport validate_elemental_set(const std::vector<std::size_t>& species, const ReactionNetwork& net);

namespace linalg {

/// Minimum-norm least-squares solution of A x = b with singular values below
/// tol_rank * sigma_max treated as zero.
Eigen::VectorXd min_norm_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

/// Orthonormal basis of the null space of A (columns).
Eigen::MatrixXd null_space(const Eigen::MatrixXd& A);

/// Orthonormal basis of the row space of A (columns).
Eigen::MatrixXd row_space(const Eigen::MatrixXd& A);

} // namespace linalg

} // namespace entrokit
