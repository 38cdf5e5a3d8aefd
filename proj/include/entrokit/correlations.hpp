#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <string>

namespace entrokit {

/// Discrete joint distribution of a bipartite system AB with per-outcome
/// energies of each subsystem.
class JointState
{
public:
  /// Throws std::invalid_argument unless every p_ij >= 0, the table sums to 1
  /// within 1e-12 and the energy vectors match the table shape.
  JointState(Eigen::MatrixXd table, Eigen::VectorXd energies_a, Eigen::VectorXd energies_b);

  /// Product of two marginals with the given energies.
  static JointState product(const Eigen::VectorXd& pA, const Eigen::VectorXd& pB, Eigen::VectorXd energies_a,
                            Eigen::VectorXd energies_b);

  const Eigen::MatrixXd& table() const { return table_; }
  const Eigen::VectorXd& energies_a() const { return energies_a_; }
  const Eigen::VectorXd& energies_b() const { return energies_b_; }

private:
  Eigen::MatrixXd table_;
  Eigen::VectorXd energies_a_;
  Eigen::VectorXd energies_b_;
};

struct MarginalPair
{
  Eigen::VectorXd pA;
  Eigen::VectorXd pB;
};

MarginalPair marginals(const JointState& j);

/// Shannon entropy in nats, with 0 ln 0 = 0.
/// Accepts a vector or a joint table; sums over every entry.
double shannon(const Eigen::Ref<const Eigen::MatrixXd>& p);

/// sigma = H(pA) + H(pB) - H(p): entropy gained by replacing the joint with
/// the product of its marginals. Non-negative, zero iff uncorrelated.
double decorrelation_entropy(const JointState& j);

/// Expected energy; depends on the marginals only.
double joint_energy(const JointState& j);

/// [H(pA2) - H(pA1)] + [H(pB2) - H(pB1)] - [sigma2 - sigma1].
double entropy_difference_correlated(const JointState& j1, const JointState& j2);

/// The uncorrelated counterpart: product of the marginals, same energies.
JointState decorrelate(const JointState& j);

/// Reads a joint table from CSV. Lines: `eA,<values>`, `eB,<values>`, then
/// one `p,<values>` line per row of the table. `#` starts a comment.
JointState read_joint_csv(std::istream& in);
JointState read_joint_csv(const std::string& path);

} // namespace entrokit
