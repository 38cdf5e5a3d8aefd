#pragma once

#include <Eigen/Dense>

namespace entrokit::detail {

struct LpResult
{
  enum class Status
  {
    Optimal,
    Unbounded,
    IterationLimit,
  };
  Status status = Status::Optimal;
  Eigen::VectorXd x;
  double objective = 0.0;
};

/// maximize c'x subject to A x <= b, x >= 0, with b >= 0 so the slack basis
/// is feasible. Dense tableau, Bland's rule.
LpResult maximize_slack_feasible(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c);

} // namespace entrokit::detail
