#include "simplex.hpp"

#include <stdexcept>
#include <vector>

namespace entrokit::detail {

LpResult maximize_slack_feasible(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c)
{
  const Eigen::Index m = A.rows();
  const Eigen::Index n = A.cols();
  if (b.size() != m || c.size() != n)
    throw std::invalid_argument("simplex: dimension mismatch");
  if (m > 0 && b.minCoeff() < 0.0)
    throw std::invalid_argument("simplex: right-hand side must be non-negative");

  constexpr double piv_tol = 1e-12;
  // rows 0..m-1 constraints, row m objective; last column rhs
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m + 1, n + m + 1);
  T.topLeftCorner(m, n) = A;
  T.block(0, n, m, m).setIdentity();
  T.topRightCorner(m, 1) = b;
  T.bottomLeftCorner(1, n) = -c.transpose();
  std::vector<Eigen::Index> basis(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i)
    basis[static_cast<std::size_t>(i)] = n + i;

  LpResult out;
  const Eigen::Index cols = n + m;
  int iter = 0;
  for (; iter < 50000; ++iter) {
    Eigen::Index enter = -1;
    for (Eigen::Index j = 0; j < cols; ++j)
      if (T(m, j) < -piv_tol) {
        enter = j;
        break;
      }
    if (enter < 0)
      break;
    Eigen::Index leave = -1;
    double best = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      const double a = T(i, enter);
      if (a <= piv_tol)
        continue;
      const double ratio = T(i, cols) / a;
      if (leave < 0 || ratio < best - 1e-15 ||
          (ratio <= best + 1e-15 && basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])) {
        leave = i;
        best = ratio;
      }
    }
    if (leave < 0) {
      out.status = LpResult::Status::Unbounded;
      return out;
    }
    T.row(leave) /= T(leave, enter);
    for (Eigen::Index i = 0; i <= m; ++i)
      if (i != leave && T(i, enter) != 0.0)
        T.row(i) -= T(i, enter) * T.row(leave);
    basis[static_cast<std::size_t>(leave)] = enter;
  }
  if (iter >= 50000)
    out.status = LpResult::Status::IterationLimit;

  out.x = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < m; ++i)
    if (basis[static_cast<std::size_t>(i)] < n)
      out.x[basis[static_cast<std::size_t>(i)]] = T(i, cols);
  out.objective = c.dot(out.x);
  return out;
}

} // namespace entrokit::detail
