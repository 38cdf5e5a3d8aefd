#include "entrokit/correlations.hpp"

#include "entrokit/errors.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace entrokit {

JointState::JointState(Eigen::MatrixXd table, Eigen::VectorXd energies_a, Eigen::VectorXd energies_b)
  : table_(std::move(table))
  , energies_a_(std::move(energies_a))
  , energies_b_(std::move(energies_b))
{
  if (table_.rows() == 0 || table_.cols() == 0)
    throw std::invalid_argument("joint state: empty table");
  if (energies_a_.size() != table_.rows() || energies_b_.size() != table_.cols())
    throw std::invalid_argument("joint state: energy vectors do not match the table shape");
  if (!(table_.minCoeff() >= 0.0))
    throw std::invalid_argument("joint state: negative probability");
  if (std::abs(table_.sum() - 1.0) > 1e-12)
    throw std::invalid_argument("joint state: probabilities do not sum to 1");
}

JointState JointState::product(const Eigen::VectorXd& pA, const Eigen::VectorXd& pB, Eigen::VectorXd energies_a,
                               Eigen::VectorXd energies_b)
{
  return JointState(pA * pB.transpose(), std::move(energies_a), std::move(energies_b));
}

MarginalPair marginals(const JointState& j)
{
  return MarginalPair{j.table().rowwise().sum(), j.table().colwise().sum().transpose()};
}

double shannon(const Eigen::Ref<const Eigen::MatrixXd>& p)
{
  double H = 0.0;
  for (Eigen::Index c = 0; c < p.cols(); ++c)
    for (Eigen::Index r = 0; r < p.rows(); ++r)
      if (const double x = p(r, c); x > 0.0)
        H -= x * std::log(x);
  return H;
}

double decorrelation_entropy(const JointState& j)
{
  // Relative entropy of p to pA pB, summed as q phi(p/q) with
  // phi(r) = r ln r - r + 1 >= 0, so every term is non-negative on its own.
  const auto m = marginals(j);
  const Eigen::MatrixXd& p = j.table();
  double sigma = 0.0;
  for (Eigen::Index i = 0; i < p.rows(); ++i)
    for (Eigen::Index k = 0; k < p.cols(); ++k) {
      const double q = m.pA[i] * m.pB[k];
      if (q == 0.0)
        continue;
      const double d = p(i, k) / q - 1.0;
      const double phi = d == -1.0 ? 1.0 : (1.0 + d) * std::log1p(d) - d;
      sigma += q * std::max(0.0, phi);
    }
  return sigma;
}

double joint_energy(const JointState& j)
{
  const auto m = marginals(j);
  return m.pA.dot(j.energies_a()) + m.pB.dot(j.energies_b());
}

double entropy_difference_correlated(const JointState& j1, const JointState& j2)
{
  const auto m1 = marginals(j1);
  const auto m2 = marginals(j2);
  return (shannon(m2.pA) - shannon(m1.pA)) + (shannon(m2.pB) - shannon(m1.pB)) -
         (decorrelation_entropy(j2) - decorrelation_entropy(j1));
}

JointState decorrelate(const JointState& j)
{
  const auto m = marginals(j);
  Eigen::MatrixXd t = m.pA * m.pB.transpose();
  // renormalize so the product passes the sum-to-one check exactly
  t /= t.sum();
  return JointState(t, j.energies_a(), j.energies_b());
}

namespace {

std::vector<double> parse_values(const std::string& rest, int line_no)
{
  std::vector<double> out;
  std::stringstream ss(rest);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(cell, &used));
    } catch (const std::exception&) {
      throw ParseError("joint csv: bad number '" + cell + "'", line_no);
    }
  }
  return out;
}

} // namespace

JointState read_joint_csv(std::istream& in)
{
  std::vector<double> eA, eB;
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw ParseError("joint csv: expected '<tag>,<values>'", line_no);
    std::string tag = line.substr(0, comma);
    tag.erase(0, tag.find_first_not_of(" \t"));
    tag.erase(tag.find_last_not_of(" \t") + 1);
    auto values = parse_values(line.substr(comma + 1), line_no);
    if (tag == "eA")
      eA = std::move(values);
    else if (tag == "eB")
      eB = std::move(values);
    else if (tag == "p")
      rows.push_back(std::move(values));
    else
      throw ParseError("joint csv: unknown tag '" + tag + "'", line_no);
  }
  if (rows.empty())
    throw ParseError("joint csv: no probability rows");
  Eigen::MatrixXd table(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size())
      throw ParseError("joint csv: ragged probability table");
    for (std::size_t k = 0; k < rows[i].size(); ++k)
      table(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
  }
  if (eA.empty())
    eA.assign(rows.size(), 0.0);
  if (eB.empty())
    eB.assign(rows[0].size(), 0.0);
  try {
    return JointState(table, Eigen::Map<Eigen::VectorXd>(eA.data(), static_cast<Eigen::Index>(eA.size())),
                      Eigen::Map<Eigen::VectorXd>(eB.data(), static_cast<Eigen::Index>(eB.size())));
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("joint csv: ") + e.what());
  }
}

JointState read_joint_csv(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw ParseError("cannot open joint table '" + path + "'");
  return read_joint_csv(in);
}

} // namespace entrokit
