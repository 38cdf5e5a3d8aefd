#pragma once

#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace entrokit::csv {

/// Shortest text that reads back to the same double (17 significant digits).
std::string format(double x);

using Cell = std::variant<double, long long, std::string>;

/// Header row plus data rows; every row must match the header width.
class Table
{
public:
  explicit Table(std::vector<std::string> header);

  void add(std::vector<Cell> row);
  const std::vector<std::string>& header() const { return header_; }
  std::size_t rows() const { return rows_.size(); }

  void write(std::ostream& out) const;
  /// Writes to a file; throws std::runtime_error when it cannot be opened.
  void write(const std::string& path) const;

private:
  std::vector<std::string> header_;
  std::vector<std::vector<Cell>> rows_;
};

} // namespace entrokit::csv
