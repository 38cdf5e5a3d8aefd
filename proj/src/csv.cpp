#include "entrokit/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace entrokit::csv {

std::string format(double x)
{
  if (std::isnan(x))
    return "nan";
  if (std::isinf(x))
    return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::string quoted(const std::string& s)
{
  if (s.find_first_of(",\"\n") == std::string::npos)
    return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"')
      out += '"';
    out += c;
  }
  return out + '"';
}

std::string text(const Cell& c)
{
  if (const auto* d = std::get_if<double>(&c))
    return format(*d);
  if (const auto* i = std::get_if<long long>(&c))
    return std::to_string(*i);
  return quoted(std::get<std::string>(c));
}

} // namespace

Table::Table(std::vector<std::string> header)
  : header_(std::move(header))
{
}

void Table::add(std::vector<Cell> row)
{
  if (row.size() != header_.size())
    throw std::invalid_argument("csv: row width " + std::to_string(row.size()) + " does not match header width " +
                                std::to_string(header_.size()));
  rows_.push_back(std::move(row));
}

void Table::write(std::ostream& out) const
{
  for (std::size_t i = 0; i < header_.size(); ++i)
    out << (i ? "," : "") << quoted(header_[i]);
  out << '\n';
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << text(row[i]);
    out << '\n';
  }
}

void Table::write(const std::string& path) const
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot write '" + path + "'");
  write(out);
}

} // namespace entrokit::csv
