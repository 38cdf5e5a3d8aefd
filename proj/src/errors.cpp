#include "entrokit/errors.hpp"

namespace entrokit {

namespace {

std::string located(const std::string& what, int line, int column)
{
  if (line < 0)
    return what;
  std::string out = "line " + std::to_string(line);
  if (column >= 0)
    out += ", column " + std::to_string(column);
  return out + ": " + what;
}

} // namespace

ParseError::ParseError(const std::string& what, int line, int column)
  : Error(located(what, line, column))
  , line_(line)
  , column_(column)
{
}

IntegrityError::IntegrityError(const std::string& what, std::string reference)
  : Error(what + " ('" + reference + "')")
  , reference_(std::move(reference))
{
}

} // namespace entrokit
