#pragma once

#include <cstddef>
#include <functional>

namespace entrokit::numeric {

/// Worker count for parallel loops; honours ENTROKIT_THREADS when set.
std::size_t thread_count();

/// Runs body(i) for i in [0, n) over up to thread_count() workers.
/// Each index is visited exactly once; callers write results by index so
/// assembly order never depends on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// Root of a function that changes sign on [lo, hi].
///
/// Illinois-modified regula falsi with a bisection guard. Iterates until the
/// bracket collapses to a few ulps or an exact zero is hit, so the returned
/// abscissa is as accurate as the function evaluation allows.
double find_root(const std::function<double(double)>& f, double lo, double hi, int max_iter = 400);

inline double central_difference(const std::function<double(double)>& f, double x, double h)
{
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

/// Fourth-order central difference, (8[f(x+h) - f(x-h)] - [f(x+2h) - f(x-2h)]) / 12h.
inline double derivative_5pt(const std::function<double(double)>& f, double x, double h)
{
  return (8.0 * (f(x + h) - f(x - h)) - (f(x + 2.0 * h) - f(x - 2.0 * h))) / (12.0 * h);
}

} // namespace entrokit::numeric
