#include "entrokit/numeric.hpp"

#include "entrokit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>
#include <thread>
#include <vector>

namespace entrokit::numeric {

std::size_t thread_count()
{
  std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("ENTROKIT_THREADS")) {
    try {
      const long cap = std::stol(env);
      if (cap >= 1)
        return std::min<std::size_t>(hw, static_cast<std::size_t>(cap));
    } catch (const std::exception&) {
      // ignore malformed values
    }
  }
  return hw;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body)
{
  const std::size_t workers = std::min(thread_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i)
      body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers)
          body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool)
    t.join();
  for (auto& e : errors)
    if (e)
      std::rethrow_exception(e);
}

double find_root(const std::function<double(double)>& f, double lo, double hi, int max_iter)
{
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0)
    return lo;
  if (fhi == 0.0)
    return hi;
  if (std::signbit(flo) == std::signbit(fhi))
    throw RangeError("find_root: no sign change on [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");

  constexpr double eps = std::numeric_limits<double>::epsilon();
  int side = 0;
  for (int it = 0; it < max_iter; ++it) {
    const double width = hi - lo;
    if (std::abs(width) <= 4.0 * eps * std::max(std::abs(lo), std::abs(hi)) + std::numeric_limits<double>::min())
      break;
    double x = (lo * fhi - hi * flo) / (fhi - flo);
    // fall back to bisection when the secant lands outside the middle 98%
    if (!(x > lo + 0.01 * width && x < hi - 0.01 * width) || it % 8 == 7)
      x = 0.5 * (lo + hi);
    const double fx = f(x);
    if (fx == 0.0)
      return x;
    if (std::signbit(fx) == std::signbit(flo)) {
      lo = x;
      flo = fx;
      if (side == -1)
        fhi *= 0.5;
      side = -1;
    } else {
      hi = x;
      fhi = fx;
      if (side == 1)
        flo *= 0.5;
      side = 1;
    }
  }
  return std::abs(flo) < std::abs(fhi) ? lo : hi;
}

} // namespace entrokit::numeric
