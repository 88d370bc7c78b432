#ifndef L1SUB_TESTS_HELPERS_HPP
#define L1SUB_TESTS_HELPERS_HPP

#include <memory>

#include "l1sub/l1sub.hpp"

namespace l1sub::testing {

/// g(x) = 1/2 |x|^2 in any dimension.
inline CompositeObjective half_square(std::size_t n, double gamma) {
  return CompositeObjective(
      n,
      [](std::span<const double> x) { return 0.5 * dot(x, x); },
      [](std::span<const double> x) { return Vector(x.begin(), x.end()); }, gamma, 1.0, 1.0);
}

/// g(x) = <c, x>.
inline CompositeObjective linear(Vector c, double gamma) {
  const std::size_t n = c.size();
  return CompositeObjective(
      n, [c](std::span<const double> x) { return dot(c, x); },
      [c](std::span<const double>) { return c; }, gamma, 1.0);
}

inline CompositeObjective zero_g(std::size_t n, double gamma) {
  return CompositeObjective(
      n, [](std::span<const double>) { return 0.0; },
      [n](std::span<const double>) { return Vector(n, 0.0); }, gamma, 1.0);
}

struct Counted {
  CompositeObjective obj;
  std::shared_ptr<std::size_t> calls;
};

inline Counted counted(const CompositeObjective& obj) {
  auto calls = std::make_shared<std::size_t>(0);
  return {obj.with_gradient_counter(calls), calls};
}

}  // namespace l1sub::testing

#endif  // L1SUB_TESTS_HELPERS_HPP
