// The l1-composite objective f(x) = g(x) + gamma*|x|_1 and the
// subdifferential selections consumed by the solvers.

#ifndef L1SUB_OBJECTIVE_HPP
#define L1SUB_OBJECTIVE_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "numerics.hpp"

namespace l1sub {

/// Smooth part g, its gradient, the l1 weight and the curvature constants
/// of g. Immutable once built, so it can be shared between concurrent runs.
class CompositeObjective {
 public:
  using ValueFn = std::function<double(std::span<const double>)>;
  using GradFn = std::function<Vector(std::span<const double>)>;

  CompositeObjective(std::size_t dim, ValueFn eval_g, GradFn grad_g, double gamma,
                     double lipschitz, std::optional<double> mu = std::nullopt)
      : dim_(dim),
        eval_g_(std::move(eval_g)),
        grad_g_(std::move(grad_g)),
        gamma_(gamma),
        lipschitz_(lipschitz),
        mu_(mu) {
    if (dim_ == 0) throw std::invalid_argument("CompositeObjective: dim must be >= 1");
    if (!(gamma_ >= 0.0)) throw std::invalid_argument("CompositeObjective: gamma must be >= 0");
    if (!(lipschitz_ > 0.0))
      throw std::invalid_argument("CompositeObjective: Lipschitz constant must be > 0");
    if (mu_ && !(*mu_ > 0.0 && *mu_ <= lipschitz_))
      throw std::invalid_argument("CompositeObjective: requires 0 < mu <= L");
  }

  std::size_t dim() const { return dim_; }
  double gamma() const { return gamma_; }
  double lipschitz() const { return lipschitz_; }
  std::optional<double> mu() const { return mu_; }

  double g(std::span<const double> x) const {
    require_same_size(x.size(), dim_, "CompositeObjective::g");
    return eval_g_(x);
  }

  Vector grad_g(std::span<const double> x) const {
    require_same_size(x.size(), dim_, "CompositeObjective::grad_g");
    return grad_g_(x);
  }

  /// The same objective with a different l1 weight.
  CompositeObjective with_gamma(double gamma) const {
    return CompositeObjective(dim_, eval_g_, grad_g_, gamma, lipschitz_, mu_);
  }

  /// Wraps the gradient so that every call bumps *counter. Test hook.
  CompositeObjective with_gradient_counter(std::shared_ptr<std::size_t> counter) const {
    GradFn inner = grad_g_;
    return CompositeObjective(
        dim_, eval_g_,
        [inner, counter](std::span<const double> x) {
          ++*counter;
          return inner(x);
        },
        gamma_, lipschitz_, mu_);
  }

 private:
  std::size_t dim_;
  ValueFn eval_g_;
  GradFn grad_g_;
  double gamma_;
  double lipschitz_;
  std::optional<double> mu_;
};

inline double f_value(const CompositeObjective& obj, std::span<const double> x) {
  return obj.g(x) + obj.gamma() * norm1(x);
}

/// Sign pattern of a point. Zero means exactly 0.0.
struct Partition {
  std::vector<std::size_t> alpha_plus;
  std::vector<std::size_t> alpha_minus;
  std::vector<std::size_t> beta;
};

inline Partition partition(std::span<const double> x) {
  Partition p;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0)
      p.alpha_plus.push_back(i);
    else if (x[i] < 0.0)
      p.alpha_minus.push_back(i);
    else
      p.beta.push_back(i);
  }
  return p;
}

inline double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

/// sign(a*b) computed from the factor signs, so tiny products never
/// underflow into the wrong class.
inline int sign_of_product(double a, double b) {
  return static_cast<int>(sign(a)) * static_cast<int>(sign(b));
}

/// Minimal-norm subgradient component given the partial derivative of g.
inline double min_norm_component(double xi, double dgi, double gamma) {
  if (xi != 0.0) return dgi + gamma * sign(xi);
  return sign(dgi) * std::max(std::abs(dgi) - gamma, 0.0);
}

/// Minimal-norm element of the subdifferential, from a precomputed grad g(x).
inline Vector min_norm_subgradient_from_gradient(std::span<const double> x,
                                                 std::span<const double> grad, double gamma) {
  require_same_size(x.size(), grad.size(), "min_norm_subgradient");
  Vector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = min_norm_component(x[i], grad[i], gamma);
  return out;
}

/// Minimal-norm element of the subdifferential of f at x. One gradient call.
inline Vector min_norm_subgradient(const CompositeObjective& obj, std::span<const double> x) {
  const Vector grad = obj.grad_g(x);
  return min_norm_subgradient_from_gradient(x, grad, obj.gamma());
}

/// Gradient at q' of the smooth function that agrees with f on the orthant
/// face shared by q and q'. Requires sign(q_i * q'_i) >= 0 for all i.
inline Vector directional_subgradient_from_gradient(std::span<const double> q,
                                                    std::span<const double> q_prime,
                                                    std::span<const double> grad_at_q_prime,
                                                    double gamma) {
  require_same_size(q.size(), q_prime.size(), "directional_subgradient");
  require_same_size(q.size(), grad_at_q_prime.size(), "directional_subgradient");
  Vector out(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (sign_of_product(q[i], q_prime[i]) < 0)
      throw std::logic_error("directional_subgradient: q and q' have opposite signs at index " +
                             std::to_string(i));
    if (q[i] > 0.0 || q_prime[i] > 0.0)
      out[i] = grad_at_q_prime[i] + gamma;
    else if (q[i] < 0.0 || q_prime[i] < 0.0)
      out[i] = grad_at_q_prime[i] - gamma;
    else
      out[i] = grad_at_q_prime[i];
  }
  return out;
}

inline Vector directional_subgradient(const CompositeObjective& obj, std::span<const double> q,
                                      std::span<const double> q_prime) {
  require_same_size(q.size(), obj.dim(), "directional_subgradient");
  const Vector grad = obj.grad_g(q_prime);
  return directional_subgradient_from_gradient(q, q_prime, grad, obj.gamma());
}

/// Proximal operator of tau*|.|_1.
inline Vector soft_threshold(std::span<const double> z, double tau) {
  Vector out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i)
    out[i] = sign(z[i]) * std::max(std::abs(z[i]) - tau, 0.0);
  return out;
}

}  // namespace l1sub

#endif  // L1SUB_OBJECTIVE_HPP
