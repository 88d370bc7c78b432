// Constant-step subgradient method with crossing control, its conservative
// momentum variant with adaptive restart, and the baselines they are
// compared against (ISTA, FISTA with gradient restart, classical
// subgradient with a decaying step).

#ifndef L1SUB_SOLVERS_HPP
#define L1SUB_SOLVERS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "numerics.hpp"
#include "objective.hpp"

namespace l1sub {

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require_finite(std::span<const double> v, const char* where) {
  if (!all_finite(v)) throw NumericalError(std::string("non-finite value at ") + where);
}

inline void require_positive_step(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("step size must be > 0");
}

}  // namespace detail

/// Everything the subgradient phase computes, kept for instrumentation and
/// for reuse by the momentum method.
struct SubgradientPhase {
  Vector next;          // the returned point
  double f_next = 0.0;  // f(next)
  bool crossed = false;
  std::vector<std::size_t> crossing;  // I, only when crossed
  Vector x_prime;                     // x with I zeroed, only when crossed
  Vector x_double_prime;              // x' + v'', only when crossed
  bool chose_x_prime = false;
};

/// One iteration of the constant-step subgradient method. `grad_x` may
/// carry a precomputed grad g(x) to save one evaluation.
inline SubgradientPhase subgradient_phase(const CompositeObjective& obj,
                                          std::span<const double> x, double h,
                                          std::span<const double> grad_x = {}) {
  require_same_size(x.size(), obj.dim(), "subgradient step");
  detail::require_positive_step(h);
  const double gamma = obj.gamma();
  const std::size_t n = x.size();

  const Vector d = grad_x.empty() ? min_norm_subgradient(obj, x)
                                  : min_norm_subgradient_from_gradient(x, grad_x, gamma);
  Vector x_temp = axpy(x, -h, d);
  detail::require_finite(x_temp, "x_temp = x - h*d(x)");

  SubgradientPhase out;
  for (std::size_t i = 0; i < n; ++i)
    if (sign_of_product(x_temp[i], x[i]) < 0) out.crossed = true;

  if (!out.crossed) {
    out.f_next = f_value(obj, x_temp);
    out.next = std::move(x_temp);
    return out;
  }

  // I includes components that are zero before or after the step.
  Vector x_prime(x.begin(), x.end());
  for (std::size_t i = 0; i < n; ++i) {
    if (sign_of_product(x_temp[i], x[i]) <= 0) {
      out.crossing.push_back(i);
      x_prime[i] = 0.0;
    }
  }
  const Vector grad_prime = obj.grad_g(x_prime);
  Vector x_dd = x_prime;
  std::size_t c = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (c < out.crossing.size() && out.crossing[c] == i) {
      x_dd[i] += -h * min_norm_component(x_prime[i], grad_prime[i], gamma);
      ++c;
    } else {
      x_dd[i] += -h * d[i];
    }
  }
  detail::require_finite(x_dd, "x'' = x' + v''");

  const double f_prime = f_value(obj, x_prime);
  const double f_dd = f_value(obj, x_dd);
  out.chose_x_prime = f_prime < f_dd;
  out.next = out.chose_x_prime ? x_prime : x_dd;
  out.f_next = out.chose_x_prime ? f_prime : f_dd;
  out.x_prime = std::move(x_prime);
  out.x_double_prime = std::move(x_dd);
  return out;
}

inline Vector alg1_step(const CompositeObjective& obj, std::span<const double> x, double h) {
  return subgradient_phase(obj, x, h).next;
}

struct SolverState {
  Vector x;
  Vector p;  // momentum; only the accelerated method uses it
  std::int64_t k = 0;
  double f_x = 0.0;
  Vector grad_x;  // grad g(x) when already known, otherwise empty
};

inline SolverState initial_state(const CompositeObjective& obj, std::span<const double> x0) {
  require_same_size(x0.size(), obj.dim(), "initial_state");
  SolverState s;
  s.x.assign(x0.begin(), x0.end());
  s.p.assign(x0.size(), 0.0);
  s.f_x = f_value(obj, x0);
  return s;
}

struct Alg2Step {
  SolverState state;  // x = q'
  Vector q;           // the plain subgradient-method point
  double f_q = 0.0;
  bool momentum_rejected = false;  // r > 0 branch
  bool sign_clipped = false;       // some component of q' was clipped to zero
};

/// One iteration of the accelerated conservative method.
inline Alg2Step alg2_step(const CompositeObjective& obj, const SolverState& state, double h) {
  const std::size_t n = obj.dim();
  require_same_size(state.x.size(), n, "alg2_step");
  require_same_size(state.p.size(), n, "alg2_step momentum");
  detail::require_positive_step(h);
  const double sqrt_h = std::sqrt(h);

  Vector p = state.p;
  SubgradientPhase phase = subgradient_phase(obj, state.x, h, state.grad_x);

  Vector q_old;
  if (!phase.crossed) {
    q_old = state.x;
    for (std::size_t i = 0; i < n; ++i)
      if (phase.next[i] == 0.0) p[i] = 0.0;
  } else {
    for (std::size_t i : phase.crossing) p[i] = 0.0;
    q_old = phase.x_prime;
    if (phase.chose_x_prime) std::fill(p.begin(), p.end(), 0.0);
  }
  const Vector& q = phase.next;

  Alg2Step out;
  Vector q_prime = axpy(q, sqrt_h, p);
  detail::require_finite(q_prime, "q' = q + sqrt(h)*p");

  bool any_flip = false;
  for (std::size_t i = 0; i < n; ++i) any_flip |= sign_of_product(q_prime[i], q[i]) < 0;
  if (any_flip) {
    for (std::size_t i = 0; i < n; ++i)
      if (sign_of_product(q_prime[i], q[i]) < 0) q_prime[i] = 0.0;
    for (std::size_t i = 0; i < n; ++i) p[i] = (q_prime[i] - q[i]) / sqrt_h;
    out.sign_clipped = true;
  }

  const bool zero_momentum = std::all_of(p.begin(), p.end(), [](double v) { return v == 0.0; });
  Vector grad_q_prime;
  double r = 0.0;
  if (!zero_momentum) {
    grad_q_prime = obj.grad_g(q_prime);
    r = dot(directional_subgradient_from_gradient(q, q_prime, grad_q_prime, obj.gamma()), p);
  }

  SolverState next;
  next.k = state.k + 1;
  if (r <= 0.0) {
    for (std::size_t i = 0; i < n; ++i) p[i] += (q[i] - q_old[i]) / sqrt_h;
    next.f_x = zero_momentum ? phase.f_next : f_value(obj, q_prime);
    next.x = std::move(q_prime);
    next.grad_x = std::move(grad_q_prime);
  } else {
    for (std::size_t i = 0; i < n; ++i) p[i] = (q[i] - q_old[i]) / sqrt_h;
    next.x = q;
    next.f_x = phase.f_next;
    out.momentum_rejected = true;
  }
  detail::require_finite(p, "momentum update");
  next.p = std::move(p);

  out.f_q = phase.f_next;
  out.q = std::move(phase.next);
  out.state = std::move(next);
  return out;
}

/// Forward-backward step: soft_threshold(x - h grad g(x), gamma*h).
inline Vector ista_step(const CompositeObjective& obj, std::span<const double> x, double h) {
  detail::require_positive_step(h);
  const Vector grad = obj.grad_g(x);
  Vector z = axpy(x, -h, grad);
  detail::require_finite(z, "ISTA forward step");
  return soft_threshold(z, obj.gamma() * h);
}

struct FistaState {
  Vector x;
  Vector y;
  double t = 1.0;
  bool restarted = false;  // last step reset the extrapolation
};

inline FistaState fista_init(std::span<const double> x0) {
  return {Vector(x0.begin(), x0.end()), Vector(x0.begin(), x0.end()), 1.0, false};
}

/// FISTA with the gradient-based adaptive restart test.
inline FistaState fista_restart_step(const CompositeObjective& obj, const FistaState& s,
                                     double h) {
  FistaState next;
  next.x = ista_step(obj, s.y, h);
  double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * s.t * s.t));
  double test = 0.0;
  for (std::size_t i = 0; i < next.x.size(); ++i)
    test += (s.y[i] - next.x[i]) * (next.x[i] - s.x[i]);
  if (test > 0.0) {
    next.t = 1.0;
    next.y = next.x;
    next.restarted = true;
  } else {
    const double beta = (s.t - 1.0) / t_next;
    next.y.resize(next.x.size());
    for (std::size_t i = 0; i < next.x.size(); ++i)
      next.y[i] = next.x[i] + beta * (next.x[i] - s.x[i]);
    next.t = t_next;
  }
  return next;
}

inline double classic_step_size(std::int64_t k, double scale, double exponent) {
  if (k < 1) throw std::invalid_argument("classic subgradient: k must be >= 1");
  return scale * std::pow(static_cast<double>(k), -exponent);
}

/// x - h_k d(x) with h_k = scale * k^-exponent and no crossing control.
/// With `normalized`, h_k is a step length: x - h_k d(x) / |d(x)|.
inline Vector classic_subgrad_step(const CompositeObjective& obj, std::span<const double> x,
                                   std::int64_t k, double scale, double exponent,
                                   bool normalized = false) {
  double hk = classic_step_size(k, scale, exponent);
  const Vector d = min_norm_subgradient(obj, x);
  if (normalized) {
    const double dn = norm2(d);
    hk = dn > 0.0 ? hk / dn : 0.0;
  }
  Vector out = axpy(x, -hk, d);
  detail::require_finite(out, "classical subgradient step");
  return out;
}

enum class Method { alg1, alg2, ista, fista_restart, classic_subgrad };

inline std::string_view method_name(Method m) {
  switch (m) {
    case Method::alg1: return "alg1";
    case Method::alg2: return "alg2";
    case Method::ista: return "ista";
    case Method::fista_restart: return "fista";
    case Method::classic_subgrad: return "classic";
  }
  return "?";
}

inline std::optional<Method> parse_method(std::string_view s) {
  for (Method m : {Method::alg1, Method::alg2, Method::ista, Method::fista_restart,
                   Method::classic_subgrad})
    if (s == method_name(m)) return m;
  if (s == "fista_restart") return Method::fista_restart;
  if (s == "classic_subgrad") return Method::classic_subgrad;
  return std::nullopt;
}

struct SolverConfig {
  Method method = Method::alg1;
  std::optional<double> step_h;  // nullopt means 1/L
  std::int64_t max_iter = 1000;
  double classic_step_scale = 10.0;
  double classic_step_exponent = 0.25;
  bool classic_normalized = false;

  void validate() const {
    if (max_iter < 0) throw std::invalid_argument("max_iter must be >= 0");
    if (step_h && !(*step_h > 0.0)) throw std::invalid_argument("step must be > 0");
    if (!(classic_step_scale > 0.0))
      throw std::invalid_argument("classic step scale must be > 0");
  }

  double resolved_step(const CompositeObjective& obj) const {
    return step_h ? *step_h : 1.0 / obj.lipschitz();
  }
};

struct TraceRecord {
  std::int64_t k = 0;
  double f_value = 0.0;
  std::optional<double> gap;
};

struct IterationTrace {
  Method method = Method::alg1;
  std::uint64_t seed = 0;
  std::string problem;
  double h = 0.0;
  std::vector<TraceRecord> records;
  Vector final_x;
};

/// Runs one method for cfg.max_iter iterations and records f(x^k) for
/// k = 0..max_iter. The classical method uses step index k+1 to produce x^{k+1}.
inline IterationTrace run(const CompositeObjective& obj, std::span<const double> x0,
                          const SolverConfig& cfg, std::optional<double> f_ref = std::nullopt,
                          std::string problem = {}, std::uint64_t seed = 0) {
  cfg.validate();
  require_same_size(x0.size(), obj.dim(), "run");
  IterationTrace trace;
  trace.method = cfg.method;
  trace.seed = seed;
  trace.problem = std::move(problem);
  trace.h = cfg.resolved_step(obj);
  trace.records.reserve(static_cast<std::size_t>(cfg.max_iter) + 1);

  auto record = [&](std::int64_t k, double f) {
    TraceRecord r{k, f, std::nullopt};
    if (f_ref) r.gap = f - *f_ref;
    trace.records.push_back(r);
  };

  const double h = trace.h;
  std::int64_t k = 0;
  try {
    switch (cfg.method) {
      case Method::alg2: {
        SolverState s = initial_state(obj, x0);
        record(0, s.f_x);
        for (k = 0; k < cfg.max_iter; ++k) {
          s = alg2_step(obj, s, h).state;
          record(k + 1, s.f_x);
        }
        trace.final_x = std::move(s.x);
        break;
      }
      case Method::fista_restart: {
        FistaState s = fista_init(x0);
        record(0, f_value(obj, s.x));
        for (k = 0; k < cfg.max_iter; ++k) {
          s = fista_restart_step(obj, s, h);
          record(k + 1, f_value(obj, s.x));
        }
        trace.final_x = std::move(s.x);
        break;
      }
      default: {
        Vector x(x0.begin(), x0.end());
        record(0, f_value(obj, x));
        for (k = 0; k < cfg.max_iter; ++k) {
          double f = 0.0;
          if (cfg.method == Method::alg1) {
            auto phase = subgradient_phase(obj, x, h);
            x = std::move(phase.next);
            f = phase.f_next;
          } else if (cfg.method == Method::ista) {
            x = ista_step(obj, x, h);
            f = f_value(obj, x);
          } else {
            x = classic_subgrad_step(obj, x, k + 1, cfg.classic_step_scale,
                                     cfg.classic_step_exponent, cfg.classic_normalized);
            f = f_value(obj, x);
          }
          record(k + 1, f);
        }
        trace.final_x = std::move(x);
        break;
      }
    }
  } catch (const NumericalError& e) {
    throw NumericalError(std::string(method_name(cfg.method)) + " iteration " +
                         std::to_string(k) + ": " + e.what());
  }
  if (cfg.method == Method::classic_subgrad) trace.h = cfg.classic_step_scale;
  return trace;
}

}  // namespace l1sub

#endif  // L1SUB_SOLVERS_HPP
