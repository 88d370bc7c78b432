// Executable property suites: linear rate, per-iteration dominance of the
// momentum method, minimal-norm subgradient oracle agreement, the
// nonsmooth PL inequality, anti-oscillation, gradient checks and monotone
// decrease. Each suite is deterministic given its options.

#ifndef L1SUB_VERIFY_HPP
#define L1SUB_VERIFY_HPP

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "bench.hpp"
#include "numerics.hpp"
#include "objective.hpp"
#include "oracles.hpp"
#include "problems.hpp"
#include "solvers.hpp"

namespace l1sub::verify {

struct PropertyReport {
  std::string name;
  bool passed = false;
  // Worst observed value of measured/allowed; <= 1 means within tolerance.
  double margin = 0.0;
  std::int64_t checks = 0;
  std::string detail;
  double seconds = 0.0;
};

namespace detail {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline void finish(PropertyReport& r, const Stopwatch& sw) {
  r.seconds = sw.seconds();
  r.passed = r.passed && std::isfinite(r.margin) && r.margin <= 1.0;
}

/// Random point with roughly a third of the entries exactly zero.
inline Vector sparse_point(Rng& rng, std::size_t n, double scale) {
  Vector x(n);
  for (auto& xi : x) xi = bernoulli(rng, 1.0 / 3.0) ? 0.0 : gaussian(rng, 0.0, scale);
  return x;
}

}  // namespace detail

struct RateOptions {
  int instances = 20;
  std::size_t n = 50;
  double mu = 1.0;
  double lipschitz = 10.0;
  std::int64_t iters = 500;
  double slack = 1e-9;
  std::uint64_t base_seed = 1000;
};

/// f(x^k) - f* <= kappa^k (f(x^0) - f*) with kappa = (1 + mu/L)^-1 for the
/// constant-step method at h = 1/L on quadratics with planted mu and L.
/// The slack is relative to the objective scale: slack * (1 + |f*|).
inline PropertyReport rate(const RateOptions& opt = {}) {
  detail::Stopwatch sw;
  PropertyReport rep{"rate", true, 0.0, 0, {}, 0.0};
  const double kappa = std::max(1.0 - opt.mu / opt.lipschitz, 1.0 / (1.0 + opt.mu / opt.lipschitz));
  std::int64_t strict_violations = 0;
  double worst_strict_gap = 0.0;  // largest f - f* among those violations
  int uncertified = 0;
  for (int t = 0; t < opt.instances; ++t) {
    Rng rng(opt.base_seed + static_cast<std::uint64_t>(t));
    QuadraticOptions qo;
    qo.eig_lo = opt.mu;
    qo.eig_hi = opt.lipschitz;
    qo.pin_extremes = true;
    const ProblemInstance inst = make_quadratic(opt.n, rng, qo);
    const ReferenceResult ref = reference_optimum(inst, {}, false);
    if (!ref.certified) ++uncertified;
    SolverConfig sc;
    sc.method = Method::alg1;
    sc.max_iter = opt.iters;
    const IterationTrace trace = run(inst.objective, inst.x0, sc);
    double fstar = ref.value;
    for (const auto& r : trace.records) fstar = std::min(fstar, r.f_value);
    const double gap0 = trace.records.front().f_value - fstar;
    const double tol = opt.slack * (1.0 + std::abs(fstar));
    for (const auto& r : trace.records) {
      const double bound = std::pow(kappa, static_cast<double>(r.k)) * gap0;
      const double lhs = r.f_value - fstar;
      rep.margin = std::max(rep.margin, lhs <= 0.0 ? 0.0 : lhs / (bound + tol));
      if (lhs > bound * (1.0 + opt.slack)) {
        ++strict_violations;
        worst_strict_gap = std::max(worst_strict_gap, lhs);
      }
      ++rep.checks;
    }
  }
  rep.passed = uncertified == 0;
  std::ostringstream os;
  os << "kappa=" << kappa << " instances=" << opt.instances << " iters=" << opt.iters
     << " uncertified_refs=" << uncertified
     << " multiplicative_slack_violations=" << strict_violations
     << " largest_gap_among_them=" << worst_strict_gap;
  rep.detail = os.str();
  detail::finish(rep, sw);
  return rep;
}

struct DominanceOptions {
  int instances = 100;  // split evenly over the four large families
  std::int64_t iters = 300;
  double slack = 1e-12;
  std::uint64_t base_seed = 2000;
};

inline ProblemInstance reduced_instance(int family, Rng& rng) {
  switch (family % 4) {
    case 0: return make_quadratic(100, rng);
    case 1: return make_lasso(200, 100, rng);
    case 2: return make_logistic(200, 100, rng);
    default: return make_logsumexp(200, 100, 5.0, rng);
  }
}

/// Within every iteration of the momentum method, f(q') <= f(q) where q is
/// the plain subgradient-method point; also q' never flips a strict sign.
inline PropertyReport dominance(const DominanceOptions& opt = {}) {
  detail::Stopwatch sw;
  PropertyReport rep{"dominance", true, 0.0, 0, {}, 0.0};
  std::int64_t sign_flips = 0, rejected = 0;
  for (int t = 0; t < opt.instances; ++t) {
    Rng rng(opt.base_seed + static_cast<std::uint64_t>(t));
    const ProblemInstance inst = reduced_instance(t, rng);
    const double h = 1.0 / inst.objective.lipschitz();
    SolverState s = initial_state(inst.objective, inst.x0);
    for (std::int64_t k = 0; k < opt.iters; ++k) {
      Alg2Step step = alg2_step(inst.objective, s, h);
      const double allowed = opt.slack * (1.0 + std::abs(step.f_q));
      const double excess = step.state.f_x - step.f_q;
      rep.margin = std::max(rep.margin, excess <= 0.0 ? 0.0 : excess / allowed);
      for (std::size_t i = 0; i < step.q.size(); ++i)
        if (sign_of_product(step.state.x[i], step.q[i]) < 0) ++sign_flips;
      rejected += step.momentum_rejected ? 1 : 0;
      ++rep.checks;
      s = std::move(step.state);
    }
  }
  rep.passed = sign_flips == 0;
  std::ostringstream os;
  os << "instances=" << opt.instances << " iters=" << opt.iters << " sign_flips=" << sign_flips
     << " momentum_rejections=" << rejected;
  rep.detail = os.str();
  detail::finish(rep, sw);
  return rep;
}

struct OracleOptions {
  int points = 200;
  double grid_step = 1e-3;
  double grid_tol = 2e-3;
  double refine_tol = 1e-8;
  double max_gamma = 2.0;
  std::uint64_t base_seed = 3000;
};

inline ProblemInstance tiny_instance(int which, Rng& rng) {
  const std::size_t n = 1 + static_cast<std::size_t>(which % 3);
  switch ((which / 3) % 4) {
    case 0: return make_quadratic(n, rng);
    case 1: return make_logistic(6, n, rng);
    case 2: return make_logsumexp(5, n, 2.0, rng);
    default: return n == 2 ? perturb_2d(rng) : make_lasso(4, n, rng);
  }
}

/// The closed-form minimal-norm subgradient against a grid search and a
/// ternary-search refinement over the free multipliers.
inline PropertyReport subgrad_oracle(const OracleOptions& opt = {}) {
  detail::Stopwatch sw;
  PropertyReport rep{"subgrad-oracle", true, 0.0, 0, {}, 0.0};
  double worst_grid = 0.0, worst_ternary = 0.0;
  int inside = 0, outside = 0;  // off-support components with |dg| <= gamma, > gamma
  for (int p = 0; p < opt.points; ++p) {
    Rng rng(opt.base_seed + static_cast<std::uint64_t>(p));
    ProblemInstance inst = tiny_instance(p, rng);
    const std::size_t n = inst.objective.dim();
    const Vector x = detail::sparse_point(rng, n, 1.0);
    const Vector grad = inst.objective.grad_g(x);
    // The grid resolves nu to grid_step, i.e. the subgradient to
    // gamma * grid_step per coordinate, so gamma stays in [0, 2].
    const double gamma = uniform(rng, 0.0, opt.max_gamma);
    const CompositeObjective obj = inst.objective.with_gamma(gamma);
    for (std::size_t i = 0; i < n; ++i) {
      if (x[i] != 0.0) continue;
      if (std::abs(grad[i]) <= gamma)
        ++inside;
      else
        ++outside;
    }

    const Vector d = min_norm_subgradient(obj, x);
    const Vector grid = oracle::grid_min_norm_subgradient(x, grad, gamma, opt.grid_step);
    const Vector tern = oracle::ternary_min_norm_subgradient(x, grad, gamma);
    const double eg = norm2(axpy(d, -1.0, grid));
    const double et = norm2(axpy(d, -1.0, tern));
    worst_grid = std::max(worst_grid, eg);
    worst_ternary = std::max(worst_ternary, et);
    rep.margin = std::max({rep.margin, eg / opt.grid_tol, et / opt.refine_tol});
    ++rep.checks;
  }
  std::ostringstream os;
  os << "points=" << opt.points << " worst_grid_err=" << worst_grid
     << " worst_ternary_err=" << worst_ternary << " off_support_shrunk_to_zero=" << inside
     << " off_support_shrunk_by_gamma=" << outside;
  rep.detail = os.str();
  rep.passed = inside > 0 && outside > 0;
  detail::finish(rep, sw);
  return rep;
}

struct PLOptions {
  int instances = 10;
  int points_per_instance = 100;
  std::size_t n = 20;
  double slack = 1e-9;
  std::uint64_t base_seed = 4000;
};

/// f(x) - f* <= |d(x)|^2 / (2 mu) on strongly convex quadratics with a
/// certified optimum.
inline PropertyReport pl_inequality(const PLOptions& opt = {}) {
  detail::Stopwatch sw;
  PropertyReport rep{"pl", true, 0.0, 0, {}, 0.0};
  int uncertified = 0;
  for (int t = 0; t < opt.instances; ++t) {
    Rng rng(opt.base_seed + static_cast<std::uint64_t>(t));
    const ProblemInstance inst = make_quadratic(opt.n, rng);
    const ReferenceResult ref = reference_optimum(inst, {}, false);
    if (!ref.certified) ++uncertified;
    const double mu = *inst.objective.mu();
    for (int p = 0; p < opt.points_per_instance; ++p) {
      // Alternate between far points and points near the minimizer that
      // share part of its zero pattern.
      Vector x = detail::sparse_point(rng, opt.n, p % 2 ? 2.0 : 1e-3);
      if (p % 2 == 0)
        for (std::size_t i = 0; i < x.size(); ++i)
          x[i] = (ref.x[i] == 0.0 && bernoulli(rng, 0.5)) ? 0.0 : ref.x[i] + x[i];
      const double lhs = f_value(inst.objective, x) - ref.value;
      const double dn = norm2(min_norm_subgradient(inst.objective, x));
      const double rhs = dn * dn / (2.0 * mu) + opt.slack;
      rep.margin = std::max(rep.margin, lhs <= 0.0 ? 0.0 : lhs / rhs);
      ++rep.checks;
    }
  }
  rep.passed = uncertified == 0;
  rep.detail = "points=" + std::to_string(rep.checks) +
               " uncertified_refs=" + std::to_string(uncertified);
  detail::finish(rep, sw);
  return rep;
}

struct AntiOscillationOptions {
  double mu = 0.01;  // f(x) = mu/2 x^2 + |x|
  double x0 = 0.37;
  std::int64_t reach_within = 5;
  std::int64_t stay_for = 1000;
  std::int64_t classic_iters = 10000;
};

inline CompositeObjective one_dim_quadratic(double mu, double gamma = 1.0) {
  return CompositeObjective(
      1, [mu](std::span<const double> x) { return 0.5 * mu * x[0] * x[0]; },
      [mu](std::span<const double> x) { return Vector{mu * x[0]}; }, gamma, mu, mu);
}

/// The constant-step method lands on 0 exactly and stays; the classical
/// method with the same constant step keeps bouncing at distance > h/4.
inline PropertyReport anti_oscillation(const AntiOscillationOptions& opt = {}) {
  detail::Stopwatch sw;
  PropertyReport rep{"anti-oscillation", true, 0.0, 0, {}, 0.0};
  const CompositeObjective obj = one_dim_quadratic(opt.mu);
  const double h = 1.0 / obj.lipschitz();

  Vector x{opt.x0};
  std::int64_t reached = -1;
  bool stayed = true;
  for (std::int64_t k = 1; k <= opt.reach_within + opt.stay_for; ++k) {
    x = alg1_step(obj, x, h);
    ++rep.checks;
    if (reached < 0 && x[0] == 0.0) reached = k;
    if (reached >= 0 && x[0] != 0.0) stayed = false;
  }

  Vector y{opt.x0};
  double min_abs = std::numeric_limits<double>::infinity();
  for (std::int64_t k = 1; k <= opt.classic_iters; ++k) {
    y = classic_subgrad_step(obj, y, k, h, 0.0);
    min_abs = std::min(min_abs, std::abs(y[0]));
    ++rep.checks;
  }
  rep.passed = reached >= 1 && reached <= opt.reach_within && stayed;
  rep.margin = (h / 4.0) / min_abs;
  std::ostringstream os;
  os << "h=" << h << " alg1_reached_zero_at=" << reached << " stayed=" << stayed
     << " classic_min_abs=" << min_abs << " (h/4=" << h / 4.0 << ")";
  rep.detail = os.str();
  detail::finish(rep, sw);
  return rep;
}

struct GradientOptions {
  int points = 10;
  double eps = 1e-6;
  double tol = 1e-5;
  std::uint64_t base_seed = 5000;
};

/// Analytic gradients of every generator against central differences.
inline PropertyReport gradients(const GradientOptions& opt = {}) {
  detail::Stopwatch sw;
  PropertyReport rep{"gradients", true, 0.0, 0, {}, 0.0};
  std::ostringstream os;
  for (const std::string& label : problem_labels()) {
    Rng rng(opt.base_seed);
    ProblemParams pp;
    if (label == "quadratic") pp.n = 200;
    if (label == "lasso") { pp.m = 100; pp.n = 200; }
    if (label == "logistic") { pp.m = 250; pp.n = 50; }
    if (label == "logsumexp") { pp.k = 250; pp.n = 100; }
    const ProblemInstance inst = make_problem(label, pp, rng);
    double worst = 0.0;
    for (int p = 0; p < opt.points; ++p) {
      const Vector x = gaussian_vector(rng, inst.objective.dim(), 0.0, 1.0);
      worst = std::max(worst, oracle::gradient_relative_error(inst.objective, x, opt.eps));
      ++rep.checks;
    }
    rep.margin = std::max(rep.margin, worst / opt.tol);
    os << label << "=" << worst << ' ';
  }
  rep.detail = os.str();
  detail::finish(rep, sw);
  return rep;
}

struct MonotoneOptions {
  std::int64_t iters = 200;
  double slack = 1e-12;
  std::uint64_t base_seed = 6000;
};

/// alg1, alg2 and ISTA at h = 1/L never increase f.
inline PropertyReport monotone(const MonotoneOptions& opt = {}) {
  detail::Stopwatch sw;
  PropertyReport rep{"monotone", true, 0.0, 0, {}, 0.0};
  for (int family = 0; family < 5; ++family) {
    Rng rng(opt.base_seed + static_cast<std::uint64_t>(family));
    const ProblemInstance inst = family < 4 ? reduced_instance(family, rng) : make_2d();
    for (Method m : {Method::alg1, Method::alg2, Method::ista}) {
      SolverConfig sc;
      sc.method = m;
      sc.max_iter = opt.iters;
      const IterationTrace tr = run(inst.objective, inst.x0, sc);
      for (std::size_t k = 1; k < tr.records.size(); ++k) {
        const double prev = tr.records[k - 1].f_value;
        const double rise = tr.records[k].f_value - prev;
        const double allowed = opt.slack * (1.0 + std::abs(prev));
        rep.margin = std::max(rep.margin, rise <= 0.0 ? 0.0 : rise / allowed);
        ++rep.checks;
      }
    }
  }
  rep.detail = "families=5 methods=alg1,alg2,ista iters=" + std::to_string(opt.iters);
  detail::finish(rep, sw);
  return rep;
}

struct Suite {
  std::string name;
  std::function<PropertyReport()> run;
};

inline const std::vector<Suite>& suites() {
  static const std::vector<Suite> all{
      {"rate", [] { return rate(); }},
      {"dominance", [] { return dominance(); }},
      {"subgrad-oracle", [] { return subgrad_oracle(); }},
      {"pl", [] { return pl_inequality(); }},
      {"anti-oscillation", [] { return anti_oscillation(); }},
      {"gradients", [] { return gradients(); }},
      {"monotone", [] { return monotone(); }},
  };
  return all;
}

}  // namespace l1sub::verify

#endif  // L1SUB_VERIFY_HPP
