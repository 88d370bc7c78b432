// Seeded generators for the benchmark problem families. Each generator
// documents its draw order; an instance is reproducible from its
// parameters and seed alone.

#ifndef L1SUB_PROBLEMS_HPP
#define L1SUB_PROBLEMS_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "numerics.hpp"
#include "objective.hpp"

namespace l1sub {

struct NamedMatrix {
  std::string name;
  Matrix values;
};

struct ProblemInstance {
  CompositeObjective objective;
  Vector x0;
  std::string label;
  std::optional<double> f_ref;
  std::optional<double> mu_known;
  std::optional<Vector> x_star;
  std::vector<NamedMatrix> data;  // for instance dumps only
};

namespace detail {

inline Matrix column_one(std::span<const double> v) {
  Matrix m(v.size(), 1);
  for (std::size_t i = 0; i < v.size(); ++i) m(i, 0) = v[i];
  return m;
}

/// Numerically stable log(1 + exp(u)).
inline double softplus(double u) { return std::max(u, 0.0) + std::log1p(std::exp(-std::abs(u))); }

/// Numerically stable 1 / (1 + exp(-u)).
inline double sigmoid(double u) {
  if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
  const double e = std::exp(u);
  return e / (1.0 + e);
}

inline void require_positive(std::size_t v, const char* what) {
  if (v == 0) throw std::invalid_argument(std::string(what) + " must be >= 1");
}

}  // namespace detail

struct QuadraticOptions {
  double eig_lo = 0.02;
  double eig_hi = 100.0;
  bool pin_extremes = false;  // force eigenvalues eig_lo and eig_hi to appear
  double b_std = 4.0;
  double x0_std = 2.0;
};

/// f(x) = 1/2 x^T M x + b^T x + gamma |x|_1 with M = Q diag(lambda) Q^T.
/// Draw order: Q, lambda, b, x0. gamma = 0.25 |b|_inf.
inline ProblemInstance make_quadratic(std::size_t n, Rng& rng, const QuadraticOptions& opt = {}) {
  detail::require_positive(n, "quadratic: n");
  if (!(opt.eig_lo > 0.0 && opt.eig_lo <= opt.eig_hi))
    throw std::invalid_argument("quadratic: need 0 < eig_lo <= eig_hi");
  const Matrix q = random_orthogonal(n, rng);
  Vector lambda(n);
  for (auto& l : lambda) l = uniform(rng, opt.eig_lo, opt.eig_hi);
  if (opt.pin_extremes) {
    lambda[0] = opt.eig_lo;
    if (n > 1) lambda[1] = opt.eig_hi;
  }
  Vector b = gaussian_vector(rng, n, 0.0, opt.b_std);
  Vector x0 = gaussian_vector(rng, n, 0.0, opt.x0_std);

  auto m = std::make_shared<Matrix>(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto qi = q.row(i);
    for (std::size_t j = i; j < n; ++j) {
      const auto qj = q.row(j);
      double s = 0.0;
      for (std::size_t l = 0; l < n; ++l) s += qi[l] * lambda[l] * qj[l];
      (*m)(i, j) = s;
      (*m)(j, i) = s;
    }
  }
  const double lmax = *std::max_element(lambda.begin(), lambda.end());
  const double lmin = *std::min_element(lambda.begin(), lambda.end());
  const double gamma = 0.25 * norm_inf(b);
  auto bp = std::make_shared<Vector>(b);

  CompositeObjective obj(
      n,
      [m, bp](std::span<const double> x) {
        const Vector mx = matvec(*m, x);
        return 0.5 * dot(x, mx) + dot(*bp, x);
      },
      [m, bp](std::span<const double> x) {
        Vector g = matvec(*m, x);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += (*bp)[i];
        return g;
      },
      gamma, lmax, lmin);

  ProblemInstance inst{std::move(obj), std::move(x0), "quadratic", std::nullopt, lmin,
                       std::nullopt, {}};
  inst.data.push_back({"M", *m});
  inst.data.push_back({"b", detail::column_one(b)});
  return inst;
}

struct LassoOptions {
  double support_prob = 0.3;
  double sigma_lo = 1.0;
  double sigma_hi = 10.0;
  double noise_std = 0.1;
  double gamma = 1.0;
  double x0_std = 2.0;
};

/// f(x) = 1/2 |Ax - b|^2 + gamma |x|_1, A = U diag(sigma) V^T, b = A y + w.
/// Draw order: y (per entry: Bernoulli then, if kept, U[0,1]), U, V, sigma,
/// w, x0.
inline ProblemInstance make_lasso(std::size_t m, std::size_t n, Rng& rng,
                                  const LassoOptions& opt = {}) {
  detail::require_positive(m, "lasso: m");
  detail::require_positive(n, "lasso: n");
  Vector y(n, 0.0);
  for (auto& yi : y)
    if (bernoulli(rng, opt.support_prob)) yi = uniform(rng, 0.0, 1.0);
  const Matrix u = random_orthogonal(m, rng);
  const Matrix v = random_orthogonal(n, rng);
  const std::size_t r = std::min(m, n);
  Vector sigma(r);
  for (auto& s : sigma) s = uniform(rng, opt.sigma_lo, opt.sigma_hi);
  Vector w = gaussian_vector(rng, m, 0.0, opt.noise_std);
  Vector x0 = gaussian_vector(rng, n, 0.0, opt.x0_std);

  auto a = std::make_shared<Matrix>(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    auto ai = a->row(i);
    for (std::size_t l = 0; l < r; ++l) {
      const double c = u(i, l) * sigma[l];
      for (std::size_t j = 0; j < n; ++j) ai[j] += c * v(j, l);
    }
  }
  auto b = std::make_shared<Vector>(matvec(*a, y));
  for (std::size_t i = 0; i < m; ++i) (*b)[i] += w[i];

  const double smax = *std::max_element(sigma.begin(), sigma.end());
  const double smin = *std::min_element(sigma.begin(), sigma.end());
  std::optional<double> mu;
  if (m >= n) mu = smin * smin;

  CompositeObjective obj(
      n,
      [a, b](std::span<const double> x) {
        Vector res = matvec(*a, x);
        for (std::size_t i = 0; i < res.size(); ++i) res[i] -= (*b)[i];
        return 0.5 * dot(res, res);
      },
      [a, b](std::span<const double> x) {
        Vector res = matvec(*a, x);
        for (std::size_t i = 0; i < res.size(); ++i) res[i] -= (*b)[i];
        return matvec_transposed(*a, res);
      },
      opt.gamma, smax * smax, mu);

  ProblemInstance inst{std::move(obj), std::move(x0), "lasso", std::nullopt, mu, std::nullopt,
                       {}};
  inst.data.push_back({"A", *a});
  inst.data.push_back({"b", detail::column_one(*b)});
  inst.data.push_back({"y", detail::column_one(y)});
  return inst;
}

struct LogisticOptions {
  double zero_prob = 0.8;
  double x0_std = 2.0;
  std::optional<double> gamma;  // default 0.25 |grad g(0)|_inf
};

/// g(x) = sum_i (1 - b_i) <M_i, x> + log(1 + exp(-<M_i, x>)) with labels
/// b_i ~ Bernoulli(1 / (1 + exp(-<M_i, x_real>))).
/// Draw order: x_real (per entry: Bernoulli zero test then, if nonzero,
/// N(0,1)), M, b, x0.
inline ProblemInstance make_logistic(std::size_t m, std::size_t n, Rng& rng,
                                     const LogisticOptions& opt = {}) {
  detail::require_positive(m, "logistic: m");
  detail::require_positive(n, "logistic: n");
  Vector x_real(n, 0.0);
  for (auto& xi : x_real)
    if (!bernoulli(rng, opt.zero_prob)) xi = gaussian(rng, 0.0, 1.0);
  auto mat = std::make_shared<Matrix>(gaussian_matrix(rng, m, n, 0.0, 1.0));
  const Vector t_real = matvec(*mat, x_real);
  auto labels = std::make_shared<Vector>(m);
  for (std::size_t i = 0; i < m; ++i)
    (*labels)[i] = bernoulli(rng, detail::sigmoid(t_real[i])) ? 1.0 : 0.0;
  Vector x0 = gaussian_vector(rng, n, 0.0, opt.x0_std);

  auto eval = [mat, labels](std::span<const double> x) {
    const Vector t = matvec(*mat, x);
    double s = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i)
      s += (1.0 - (*labels)[i]) * t[i] + detail::softplus(-t[i]);
    return s;
  };
  auto grad = [mat, labels](std::span<const double> x) {
    Vector t = matvec(*mat, x);
    for (std::size_t i = 0; i < t.size(); ++i)
      t[i] = (1.0 - (*labels)[i]) - detail::sigmoid(-t[i]);
    return matvec_transposed(*mat, t);
  };

  const Vector g0 = grad(Vector(n, 0.0));
  const double gamma = opt.gamma ? *opt.gamma : 0.25 * norm_inf(g0);
  const double smax = spectral_norm(*mat, 1e-13, 100000).value;

  CompositeObjective obj(n, eval, grad, gamma, 0.25 * smax * smax);
  ProblemInstance inst{std::move(obj), std::move(x0), "logistic", std::nullopt, std::nullopt,
                       std::nullopt, {}};
  inst.data.push_back({"M", *mat});
  inst.data.push_back({"b", detail::column_one(*labels)});
  inst.data.push_back({"x_real", detail::column_one(x_real)});
  return inst;
}

struct LogSumExpOptions {
  double gamma = 1.0;
};

/// g(x) = r log(sum_i exp((<M_i, x> - b_i) / r)), evaluated max-shifted.
/// Draw order: M, b, x0, all N(0,1).
inline ProblemInstance make_logsumexp(std::size_t k, std::size_t n, double r, Rng& rng,
                                      const LogSumExpOptions& opt = {}) {
  detail::require_positive(k, "logsumexp: k");
  detail::require_positive(n, "logsumexp: n");
  if (!(r > 0.0)) throw std::invalid_argument("logsumexp: r must be > 0");
  auto mat = std::make_shared<Matrix>(gaussian_matrix(rng, k, n, 0.0, 1.0));
  auto b = std::make_shared<Vector>(gaussian_vector(rng, k, 0.0, 1.0));
  Vector x0 = gaussian_vector(rng, n, 0.0, 1.0);

  auto scaled = [mat, b, r](std::span<const double> x) {
    Vector z = matvec(*mat, x);
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = (z[i] - (*b)[i]) / r;
    return z;
  };
  auto eval = [scaled, r](std::span<const double> x) {
    const Vector z = scaled(x);
    const double zmax = *std::max_element(z.begin(), z.end());
    double s = 0.0;
    for (double zi : z) s += std::exp(zi - zmax);
    return r * (zmax + std::log(s));
  };
  auto grad = [scaled, mat](std::span<const double> x) {
    Vector z = scaled(x);
    const double zmax = *std::max_element(z.begin(), z.end());
    double s = 0.0;
    for (auto& zi : z) s += (zi = std::exp(zi - zmax));
    for (auto& zi : z) zi /= s;
    return matvec_transposed(*mat, z);
  };

  const double smax = spectral_norm(*mat, 1e-13, 100000).value;
  CompositeObjective obj(n, eval, grad, opt.gamma, smax * smax / r);
  ProblemInstance inst{std::move(obj), std::move(x0), "logsumexp", std::nullopt, std::nullopt,
                       std::nullopt, {}};
  inst.data.push_back({"M", *mat});
  inst.data.push_back({"b", detail::column_one(*b)});
  return inst;
}

inline constexpr double kToyC = 0.85;
inline constexpr double kToyGamma = 1.0;

/// f(x) = 1/2 (x1^2 + 2c x1 x2 + 1.5 x2^2) - 2 x1 + (1 - c) x2 + gamma |x|_1.
/// For gamma = 1 the minimizer is (1, 0) with value -1/2 for every valid c.
inline ProblemInstance make_2d(double c = kToyC, double gamma = kToyGamma,
                               Vector x0 = {0.95, 0.5}) {
  if (!(c * c < 1.5)) throw std::invalid_argument("toy2d: need c^2 < 1.5 for convexity");
  require_same_size(x0.size(), 2, "toy2d x0");
  const double tr = 2.5;
  const double disc = std::sqrt(0.25 + 4.0 * c * c);
  const double l = 0.5 * (tr + disc);
  const double mu = 0.5 * (tr - disc);

  CompositeObjective obj(
      2,
      [c](std::span<const double> x) {
        return 0.5 * (x[0] * x[0] + 2.0 * c * x[0] * x[1] + 1.5 * x[1] * x[1]) - 2.0 * x[0] +
               (1.0 - c) * x[1];
      },
      [c](std::span<const double> x) {
        return Vector{x[0] + c * x[1] - 2.0, c * x[0] + 1.5 * x[1] + (1.0 - c)};
      },
      gamma, l, mu);

  ProblemInstance inst{std::move(obj), std::move(x0), "toy2d", std::nullopt, mu, std::nullopt,
                       {}};
  if (gamma == 1.0) {
    inst.f_ref = -0.5;
    inst.x_star = Vector{1.0, 0.0};
  }
  return inst;
}

/// Gaussian perturbation of c, gamma and x0 with standard deviations 0.1,
/// 0.1 and 0.05. Draw order: c, gamma, x0[0], x0[1]; c is redrawn while it
/// breaks convexity and gamma while negative.
inline ProblemInstance perturb_2d(Rng& rng) {
  double c = gaussian(rng, kToyC, 0.1);
  while (!(c * c < 1.5)) c = gaussian(rng, kToyC, 0.1);
  double gamma = gaussian(rng, kToyGamma, 0.1);
  while (gamma < 0.0) gamma = gaussian(rng, kToyGamma, 0.1);
  Vector x0{gaussian(rng, 0.95, 0.05), gaussian(rng, 0.5, 0.05)};
  ProblemInstance inst = make_2d(c, gamma, std::move(x0));
  inst.label = "toy2d-perturbed";
  inst.f_ref.reset();
  inst.x_star.reset();
  return inst;
}

/// Parameters shared by the CLI and the experiment runner. Zero means
/// "use the family default".
struct ProblemParams {
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t k = 0;
  double r = 5.0;
  std::optional<double> gamma;
};

inline const std::vector<std::string>& problem_labels() {
  static const std::vector<std::string> labels{"quadratic", "lasso",  "logistic",
                                               "logsumexp", "toy2d", "toy2d-perturbed"};
  return labels;
}

/// Builds a problem by label. Defaults follow the published experiment
/// sizes: quadratic n=1000, lasso 500x1000, logistic 500x100,
/// logsumexp 500x200 with r=5.
inline ProblemInstance make_problem(const std::string& label, const ProblemParams& p, Rng& rng) {
  auto pick = [](std::size_t v, std::size_t def) { return v == 0 ? def : v; };
  ProblemInstance inst = [&]() -> ProblemInstance {
    if (label == "quadratic") return make_quadratic(pick(p.n, 1000), rng);
    if (label == "lasso") {
      LassoOptions o;
      if (p.gamma) o.gamma = *p.gamma;
      return make_lasso(pick(p.m, 500), pick(p.n, 1000), rng, o);
    }
    if (label == "logistic") {
      LogisticOptions o;
      o.gamma = p.gamma;
      return make_logistic(pick(p.m, 500), pick(p.n, 100), rng, o);
    }
    if (label == "logsumexp") {
      LogSumExpOptions o;
      if (p.gamma) o.gamma = *p.gamma;
      return make_logsumexp(pick(p.k, 500), pick(p.n, 200), p.r, rng, o);
    }
    if (label == "toy2d") return make_2d(kToyC, p.gamma.value_or(kToyGamma));
    if (label == "toy2d-perturbed") return perturb_2d(rng);
    throw std::invalid_argument("unknown problem '" + label + "'");
  }();
  if (p.gamma && label == "quadratic") inst.objective = inst.objective.with_gamma(*p.gamma);
  return inst;
}

namespace detail {
inline std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
inline std::string fmt_optional(const std::optional<double>& v) {
  return v ? fmt_double(*v) : std::string("none");
}
}  // namespace detail

/// Plain-text instance dump: a key=value header followed by row-major
/// matrix blocks, each introduced by "matrix <name> <rows> <cols>".
inline void dump_instance(std::ostream& os, const ProblemInstance& inst) {
  const auto& obj = inst.objective;
  os << "# l1sub instance v1\n";
  os << "label=" << inst.label << '\n';
  os << "dim=" << obj.dim() << '\n';
  os << "gamma=" << detail::fmt_double(obj.gamma()) << '\n';
  os << "lipschitz=" << detail::fmt_double(obj.lipschitz()) << '\n';
  os << "mu=" << detail::fmt_optional(obj.mu()) << '\n';
  os << "f_ref=" << detail::fmt_optional(inst.f_ref) << '\n';
  std::vector<NamedMatrix> blocks{{"x0", detail::column_one(inst.x0)}};
  blocks.insert(blocks.end(), inst.data.begin(), inst.data.end());
  for (const auto& blk : blocks) {
    os << "matrix " << blk.name << ' ' << blk.values.rows() << ' ' << blk.values.cols() << '\n';
    for (std::size_t i = 0; i < blk.values.rows(); ++i) {
      const auto row = blk.values.row(i);
      for (std::size_t j = 0; j < row.size(); ++j)
        os << (j ? " " : "") << detail::fmt_double(row[j]);
      os << '\n';
    }
  }
}

}  // namespace l1sub

#endif  // L1SUB_PROBLEMS_HPP
