// Brute-force reference computations used by the property suites and the
// tests. None of these share code paths with the solvers they check.

#ifndef L1SUB_ORACLES_HPP
#define L1SUB_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "numerics.hpp"
#include "objective.hpp"

namespace l1sub::oracle {

/// Central finite-difference gradient of g.
inline Vector fd_gradient(const CompositeObjective& obj, std::span<const double> x,
                          double eps = 1e-6) {
  Vector xp(x.begin(), x.end());
  Vector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = xp[i];
    xp[i] = xi + eps;
    const double fp = obj.g(xp);
    xp[i] = xi - eps;
    const double fm = obj.g(xp);
    xp[i] = xi;
    out[i] = (fp - fm) / (2.0 * eps);
  }
  return out;
}

/// Relative 2-norm error |fd - analytic| / max(|analytic|, 1e-12).
inline double gradient_relative_error(const CompositeObjective& obj, std::span<const double> x,
                                      double eps = 1e-6) {
  const Vector fd = fd_gradient(obj, x, eps);
  const Vector an = obj.grad_g(x);
  double err = 0.0;
  for (std::size_t i = 0; i < fd.size(); ++i) err += (fd[i] - an[i]) * (fd[i] - an[i]);
  return std::sqrt(err) / std::max(norm2(an), 1e-12);
}

/// Element of grad g(x) + gamma*nu, nu_i = sign(x_i) on the support and
/// nu_i on a uniform grid over [-1, 1] off it, with least 2-norm. The
/// objective |grad + gamma nu|^2 is a sum of one-variable terms, so the
/// product-grid minimum is found coordinate by coordinate.
inline Vector grid_min_norm_subgradient(std::span<const double> x, std::span<const double> grad,
                                        double gamma, double step = 1e-3) {
  const int cells = static_cast<int>(std::lround(2.0 / step));
  Vector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0) {
      out[i] = grad[i] + gamma;
    } else if (x[i] < 0.0) {
      out[i] = grad[i] - gamma;
    } else {
      double best = grad[i] - gamma;
      for (int c = 0; c <= cells; ++c) {
        const double nu = -1.0 + 2.0 * c / cells;
        const double v = grad[i] + gamma * nu;
        if (std::abs(v) < std::abs(best)) best = v;
      }
      out[i] = best;
    }
  }
  return out;
}

/// Same selection by ternary search on each off-support coordinate.
inline Vector ternary_min_norm_subgradient(std::span<const double> x,
                                           std::span<const double> grad, double gamma,
                                           int rounds = 200) {
  Vector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] != 0.0) {
      out[i] = grad[i] + gamma * (x[i] > 0.0 ? 1.0 : -1.0);
      continue;
    }
    auto cost = [&](double nu) {
      const double v = grad[i] + gamma * nu;
      return v * v;
    };
    double lo = -1.0, hi = 1.0;
    for (int r = 0; r < rounds; ++r) {
      const double m1 = lo + (hi - lo) / 3.0;
      const double m2 = hi - (hi - lo) / 3.0;
      if (cost(m1) <= cost(m2))
        hi = m2;
      else
        lo = m1;
    }
    out[i] = grad[i] + gamma * 0.5 * (lo + hi);
  }
  return out;
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
inline Vector jacobi_eigenvalues(Matrix a, double tol = 1e-14, int max_sweeps = 100) {
  const std::size_t n = a.rows();
  if (n != a.cols()) throw std::invalid_argument("jacobi_eigenvalues: matrix must be square");
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0, total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        total += a(i, j) * a(i, j);
        if (i != j) off += a(i, j) * a(i, j);
      }
    if (off <= tol * tol * total) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  Vector ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

/// Solves A x = b by Gaussian elimination with partial pivoting.
inline Vector dense_solve(Matrix a, Vector b) {
  const std::size_t n = a.rows();
  if (n != a.cols() || n != b.size()) throw std::invalid_argument("dense_solve: bad dimensions");
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
    if (a(piv, k) == 0.0) throw std::runtime_error("dense_solve: singular matrix");
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      std::swap(b[k], b[piv]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = a(i, k) / a(k, k);
      for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
      b[i] -= f * b[k];
    }
  }
  Vector x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
    x[i] = s / a(i, i);
  }
  return x;
}

}  // namespace l1sub::oracle

#endif  // L1SUB_ORACLES_HPP
