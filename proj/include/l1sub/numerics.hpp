// Dense linear algebra, seeded randomness and spectral utilities.
//
// Everything here is deliberately small: the solvers only need inner
// products, matrix-vector products, a Householder QR to draw Haar
// orthogonal matrices, and a power iteration for Lipschitz constants.

#ifndef L1SUB_NUMERICS_HPP
#define L1SUB_NUMERICS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace l1sub {

using Vector = std::vector<double>;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Dense row-major matrix with fixed dimensions.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static Matrix from_rows(const std::vector<Vector>& rows) {
    if (rows.empty()) return {};
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != m.cols_)
        throw DimensionError("Matrix::from_rows: ragged rows");
      std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }

  std::span<const double> data() const { return data_; }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Vector data_;
};

inline void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b)
    throw DimensionError(std::string(what) + ": dimension mismatch (" +
                         std::to_string(a) + " vs " + std::to_string(b) + ")");
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  require_same_size(a.size(), b.size(), "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline double norm1(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += std::abs(v);
  return s;
}

inline double norm_inf(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s = std::max(s, std::abs(v));
  return s;
}

inline bool all_finite(std::span<const double> a) {
  return std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); });
}

/// y = M x
inline Vector matvec(const Matrix& m, std::span<const double> x) {
  require_same_size(m.cols(), x.size(), "matvec");
  Vector y(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto r = m.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < r.size(); ++j) s += r[j] * x[j];
    y[i] = s;
  }
  return y;
}

/// y = M^T x
inline Vector matvec_transposed(const Matrix& m, std::span<const double> x) {
  require_same_size(m.rows(), x.size(), "matvec_transposed");
  Vector y(m.cols(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto r = m.row(i);
    const double xi = x[i];
    if (xi == 0.0) continue;
    for (std::size_t j = 0; j < r.size(); ++j) y[j] += r[j] * xi;
  }
  return y;
}

inline Matrix matmul(const Matrix& a, const Matrix& b) {
  require_same_size(a.cols(), b.rows(), "matmul");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto ci = c.row(i);
    for (std::size_t l = 0; l < a.cols(); ++l) {
      const double ail = a(i, l);
      if (ail == 0.0) continue;
      const auto bl = b.row(l);
      for (std::size_t j = 0; j < bl.size(); ++j) ci[j] += ail * bl[j];
    }
  }
  return c;
}

/// Returns a + alpha * b.
inline Vector axpy(std::span<const double> a, double alpha, std::span<const double> b) {
  require_same_size(a.size(), b.size(), "axpy");
  Vector out(a.begin(), a.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += alpha * b[i];
  return out;
}

/// xoshiro256** seeded through splitmix64. The stream depends only on the
/// seed, so traces reproduce bit-for-bit across platforms and languages.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed) {
    std::uint64_t sm = seed;
    for (auto& s : state_) s = splitmix64(sm);
  }

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  static std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::uint64_t state_[4]{};
};

inline double uniform(Rng& rng, double lo, double hi) {
  if (!(lo <= hi)) throw std::invalid_argument("uniform: requires lo <= hi");
  if (lo == hi) return lo;
  return lo + (hi - lo) * rng.next_unit();
}

/// Box-Muller, cosine branch only. Each draw consumes exactly two uniforms:
/// u1 (mapped to (0, 1]) first, then u2.
inline double gaussian(Rng& rng, double mean, double stddev) {
  if (!(stddev >= 0.0)) throw std::invalid_argument("gaussian: requires std >= 0");
  const double u1 = 1.0 - rng.next_unit();
  const double u2 = rng.next_unit();
  const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  return mean + stddev * z;
}

inline bool bernoulli(Rng& rng, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("bernoulli: requires p in [0,1]");
  return rng.next_unit() < p;
}

inline Vector gaussian_vector(Rng& rng, std::size_t n, double mean, double stddev) {
  Vector v(n);
  for (auto& e : v) e = gaussian(rng, mean, stddev);
  return v;
}

inline Matrix gaussian_matrix(Rng& rng, std::size_t rows, std::size_t cols, double mean,
                              double stddev) {
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (auto& e : m.row(i)) e = gaussian(rng, mean, stddev);
  return m;
}

/// Orthogonal factor of a Householder QR of a square matrix, normalized so
/// that R has a nonnegative diagonal.
inline Matrix householder_q(Matrix a) {
  const std::size_t n = a.rows();
  require_same_size(n, a.cols(), "householder_q");
  std::vector<Vector> reflectors(n);
  std::vector<double> r_diag(n);

  for (std::size_t k = 0; k < n; ++k) {
    Vector v(n - k);
    for (std::size_t i = k; i < n; ++i) v[i - k] = a(i, k);
    const double alpha = norm2(v);
    if (alpha == 0.0) {
      r_diag[k] = 0.0;
      continue;
    }
    // v = a_k + sign(a_kk)|a_k| e_1 gives R_kk = -sign(a_kk)|a_k|.
    const double s = v[0] >= 0.0 ? 1.0 : -1.0;
    v[0] += s * alpha;
    r_diag[k] = -s * alpha;
    const double vv = dot(v, v);

    Vector w(n - k, 0.0);
    for (std::size_t i = k; i < n; ++i) {
      const double vi = v[i - k];
      const auto ri = a.row(i);
      for (std::size_t j = k; j < n; ++j) w[j - k] += vi * ri[j];
    }
    for (std::size_t i = k; i < n; ++i) {
      const double c = 2.0 * v[i - k] / vv;
      auto ri = a.row(i);
      for (std::size_t j = k; j < n; ++j) ri[j] -= c * w[j - k];
    }
    reflectors[k] = std::move(v);
  }

  // Q = H_0 H_1 ... H_{n-1}, accumulated right to left.
  Matrix q = Matrix::identity(n);
  for (std::size_t kk = n; kk-- > 0;) {
    const Vector& v = reflectors[kk];
    if (v.empty()) continue;
    const double vv = dot(v, v);
    Vector w(n, 0.0);
    for (std::size_t i = kk; i < n; ++i) {
      const double vi = v[i - kk];
      const auto qi = q.row(i);
      for (std::size_t j = 0; j < n; ++j) w[j] += vi * qi[j];
    }
    for (std::size_t i = kk; i < n; ++i) {
      const double c = 2.0 * v[i - kk] / vv;
      auto qi = q.row(i);
      for (std::size_t j = 0; j < n; ++j) qi[j] -= c * w[j];
    }
  }

  for (std::size_t k = 0; k < n; ++k) {
    if (r_diag[k] < 0.0)
      for (std::size_t i = 0; i < n; ++i) q(i, k) = -q(i, k);
  }
  return q;
}

/// Haar-distributed n x n orthogonal matrix.
inline Matrix random_orthogonal(std::size_t n, Rng& rng) {
  if (n == 0) throw std::invalid_argument("random_orthogonal: n must be >= 1");
  return householder_q(gaussian_matrix(rng, n, n, 0.0, 1.0));
}

struct SpectralNormResult {
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
};

/// Largest singular value by power iteration on M^T M, started from the
/// normalized all-ones vector. Stops once successive estimates agree to
/// relative `tol`; otherwise returns the last estimate with converged=false.
inline SpectralNormResult spectral_norm(const Matrix& m, double tol = 1e-12,
                                        int max_iter = 10000) {
  if (!(tol > 0.0)) throw std::invalid_argument("spectral_norm: tol must be > 0");
  if (m.cols() == 0 || m.rows() == 0)
    throw std::invalid_argument("spectral_norm: empty matrix");
  Vector v(m.cols(), 1.0 / std::sqrt(static_cast<double>(m.cols())));
  SpectralNormResult res;
  double prev = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    const Vector mv = matvec(m, v);
    const double sigma = norm2(mv);
    res.value = std::max(res.value, sigma);
    res.iterations = it;
    if (sigma == 0.0) throw std::invalid_argument("spectral_norm: matrix is zero on start vector");
    if (it > 1 && std::abs(sigma - prev) <= tol * sigma) {
      res.converged = true;
      break;
    }
    prev = sigma;
    Vector u = matvec_transposed(m, mv);
    const double un = norm2(u);
    for (std::size_t j = 0; j < u.size(); ++j) v[j] = u[j] / un;
  }
  return res;
}

}  // namespace l1sub

#endif  // L1SUB_NUMERICS_HPP
