#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "helpers.hpp"

using namespace l1sub;

namespace {

const Matrix& data(const ProblemInstance& inst, const std::string& name) {
  for (const auto& nm : inst.data)
    if (nm.name == name) return nm.values;
  throw std::out_of_range(name);
}

Vector column(const Matrix& m) {
  Vector v(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) v[i] = m(i, 0);
  return v;
}

}  // namespace

TEST(Quadratic, PlantedSpectrum) {
  Rng rng(1);
  const ProblemInstance inst = make_quadratic(12, rng);
  const Vector ev = oracle::jacobi_eigenvalues(data(inst, "M"));
  EXPECT_NEAR(ev.front(), *inst.objective.mu(), 1e-10);
  EXPECT_NEAR(ev.back(), inst.objective.lipschitz(), 1e-10);
  EXPECT_LE(*inst.objective.mu(), inst.objective.lipschitz());
  EXPECT_GE(ev.front(), 0.02);
  EXPECT_LE(ev.back(), 100.0);
  EXPECT_DOUBLE_EQ(inst.objective.gamma(), 0.25 * norm_inf(column(data(inst, "b"))));
}

TEST(Quadratic, PinnedExtremes) {
  Rng rng(2);
  QuadraticOptions o;
  o.eig_lo = 1.0;
  o.eig_hi = 10.0;
  o.pin_extremes = true;
  const ProblemInstance inst = make_quadratic(15, rng, o);
  const Vector ev = oracle::jacobi_eigenvalues(data(inst, "M"));
  EXPECT_NEAR(ev.front(), 1.0, 1e-10);
  EXPECT_NEAR(ev.back(), 10.0, 1e-10);
  EXPECT_NEAR(spectral_norm(data(inst, "M")).value, 10.0, 1e-6 * 10.0);
}

TEST(Quadratic, OneDimClosedForm) {
  Rng rng(6);
  const ProblemInstance inst = make_quadratic(1, rng);
  const double lambda = data(inst, "M")(0, 0), b = data(inst, "b")(0, 0);
  const double xstar = soft_threshold(Vector{-b}, inst.objective.gamma())[0] / lambda;
  EXPECT_LT(norm2(min_norm_subgradient(inst.objective, Vector{xstar})), 1e-12);
}

TEST(Quadratic, ZeroGammaMatchesDenseSolve) {
  Rng rng(7);
  ProblemInstance inst = make_quadratic(8, rng);
  inst.objective = inst.objective.with_gamma(0.0);
  const Matrix& m = data(inst, "M");
  const Vector b = column(data(inst, "b"));
  const Vector sol = oracle::dense_solve(m, b);
  const double closed = -0.5 * dot(b, sol);
  const ReferenceResult ref = reference_optimum(inst);
  EXPECT_TRUE(ref.certified);
  EXPECT_NEAR(ref.value, closed, 1e-9 * (1.0 + std::abs(closed)));
}

TEST(Lasso, PlantedLipschitzAndGradient) {
  Rng rng(3);
  const ProblemInstance inst = make_lasso(15, 25, rng);
  const Matrix& a = data(inst, "A");
  const double s = spectral_norm(a).value;
  EXPECT_NEAR(s * s, inst.objective.lipschitz(), 1e-6 * inst.objective.lipschitz());
  EXPECT_FALSE(inst.objective.mu());
  EXPECT_EQ(inst.objective.gamma(), 1.0);
  const Vector x = gaussian_vector(rng, 25, 0.0, 1.0);
  const Vector b = column(data(inst, "b"));
  const Vector expect = matvec_transposed(a, axpy(matvec(a, x), -1.0, b));
  const Vector got = inst.objective.grad_g(x);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(got[i], expect[i], 1e-10);
}

TEST(Lasso, NoiselessPlantedSolution) {
  Rng rng(4);
  LassoOptions o;
  o.noise_std = 0.0;
  const ProblemInstance inst = make_lasso(10, 10, rng, o);
  const Vector y = column(data(inst, "y"));
  EXPECT_NEAR(inst.objective.g(y), 0.0, 1e-20);
}

TEST(Logistic, GradientAtZeroByHand) {
  Rng rng(5);
  const ProblemInstance inst = make_logistic(20, 4, rng);
  const Matrix& m = data(inst, "M");
  const Vector b = column(data(inst, "b"));
  const Vector grad = inst.objective.grad_g(Vector(4, 0.0));
  for (std::size_t i = 0; i < 4; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < 20; ++j) s += m(j, i) * (0.5 - b[j]);
    EXPECT_NEAR(grad[i], s, 1e-12);
  }
  EXPECT_DOUBLE_EQ(inst.objective.gamma(), 0.25 * norm_inf(grad));
}

TEST(Logistic, ConvexMidpoints) {
  Rng rng(6);
  const ProblemInstance inst = make_logistic(30, 5, rng);
  for (int t = 0; t < 100; ++t) {
    const Vector a = gaussian_vector(rng, 5, 0.0, 3.0);
    const Vector b = gaussian_vector(rng, 5, 0.0, 3.0);
    Vector mid(5);
    for (std::size_t i = 0; i < 5; ++i) mid[i] = 0.5 * (a[i] + b[i]);
    const double lhs = inst.objective.g(mid);
    const double rhs = 0.5 * (inst.objective.g(a) + inst.objective.g(b));
    EXPECT_LE(lhs, rhs + 1e-10 * (1.0 + std::abs(rhs)));
  }
}

TEST(Logistic, StableSoftplus) {
  EXPECT_NEAR(detail::softplus(500.0), 500.0, 1e-12);
  EXPECT_EQ(detail::softplus(-500.0), std::exp(-500.0));
  EXPECT_TRUE(std::isfinite(detail::softplus(1e6)));
  EXPECT_NEAR(detail::sigmoid(-800.0), 0.0, 1e-300);
  EXPECT_EQ(detail::sigmoid(800.0), 1.0);
}

TEST(LogSumExp, SingleTermIsAffine) {
  Rng rng(8);
  const ProblemInstance inst = make_logsumexp(1, 3, 5.0, rng);
  const Matrix& m = data(inst, "M");
  const Vector b = column(data(inst, "b"));
  const Vector x{0.3, -1.0, 2.0};
  EXPECT_NEAR(inst.objective.g(x), dot(m.row(0), x) - b[0], 1e-12);
}

TEST(LogSumExp, Sandwich) {
  Rng rng(9);
  const double r = 5.0;
  const ProblemInstance inst = make_logsumexp(40, 6, r, rng);
  const Matrix& m = data(inst, "M");
  const Vector b = column(data(inst, "b"));
  for (int t = 0; t < 50; ++t) {
    const Vector x = gaussian_vector(rng, 6, 0.0, 50.0);
    const Vector z = axpy(matvec(m, x), -1.0, b);
    const double mx = *std::max_element(z.begin(), z.end());
    const double g = inst.objective.g(x);
    ASSERT_TRUE(std::isfinite(g));
    EXPECT_GE(g, mx - 1e-9);
    EXPECT_LE(g, mx + r * std::log(40.0) + 1e-9);
  }
  const double s = spectral_norm(m).value;
  EXPECT_NEAR(inst.objective.lipschitz(), s * s / r, 1e-9 * s * s / r);
  EXPECT_EQ(inst.objective.gamma(), 1.0);
}

TEST(Toy, DefaultsAndMinimizer) {
  const ProblemInstance toy = make_2d();
  const Vector ev = oracle::jacobi_eigenvalues(Matrix::from_rows({{1.0, 0.85}, {0.85, 1.5}}));
  EXPECT_NEAR(toy.objective.lipschitz(), ev[1], 1e-12);
  EXPECT_NEAR(*toy.objective.mu(), ev[0], 1e-12);
  EXPECT_NEAR(toy.objective.lipschitz(), 2.1360, 5e-5);
  EXPECT_NEAR(*toy.objective.mu(), 0.3640, 5e-5);
  EXPECT_EQ(toy.x0, (Vector{0.95, 0.5}));
  EXPECT_EQ(*toy.f_ref, -0.5);
  EXPECT_DOUBLE_EQ(f_value(toy.objective, Vector{1.0, 0.0}), -0.5);
  const Vector grad = toy.objective.grad_g(Vector{1.0, 0.0});
  EXPECT_NEAR(grad[0], -1.0, 1e-15);
  EXPECT_NEAR(grad[1], 1.0, 1e-15);
  // The second coordinate's subdifferential is grad + [-1, 1] = [0, 2].
  EXPECT_NEAR(grad[1] - toy.objective.gamma(), 0.0, 1e-15);
  EXPECT_THROW(make_2d(1.3), std::invalid_argument);
}

TEST(Toy, PerturbedIsDeterministicAndValid) {
  Rng a(7), b(7);
  const ProblemInstance p = perturb_2d(a), q = perturb_2d(b);
  EXPECT_EQ(p.x0, q.x0);
  EXPECT_EQ(p.objective.gamma(), q.objective.gamma());
  EXPECT_FALSE(p.f_ref);
  EXPECT_GE(p.objective.gamma(), 0.0);
  EXPECT_EQ(p.label, "toy2d-perturbed");
}

TEST(Generators, DeterministicGivenSeed) {
  for (const std::string& label : problem_labels()) {
    ProblemParams pp;
    pp.n = 6;
    pp.m = 9;
    pp.k = 7;
    Rng a(31), b(31);
    std::ostringstream da, db;
    dump_instance(da, make_problem(label, pp, a));
    dump_instance(db, make_problem(label, pp, b));
    EXPECT_EQ(da.str(), db.str()) << label;
  }
}

TEST(Generators, GradientsMatchFiniteDifferences) {
  for (const std::string& label : problem_labels()) {
    ProblemParams pp;
    pp.n = 12;
    pp.m = 20;
    pp.k = 15;
    Rng rng(41);
    const ProblemInstance inst = make_problem(label, pp, rng);
    for (int t = 0; t < 10; ++t) {
      const Vector x = gaussian_vector(rng, inst.objective.dim(), 0.0, 1.0);
      EXPECT_LT(oracle::gradient_relative_error(inst.objective, x), 1e-5) << label;
    }
  }
}

TEST(Generators, RejectZeroSizes) {
  Rng rng(0);
  EXPECT_THROW(make_quadratic(0, rng), std::invalid_argument);
  EXPECT_THROW(make_lasso(0, 3, rng), std::invalid_argument);
  EXPECT_THROW(make_logistic(3, 0, rng), std::invalid_argument);
  EXPECT_THROW(make_logsumexp(3, 3, 0.0, rng), std::invalid_argument);
  EXPECT_THROW(make_problem("nope", {}, rng), std::invalid_argument);
}

TEST(Dump, HeaderAndBlocks) {
  const ProblemInstance toy = make_2d();
  std::ostringstream os;
  dump_instance(os, toy);
  const std::string s = os.str();
  EXPECT_EQ(s.rfind("# l1sub instance v1\n", 0), 0u);
  EXPECT_NE(s.find("label=toy2d"), std::string::npos);
  EXPECT_NE(s.find("f_ref=-0.5"), std::string::npos);
}
