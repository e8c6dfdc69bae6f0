#include <gtest/gtest.h>

#include <random>

#include "maxprin/error.hpp"
#include "maxprin/linalg.hpp"
#include "oracles.hpp"

using namespace maxprin;

namespace {

// 1-D Dirichlet Laplacian tridiag(-1, 2, -1) plus `shift` on the diagonal.
CsrMatrix laplacian_1d(std::size_t n, double shift = 0.0) {
  CsrBuilder b(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    b.add(i, i, 2.0 + shift);
    if (i + 1 < n) {
      b.add(i, i + 1, -1.0);
      b.add(i + 1, i, -1.0);
    }
  }
  return b.build();
}

}  // namespace

TEST(Csr, BuilderSumsDuplicatesAndSortsColumns) {
  CsrBuilder b(2, 3);
  b.add(0, 2, 1.0);
  b.add(0, 0, 2.0);
  b.add(0, 2, 0.5);
  b.add(1, 1, -1.0);
  const CsrMatrix a = b.build();
  EXPECT_EQ(a.nonzeros(), 3u);
  EXPECT_EQ(a.col_indices[0], 0u);
  EXPECT_DOUBLE_EQ(a.at(0, 2), 1.5);
  EXPECT_DOUBLE_EQ(a.at(1, 0), 0.0);
  const std::vector<double> y = a.multiply(std::vector<double>{1.0, 2.0, 3.0});
  EXPECT_DOUBLE_EQ(y[0], 6.5);
  EXPECT_DOUBLE_EQ(y[1], -2.0);
  EXPECT_THROW(b.add(2, 0, 1.0), Error);
}

TEST(Csr, Bandwidth) {
  EXPECT_EQ(laplacian_1d(10).bandwidth(), 1u);
}

TEST(BandedLdlt, SolvesAndCountsInertia) {
  const CsrMatrix a = laplacian_1d(50);
  const BandedLdlt f(a);
  EXPECT_EQ(f.negative_pivots(), 0u);
  std::vector<double> x(50);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(0.3 * i);
  const std::vector<double> b = a.multiply(x);
  const std::vector<double> y = f.solve(b);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(y[i], x[i], 1e-10);

  // Eigenvalues are 2 - 2 cos(k pi / 51); exactly three lie below 2 - 2 cos(3.5 pi / 51).
  const double pi = 3.14159265358979323846;
  const BandedLdlt shifted(a, 2.0 - 2.0 * std::cos(3.5 * pi / 51.0));
  EXPECT_EQ(shifted.negative_pivots(), 3u);
}

TEST(Cg, MatchesDirectSolveWithEveryPreconditioner) {
  const CsrMatrix a = laplacian_1d(200, 0.01);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> b(200);
  for (double& v : b) v = u(rng);
  const std::vector<double> ref = BandedLdlt(a).solve(b);
  for (Preconditioner p : {Preconditioner::None, Preconditioner::Jacobi,
                           Preconditioner::IncompleteCholesky}) {
    CgOptions o;
    o.preconditioner = p;
    const CgResult r = conjugate_gradient(a, b, {}, o);
    EXPECT_LE(r.relative_residual, 1e-10);
    for (std::size_t i = 0; i < b.size(); ++i) EXPECT_NEAR(r.x[i], ref[i], 1e-7 * norm_inf(ref));
  }
}

TEST(Cg, ZeroRightHandSide) {
  const CgResult r = conjugate_gradient(laplacian_1d(10), std::vector<double>(10, 0.0));
  EXPECT_EQ(norm_inf(r.x), 0.0);
}

TEST(Cg, IndefiniteOperatorIsReported) {
  const CsrMatrix a = laplacian_1d(20, -1.0);  // eigenvalues span (-1, 3)
  CgOptions o;
  o.preconditioner = Preconditioner::None;
  // The all-ones start direction has a negative Rayleigh quotient.
  try {
    conjugate_gradient(a, std::vector<double>(20, 1.0), {}, o);
    FAIL() << "expected IndefiniteOperator";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IndefiniteOperator);
  }
}

TEST(Cg, IterationCapIsReported) {
  CgOptions o;
  o.preconditioner = Preconditioner::None;
  o.max_iterations = 2;
  try {
    conjugate_gradient(laplacian_1d(100), std::vector<double>(100, 1.0), {}, o);
    FAIL() << "expected SolverDiverged";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SolverDiverged);
  }
}

TEST(BandedLdlt, SmallestEigenvalueMatchesDenseOracle) {
  // Generalized problem with a nonuniform mass; inertia bracketing around the oracle value.
  const std::size_t n = 40;
  const CsrMatrix a = laplacian_1d(n);
  std::vector<double> mass(n);
  for (std::size_t i = 0; i < n; ++i) mass[i] = 1.0 + 0.5 * std::sin(0.2 * i);
  const double lambda = oracle::smallest_generalized(a, mass);
  EXPECT_EQ(BandedLdlt(a, lambda * (1.0 - 1e-8), mass).negative_pivots(), 0u);
  EXPECT_EQ(BandedLdlt(a, lambda * (1.0 + 1e-8), mass).negative_pivots(), 1u);
}
