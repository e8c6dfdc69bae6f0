#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "maxprin/eigen_exhaustion.hpp"
#include "maxprin/error.hpp"
#include "oracles.hpp"

using namespace maxprin;
using std::numbers::pi;

namespace {

StripDomain half_strip() {
  StripDomain d;
  d.r_min = 0.0;
  d.cross_section = CrossSection::interval(pi);
  return d;
}

StripDomain sector() {
  StripDomain d;
  d.r_min = 1.0;
  d.cross_section = CrossSection::circle_arc(pi / 2);
  return d;
}

OperatorSpec constant_c(double c) {
  OperatorSpec s;
  s.c = [c](double, double) { return c; };
  return s;
}

// Separation of variables on the sector grid: the discrete angular Dirichlet eigenvalue
// enters a 1-D radial problem with faces r_f / h, potential mu h / r and mass r h.
double sector_radial_oracle(const Grid2D& g) {
  const double hx = g.xi.spacing, theta = g.xi.hi - g.xi.lo;
  const double s = std::sin(pi * hx / (2.0 * theta));
  const double mu = 4.0 * s * s / (hx * hx);
  const double h = g.r.spacing;
  const std::size_t n = g.r.size() - 2;
  std::vector<double> diag(n), off(n - 1), mass(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double r = g.r.nodes[k + 1];
    diag[k] = ((r - 0.5 * h) + (r + 0.5 * h)) / h + mu * h / r;
    mass[k] = r * h;
    if (k + 1 < n) off[k] = -(r + 0.5 * h) / h;
  }
  return oracle::smallest_tridiagonal(diag, off, mass);
}

}  // namespace

TEST(PrincipalEigenpair, FlatSquare) {
  StripDomain d = half_strip();
  d.r_max = pi;
  const SparseOperator op = assemble({}, make_grid(d, pi, 128.0 / pi), WarpProfile::constant(1.0), 2);
  const EigenPair e = principal_eigenpair(op);
  EXPECT_NEAR(e.lambda, 2.0, 1e-3);
  EXPECT_DOUBLE_EQ(e.vector[e.normalization_node], 1.0);
  for (std::size_t p : op.interior) EXPECT_GT(e.vector[p], 0.0);
  EXPECT_LE(std::abs(rayleigh_quotient(op, e.vector) - e.lambda), 1e-8 * (1.0 + e.lambda));
}

TEST(PrincipalEigenpair, IntervalReduction) {
  StripDomain d;
  d.r_min = 0.0;
  d.r_max = pi;
  d.cross_section = CrossSection::full_circle();
  const Grid2D g = make_grid(d, pi, 256.0 / pi);
  ASSERT_EQ(g.xi.size(), 1u);
  const EigenPair e = principal_eigenpair(assemble({}, g, WarpProfile::constant(1.0), 2));
  EXPECT_NEAR(e.lambda, 1.0, 5e-4);
}

TEST(PrincipalEigenpair, WeightedStripMatchesDenseOracle) {
  OperatorSpec s;
  s.eta = [](double r, double) { return -r; };
  const Grid2D g = make_grid(half_strip(), pi, 48.0 / pi);
  ASSERT_EQ(g.r.size(), 49u);
  ASSERT_EQ(g.xi.size(), 49u);
  const SparseOperator op = assemble(s, g, WarpProfile::constant(1.0), 2);
  std::vector<double> mass;
  for (std::size_t p : op.interior) mass.push_back(op.measure[p]);
  const double expected = oracle::smallest_generalized(op.form, mass);
  const EigenPair e = principal_eigenpair(op);
  EXPECT_NEAR(e.lambda, expected, 1e-8 * (1.0 + expected));
  // Continuum value: 1 + 1/4 + (pi / pi)^2 for the e^{-r} weight on (0, pi) x (0, pi).
  EXPECT_NEAR(e.lambda, 2.25, 2e-3);
}

TEST(PrincipalEigenpair, SectorMatchesSeparatedOracle) {
  const Grid2D g = make_grid(sector(), 9.0, 8.0, 16);
  const SparseOperator op = assemble({}, g, WarpProfile::linear(), 2);
  EXPECT_NEAR(principal_eigenpair(op).lambda, sector_radial_oracle(g), 1e-9);
}

TEST(RayleighQuotient, Examples) {
  const double R = 6.0;
  const Grid2D g = make_grid(half_strip(), R, 16.0);
  const SparseOperator op = assemble({}, g, WarpProfile::constant(1.0), 2);
  std::vector<double> v = sample(g, [R](double r, double xi) { return std::sin(xi) * std::sin(pi * r / R); });
  for (std::size_t p = 0; p < v.size(); ++p)
    if (g.dirichlet[p]) v[p] = 0.0;
  EXPECT_NEAR(rayleigh_quotient(op, v), 1.0 + pi * pi / (R * R), 2e-3);

  const double kappa = 0.37;
  const SparseOperator shifted = assemble(constant_c(kappa), g, WarpProfile::constant(1.0), 2);
  EXPECT_NEAR(rayleigh_quotient(shifted, v), rayleigh_quotient(op, v) - kappa, 1e-12);

  std::vector<double> zero(g.size(), 0.0);
  try {
    rayleigh_quotient(op, zero);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ZeroVector);
  }
  std::vector<double> bad(g.size(), 1.0);
  EXPECT_THROW(rayleigh_quotient(op, bad), Error);
}

TEST(RayleighQuotient, PrincipalEigenvalueIsMinimal) {
  const Grid2D g = make_grid(half_strip(), 5.0, 6.0);
  const SparseOperator op = assemble(constant_c(-0.25), g, WarpProfile::constant(1.0), 2);
  const double lambda = principal_eigenpair(op).lambda;
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    std::vector<double> v(g.size(), 0.0);
    for (std::size_t p : op.interior) v[p] = u(rng);
    EXPECT_GE(rayleigh_quotient(op, v), lambda - 1e-9);
  }
}

TEST(PrincipalEigenpair, ZeroOrderShiftIsExact) {
  const Grid2D g = make_grid(half_strip(), 6.0, 8.0);
  const double base = principal_eigenpair(assemble({}, g, WarpProfile::constant(1.0), 2)).lambda;
  for (double kappa : {0.5, 2.0, -3.0}) {
    const double shifted =
        principal_eigenpair(assemble(constant_c(-kappa), g, WarpProfile::constant(1.0), 2)).lambda;
    EXPECT_NEAR(shifted, base + kappa, 1e-9);
  }
}

TEST(PrincipalEigenpair, NegativeEigenvalueStillPositiveVector) {
  const Grid2D g = make_grid(half_strip(), 6.0, 8.0);
  const SparseOperator op = assemble(constant_c(2.0), g, WarpProfile::constant(1.0), 2);
  const EigenPair e = principal_eigenpair(op);
  EXPECT_LT(e.lambda, 0.0);
  for (std::size_t p : op.interior) EXPECT_GT(e.vector[p], 0.0);
}

TEST(ExhaustionSweep, HalfStrip) {
  const std::vector<double> R{4.0, 8.0, 16.0};
  const ExhaustionReport rep =
      exhaustion_sweep(half_strip(), {}, WarpProfile::constant(1.0), R, 16.0);
  for (std::size_t k = 0; k < R.size(); ++k)
    EXPECT_NEAR(rep.lambda_list[k], 1.0 + pi * pi / (R[k] * R[k]), 1e-3);
  for (std::size_t k = 1; k < R.size(); ++k)
    EXPECT_LE(rep.lambda_list[k], rep.lambda_list[k - 1] + 1e-9);
  EXPECT_NEAR(rep.extrapolated_limit, 1.0, 1e-3);
  EXPECT_EQ(classify_lambda1(rep), Lambda1Sign::Positive);
  EXPECT_TRUE(lambda1_positive(rep));
}

TEST(ExhaustionSweep, ConstantShifts) {
  const std::vector<double> R{4.0, 8.0, 16.0};
  const ExhaustionReport half =
      exhaustion_sweep(half_strip(), constant_c(0.5), WarpProfile::constant(1.0), R, 16.0);
  EXPECT_NEAR(half.extrapolated_limit, 0.5, 1e-3);
  const ExhaustionReport neg =
      exhaustion_sweep(half_strip(), constant_c(2.0), WarpProfile::constant(1.0), R, 16.0);
  EXPECT_NEAR(neg.extrapolated_limit, -1.0, 1e-3);
  EXPECT_EQ(classify_lambda1(neg), Lambda1Sign::NonPositive);
  EXPECT_FALSE(lambda1_positive(neg));
}

TEST(ExhaustionSweep, SectorLimitApproachesZero) {
  const std::vector<double> R{8.0, 16.0, 32.0, 64.0};
  const ExhaustionReport rep = exhaustion_sweep(sector(), {}, WarpProfile::linear(), R, 4.0, 16);
  for (std::size_t k = 0; k < R.size(); ++k) {
    EXPECT_GT(rep.lambda_list[k], 0.0);
    const Grid2D g = make_grid(sector(), R[k], 4.0, 16);
    EXPECT_NEAR(rep.lambda_list[k], sector_radial_oracle(g), 1e-8);
  }
  EXPECT_LT(std::abs(rep.extrapolated_limit), 1e-2);
  EXPECT_NE(classify_lambda1(rep), Lambda1Sign::Positive);
}

TEST(ExhaustionSweep, RejectsBadRadii) {
  const std::vector<double> two{4.0, 8.0}, unsorted{4.0, 8.0, 6.0};
  EXPECT_THROW(exhaustion_sweep(half_strip(), {}, WarpProfile::constant(1.0), two, 4.0), Error);
  EXPECT_THROW(exhaustion_sweep(half_strip(), {}, WarpProfile::constant(1.0), unsorted, 4.0), Error);
}

TEST(ClassifyLambda1, MarginRule) {
  ExhaustionReport r;
  r.extrapolated_limit = 1e-3;
  r.fit_residual = 1e-3;
  EXPECT_EQ(classify_lambda1(r), Lambda1Sign::Indeterminate);
  EXPECT_FALSE(lambda1_positive(r));
  EXPECT_EQ(classify_lambda1(r, 1e-4), Lambda1Sign::Positive);
  r.extrapolated_limit = -1.0;
  EXPECT_EQ(classify_lambda1(r), Lambda1Sign::NonPositive);
  EXPECT_EQ(to_string(Lambda1Sign::Indeterminate), "Indeterminate");
}
