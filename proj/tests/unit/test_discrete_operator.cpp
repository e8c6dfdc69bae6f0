#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "maxprin/discrete_operator.hpp"
#include "maxprin/error.hpp"

using namespace maxprin;
using std::numbers::pi;

namespace {

StripDomain flat_square() {
  StripDomain d;
  d.r_min = 0.0;
  d.r_max = pi;
  d.cross_section = CrossSection::interval(pi);
  return d;
}

StripDomain ring(double r1, double r2) {
  StripDomain d;
  d.r_min = r1;
  d.r_max = r2;
  d.cross_section = CrossSection::full_circle();
  return d;
}

std::vector<double> random_free(const SparseOperator& op, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(op.dimension(), 0.0);
  for (std::size_t p : op.interior) v[p] = u(rng);
  return v;
}

double order(double e1, double e2, double e3) {
  return 0.5 * (std::log2(e1 / e2) + std::log2(e2 / e3));
}

}  // namespace

TEST(MakeAxis, NaturalAndDirichletEnds) {
  const Axis d = make_axis(0.0, 1.0, EndCondition::Dirichlet, EndCondition::Dirichlet, false, 4);
  ASSERT_EQ(d.size(), 5u);
  EXPECT_DOUBLE_EQ(d.nodes.back(), 1.0);
  EXPECT_TRUE(d.is_dirichlet(0));
  const Axis n = make_axis(0.0, 1.0, EndCondition::Natural, EndCondition::Dirichlet, false, 4);
  // h (count - 1 + 1/2) = 1 with count = 5.
  EXPECT_DOUBLE_EQ(n.spacing, 1.0 / 4.5);
  EXPECT_DOUBLE_EQ(n.nodes.front(), 0.5 / 4.5);
  EXPECT_DOUBLE_EQ(n.cell_lo.front(), 0.0);
  EXPECT_FALSE(n.is_dirichlet(0));
  const Axis p = make_axis(0.0, 2 * pi, EndCondition::Natural, EndCondition::Natural, true, 8);
  EXPECT_EQ(p.size(), 8u);
  EXPECT_FALSE(p.is_dirichlet(7));
  EXPECT_THROW(make_axis(1.0, 1.0, EndCondition::Dirichlet, EndCondition::Dirichlet, false, 4),
               Error);
}

TEST(Assemble, FlatStencilIsFivePoint) {
  const Grid2D g = make_grid(flat_square(), pi, 32.0 / pi);
  ASSERT_EQ(g.r.size(), 33u);
  ASSERT_EQ(g.xi.size(), 33u);
  const double h = g.r.spacing;
  ASSERT_NEAR(g.xi.spacing, h, 1e-15);
  const SparseOperator op = assemble({}, g, WarpProfile::constant(1.0), 2);
  const std::size_t p = g.index(10, 17);
  EXPECT_NEAR(op.matrix.at(p, p), -4.0 / (h * h), 1e-9);
  for (std::size_t q : {g.index(9, 17), g.index(11, 17), g.index(10, 16), g.index(10, 18)})
    EXPECT_NEAR(op.matrix.at(p, q), 1.0 / (h * h), 1e-9);
  EXPECT_EQ(op.matrix.at(0, 0), 1.0);
}

TEST(Assemble, ConstantZeroOrderTerm) {
  OperatorSpec s;
  s.c = [](double, double) { return 1.0; };
  const Grid2D g = make_grid(flat_square(), pi, 8.0);
  const SparseOperator op = assemble(s, g, WarpProfile::constant(1.0), 2);
  const std::vector<double> lu = maxprin::apply(op, std::vector<double>(g.size(), 1.0));
  for (double v : lu) EXPECT_NEAR(v, 1.0, 1e-10);
}

TEST(Assemble, ConstantsAreAnnihilatedWithoutZeroOrderTerm) {
  OperatorSpec s;
  s.a = [](double r, double xi) { return 1.0 + 0.5 * std::sin(r * xi); };
  s.eta = [](double r, double) { return -0.3 * r; };
  StripDomain d;
  d.r_min = 1.0;
  d.cross_section = CrossSection::circle_arc(2.0);
  const Grid2D g = make_grid(d, 5.0, 10.0);
  const SparseOperator op = assemble(s, g, WarpProfile::linear(), 2);
  const std::vector<double> lu = maxprin::apply(op, std::vector<double>(g.size(), 1.0));
  for (std::size_t p : op.interior) EXPECT_NEAR(lu[p], 0.0, 1e-9);
}

TEST(Assemble, LogIsDiscretelyHarmonicToSecondOrder) {
  // sigma = r, m = 2: u = ln r is harmonic. Interior consistency error is O(h^2).
  StripDomain d;
  d.r_min = 1.0;
  d.r_max = 2.0;
  d.cross_section = CrossSection::circle_arc(pi / 2);
  std::vector<double> errors;
  for (double density : {32.0, 64.0, 128.0}) {
    const Grid2D g = make_grid(d, 2.0, density, 8);
    const SparseOperator op = assemble({}, g, WarpProfile::linear(), 2);
    const std::vector<double> u = sample(g, [](double r, double) { return std::log(r); });
    const std::vector<double> lu = maxprin::apply(op, u);
    double e = 0.0;
    for (std::size_t p : op.interior) e = std::max(e, std::abs(lu[p]));
    errors.push_back(e);
  }
  EXPECT_GE(order(errors[0], errors[1], errors[2]), 1.9);
}

TEST(Apply, BoundaryRowsZeroAndLinearity) {
  const Grid2D g = make_grid(flat_square(), pi, 6.0);
  OperatorSpec s;
  s.c = [](double r, double) { return -0.1 * r; };
  const SparseOperator op = assemble(s, g, WarpProfile::constant(1.0), 2);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> u(g.size()), v(g.size());
  for (std::size_t p = 0; p < g.size(); ++p) {
    u[p] = dist(rng);
    v[p] = dist(rng);
  }
  const std::vector<double> lu = maxprin::apply(op, u);
  const std::vector<double> lv = maxprin::apply(op, v);
  for (std::size_t p = 0; p < g.size(); ++p)
    if (g.dirichlet[p]) EXPECT_EQ(lu[p], u[p]);
  std::vector<double> w(g.size());
  for (std::size_t p = 0; p < g.size(); ++p) w[p] = 2.5 * u[p] - 0.75 * v[p];
  const auto lw = maxprin::apply(op, w);
  double scale = 0.0;
  for (std::size_t p = 0; p < g.size(); ++p) scale = std::max(scale, std::abs(lu[p]) + std::abs(lv[p]));
  for (std::size_t p = 0; p < g.size(); ++p)
    EXPECT_NEAR(lw[p], 2.5 * lu[p] - 0.75 * lv[p], 1e-14 * 4 * scale);
  for (double x : maxprin::apply(op, std::vector<double>(g.size(), 0.0))) EXPECT_EQ(x, 0.0);
  EXPECT_THROW(maxprin::apply(op, std::vector<double>(3, 0.0)), Error);
}

TEST(Assemble, WeightedSelfAdjointness) {
  OperatorSpec s;
  s.a = [](double r, double xi) { return 1.0 + 0.3 * std::cos(r + xi); };
  s.eta = [](double r, double xi) { return -r + 0.2 * std::sin(xi); };
  s.c = [](double r, double) { return -1.0 / (1.0 + r); };
  StripDomain d;
  d.r_min = 1.0;
  d.cross_section = CrossSection::sphere_cap(1.2);
  d.m = 3;
  const Grid2D g = make_grid(d, 4.0, 12.0);
  const SparseOperator op = assemble(s, g, WarpProfile::affine_power(0.5), 3);
  std::mt19937_64 rng(5);
  for (int k = 0; k < 100; ++k) {
    const std::vector<double> u = random_free(op, rng);
    const std::vector<double> v = random_free(op, rng);
    const double a = weighted_dot(op, maxprin::apply(op, u), v);
    const double b = weighted_dot(op, u, maxprin::apply(op, v));
    EXPECT_LE(std::abs(a - b), 1e-12 * std::max(std::abs(a), std::abs(b)));
  }
}

TEST(Assemble, MMatrixForNonpositiveZeroOrderTerm) {
  OperatorSpec s;
  s.a = [](double r, double) { return 2.0 + std::sin(r); };
  s.eta = [](double r, double) { return 0.5 * r; };
  s.c = [](double r, double) { return -0.2 * r; };
  StripDomain d;
  d.r_min = 0.5;
  d.cross_section = CrossSection::circle_arc(2.0);
  const SparseOperator op = assemble(s, make_grid(d, 6.0, 8.0), WarpProfile::linear(), 2);
  EXPECT_TRUE(check_m_matrix(op).holds());
  // A positive zero-order term breaks diagonal dominance.
  s.c = [](double, double) { return 50.0; };
  EXPECT_FALSE(check_m_matrix(assemble(s, make_grid(d, 6.0, 8.0), WarpProfile::linear(), 2))
                   .diagonally_dominant);
}

TEST(Assemble, DeclaredBoundsAreChecked) {
  OperatorSpec s;
  s.a = [](double r, double) { return r; };
  s.bounds = CoefficientBounds{0.5, 2.0, 0.0};
  StripDomain d;
  d.r_min = 1.0;
  try {
    assemble(s, make_grid(d, 4.0, 4.0), WarpProfile::linear(), 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::AssemblyError);
  }
}

TEST(SolveDirichlet, HarmonicRingSecondOrder) {
  std::vector<double> errors;
  for (double density : {16.0, 32.0, 64.0}) {
    const Grid2D g = make_grid(ring(1.0, 2.0), 2.0, density);
    const SparseOperator op = assemble({}, g, WarpProfile::linear(), 2);
    std::vector<double> bc(g.size(), 0.0);
    for (std::size_t j = 0; j < g.xi.size(); ++j) bc[g.index(g.r.size() - 1, j)] = 1.0;
    const auto u = solve_dirichlet(op, std::vector<double>(g.size(), 0.0), bc);
    double e = 0.0;
    for (std::size_t p = 0; p < g.size(); ++p)
      e = std::max(e, std::abs(u[p] - std::log(g.r.nodes[g.row_of(p)]) / std::log(2.0)));
    errors.push_back(e);
  }
  EXPECT_LE(errors.back(), 1e-4);
  EXPECT_GE(order(errors[0], errors[1], errors[2]), 1.9);
}

TEST(SolveDirichlet, ZeroData) {
  const Grid2D g = make_grid(flat_square(), pi, 8.0);
  const SparseOperator op = assemble({}, g, WarpProfile::constant(1.0), 2);
  for (double x : solve_dirichlet(op, std::vector<double>(g.size(), 0.0))) EXPECT_EQ(x, 0.0);
}

TEST(SolveDirichlet, TorsionOnDiskIsReproduced) {
  // Delta w = -1 on the unit disk, w = (1 - r^2)/4. The pole is a natural end. Face fluxes
  // of a quadratic are exact under the midpoint rule, so only solver error remains.
  StripDomain d;
  d.r_min = 0.0;
  d.r_max = 1.0;
  d.inner = EndCondition::Natural;
  d.cross_section = CrossSection::full_circle();
  for (double density : {32.0, 64.0, 128.0}) {
    const Grid2D g = make_grid(d, 1.0, density);
    EXPECT_GT(g.r.nodes.front(), 0.0);
    const SparseOperator op = assemble({}, g, WarpProfile::linear(), 2);
    const auto w = solve_dirichlet(op, std::vector<double>(g.size(), -1.0));
    double e = 0.0;
    for (std::size_t p = 0; p < g.size(); ++p) {
      const double r = g.r.nodes[g.row_of(p)];
      e = std::max(e, std::abs(w[p] - 0.25 * (1 - r * r)));
    }
    EXPECT_LE(e, 1e-9) << density;
  }
}

TEST(WriteCoordinate, Format) {
  CsrBuilder b(2, 2);
  b.add(0, 0, 1.5);
  b.add(1, 0, -2.0);
  std::ostringstream os;
  write_coordinate(os, b.build());
  EXPECT_EQ(os.str(), "0 0 1.5\n1 0 -2\n");
}
