#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "maxprin/abp.hpp"
#include "maxprin/error.hpp"

using namespace maxprin;
using std::numbers::pi;

namespace {

ABPBundle bundle(std::int64_t t, double p, int n, double C1, double theta) {
  ABPBundle b;
  b.t_bound = t;
  b.p = p;
  b.n = n;
  b.C1 = C1;
  b.theta = theta;
  return b;
}

SparseOperator unit_disk(double density) {
  StripDomain d;
  d.r_min = 0.0;
  d.r_max = 1.0;
  d.inner = EndCondition::Natural;
  d.cross_section = CrossSection::full_circle();
  return assemble({}, make_grid(d, 1.0, density), WarpProfile::linear(), 2);
}

}  // namespace

TEST(CoverCount, Examples) {
  EXPECT_EQ(cover_count_bound(pi / 64.0, 1.0, 2), 2);
  // 100 * 2 / (pi / 64) = 4074.37
  EXPECT_EQ(cover_count_bound(100.0, 1.0, 2), 4075);
  const double w3 = 4.0 / 3.0 * pi;
  EXPECT_NEAR(unit_ball_volume(3), w3, 1e-15);
  EXPECT_EQ(cover_count_bound(w3 * std::pow(2.0 / 8.0, 3), 2.0, 3), 3);
  EXPECT_THROW(cover_count_bound(0.0, 1.0, 2), Error);
  EXPECT_THROW(cover_count_bound(1.0, -1.0, 2), Error);
}

TEST(DoublingChain, Powers) {
  EXPECT_EQ(doubling_chain_constant(2), 16.0);
  EXPECT_EQ(doubling_chain_constant(3), 64.0);
  EXPECT_EQ(doubling_chain_constant(10), 1048576.0);
}

TEST(AbpConstant, FormulaSubstitution) {
  // Independent substitution: t^{1/p} = 1, 2^{n/p} = 4, 2^{n(p+1)/p} C_Rn C1 = 16 * 4,
  // bracket 1 * 64 + 1 = 65, divided by theta = 1/2: 4 * 65 * 2 = 520.
  const LogReal c = abp_constant(bundle(1, 1.0, 2, 1.0, 0.5));
  EXPECT_NEAR(c.value(), 520.0, 520.0 * 1e-12);
  EXPECT_NEAR(c.mantissa, 5.2, 1e-12);
  EXPECT_EQ(c.exponent, 2);
  EXPECT_NEAR(abp_constant(bundle(1, 1.0, 2, 1.0, 1.0 - 1e-12)).value(), 260.0, 1e-8);
}

TEST(AbpConstant, LogSpaceMatchesDirect) {
  for (std::int64_t t : {1, 2, 3, 5})
    for (double p : {0.5, 1.0, 2.0}) {
      const ABPBundle b = bundle(t, p, 2, 1.3, 0.25);
      const double direct = abp_constant_direct(b);
      EXPECT_NEAR(abp_constant(b).value() / direct, 1.0, 1e-12) << t << " " << p;
    }
}

TEST(AbpConstant, HugeValuesStayInLogSpace) {
  const LogReal c = abp_constant(bundle(4075, 1.0, 2, 1.0, 0.5));
  EXPECT_FALSE(c.representable);
  EXPECT_TRUE(std::isinf(c.value()));
  // log C is dominated by t (ln t + t ln 64).
  EXPECT_NEAR(c.log_value, 4075.0 * std::log(64.0), 30.0);
  EXPECT_GE(c.mantissa, 1.0);
  EXPECT_LT(c.mantissa, 10.0);
}

TEST(AbpConstant, MonotonicityLattice) {
  for (int n : {2, 3})
    for (double p : {0.5, 1.0, 2.0})
      for (double C1 : {0.5, 1.0, 2.0})
        for (double theta : {0.1, 0.3, 0.5, 0.7, 0.9})
          for (std::int64_t t = 1; t < 6; ++t) {
            const double base = abp_constant(bundle(t, p, n, C1, theta)).log_value;
            EXPECT_GT(abp_constant(bundle(t + 1, p, n, C1, theta)).log_value, base);
            EXPECT_GT(abp_constant(bundle(t, p, n, 2.0 * C1, theta)).log_value, base);
            EXPECT_LT(abp_constant(bundle(t, p, n, C1, std::min(0.95, theta + 0.05))).log_value, base);
          }
}

TEST(AbpConstant, RejectsBadBundle) {
  EXPECT_THROW(abp_constant(bundle(1, 1.0, 2, 1.0, 1.0)), Error);
  EXPECT_THROW(abp_constant(bundle(0, 1.0, 2, 1.0, 0.5)), Error);
}

TEST(EmpiricalAbp, UnitDisk) {
  const SparseOperator op = unit_disk(128.0);
  const ABPCheck c = empirical_abp_check(op, std::vector<double>(op.dimension(), -1.0), 2.0);
  EXPECT_NEAR(c.sup_u, 0.25, 1e-3);
  EXPECT_NEAR(c.f_norm, std::sqrt(pi), 1e-3);
  EXPECT_NEAR(c.ratio, 1.0 / (8.0 * std::sqrt(pi)), 1e-3);
}

TEST(EmpiricalAbp, ZeroAndHomogeneity) {
  const SparseOperator op = unit_disk(32.0);
  const ABPCheck zero = empirical_abp_check(op, std::vector<double>(op.dimension(), 0.0), 2.0);
  EXPECT_EQ(zero.sup_u, 0.0);
  EXPECT_EQ(zero.ratio, 0.0);
  std::vector<double> f(op.dimension());
  for (std::size_t p = 0; p < f.size(); ++p) f[p] = -1.0 - std::cos(0.37 * p);
  const double base = empirical_abp_check(op, f, 2.0).ratio;
  for (double k : {1e-3, 1.0, 1e3}) {
    std::vector<double> g = f;
    for (double& x : g) x *= k;
    EXPECT_NEAR(empirical_abp_check(op, g, 2.0).ratio, base, 1e-10 * base);
  }
}

TEST(EmpiricalAbp, RatioBelowDeskScaleConstant) {
  const SparseOperator op = unit_disk(64.0);
  const ABPBundle b = make_abp_bundle(2, 1.0, pi, pi, 0.5, 1.0, 1.0);
  EXPECT_EQ(b.t_bound, 128);
  const ABPCheck c = empirical_abp_check(op, std::vector<double>(op.dimension(), -1.0), 2.0,
                                         b.C_final.value());
  EXPECT_TRUE(c.within);
  EXPECT_LT(std::log(c.ratio), b.C_final.log_value);
}

TEST(DiameterBound, DiskAndStrip) {
  StripDomain d;
  d.r_min = 0.0;
  d.r_max = 1.0;
  d.inner = EndCondition::Natural;
  d.cross_section = CrossSection::full_circle();
  EXPECT_DOUBLE_EQ(diameter_bound(d, WarpProfile::linear(), 1.0), 2.0);
  StripDomain s;
  s.r_min = 0.0;
  s.cross_section = CrossSection::interval(pi);
  EXPECT_NEAR(diameter_bound(s, WarpProfile::constant(1.0), 4.0), 8.0 + pi, 1e-12);
}
