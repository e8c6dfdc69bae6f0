#include "maxprin/abp.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "maxprin/error.hpp"

namespace maxprin {

namespace {

constexpr double kLn2 = std::numbers::ln2;

void check_bundle(const ABPBundle& b) {
  if (b.n < 1 || b.t_bound < 1 || !(b.p > 0.0) || !(b.C1 > 0.0) || !(b.theta > 0.0 && b.theta < 1.0))
    throw Error(ErrorKind::DomainError, "ABP bundle needs n >= 1, t >= 1, p > 0, C1 > 0, 0 < theta < 1");
}

// log(e^a + 1) without overflow.
double log1p_exp(double a) { return a > 0.0 ? a + std::log1p(std::exp(-a)) : std::log1p(std::exp(a)); }

}  // namespace

double unit_ball_volume(int n) {
  if (n < 1) throw Error(ErrorKind::DomainError, "unit ball needs n >= 1");
  return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

std::int64_t cover_count_bound(double vol_omega_r, double r_h, int n) {
  if (!(vol_omega_r > 0.0) || !(r_h > 0.0) || n < 1)
    throw Error(ErrorKind::DomainError, "cover count needs |Omega_r| > 0, r_h > 0, n >= 1");
  const double ball = unit_ball_volume(n) * std::pow(r_h / 8.0, n);
  const double ratio = vol_omega_r * std::pow(2.0, 0.5 * n) / ball;
  if (!std::isfinite(ratio) || ratio > 9.0e18)
    throw Error(ErrorKind::DomainError, "cover count exceeds the integer range");
  const double nearest = std::round(ratio);
  const double t = std::abs(ratio - nearest) <= 1e-12 * nearest ? nearest : std::ceil(ratio);
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(t));
}

double doubling_chain_constant(int n) {
  if (n < 1) throw Error(ErrorKind::DomainError, "doubling constant needs n >= 1");
  return std::pow(4.0, n);
}

double LogReal::value() const {
  return representable ? std::exp(log_value) : std::numeric_limits<double>::infinity();
}

LogReal LogReal::from_log(double log_value) {
  LogReal r;
  r.log_value = log_value;
  const double l10 = log_value / std::numbers::ln10;
  r.exponent = static_cast<std::int64_t>(std::floor(l10));
  r.mantissa = std::pow(10.0, l10 - static_cast<double>(r.exponent));
  if (r.mantissa >= 10.0) {  // rounding at the decade boundary
    r.mantissa /= 10.0;
    ++r.exponent;
  }
  r.representable = log_value < std::log(std::numeric_limits<double>::max());
  return r;
}

LogReal abp_constant(const ABPBundle& b) {
  check_bundle(b);
  const double n = b.n, p = b.p, t = static_cast<double>(b.t_bound);
  const double log_c_rn = n * kLn2;
  const double log_base = n * (p + 1.0) / p * kLn2 + log_c_rn + std::log(b.C1);
  const double log_bracket = log1p_exp(std::log(t) + t * log_base);
  return LogReal::from_log(std::log(t) / p + n / p * kLn2 + log_bracket - std::log(b.theta) / p);
}

double abp_constant_direct(const ABPBundle& b) {
  check_bundle(b);
  const double n = b.n, p = b.p, t = static_cast<double>(b.t_bound);
  const double c_rn = std::pow(2.0, n);
  const double base = std::pow(2.0, n * (p + 1.0) / p) * c_rn * b.C1;
  return std::pow(t, 1.0 / p) * std::pow(2.0, n / p) * (t * std::pow(base, t) + 1.0) /
         std::pow(b.theta, 1.0 / p);
}

ABPBundle make_abp_bundle(int n, double r_h, double vol_omega, double vol_omega_r, double theta,
                          double p, double C1) {
  if (!(vol_omega > 0.0)) throw Error(ErrorKind::DomainError, "|Omega| must be positive");
  ABPBundle b;
  b.n = n;
  b.r_h = r_h;
  b.vol_omega = vol_omega;
  b.vol_omega_r = vol_omega_r;
  b.t_bound = cover_count_bound(vol_omega_r, r_h, n);
  b.theta = theta;
  b.p = p;
  b.C1 = C1;
  b.C_final = abp_constant(b);
  return b;
}

double diameter_bound(const StripDomain& domain, const WarpProfile& profile, double R,
                      int samples) {
  if (!(R > domain.r_min)) throw Error(ErrorKind::DomainError, "diameter needs R > r_min");
  const CrossSection& cs = domain.cross_section;
  const bool pole = domain.inner == EndCondition::Natural && domain.r_min == 0.0;
  double fiber = 0.0;
  switch (cs.kind()) {
    case CrossSectionKind::CircleArc:
    case CrossSectionKind::Interval: fiber = cs.extent(); break;
    case CrossSectionKind::SphereCap: fiber = std::min(2.0 * cs.extent(), std::numbers::pi); break;
    case CrossSectionKind::FullCircle:
    case CrossSectionKind::FullSphere: fiber = std::numbers::pi; break;
  }
  double min_sigma = kInfinity;
  if (!pole) {
    for (int k = 0; k <= samples; ++k)
      min_sigma = std::min(min_sigma, profile.eval(domain.r_min + (R - domain.r_min) * k / samples).sigma);
  } else {
    min_sigma = 0.0;
  }
  return 2.0 * (R - domain.r_min) + min_sigma * fiber;
}

ABPCheck empirical_abp_check(const SparseOperator& op, std::span<const double> f, double diam,
                             std::optional<double> C_input) {
  if (f.size() != op.dimension())
    throw Error(ErrorKind::DimensionMismatch, "empirical_abp_check: length mismatch");
  if (!(diam > 0.0)) throw Error(ErrorKind::DomainError, "diameter must be positive");
  ABPCheck c;
  c.diam = diam;
  c.C_input = C_input;
  double s = 0.0;
  for (std::size_t p = 0; p < f.size(); ++p) s += op.volume[p] * f[p] * f[p];
  c.f_norm = std::sqrt(s);
  c.bound = diam * c.f_norm;
  CgOptions cg;
  cg.relative_tolerance = 1e-12;
  const std::vector<double> u = c.f_norm > 0.0 ? solve_dirichlet(op, f, {}, cg)
                                                : std::vector<double>(f.size(), 0.0);
  c.sup_u = 0.0;
  for (double x : u) c.sup_u = std::max(c.sup_u, x);
  c.ratio = c.bound > 0.0 ? c.sup_u / c.bound : 0.0;
  if (C_input) c.within = c.ratio <= *C_input;
  return c;
}

}  // namespace maxprin
