#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "maxprin/discrete_operator.hpp"
#include "maxprin/geometry.hpp"

namespace maxprin {

/// Volume of the unit ball in R^n.
double unit_ball_volume(int n);

/// ceil(|Omega_r| 2^{n/2} / (omega_n (r_h / 8)^n)); ratios within 1e-12 of an integer
/// are rounded to it first.
std::int64_t cover_count_bound(double vol_omega_r, double r_h, int n);

/// C_D = 4^n.
double doubling_chain_constant(int n);

/// A positive number carried as its natural log, with a decimal (mantissa, exponent) view.
struct LogReal {
  double log_value = 0.0;
  double mantissa = 0.0;   // in [1, 10)
  std::int64_t exponent = 0;
  bool representable = true;  // exp(log_value) is a finite double

  double value() const;  // +inf when not representable
  static LogReal from_log(double log_value);
};

struct ABPBundle {
  int n = 2;
  double r_h = 1.0;
  double vol_omega = 0.0;
  double vol_omega_r = 0.0;
  std::int64_t t_bound = 1;
  double theta = 0.5;
  double p = 1.0;
  double C1 = 1.0;
  LogReal C_final;
};

/// Fills t_bound from the cover count and C_final from the explicit constant.
ABPBundle make_abp_bundle(int n, double r_h, double vol_omega, double vol_omega_r, double theta,
                          double p, double C1);

/// C = t^{1/p} 2^{n/p} [t (2^{n(p+1)/p} C_Rn C1)^t + 1] / theta^{1/p}, C_Rn = 2^n, in log space.
LogReal abp_constant(const ABPBundle& bundle);

/// Direct floating-point evaluation of the same formula (overflows for large t).
double abp_constant_direct(const ABPBundle& bundle);

/// Upper bound on the intrinsic diameter of the truncation at R: 2 (R - r_min) plus the
/// smallest sampled sigma times the fiber diameter (no fiber term across a pole).
double diameter_bound(const StripDomain& domain, const WarpProfile& profile, double R,
                      int samples = 1024);

struct ABPCheck {
  double sup_u = 0.0;
  double diam = 0.0;
  double f_norm = 0.0;  // (sum vol |f|^2)^{1/2}
  double bound = 0.0;   // diam * f_norm
  double ratio = 0.0;   // sup_u / bound, 0 when the bound vanishes
  std::optional<double> C_input;
  bool within = true;   // ratio <= C_input when given
};

/// Solves L u = f with zero boundary data and compares sup u with diam ||f||_{L^2}.
ABPCheck empirical_abp_check(const SparseOperator& op, std::span<const double> f, double diam,
                             std::optional<double> C_input = std::nullopt);

}  // namespace maxprin
