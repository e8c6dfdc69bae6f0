#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "maxprin/geometry.hpp"

namespace maxprin {

/// A radial function with analytic first and second derivatives.
struct RadialFunction {
  std::function<double(double)> value;
  std::function<double(double)> d1;
  std::function<double(double)> d2;
  std::string label;
};

enum class ConeBarrierForm { Power, Logarithmic };

/// Barrier for the complement of a cone in R^n: r^alpha psi for n >= 3, ln r + C0 for n = 2.
struct ConeBarrier {
  ConeBarrierForm form = ConeBarrierForm::Power;
  int n = 3;
  double lambda1 = 0.0;
  double alpha = 0.0;  // positive root of alpha (alpha + n - 2) = lambda1, for every n
  double c0 = 0.0;     // only meaningful for the logarithmic form
  double r_min = 1.0;

  /// Radial factor: r^alpha, or ln r + C0.
  RadialFunction radial() const;
};

ConeBarrier euclidean_cone_barrier(int n, double lambda1, double r_min = 1.0);

/// Tolerance on the sign of the radial residual.
inline constexpr double kBarrierSlack = 1e-12;

struct BarrierCertificate {
  CaseTag tag;
  double A = 0.0;     // tail threshold
  double beta = 1.0;  // exponent of r^beta or sigma^beta, 1 for h = r
  std::string form;   // "r", "r^beta", "sigma^beta"
  double lambda1 = 0.0;
  int m = 2;
  std::vector<double> r_samples;
  std::vector<double> h_samples;
  std::vector<double> residuals;
  double max_residual = 0.0;
  bool diverges = false;
  bool divergence_is_heuristic = true;
};

/// h'' + (m-1)(sigma'/sigma) h' - (lambda1 / sigma^2) h at one radius.
double barrier_residual(const RadialFunction& h, const WarpProfile& profile, double lambda1,
                        int m, double r);

/// Maximum of barrier_residual over the samples; a certificate is valid iff <= 0.
double verify_barrier_inequality(const RadialFunction& h, const WarpProfile& profile,
                                 double lambda1, int m, std::span<const double> r_samples);

/// The radial barrier selected for a classified case.
RadialFunction barrier_function(const CaseTag& tag, const WarpProfile& profile, double lambda1,
                                int m, std::span<const double> r_grid, double* beta_out = nullptr);

/// Builds and certifies h on r_grid. Throws NoCertificate when no tail threshold within
/// [A0, A0 + 10 W] makes the residual nonpositive.
BarrierCertificate build_barrier(const CaseTag& tag, const WarpProfile& profile, double lambda1,
                                 int m, std::span<const double> r_grid);

/// Growth heuristic: strictly increasing on the last quartile and h(last) > 10 h(first).
bool verify_divergence(std::span<const double> h_samples);
bool verify_divergence(const BarrierCertificate& certificate);

}  // namespace maxprin
