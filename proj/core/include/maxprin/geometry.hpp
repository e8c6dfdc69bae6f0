#pragma once

// Warped products M = [0, inf) x_sigma N with metric dr^2 + sigma(r)^2 g_N.

#include <functional>
#include <limits>
#include <optional>
#include <string>

namespace maxprin {

enum class WarpFamily { Constant, Linear, AffinePower, ExpDecay, ShiftedTanh, Custom };

struct WarpValues {
  double sigma = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

/// Warp function sigma together with its first two derivatives.
class WarpProfile {
 public:
  using Fn = std::function<double(double)>;

  static WarpProfile constant(double a);
  static WarpProfile linear();
  static WarpProfile affine_power(double beta);
  static WarpProfile exp_decay();
  static WarpProfile shifted_tanh(double a);
  static WarpProfile custom(std::string name, Fn sigma, Fn d1, Fn d2);

  WarpFamily family() const { return family_; }
  /// The family parameter (a for Constant/ShiftedTanh, beta for AffinePower, 0 otherwise).
  double parameter() const { return param_; }
  std::string name() const;

  /// Throws DomainError for r < 0 and NonPositiveWarp when sigma(r) <= 0.
  WarpValues eval(double r) const;

 private:
  WarpProfile(WarpFamily family, double param) : family_(family), param_(param) {}

  WarpFamily family_;
  double param_;
  std::string custom_name_;
  Fn sigma_, d1_, d2_;
};

WarpValues warp_eval(const WarpProfile& profile, double r);

/// sigma(r)^(m-1), the radial density of the Riemannian volume.
double measure_weight(const WarpProfile& profile, int m, double r);

// ---------------------------------------------------------------------------

enum class EndCondition { Dirichlet, Natural };

enum class CrossSectionKind { CircleArc, Interval, SphereCap, FullCircle, FullSphere };

/// The fiber patch Lambda, described by its reduced coordinate xi in [0, extent].
/// SphereCap and FullSphere are axisymmetric reductions of S^2 (xi = polar angle).
class CrossSection {
 public:
  static CrossSection circle_arc(double theta);
  static CrossSection interval(double length);
  static CrossSection sphere_cap(double polar_angle);
  static CrossSection full_circle();
  static CrossSection full_sphere();

  CrossSectionKind kind() const { return kind_; }
  double extent() const { return extent_; }
  int dim() const;
  /// True when the closure of the patch is not the whole fiber.
  bool is_proper() const;
  bool periodic() const { return kind_ == CrossSectionKind::FullCircle; }
  EndCondition lower_end() const;
  EndCondition upper_end() const;
  /// Density of the fiber volume in the reduced coordinate (1 or sin xi).
  double fiber_weight(double xi) const;
  /// Exact integral of fiber_weight over [a, b].
  double fiber_volume(double a, double b) const;
  std::string name() const;

 private:
  CrossSection(CrossSectionKind kind, double extent) : kind_(kind), extent_(extent) {}
  CrossSectionKind kind_;
  double extent_;
};

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct StripDomain {
  double r_min = 1.0;
  double r_max = kInfinity;
  CrossSection cross_section = CrossSection::circle_arc(3.141592653589793);
  int m = 2;
  EndCondition inner = EndCondition::Dirichlet;

  bool bounded() const { return r_max < kInfinity; }
  /// Checks the structural invariants; throws DomainError.
  void validate(const WarpProfile& profile) const;
};

// ---------------------------------------------------------------------------

enum class CaseKind { Case1, Case2a, Case2b, Case3, Unclassified };

std::string to_string(CaseKind kind);

struct CaseTag {
  CaseKind value = CaseKind::Unclassified;
  double window_start = 0.0;
  double window_width = 0.0;
  int samples = 0;
  double limit_estimate = 0.0;  // sigma at the window end
  bool finite_limit = false;
  bool diverges = false;
  double max_d1 = 0.0;  // K = max sampled sigma'
};

struct ClassifyOptions {
  /// Exponent for the Case3 growth test; Case3 is never reported without it.
  std::optional<double> declared_beta;
  double finite_limit_tolerance = 1e-3;
  double divergence_factor = 2.0;
  double log_derivative_bound = 10.0;
};

CaseTag classify_case(const WarpProfile& profile, double window_start, double window_width,
                      int samples, const ClassifyOptions& options = {});

}  // namespace maxprin
