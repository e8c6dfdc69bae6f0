#include "maxprin/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>
#include <vector>

#include "maxprin/error.hpp"

namespace maxprin {

WarpProfile WarpProfile::constant(double a) {
  if (!(a > 0.0)) throw Error(ErrorKind::NonPositiveWarp, "constant warp needs a > 0");
  return WarpProfile(WarpFamily::Constant, a);
}

WarpProfile WarpProfile::linear() { return WarpProfile(WarpFamily::Linear, 0.0); }

WarpProfile WarpProfile::affine_power(double beta) {
  return WarpProfile(WarpFamily::AffinePower, beta);
}

WarpProfile WarpProfile::exp_decay() { return WarpProfile(WarpFamily::ExpDecay, 0.0); }

WarpProfile WarpProfile::shifted_tanh(double a) {
  if (!(a > 0.0)) throw Error(ErrorKind::NonPositiveWarp, "shifted tanh needs a > 0");
  return WarpProfile(WarpFamily::ShiftedTanh, a);
}

WarpProfile WarpProfile::custom(std::string name, Fn sigma, Fn d1, Fn d2) {
  WarpProfile p(WarpFamily::Custom, 0.0);
  p.custom_name_ = std::move(name);
  p.sigma_ = std::move(sigma);
  p.d1_ = std::move(d1);
  p.d2_ = std::move(d2);
  return p;
}

std::string WarpProfile::name() const {
  std::ostringstream os;
  switch (family_) {
    case WarpFamily::Constant: os << "constant(" << param_ << ")"; break;
    case WarpFamily::Linear: os << "linear"; break;
    case WarpFamily::AffinePower: os << "affine_power(" << param_ << ")"; break;
    case WarpFamily::ExpDecay: os << "exp_decay"; break;
    case WarpFamily::ShiftedTanh: os << "shifted_tanh(" << param_ << ")"; break;
    case WarpFamily::Custom: os << "custom:" << custom_name_; break;
  }
  return os.str();
}

WarpValues WarpProfile::eval(double r) const {
  if (!(r >= 0.0)) throw Error(ErrorKind::DomainError, "warp evaluated at r < 0");
  WarpValues v;
  switch (family_) {
    case WarpFamily::Constant:
      v = {param_, 0.0, 0.0};
      break;
    case WarpFamily::Linear:
      v = {r, 1.0, 0.0};
      break;
    case WarpFamily::AffinePower: {
      const double b = param_;
      const double s = 1.0 + r;
      v = {std::pow(s, b), b * std::pow(s, b - 1.0), b * (b - 1.0) * std::pow(s, b - 2.0)};
      break;
    }
    case WarpFamily::ExpDecay: {
      const double e = std::exp(-r);
      v = {e, -e, e};
      break;
    }
    case WarpFamily::ShiftedTanh: {
      const double t = std::tanh(r);
      const double sech2 = 1.0 - t * t;
      v = {param_ + t, sech2, -2.0 * t * sech2};
      break;
    }
    case WarpFamily::Custom:
      v = {sigma_(r), d1_(r), d2_(r)};
      break;
  }
  if (!(v.sigma > 0.0)) {
    std::ostringstream os;
    os << name() << " has sigma(" << r << ") = " << v.sigma;
    throw Error(ErrorKind::NonPositiveWarp, os.str());
  }
  return v;
}

WarpValues warp_eval(const WarpProfile& profile, double r) { return profile.eval(r); }

double measure_weight(const WarpProfile& profile, int m, double r) {
  if (m < 2) throw Error(ErrorKind::DomainError, "ambient dimension m must be >= 2");
  return std::pow(profile.eval(r).sigma, m - 1);
}

// ---------------------------------------------------------------------------

CrossSection CrossSection::circle_arc(double theta) {
  if (!(theta > 0.0 && theta < 2.0 * std::numbers::pi))
    throw Error(ErrorKind::DomainError, "circle arc needs 0 < theta < 2 pi");
  return CrossSection(CrossSectionKind::CircleArc, theta);
}

CrossSection CrossSection::interval(double length) {
  if (!(length > 0.0)) throw Error(ErrorKind::DomainError, "interval needs L > 0");
  return CrossSection(CrossSectionKind::Interval, length);
}

CrossSection CrossSection::sphere_cap(double polar_angle) {
  if (!(polar_angle > 0.0 && polar_angle < std::numbers::pi))
    throw Error(ErrorKind::DomainError, "sphere cap needs 0 < Theta < pi");
  return CrossSection(CrossSectionKind::SphereCap, polar_angle);
}

CrossSection CrossSection::full_circle() {
  return CrossSection(CrossSectionKind::FullCircle, 2.0 * std::numbers::pi);
}

CrossSection CrossSection::full_sphere() {
  return CrossSection(CrossSectionKind::FullSphere, std::numbers::pi);
}

int CrossSection::dim() const {
  switch (kind_) {
    case CrossSectionKind::SphereCap:
    case CrossSectionKind::FullSphere:
      return 2;
    default:
      return 1;
  }
}

bool CrossSection::is_proper() const {
  return kind_ != CrossSectionKind::FullCircle && kind_ != CrossSectionKind::FullSphere;
}

EndCondition CrossSection::lower_end() const {
  switch (kind_) {
    case CrossSectionKind::SphereCap:
    case CrossSectionKind::FullSphere:
      return EndCondition::Natural;
    default:
      return EndCondition::Dirichlet;
  }
}

EndCondition CrossSection::upper_end() const {
  return kind_ == CrossSectionKind::FullSphere ? EndCondition::Natural : EndCondition::Dirichlet;
}

double CrossSection::fiber_weight(double xi) const {
  return dim() == 2 ? std::sin(xi) : 1.0;
}

double CrossSection::fiber_volume(double a, double b) const {
  return dim() == 2 ? std::cos(a) - std::cos(b) : b - a;
}

std::string CrossSection::name() const {
  std::ostringstream os;
  switch (kind_) {
    case CrossSectionKind::CircleArc: os << "circle_arc(" << extent_ << ")"; break;
    case CrossSectionKind::Interval: os << "interval(" << extent_ << ")"; break;
    case CrossSectionKind::SphereCap: os << "sphere_cap(" << extent_ << ")"; break;
    case CrossSectionKind::FullCircle: os << "full_circle"; break;
    case CrossSectionKind::FullSphere: os << "full_sphere"; break;
  }
  return os.str();
}

void StripDomain::validate(const WarpProfile& profile) const {
  if (m < 2) throw Error(ErrorKind::DomainError, "ambient dimension m must be >= 2");
  if (cross_section.dim() + 1 != m)
    throw Error(ErrorKind::DomainError, "m must equal 1 + dim of the cross-section");
  if (!(r_min >= 0.0)) throw Error(ErrorKind::DomainError, "r_min must be >= 0");
  if (!(r_max > r_min)) throw Error(ErrorKind::DomainError, "r_max must exceed r_min");
  // A Dirichlet edge carries nodes at r_min, so sigma must be positive there. A natural edge
  // at r_min = 0 is a zero-flux face and may sit on the pole.
  if (!(inner == EndCondition::Natural && r_min == 0.0)) profile.eval(r_min);
}

// ---------------------------------------------------------------------------

std::string to_string(CaseKind kind) {
  switch (kind) {
    case CaseKind::Case1: return "Case1";
    case CaseKind::Case2a: return "Case2a";
    case CaseKind::Case2b: return "Case2b";
    case CaseKind::Case3: return "Case3";
    case CaseKind::Unclassified: return "Unclassified";
  }
  return "Unclassified";
}

CaseTag classify_case(const WarpProfile& profile, double window_start, double window_width,
                      int samples, const ClassifyOptions& options) {
  if (!(window_start >= 0.0) || !(window_width > 0.0) || samples < 16)
    throw Error(ErrorKind::DomainError, "classify_case needs A0 >= 0, W > 0, samples >= 16");

  CaseTag tag;
  tag.window_start = window_start;
  tag.window_width = window_width;
  tag.samples = samples;

  std::vector<double> r(samples);
  std::vector<WarpValues> v(samples);
  for (int k = 0; k < samples; ++k) {
    r[k] = window_start + window_width * k / (samples - 1);
    v[k] = profile.eval(r[k]);
  }

  bool d2_nonneg = true, d2_nonpos = true, nonincreasing = true;
  double max_d1 = -kInfinity, max_log_d1 = 0.0;
  for (const auto& w : v) {
    d2_nonneg = d2_nonneg && w.d2 >= 0.0;
    d2_nonpos = d2_nonpos && w.d2 <= 0.0;
    nonincreasing = nonincreasing && w.d1 <= 0.0;
    max_d1 = std::max(max_d1, w.d1);
    max_log_d1 = std::max(max_log_d1, std::abs(w.d1 / w.sigma));
  }
  tag.max_d1 = max_d1;

  const double s_start = v.front().sigma;
  const double s_end = v.back().sigma;
  const double s_mid = profile.eval(window_start + 0.5 * window_width).sigma;
  tag.limit_estimate = s_end;
  tag.finite_limit = std::abs(s_end - s_mid) <= options.finite_limit_tolerance * s_end;
  tag.diverges = s_end > options.divergence_factor * s_start;

  // Convex and nonincreasing: bounded below by 0, so the limit exists in [0, inf).
  if (d2_nonneg && nonincreasing) {
    tag.finite_limit = true;
    tag.value = CaseKind::Case1;
    return tag;
  }
  if (d2_nonpos && tag.finite_limit && !tag.diverges) {
    tag.value = CaseKind::Case2a;
    return tag;
  }
  if (d2_nonpos && tag.diverges) {
    tag.value = CaseKind::Case2b;
    return tag;
  }
  if (options.declared_beta && *options.declared_beta > 0.0 && *options.declared_beta < 0.5 &&
      window_start > 0.0) {
    const double beta = *options.declared_beta;
    double head = 0.0, tail = 0.0;
    for (int k = 0; k < samples; ++k) {
      const double ratio = v[k].sigma / std::pow(r[k], beta);
      double& slot = k < samples / 2 ? head : tail;
      slot = std::max(slot, ratio);
    }
    if (tail <= 2.0 * head && max_log_d1 <= options.log_derivative_bound) {
      tag.value = CaseKind::Case3;
      return tag;
    }
  }
  tag.value = CaseKind::Unclassified;
  return tag;
}

}  // namespace maxprin
