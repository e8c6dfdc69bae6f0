#include "maxprin/barriers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "maxprin/error.hpp"

namespace maxprin {

RadialFunction ConeBarrier::radial() const {
  if (form == ConeBarrierForm::Logarithmic) {
    const double c = c0;
    return {[c](double r) { return std::log(r) + c; }, [](double r) { return 1.0 / r; },
            [](double r) { return -1.0 / (r * r); }, "ln r + C0"};
  }
  const double a = alpha;
  return {[a](double r) { return std::pow(r, a); },
          [a](double r) { return a * std::pow(r, a - 1.0); },
          [a](double r) { return a * (a - 1.0) * std::pow(r, a - 2.0); }, "r^alpha"};
}

ConeBarrier euclidean_cone_barrier(int n, double lambda1, double r_min) {
  if (n < 2 || !(lambda1 > 0.0) || !(r_min > 0.0))
    throw Error(ErrorKind::DomainError, "cone barrier needs n >= 2, lambda1 > 0, r_min > 0");
  ConeBarrier b;
  b.n = n;
  b.lambda1 = lambda1;
  b.r_min = r_min;
  // Positive root of a^2 + (n-2) a - lambda1 = 0 in the cancellation-free form.
  const double k = n - 2.0;
  b.alpha = 2.0 * lambda1 / (k + std::sqrt(k * k + 4.0 * lambda1));
  if (n == 2) {
    b.form = ConeBarrierForm::Logarithmic;
    b.c0 = 1.0 - std::log(r_min);
  }
  return b;
}

double barrier_residual(const RadialFunction& h, const WarpProfile& profile, double lambda1,
                        int m, double r) {
  const WarpValues w = profile.eval(r);
  return h.d2(r) + (m - 1) * (w.d1 / w.sigma) * h.d1(r) - lambda1 * h.value(r) / (w.sigma * w.sigma);
}

double verify_barrier_inequality(const RadialFunction& h, const WarpProfile& profile,
                                 double lambda1, int m, std::span<const double> r_samples) {
  double worst = -kInfinity;
  for (double r : r_samples) worst = std::max(worst, barrier_residual(h, profile, lambda1, m, r));
  return worst;
}

RadialFunction barrier_function(const CaseTag& tag, const WarpProfile& profile, double lambda1,
                                int m, std::span<const double> r_grid, double* beta_out) {
  auto set_beta = [&](double b) {
    if (beta_out) *beta_out = b;
  };
  const RadialFunction identity{[](double r) { return r; }, [](double) { return 1.0; },
                                [](double) { return 0.0; }, "r"};
  // K: largest sampled sigma' over the window and the grid.
  double k = tag.max_d1;
  for (double r : r_grid) k = std::max(k, profile.eval(r).d1);

  switch (tag.value) {
    case CaseKind::Case1:
    case CaseKind::Case3:
      set_beta(1.0);
      return identity;
    case CaseKind::Case2a: {
      // (m-1) K beta - lambda1 / c <= 0 with half the admissible slack.
      const double c = tag.limit_estimate;
      double beta = 0.5;
      if (k > 0.0) beta = std::min(0.5, lambda1 / (2.0 * (m - 1) * k * c));
      set_beta(beta);
      return {[beta](double r) { return std::pow(r, beta); },
              [beta](double r) { return beta * std::pow(r, beta - 1.0); },
              [beta](double r) { return beta * (beta - 1.0) * std::pow(r, beta - 2.0); },
              "r^beta"};
    }
    case CaseKind::Case2b: {
      // Largest beta in (0, 1] with K^2 beta (beta + m - 2) <= lambda1.
      double beta = 1.0;
      if (k > 0.0) {
        const double q = m - 2.0;
        const double root = 0.5 * (-q + std::sqrt(q * q + 4.0 * lambda1 / (k * k)));
        beta = std::min(1.0, root);
      }
      set_beta(beta);
      const WarpProfile p = profile;
      return {[p, beta](double r) { return std::pow(p.eval(r).sigma, beta); },
              [p, beta](double r) {
                const WarpValues w = p.eval(r);
                return beta * std::pow(w.sigma, beta - 1.0) * w.d1;
              },
              [p, beta](double r) {
                const WarpValues w = p.eval(r);
                return beta * (beta - 1.0) * std::pow(w.sigma, beta - 2.0) * w.d1 * w.d1 +
                       beta * std::pow(w.sigma, beta - 1.0) * w.d2;
              },
              "sigma^beta"};
    }
    case CaseKind::Unclassified:
      break;
  }
  throw Error(ErrorKind::NoCertificate, "no barrier for an Unclassified profile");
}

BarrierCertificate build_barrier(const CaseTag& tag, const WarpProfile& profile, double lambda1,
                                 int m, std::span<const double> r_grid) {
  if (tag.value == CaseKind::Unclassified)
    throw Error(ErrorKind::NoCertificate, "profile is Unclassified on its tail window");
  if (r_grid.size() < 2 || !(lambda1 > 0.0) || m < 2)
    throw Error(ErrorKind::DomainError, "build_barrier needs >= 2 radii, lambda1 > 0, m >= 2");
  if (!std::is_sorted(r_grid.begin(), r_grid.end()))
    throw Error(ErrorKind::DomainError, "r_grid must be increasing");

  BarrierCertificate cert;
  cert.tag = tag;
  cert.lambda1 = lambda1;
  cert.m = m;
  const RadialFunction h = barrier_function(tag, profile, lambda1, m, r_grid, &cert.beta);
  cert.form = h.label;

  std::vector<double> residuals(r_grid.size());
  for (std::size_t k = 0; k < r_grid.size(); ++k)
    residuals[k] = barrier_residual(h, profile, lambda1, m, r_grid[k]);

  // Smallest grid radius past which every residual is nonpositive.
  std::size_t first = r_grid.size();
  while (first > 0 && residuals[first - 1] <= kBarrierSlack) --first;
  const double search_bound = tag.window_start + 10.0 * tag.window_width;
  if (first + 1 >= r_grid.size() || r_grid[first] > search_bound) {
    std::ostringstream os;
    os << h.label << " has a positive residual beyond the search bound A0 + 10W = "
       << search_bound;
    throw Error(ErrorKind::NoCertificate, os.str());
  }

  cert.A = r_grid[first];
  cert.r_samples.assign(r_grid.begin() + static_cast<std::ptrdiff_t>(first), r_grid.end());
  cert.residuals.assign(residuals.begin() + static_cast<std::ptrdiff_t>(first), residuals.end());
  cert.h_samples.reserve(cert.r_samples.size());
  for (double r : cert.r_samples) cert.h_samples.push_back(h.value(r));
  cert.max_residual = *std::max_element(cert.residuals.begin(), cert.residuals.end());
  cert.diverges = cert.h_samples.size() >= 16 && verify_divergence(cert.h_samples);
  return cert;
}

bool verify_divergence(std::span<const double> h) {
  if (h.size() < 16) throw Error(ErrorKind::DomainError, "divergence check needs >= 16 samples");
  const std::size_t start = h.size() - h.size() / 4;
  for (std::size_t k = start; k < h.size(); ++k)
    if (!(h[k] > h[k - 1])) return false;
  return h.back() > 10.0 * h.front();
}

bool verify_divergence(const BarrierCertificate& certificate) {
  return verify_divergence(certificate.h_samples);
}

}  // namespace maxprin
