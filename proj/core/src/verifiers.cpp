#include "maxprin/verifiers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "maxprin/error.hpp"

namespace maxprin {

namespace {

constexpr double kRelativeTolerance = 1e-8;
constexpr double kAbsoluteTolerance = 1e-12;
constexpr double kWeightFloor = 1e-12;

double mp_tolerance(std::span<const double> u) {
  return kRelativeTolerance * norm_inf(u) + kAbsoluteTolerance;
}

std::size_t nearest(const std::vector<double>& nodes, double x) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < nodes.size(); ++k)
    if (std::abs(nodes[k] - x) < std::abs(nodes[best] - x)) best = k;
  return best;
}

double basis(DecayModel model, double R, double k) {
  switch (model) {
    case DecayModel::Logarithmic: return 1.0 / std::log(R);
    case DecayModel::Power: return std::pow(R, -k);
    case DecayModel::Exponential: return std::exp(-k * R);
  }
  return 0.0;
}

// Weighted least squares for (L, c) at fixed k; weights 1/p.
DecayFit fit_linear(DecayModel model, double k, std::span<const double> R,
                    std::span<const double> p) {
  double s11 = 0, s12 = 0, s22 = 0, b1 = 0, b2 = 0;
  for (std::size_t i = 0; i < R.size(); ++i) {
    const double w = 1.0 / std::max(p[i], kWeightFloor);
    const double g = basis(model, R[i], k);
    s11 += w * w;
    s12 += w * w * g;
    s22 += w * w * g * g;
    b1 += w * w * p[i];
    b2 += w * w * g * p[i];
  }
  DecayFit f;
  f.model = model;
  f.rate = k;
  const double det = s11 * s22 - s12 * s12;
  if (std::abs(det) <= 1e-14 * s11 * s22) {
    f.residual = kInfinity;
    return f;
  }
  f.limit = (b1 * s22 - b2 * s12) / det;
  f.scale = (s11 * b2 - s12 * b1) / det;
  double ss = 0.0;
  for (std::size_t i = 0; i < R.size(); ++i) {
    const double e = (f.limit + f.scale * basis(model, R[i], k) - p[i]) /
                     std::max(p[i], kWeightFloor);
    ss += e * e;
  }
  f.residual = std::sqrt(ss / static_cast<double>(R.size()));
  return f;
}

// Scan log k over [1e-3, 1e2], then golden-section refinement around the best cell.
DecayFit fit_rate(DecayModel model, std::span<const double> R, std::span<const double> p) {
  constexpr int kScan = 400;
  const double lo = std::log(1e-3), hi = std::log(1e2);
  auto at = [&](double t) { return fit_linear(model, std::exp(t), R, p); };
  int best = 0;
  DecayFit best_fit = at(lo);
  for (int i = 1; i <= kScan; ++i) {
    const DecayFit f = at(lo + (hi - lo) * i / kScan);
    if (f.residual < best_fit.residual) {
      best_fit = f;
      best = i;
    }
  }
  double a = lo + (hi - lo) * std::max(0, best - 1) / kScan;
  double b = lo + (hi - lo) * std::min(kScan, best + 1) / kScan;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  DecayFit f1 = at(x1), f2 = at(x2);
  for (int it = 0; it < 80; ++it) {
    if (f1.residual < f2.residual) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = at(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = at(x2);
    }
  }
  for (const DecayFit& f : {f1, f2})
    if (f.residual < best_fit.residual) best_fit = f;
  return best_fit;
}

}  // namespace

MPVerdict check_maximum_principle(const SparseOperator& op, std::span<const double> u,
                                  const ExhaustionReport& lambda_report) {
  if (u.size() != op.dimension())
    throw Error(ErrorKind::DimensionMismatch, "check_maximum_principle: length mismatch");
  MPVerdict v;
  v.tolerance = mp_tolerance(u);
  v.lambda_limit = lambda_report.extrapolated_limit;
  v.lambda_positive = lambda1_positive(lambda_report);

  const std::vector<double> lu = apply(op, u);
  double diag_scale = 0.0, lu_scale = 0.0;
  v.subsolution_residual = kInfinity;
  for (std::size_t p : op.interior) {
    diag_scale = std::max(diag_scale, std::abs(op.matrix.at(p, p)));
    lu_scale = std::max(lu_scale, std::abs(lu[p]));
    v.subsolution_residual = std::min(v.subsolution_residual, lu[p]);
  }
  const double lu_tol =
      kRelativeTolerance * std::max(lu_scale, diag_scale * norm_inf(u)) + kAbsoluteTolerance;
  if (v.subsolution_residual < -lu_tol) {
    std::ostringstream os;
    os << "L u >= 0 fails: min L u = " << v.subsolution_residual << " < -" << lu_tol;
    throw Error(ErrorKind::NotASubsolution, os.str());
  }

  v.max_boundary_value = -kInfinity;
  v.max_interior_value = -kInfinity;
  for (std::size_t p = 0; p < u.size(); ++p) {
    double& slot = op.grid.dirichlet[p] ? v.max_boundary_value : v.max_interior_value;
    slot = std::max(slot, u[p]);
  }
  if (v.max_boundary_value > v.tolerance) {
    std::ostringstream os;
    os << "u <= 0 on the boundary fails: max = " << v.max_boundary_value;
    throw Error(ErrorKind::NotASubsolution, os.str());
  }
  v.holds = v.max_interior_value <= v.tolerance;
  return v;
}

Counterexample generate_counterexample(const StripDomain& domain, const OperatorSpec& spec,
                                       const WarpProfile& profile,
                                       const ExhaustionReport& lambda_report, double shift,
                                       double density, int xi_intervals,
                                       std::optional<double> margin) {
  const double m = margin.value_or(3.0 * lambda_report.fit_residual);
  if (!(shift > lambda_report.extrapolated_limit + m)) {
    std::ostringstream os;
    os << "shift " << shift << " does not exceed lambda1 = " << lambda_report.extrapolated_limit
       << " by the margin " << m;
    throw Error(ErrorKind::ShiftTooSmall, os.str());
  }
  if (lambda_report.R_list.empty())
    throw Error(ErrorKind::DomainError, "counterexample needs a report with radii");

  OperatorSpec shifted = spec;
  if (!shifted.c_nodal.empty())
    throw Error(ErrorKind::DomainError, "counterexample needs a field c, not nodal values");
  const Field base = spec.c;
  shifted.c = [base, shift](double r, double xi) { return base(r, xi) + shift; };
  shifted.bounds.reset();

  std::vector<double> radii = lambda_report.R_list;
  std::vector<double> known = lambda_report.lambda_list;
  const double last = radii.back();
  for (double R = 2.0 * last; R <= 64.0 * last && !(domain.bounded() && R > domain.r_max);
       R *= 2.0)
    radii.push_back(R);

  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (k < known.size() && !(known[k] < shift)) continue;
    const Grid2D grid = make_grid(domain, radii[k], density, xi_intervals);
    SparseOperator op = assemble(shifted, grid, profile, domain.m);
    EigenPair pair = principal_eigenpair(op);
    if (!(pair.lambda < 0.0)) continue;
    Counterexample out;
    out.R = radii[k];
    out.shifted_lambda = pair.lambda;
    out.u = std::move(pair.vector);
    out.verdict = check_maximum_principle(op, out.u, lambda_report);
    out.op = std::move(op);
    return out;
  }
  throw Error(ErrorKind::ShiftTooSmall, "no truncation has lambda1^R below the shift");
}

std::string to_string(BcnOutcome outcome) {
  switch (outcome) {
    case BcnOutcome::Holds: return "Holds";
    case BcnOutcome::Inapplicable: return "Inapplicable";
    case BcnOutcome::Violated: return "Violated";
  }
  return "Inapplicable";
}

BcnVerdict bcn_quotient_check(const Grid2D& grid, std::span<const double> u,
                              std::span<const double> phi, std::span<const double> cap_radii) {
  if (u.size() != grid.size() || phi.size() != grid.size())
    throw Error(ErrorKind::DimensionMismatch, "bcn_quotient_check: length mismatch");
  for (std::size_t p = 0; p < phi.size(); ++p)
    if (!(phi[p] > 0.0)) {
      std::ostringstream os;
      os << "phi(" << grid.r.nodes[grid.row_of(p)] << ", " << grid.xi.nodes[grid.col_of(p)]
         << ") = " << phi[p] << " is not positive";
      throw Error(ErrorKind::BarrierNotPositive, os.str());
    }

  BcnVerdict v;
  v.tolerance = mp_tolerance(u);
  const std::size_t nr = grid.r.size(), nx = grid.xi.size();
  std::vector<std::size_t> rows;
  if (cap_radii.empty()) {
    for (std::size_t i = nr / 4; i < nr; ++i) rows.push_back(i);
  } else {
    for (double R : cap_radii) rows.push_back(nearest(grid.r.nodes, R));
  }
  for (std::size_t i : rows) {
    double s = -kInfinity;
    for (std::size_t j = 0; j < nx; ++j) {
      const std::size_t p = grid.index(i, j);
      s = std::max(s, u[p] / phi[p]);
    }
    v.cap_radii.push_back(grid.r.nodes[i]);
    v.cap_sup.push_back(s);
  }

  const std::size_t outer = nr - 1;
  v.max_boundary_u = -kInfinity;
  v.max_interior_u = -kInfinity;
  for (std::size_t p = 0; p < u.size(); ++p) {
    if (grid.dirichlet[p]) {
      if (grid.row_of(p) != outer || grid.xi.is_dirichlet(grid.col_of(p)))
        v.max_boundary_u = std::max(v.max_boundary_u, u[p]);
    } else {
      v.max_interior_u = std::max(v.max_interior_u, u[p]);
    }
  }

  // The quotient tolerance is relative to the size of w on the caps.
  double w_scale = 0.0;
  for (double s : v.cap_sup) w_scale = std::max(w_scale, std::abs(s));
  const double w_tol = kRelativeTolerance * w_scale + kAbsoluteTolerance;
  if (v.max_boundary_u > v.tolerance) {
    v.outcome = BcnOutcome::Inapplicable;
    v.reason = "u > 0 on the lateral or inner boundary";
    return v;
  }
  for (std::size_t k = 1; k < v.cap_sup.size(); ++k)
    if (v.cap_sup[k] > v.cap_sup[k - 1] + w_tol) {
      v.outcome = BcnOutcome::Inapplicable;
      v.reason = "cap sups of u/phi are not nonincreasing";
      return v;
    }
  if (!v.cap_sup.empty() && v.cap_sup.back() > w_tol) {
    v.outcome = BcnOutcome::Inapplicable;
    v.reason = "cap sup of u/phi does not reach <= 0";
    return v;
  }
  v.outcome = v.max_interior_u <= v.tolerance ? BcnOutcome::Holds : BcnOutcome::Violated;
  v.reason = v.outcome == BcnOutcome::Holds ? "u <= 0 inside" : "u > 0 inside";
  return v;
}

Probe default_probe(const StripDomain& domain) {
  return {domain.r_min + 1.0, 0.5 * domain.cross_section.extent()};
}

CapPotential cap_potential(const StripDomain& domain, const WarpProfile& profile, double R,
                           const Probe& probe, double density, int xi_intervals) {
  domain.validate(profile);
  if (!(probe.r > domain.r_min && probe.r < R))
    throw Error(ErrorKind::DomainError, "cap_potential needs r_min < r0 < R");
  CapPotential out;
  out.R = R;
  out.requested = probe;
  out.grid = make_grid(domain, R, density, xi_intervals);
  const Grid2D& g = out.grid;
  const SparseOperator op = assemble({}, g, profile, domain.m);

  std::vector<double> bc(g.size(), 0.0);
  const std::size_t outer = g.r.size() - 1;
  for (std::size_t j = 0; j < g.xi.size(); ++j)
    if (!g.xi.is_dirichlet(j)) bc[g.index(outer, j)] = 1.0;
  CgOptions cg;
  cg.relative_tolerance = 1e-12;
  out.u = solve_dirichlet(op, std::vector<double>(g.size(), 0.0), bc, cg);

  const std::size_t i = nearest(g.r.nodes, probe.r), j = nearest(g.xi.nodes, probe.xi);
  out.node = {g.r.nodes[i], g.xi.nodes[j]};
  out.value = out.u[g.index(i, j)];
  return out;
}

std::string to_string(DecayModel model) {
  switch (model) {
    case DecayModel::Logarithmic: return "logarithmic";
    case DecayModel::Power: return "power";
    case DecayModel::Exponential: return "exponential";
  }
  return "logarithmic";
}

std::string to_string(Parabolicity verdict) {
  switch (verdict) {
    case Parabolicity::DParabolic: return "DParabolic";
    case Parabolicity::NotDParabolic: return "NotDParabolic";
    case Parabolicity::Indeterminate: return "Indeterminate";
  }
  return "Indeterminate";
}

ParabolicityVerdict dparabolicity_from_potentials(std::span<const double> R_list,
                                                  std::span<const double> potentials) {
  if (R_list.size() < 4 || potentials.size() != R_list.size())
    throw Error(ErrorKind::DomainError, "parabolicity fit needs >= 4 radii and matching values");
  for (std::size_t k = 1; k < R_list.size(); ++k)
    if (!(R_list[k] > R_list[k - 1]))
      throw Error(ErrorKind::DomainError, "R_list must be strictly increasing");
  if (!(R_list.front() > 1.0))
    throw Error(ErrorKind::DomainError, "the logarithmic model needs R > 1");

  ParabolicityVerdict v;
  v.R_list.assign(R_list.begin(), R_list.end());
  v.potentials.assign(potentials.begin(), potentials.end());
  constexpr double kSlack = 1e-10;
  for (std::size_t k = 0; k < potentials.size(); ++k) {
    if (potentials[k] < -kSlack || potentials[k] > 1.0 + kSlack) v.in_unit_interval = false;
    if (k > 0 && potentials[k] > potentials[k - 1] + kSlack) v.nonincreasing = false;
  }

  v.fits.push_back(fit_linear(DecayModel::Logarithmic, 0.0, R_list, potentials));
  v.fits.push_back(fit_rate(DecayModel::Power, R_list, potentials));
  v.fits.push_back(fit_rate(DecayModel::Exponential, R_list, potentials));
  v.best = v.fits.front();
  for (const DecayFit& f : v.fits)
    if (f.residual < v.best.residual) v.best = f;

  const double limit = v.best.limit;
  if (std::abs(limit) <= kParabolicLimit)
    v.verdict = Parabolicity::DParabolic;
  else if (limit >= kNonParabolicFraction * potentials.front())
    v.verdict = Parabolicity::NotDParabolic;
  else
    v.verdict = Parabolicity::Indeterminate;
  return v;
}

ParabolicityVerdict dparabolicity_verdict(const StripDomain& domain, const WarpProfile& profile,
                                          std::span<const double> R_list,
                                          std::optional<Probe> probe, double density,
                                          int xi_intervals) {
  const Probe at = probe.value_or(default_probe(domain));
  std::vector<double> values;
  Probe used = at;
  for (double R : R_list) {
    const CapPotential c = cap_potential(domain, profile, R, at, density, xi_intervals);
    values.push_back(c.value);
    used = c.node;
  }
  ParabolicityVerdict v = dparabolicity_from_potentials(R_list, values);
  v.probe = used;
  return v;
}

}  // namespace maxprin
