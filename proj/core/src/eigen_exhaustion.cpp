#include "maxprin/eigen_exhaustion.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "maxprin/error.hpp"
#include "maxprin/linalg.hpp"

namespace maxprin {

namespace {

constexpr double kMonotoneSlack = 1e-9;
constexpr int kMaxShiftUpdates = 12;

}  // namespace

EigenPair principal_eigenpair(const SparseOperator& op, const EigenOptions& options) {
  const CsrMatrix& k = op.form;
  const std::size_t n = k.rows;
  if (n == 0) throw Error(ErrorKind::DomainError, "operator has no free nodes");
  std::vector<double> mass(n);
  for (std::size_t f = 0; f < n; ++f) mass[f] = op.measure[op.interior[f]];

  // Gershgorin lower bound for M^{-1} K.
  double shift = kInfinity;
  for (std::size_t i = 0; i < n; ++i) {
    double diag = 0.0, off = 0.0;
    for (std::size_t q = k.row_offsets[i]; q < k.row_offsets[i + 1]; ++q) {
      if (k.col_indices[q] == i)
        diag = k.values[q];
      else
        off += std::abs(k.values[q]);
    }
    shift = std::min(shift, (diag - off) / mass[i]);
  }
  shift -= 1e-3 * (1.0 + std::abs(shift));
  BandedLdlt solver(k, shift, mass);
  if (solver.negative_pivots() != 0)
    throw Error(ErrorKind::SolverDiverged, "Gershgorin shift is not below the spectrum");

  std::vector<double> v(n, 1.0), kv(n), rhs(n);
  double rho = kInfinity, previous = kInfinity, residual = kInfinity;
  int it = 0, shift_updates = 0;
  for (; it < options.max_iterations; ++it) {
    for (std::size_t i = 0; i < n; ++i) rhs[i] = mass[i] * v[i];
    v = solver.solve(rhs);
    const double scale = norm_inf(v);
    if (!(scale > 0.0) || !std::isfinite(scale))
      throw Error(ErrorKind::SolverDiverged, "inverse iteration produced a degenerate vector");
    for (double& x : v) x /= scale;

    k.multiply(v, kv);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      num += v[i] * kv[i];
      den += mass[i] * v[i] * v[i];
    }
    previous = rho;
    rho = num / den;
    residual = 0.0;
    double res_m = 0.0;  // ||K v - rho M v||_{M^{-1}}
    for (std::size_t i = 0; i < n; ++i) {
      const double r = kv[i] - rho * mass[i] * v[i];
      residual = std::max(residual, std::abs(r / mass[i]));
      res_m += r * r / mass[i];
    }
    const double eta = std::sqrt(res_m / den);

    const double scale_tol = 1.0 + std::abs(rho);
    if (std::abs(rho - previous) < options.increment_tolerance * scale_tol &&
        residual < options.residual_tolerance * scale_tol)
      break;

    // Some eigenvalue lies in [rho - eta, rho + eta]; try a shift just below that window.
    if (it >= 2 && shift_updates < kMaxShiftUpdates) {
      const double candidate = rho - std::max(4.0 * eta, 1e-9 * scale_tol);
      if (candidate > shift + 0.1 * (rho - shift)) {
        try {
          BandedLdlt trial(k, candidate, mass);
          if (trial.negative_pivots() == 0) {
            solver = std::move(trial);
            shift = candidate;
          }
        } catch (const Error&) {
          // singular at the candidate shift: keep the current factorization
        }
        ++shift_updates;
      }
    }
  }
  if (it == options.max_iterations) {
    std::ostringstream os;
    os << "inverse iteration did not converge (residual " << residual << ")";
    throw Error(ErrorKind::SolverDiverged, os.str());
  }

  double sum = 0.0;
  for (double x : v) sum += x;
  if (sum < 0.0)
    for (double& x : v) x = -x;
  std::size_t argmax = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(v[i] > 0.0))
      throw Error(ErrorKind::SignError, "principal eigenvector changes sign on free nodes");
    if (v[i] > v[argmax]) argmax = i;
  }

  EigenPair pair;
  pair.lambda = rho;
  pair.residual = residual / v[argmax];
  pair.R = op.grid.r.hi;
  pair.iterations = it + 1;
  pair.final_shift = shift;
  pair.normalization_node = op.interior[argmax];
  pair.vector.assign(op.dimension(), 0.0);
  const double top = v[argmax];
  for (std::size_t i = 0; i < n; ++i) pair.vector[op.interior[i]] = v[i] / top;
  return pair;
}

double rayleigh_quotient(const SparseOperator& op, std::span<const double> v) {
  if (v.size() != op.dimension())
    throw Error(ErrorKind::DimensionMismatch, "rayleigh_quotient: length mismatch");
  for (std::size_t p = 0; p < v.size(); ++p)
    if (op.grid.dirichlet[p] && v[p] != 0.0)
      throw Error(ErrorKind::DomainError, "rayleigh_quotient: v must vanish on Dirichlet nodes");
  std::vector<double> vi(op.interior.size());
  for (std::size_t f = 0; f < vi.size(); ++f) vi[f] = v[op.interior[f]];
  const double den = weighted_dot(op, v, v);
  if (!(den > 0.0)) throw Error(ErrorKind::ZeroVector, "rayleigh_quotient of the zero vector");
  const std::vector<double> kv = op.form.multiply(vi);
  return dot(vi, kv) / den;
}

ExhaustionReport exhaustion_sweep(const StripDomain& domain, const OperatorSpec& spec,
                                  const WarpProfile& profile, std::span<const double> R_list,
                                  double density, int xi_intervals) {
  if (R_list.size() < 3) throw Error(ErrorKind::DomainError, "exhaustion needs >= 3 radii");
  for (std::size_t k = 1; k < R_list.size(); ++k)
    if (!(R_list[k] > R_list[k - 1]))
      throw Error(ErrorKind::DomainError, "R_list must be strictly increasing");
  domain.validate(profile);

  ExhaustionReport report;
  for (double R : R_list) {
    const Grid2D grid = make_grid(domain, R, density, xi_intervals);
    const SparseOperator op = assemble(spec, grid, profile, domain.m);
    const EigenPair pair = principal_eigenpair(op);
    report.R_list.push_back(R);
    report.lambda_list.push_back(pair.lambda);
    report.residual_list.push_back(pair.residual);
  }
  for (std::size_t k = 1; k < report.lambda_list.size(); ++k)
    if (report.lambda_list[k] > report.lambda_list[k - 1] + kMonotoneSlack) {
      std::ostringstream os;
      os << "lambda(" << report.R_list[k] << ") = " << report.lambda_list[k]
         << " exceeds lambda(" << report.R_list[k - 1] << ") = " << report.lambda_list[k - 1];
      throw Error(ErrorKind::MonotonicityViolation, os.str());
    }

  // Least squares lambda = limit + kappa x, x = 1/R^2, on the last three radii.
  const std::size_t first = report.R_list.size() - 3;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t k = first; k < report.R_list.size(); ++k) {
    const double x = 1.0 / (report.R_list[k] * report.R_list[k]);
    const double y = report.lambda_list[k];
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double npts = 3.0;
  report.fit_slope = (npts * sxy - sx * sy) / (npts * sxx - sx * sx);
  report.extrapolated_limit = (sy - report.fit_slope * sx) / npts;
  for (std::size_t k = first; k < report.R_list.size(); ++k) {
    const double x = 1.0 / (report.R_list[k] * report.R_list[k]);
    report.fit_residual = std::max(
        report.fit_residual,
        std::abs(report.lambda_list[k] - report.extrapolated_limit - report.fit_slope * x));
  }
  return report;
}

std::string to_string(Lambda1Sign sign) {
  switch (sign) {
    case Lambda1Sign::Positive: return "Positive";
    case Lambda1Sign::NonPositive: return "NonPositive";
    case Lambda1Sign::Indeterminate: return "Indeterminate";
  }
  return "Indeterminate";
}

Lambda1Sign classify_lambda1(const ExhaustionReport& report, std::optional<double> margin) {
  const double m = margin.value_or(3.0 * report.fit_residual);
  const double limit = report.extrapolated_limit;
  if (limit > m) return Lambda1Sign::Positive;
  if (std::abs(limit) <= m) return Lambda1Sign::Indeterminate;
  return Lambda1Sign::NonPositive;
}

bool lambda1_positive(const ExhaustionReport& report, std::optional<double> margin) {
  return classify_lambda1(report, margin) == Lambda1Sign::Positive;
}

}  // namespace maxprin
