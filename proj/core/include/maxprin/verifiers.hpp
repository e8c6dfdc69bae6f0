#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "maxprin/discrete_operator.hpp"
#include "maxprin/eigen_exhaustion.hpp"
#include "maxprin/geometry.hpp"

namespace maxprin {

struct MPVerdict {
  bool holds = true;
  double max_interior_value = 0.0;
  double max_boundary_value = 0.0;
  double subsolution_residual = 0.0;  // min of L u over free nodes
  double tolerance = 0.0;             // 1e-8 ||u||_inf + 1e-12
  double lambda_limit = 0.0;          // extrapolated lambda1 of the report used
  bool lambda_positive = false;
};

/// Checks the hypotheses L u >= 0 on free nodes and u <= tol on Dirichlet nodes, then the
/// conclusion max u <= tol. Throws NotASubsolution when a hypothesis fails.
MPVerdict check_maximum_principle(const SparseOperator& op, std::span<const double> u,
                                  const ExhaustionReport& lambda_report);

struct Counterexample {
  std::vector<double> u;  // principal eigenvector of the shifted operator, max 1
  SparseOperator op;      // shifted operator on the selected truncation
  double R = 0.0;
  double shifted_lambda = 0.0;  // lambda1^R - shift < 0
  MPVerdict verdict;
};

/// Principal eigenfunction of L + shift on the first truncation with lambda1^R < shift.
/// Radii come from the report, then doubling up to 64 times its last radius.
/// Throws ShiftTooSmall when shift <= limit + margin or no truncation qualifies.
Counterexample generate_counterexample(const StripDomain& domain, const OperatorSpec& spec,
                                       const WarpProfile& profile,
                                       const ExhaustionReport& lambda_report, double shift,
                                       double density, int xi_intervals = 0,
                                       std::optional<double> margin = std::nullopt);

enum class BcnOutcome { Holds, Inapplicable, Violated };

std::string to_string(BcnOutcome outcome);

struct BcnVerdict {
  BcnOutcome outcome = BcnOutcome::Holds;
  std::vector<double> cap_radii;
  std::vector<double> cap_sup;  // sup of w = u / phi on each cap row
  double max_boundary_u = 0.0;
  double max_interior_u = 0.0;
  double tolerance = 0.0;
  std::string reason;
};

/// Quotient argument: w = u / phi on the cap rows r = R_k (nearest rows; all rows from the
/// second quarter on when `cap_radii` is empty). Hypotheses: u <= tol on the lateral and
/// inner boundary, cap sups nonincreasing and ending <= tol. Throws BarrierNotPositive.
BcnVerdict bcn_quotient_check(const Grid2D& grid, std::span<const double> u,
                              std::span<const double> phi,
                              std::span<const double> cap_radii = {});

struct Probe {
  double r = 0.0;
  double xi = 0.0;
};

struct CapPotential {
  double value = 0.0;
  double R = 0.0;
  Probe requested;
  Probe node;  // grid node actually used
  std::vector<double> u;
  Grid2D grid;
};

/// Solves Delta u = 0 on the truncation at R with u = 1 on the cap r = R and u = 0 on the
/// rest of the boundary; returns u at the grid node nearest the probe.
CapPotential cap_potential(const StripDomain& domain, const WarpProfile& profile, double R,
                           const Probe& probe, double density, int xi_intervals = 0);

/// The default probe: (r_min + 1, center of the fiber coordinate).
Probe default_probe(const StripDomain& domain);

enum class DecayModel { Logarithmic, Power, Exponential };
enum class Parabolicity { DParabolic, NotDParabolic, Indeterminate };

std::string to_string(DecayModel model);
std::string to_string(Parabolicity verdict);

struct DecayFit {
  DecayModel model = DecayModel::Logarithmic;
  double limit = 0.0;  // L in L + c g(R)
  double scale = 0.0;  // c
  double rate = 0.0;   // k (unused for the logarithmic model)
  double residual = 0.0;  // RMS of (model - p) / p
};

struct ParabolicityVerdict {
  std::vector<double> R_list;
  std::vector<double> potentials;
  Probe probe;
  std::vector<DecayFit> fits;
  DecayFit best;
  bool in_unit_interval = true;
  bool nonincreasing = true;
  Parabolicity verdict = Parabolicity::Indeterminate;
};

inline constexpr double kParabolicLimit = 1e-3;
inline constexpr double kNonParabolicFraction = 1e-2;

/// Fits the probe potentials with L + c / ln R, L + c R^-k and L + c e^{-kR}.
/// DParabolic iff |L| <= 1e-3, NotDParabolic iff L >= 1e-2 p(R_first), else Indeterminate.
ParabolicityVerdict dparabolicity_from_potentials(std::span<const double> R_list,
                                                  std::span<const double> potentials);

ParabolicityVerdict dparabolicity_verdict(const StripDomain& domain, const WarpProfile& profile,
                                          std::span<const double> R_list,
                                          std::optional<Probe> probe, double density,
                                          int xi_intervals = 0);

}  // namespace maxprin
