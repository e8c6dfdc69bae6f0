#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "maxprin/discrete_operator.hpp"
#include "maxprin/geometry.hpp"

namespace maxprin {

/// Principal Dirichlet pair of -L on a truncated domain, in the mu-weighted inner product.
struct EigenPair {
  double lambda = 0.0;
  std::vector<double> vector;  // full grid, zero on Dirichlet nodes, 1 at normalization_node
  double residual = 0.0;       // ||M^{-1} K v - lambda v||_inf on free nodes, ||v||_inf = 1
  double R = 0.0;
  std::size_t normalization_node = 0;
  int iterations = 0;
  double final_shift = 0.0;
};

struct EigenOptions {
  double increment_tolerance = 1e-10;
  double residual_tolerance = 1e-8;
  int max_iterations = 5000;
};

/// Smallest eigenvalue of -L by shifted inverse iteration. The shift starts at a Gershgorin
/// lower bound and is raised toward the Rayleigh quotient only when the LDL^T inertia shows
/// no eigenvalue below it. Throws SolverDiverged or SignError.
EigenPair principal_eigenpair(const SparseOperator& op, const EigenOptions& options = {});

/// <-L v, v>_mu / <v, v>_mu through the symmetric form; v must vanish on Dirichlet nodes.
double rayleigh_quotient(const SparseOperator& op, std::span<const double> v);

struct ExhaustionReport {
  std::vector<double> R_list;
  std::vector<double> lambda_list;
  std::vector<double> residual_list;
  double extrapolated_limit = 0.0;
  double fit_slope = 0.0;     // kappa in lambda(R) = limit + kappa / R^2
  double fit_residual = 0.0;  // max |misfit| on the fitted points
  std::string truncation = "coordinate slabs r < R";
};

/// Truncated Dirichlet problems on [r_min, R] x Lambda for each R, at fixed grid density.
/// Throws MonotonicityViolation when lambda(R) increases by more than 1e-9.
ExhaustionReport exhaustion_sweep(const StripDomain& domain, const OperatorSpec& spec,
                                  const WarpProfile& profile, std::span<const double> R_list,
                                  double density, int xi_intervals = 0);

enum class Lambda1Sign { Positive, NonPositive, Indeterminate };

std::string to_string(Lambda1Sign sign);

/// Positive iff limit > margin, Indeterminate iff |limit| <= margin.
/// The margin defaults to 3 * fit_residual.
Lambda1Sign classify_lambda1(const ExhaustionReport& report,
                             std::optional<double> margin = std::nullopt);

bool lambda1_positive(const ExhaustionReport& report, std::optional<double> margin = std::nullopt);

}  // namespace maxprin
