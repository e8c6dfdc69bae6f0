#pragma once

// Weighted semilinear problems Delta_Psi u = f(u) on annuli (r1, r2) x N, where
// Delta_Psi u = e^Psi div(e^{-Psi} grad u) and Psi(r, xi) = Phi(r) + Gamma(xi).
// In the discrete_operator convention this is eta = -Psi.

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "maxprin/discrete_operator.hpp"
#include "maxprin/geometry.hpp"

namespace maxprin {

using ScalarFn = std::function<double(double)>;

struct WeightSpec {
  ScalarFn Phi = [](double) { return 0.0; };
  ScalarFn dPhi = [](double) { return 0.0; };
  ScalarFn Gamma = [](double) { return 0.0; };
  ScalarFn dGamma = [](double) { return 0.0; };
  std::string label = "0";

  double psi(double r, double xi) const { return Phi(r) + Gamma(xi); }
};

struct Nonlinearity {
  ScalarFn f;
  ScalarFn df;
  ScalarFn d2f;
  std::string label;

  static Nonlinearity zero();
  static Nonlinearity linear();        // f(u) = u
  static Nonlinearity allen_cahn();    // f(u) = u - u^3
};

/// Annulus (r1, r2) x N. The fiber must be closed (FullCircle or FullSphere) and m must
/// match its dimension.
struct AnnulusSpec {
  double r1 = 1.0;
  double r2 = 2.0;
  CrossSection fiber = CrossSection::full_circle();
  int m = 2;
  int r_intervals = 256;
  int xi_nodes = 16;
};

Grid2D make_annulus_grid(const AnnulusSpec& spec);

struct NewtonOptions {
  double tolerance = 1e-10;  // on the scaled residual, times (1 + ||u||_inf)
  int max_iterations = 50;
  double armijo = 1e-4;
  double min_step = 0x1p-20;
};

struct SemilinearSolution {
  Grid2D grid;
  int m = 2;
  std::vector<double> u;
  int newton_iters = 0;
  double final_residual = 0.0;
  std::vector<double> residual_history;  // scaled residual before each step and at the end
  double stability_lambda = 0.0;
  double symmetry_defect = 0.0;
  std::vector<double> radial_profile;  // fiber average per r row
};

/// Damped Newton on the scaled residual (Delta_Psi u - f(u)) / |diag Delta_Psi|.
/// `outer_perturbation`, when set, is added to c2 on the outer boundary (a negative control
/// that breaks the symmetric-data hypothesis). Throws NewtonDiverged or NonmonotoneLineSearch.
SemilinearSolution solve_semilinear_annulus(const WarpProfile& profile, const AnnulusSpec& spec,
                                            const WeightSpec& weight, const Nonlinearity& f,
                                            double c1, double c2,
                                            const NewtonOptions& options = {},
                                            const ScalarFn& outer_perturbation = {});

/// -Delta_Psi + f'(u) on the solution grid (c = -f'(u) in the L = Delta_eta + c form).
SparseOperator linearized_operator(const SemilinearSolution& solution, const WarpProfile& profile,
                                   const WeightSpec& weight, const Nonlinearity& f);

/// Principal Dirichlet eigenvalue of -Delta_Psi + f'(u) in the dv_Psi inner product.
double stability_eigenvalue(const SemilinearSolution& solution, const WarpProfile& profile,
                            const WeightSpec& weight, const Nonlinearity& f);

/// Max over interior r rows of (max_xi u - min_xi u).
double symmetry_defect(const SemilinearSolution& solution);

struct RadialProfile {
  std::vector<double> r;
  std::vector<double> mean;    // fiber-volume average per row
  std::vector<double> defect;  // oscillation per row
};

RadialProfile radial_profile_extract(const SemilinearSolution& solution);

/// (int_{r1}^{r2} [int_{r1}^s w(z) dz] / w(s) ds)^{-1}, w = e^{-Phi} sigma^{m-1}, by
/// composite Simpson in s with cumulative half-step Simpson for the inner integral.
/// Throws QuadratureUnderflow when w underflows.
double condition_b_threshold(const WarpProfile& profile, const ScalarFn& Phi, int m, double r1,
                             double r2, int quadrature_n);

struct CommutatorCheck {
  double defect = 0.0;  // max |[Delta_Psi, Delta_Gamma^N] v| on interior nodes
  double scale = 0.0;   // max |Delta_Psi Delta_Gamma^N v| on interior nodes
};

/// Applies the commutator of the annulus operator and the fiber operator
/// e^Gamma d(e^{-Gamma} d/dxi)/dxi to v = rho(r) tau(xi).
CommutatorCheck commutator_check(const WarpProfile& profile, const AnnulusSpec& spec,
                                 const WeightSpec& weight, const ScalarFn& rho,
                                 const ScalarFn& tau);

}  // namespace maxprin
