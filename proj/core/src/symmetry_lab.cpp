#include "maxprin/symmetry_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "maxprin/eigen_exhaustion.hpp"
#include "maxprin/error.hpp"
#include "maxprin/linalg.hpp"

namespace maxprin {

namespace {

OperatorSpec weighted_laplacian(const WeightSpec& weight) {
  OperatorSpec s;
  s.eta = [weight](double r, double xi) { return -weight.psi(r, xi); };
  return s;
}

struct Residual {
  std::vector<double> h;       // K u_I - lift + mu f(u_I)
  std::vector<double> scaled;  // h / K_ff
  double norm2 = 0.0;
  double norm_inf = 0.0;
};

Residual residual(const SparseOperator& op, const std::vector<double>& kdiag,
                  const std::vector<double>& lift, const Nonlinearity& f,
                  const std::vector<double>& u) {
  const std::size_t n = op.interior.size();
  std::vector<double> ui(n);
  for (std::size_t k = 0; k < n; ++k) ui[k] = u[op.interior[k]];
  Residual r;
  r.h = op.form.multiply(ui);
  r.scaled.resize(n);
  double ss = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t p = op.interior[k];
    r.h[k] += -lift[k] + op.measure[p] * f.f(ui[k]);
    r.scaled[k] = r.h[k] / kdiag[k];
    ss += r.scaled[k] * r.scaled[k];
    r.norm_inf = std::max(r.norm_inf, std::abs(r.scaled[k]));
  }
  r.norm2 = std::sqrt(ss);
  return r;
}

}  // namespace

Nonlinearity Nonlinearity::zero() {
  return {[](double) { return 0.0; }, [](double) { return 0.0; }, [](double) { return 0.0; },
          "0"};
}

Nonlinearity Nonlinearity::linear() {
  return {[](double u) { return u; }, [](double) { return 1.0; }, [](double) { return 0.0; },
          "u"};
}

Nonlinearity Nonlinearity::allen_cahn() {
  return {[](double u) { return u - u * u * u; }, [](double u) { return 1.0 - 3.0 * u * u; },
          [](double u) { return -6.0 * u; }, "u - u^3"};
}

Grid2D make_annulus_grid(const AnnulusSpec& spec) {
  if (spec.fiber.is_proper())
    throw Error(ErrorKind::DomainError, "the symmetry lab needs a closed fiber");
  if (spec.m != spec.fiber.dim() + 1)
    throw Error(ErrorKind::DomainError, "m must equal the fiber dimension plus one");
  if (!(spec.r2 > spec.r1) || !(spec.r1 >= 0.0))
    throw Error(ErrorKind::DomainError, "annulus needs 0 <= r1 < r2");
  if (spec.r_intervals < 2 || spec.xi_nodes < 1)
    throw Error(ErrorKind::DomainError, "annulus grid needs >= 2 r intervals and >= 1 fiber node");
  Grid2D g;
  g.cross_section = spec.fiber;
  g.r = make_axis(spec.r1, spec.r2, EndCondition::Dirichlet, EndCondition::Dirichlet, false,
                  spec.r_intervals);
  g.xi = make_axis(0.0, spec.fiber.extent(), spec.fiber.lower_end(), spec.fiber.upper_end(),
                   spec.fiber.periodic(), spec.xi_nodes);
  g.dirichlet.assign(g.size(), 0);
  for (std::size_t i = 0; i < g.r.size(); ++i)
    for (std::size_t j = 0; j < g.xi.size(); ++j)
      g.dirichlet[g.index(i, j)] = g.r.is_dirichlet(i);
  return g;
}

SemilinearSolution solve_semilinear_annulus(const WarpProfile& profile, const AnnulusSpec& spec,
                                            const WeightSpec& weight, const Nonlinearity& f,
                                            double c1, double c2, const NewtonOptions& options,
                                            const ScalarFn& outer_perturbation) {
  SemilinearSolution sol;
  sol.grid = make_annulus_grid(spec);
  sol.m = spec.m;
  const Grid2D& g = sol.grid;
  const SparseOperator op = assemble(weighted_laplacian(weight), g, profile, spec.m);

  // Initial guess: linear in r between the boundary constants; boundary rows carry the data.
  const std::size_t nr = g.r.size(), nx = g.xi.size();
  sol.u.assign(g.size(), 0.0);
  for (std::size_t i = 0; i < nr; ++i) {
    const double t = (g.r.nodes[i] - spec.r1) / (spec.r2 - spec.r1);
    for (std::size_t j = 0; j < nx; ++j) sol.u[g.index(i, j)] = c1 + t * (c2 - c1);
  }
  if (outer_perturbation)
    for (std::size_t j = 0; j < nx; ++j)
      sol.u[g.index(nr - 1, j)] += outer_perturbation(g.xi.nodes[j]);

  const std::vector<double> lift = op.boundary_coupling.multiply(sol.u);
  const std::vector<double> kdiag = op.form.diagonal();
  const std::size_t n = op.interior.size();

  Residual res = residual(op, kdiag, lift, f, sol.u);
  sol.residual_history.push_back(res.norm_inf);
  int it = 0;
  for (;; ++it) {
    const double tol = options.tolerance * (1.0 + norm_inf(sol.u));
    if (res.norm_inf <= tol) break;
    if (it == options.max_iterations) {
      std::ostringstream os;
      os << "Newton did not converge in " << it << " steps (residual " << res.norm_inf << ")";
      throw Error(ErrorKind::NewtonDiverged, os.str());
    }
    std::vector<double> jac(n);
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t p = op.interior[k];
      jac[k] = op.measure[p] * f.df(sol.u[p]);
    }
    const BandedLdlt solver(op.form, -1.0, jac);  // K + diag(mu f'(u))
    std::vector<double> rhs(n);
    for (std::size_t k = 0; k < n; ++k) rhs[k] = -res.h[k];
    const std::vector<double> step = solver.solve(rhs);

    double s = 1.0;
    for (;;) {
      std::vector<double> trial = sol.u;
      for (std::size_t k = 0; k < n; ++k) trial[op.interior[k]] += s * step[k];
      Residual next = residual(op, kdiag, lift, f, trial);
      if (std::isfinite(next.norm2) && next.norm2 <= (1.0 - options.armijo * s) * res.norm2) {
        sol.u = std::move(trial);
        res = std::move(next);
        break;
      }
      s *= 0.5;
      if (s < options.min_step) {
        std::ostringstream os;
        os << "line search failed below step " << options.min_step << " (residual "
           << res.norm_inf << ")";
        throw Error(ErrorKind::NonmonotoneLineSearch, os.str());
      }
    }
    sol.residual_history.push_back(res.norm_inf);
  }
  sol.newton_iters = it;
  sol.final_residual = res.norm_inf;
  sol.symmetry_defect = symmetry_defect(sol);
  sol.radial_profile = radial_profile_extract(sol).mean;
  sol.stability_lambda = stability_eigenvalue(sol, profile, weight, f);
  return sol;
}

SparseOperator linearized_operator(const SemilinearSolution& solution, const WarpProfile& profile,
                                   const WeightSpec& weight, const Nonlinearity& f) {
  OperatorSpec s = weighted_laplacian(weight);
  s.c_nodal.resize(solution.u.size());
  for (std::size_t p = 0; p < solution.u.size(); ++p) s.c_nodal[p] = -f.df(solution.u[p]);
  return assemble(s, solution.grid, profile, solution.m);
}

double stability_eigenvalue(const SemilinearSolution& solution, const WarpProfile& profile,
                            const WeightSpec& weight, const Nonlinearity& f) {
  return principal_eigenpair(linearized_operator(solution, profile, weight, f)).lambda;
}

double symmetry_defect(const SemilinearSolution& solution) {
  const Grid2D& g = solution.grid;
  double defect = 0.0;
  for (std::size_t i = 1; i + 1 < g.r.size(); ++i) {
    double lo = kInfinity, hi = -kInfinity;
    for (std::size_t j = 0; j < g.xi.size(); ++j) {
      lo = std::min(lo, solution.u[g.index(i, j)]);
      hi = std::max(hi, solution.u[g.index(i, j)]);
    }
    defect = std::max(defect, hi - lo);
  }
  return defect;
}

RadialProfile radial_profile_extract(const SemilinearSolution& solution) {
  const Grid2D& g = solution.grid;
  RadialProfile out;
  std::vector<double> cell(g.xi.size());
  double total = 0.0;
  for (std::size_t j = 0; j < g.xi.size(); ++j) {
    cell[j] = g.cross_section.fiber_volume(g.xi.cell_lo[j], g.xi.cell_hi[j]);
    total += cell[j];
  }
  for (std::size_t i = 0; i < g.r.size(); ++i) {
    double mean = 0.0, lo = kInfinity, hi = -kInfinity;
    for (std::size_t j = 0; j < g.xi.size(); ++j) {
      const double v = solution.u[g.index(i, j)];
      mean += cell[j] * v;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    out.r.push_back(g.r.nodes[i]);
    out.mean.push_back(mean / total);
    out.defect.push_back(hi - lo);
  }
  return out;
}

double condition_b_threshold(const WarpProfile& profile, const ScalarFn& Phi, int m, double r1,
                             double r2, int quadrature_n) {
  if (!(r2 > r1) || r1 < 0.0 || m < 2)
    throw Error(ErrorKind::DomainError, "condition B needs 0 <= r1 < r2 and m >= 2");
  if (quadrature_n < 64 || quadrature_n % 2 != 0)
    throw Error(ErrorKind::DomainError, "condition B needs an even quadrature_n >= 64");
  auto weight = [&](double s) {
    const double w = std::exp(-Phi(s)) * std::pow(profile.eval(s).sigma, m - 1);
    if (!(w >= std::numeric_limits<double>::min()) || !std::isfinite(w)) {
      std::ostringstream os;
      os << "e^{-Phi} sigma^{m-1} = " << w << " at s = " << s;
      throw Error(ErrorKind::QuadratureUnderflow, os.str());
    }
    return w;
  };
  const int n = quadrature_n;
  const double h = (r2 - r1) / n;
  double inner = 0.0, outer = 0.0, w_prev = weight(r1);
  for (int k = 0; k <= n; ++k) {
    const double s = r1 + k * h;
    double w = w_prev;
    if (k > 0) {
      w = weight(s);
      inner += h / 6.0 * (w_prev + 4.0 * weight(s - 0.5 * h) + w);
    }
    const double coeff = (k == 0 || k == n) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    outer += coeff * inner / w;
    w_prev = w;
  }
  outer *= h / 3.0;
  return 1.0 / outer;
}

CommutatorCheck commutator_check(const WarpProfile& profile, const AnnulusSpec& spec,
                                 const WeightSpec& weight, const ScalarFn& rho,
                                 const ScalarFn& tau) {
  const Grid2D g = make_annulus_grid(spec);
  const SparseOperator op = assemble(weighted_laplacian(weight), g, profile, spec.m);
  const std::size_t nr = g.r.size(), nx = g.xi.size();
  const CrossSection& cs = g.cross_section;

  // Fiber operator e^Gamma d/dxi (e^{-Gamma} w d/dxi) / w in flux form, applied row-wise.
  std::vector<double> mass(nx), face(nx, 0.0);
  for (std::size_t j = 0; j < nx; ++j)
    mass[j] = std::exp(-weight.Gamma(g.xi.nodes[j])) * cs.fiber_volume(g.xi.cell_lo[j], g.xi.cell_hi[j]);
  const std::size_t faces = g.xi.periodic ? (nx > 1 ? nx : 0) : nx - 1;
  for (std::size_t j = 0; j < faces; ++j) {
    const double xf = g.xi.nodes[j] + 0.5 * g.xi.spacing;
    face[j] = std::exp(-weight.Gamma(xf)) * cs.fiber_weight(xf) / g.xi.spacing;
  }
  auto fiber_apply = [&](const std::vector<double>& v) {
    std::vector<double> out(v.size(), 0.0);
    for (std::size_t i = 0; i < nr; ++i)
      for (std::size_t j = 0; j < faces; ++j) {
        const std::size_t k = (j + 1) % nx;
        const std::size_t p = g.index(i, j), q = g.index(i, k);
        const double flux = face[j] * (v[q] - v[p]);
        out[p] += flux / mass[j];
        out[q] -= flux / mass[k];
      }
    return out;
  };

  const std::vector<double> v =
      sample(g, [&](double r, double xi) { return rho(r) * tau(xi); });
  const std::vector<double> lb = maxprin::apply(op, fiber_apply(v));
  const std::vector<double> bl = fiber_apply(maxprin::apply(op, v));
  CommutatorCheck c;
  for (std::size_t p : op.interior) {
    c.defect = std::max(c.defect, std::abs(lb[p] - bl[p]));
    c.scale = std::max(c.scale, std::abs(lb[p]));
  }
  return c;
}

}  // namespace maxprin
