#include "maxprin/discrete_operator.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "maxprin/error.hpp"

namespace maxprin {

bool Axis::is_dirichlet(std::size_t i) const {
  if (periodic) return false;
  return (i == 0 && lower == EndCondition::Dirichlet) ||
         (i + 1 == nodes.size() && upper == EndCondition::Dirichlet);
}

Axis make_axis(double lo, double hi, EndCondition lower, EndCondition upper, bool periodic,
               int intervals) {
  if (!(hi > lo) || intervals < 1) throw Error(ErrorKind::DomainError, "degenerate axis");
  Axis ax;
  ax.lo = lo;
  ax.hi = hi;
  ax.lower = lower;
  ax.upper = upper;
  ax.periodic = periodic;
  const double n = intervals;
  if (periodic) {
    ax.spacing = (hi - lo) / n;
    for (int k = 0; k < intervals; ++k) ax.nodes.push_back(lo + k * ax.spacing);
  } else {
    // Natural ends sit half a cell outside the extreme node.
    const double offset_lo = lower == EndCondition::Natural ? 0.5 : 0.0;
    const double offset_hi = upper == EndCondition::Natural ? 0.5 : 0.0;
    const bool both_natural = offset_lo > 0.0 && offset_hi > 0.0;
    const int count = both_natural ? intervals : intervals + 1;
    ax.spacing = (hi - lo) / ((count - 1) + offset_lo + offset_hi);
    for (int k = 0; k < count; ++k) ax.nodes.push_back(lo + (k + offset_lo) * ax.spacing);
  }
  const double h = ax.spacing;
  for (std::size_t k = 0; k < ax.nodes.size(); ++k) {
    double a = ax.nodes[k] - 0.5 * h, b = ax.nodes[k] + 0.5 * h;
    if (!periodic) {
      a = std::max(a, lo);
      b = std::min(b, hi);
    }
    ax.cell_lo.push_back(a);
    ax.cell_hi.push_back(b);
  }
  return ax;
}

Grid2D make_grid(const StripDomain& domain, double R, double density, int xi_intervals) {
  if (!(density > 0.0)) throw Error(ErrorKind::DomainError, "grid density must be positive");
  if (!(R > domain.r_min)) throw Error(ErrorKind::DomainError, "truncation R must exceed r_min");
  if (domain.bounded() && R > domain.r_max)
    throw Error(ErrorKind::DomainError, "truncation R exceeds r_max of a bounded domain");
  const CrossSection& cs = domain.cross_section;

  Grid2D g;
  g.cross_section = cs;
  const int nr = std::max(2, static_cast<int>(std::lround((R - domain.r_min) * density)));
  g.r = make_axis(domain.r_min, R, domain.inner, EndCondition::Dirichlet, false, nr);
  int nx = xi_intervals;
  if (nx <= 0) nx = cs.is_proper() ? std::max(4, static_cast<int>(std::lround(cs.extent() * density))) : 1;
  g.xi = make_axis(0.0, cs.extent(), cs.lower_end(), cs.upper_end(), cs.periodic(), nx);

  g.dirichlet.assign(g.size(), 0);
  for (std::size_t i = 0; i < g.r.size(); ++i)
    for (std::size_t j = 0; j < g.xi.size(); ++j)
      g.dirichlet[g.index(i, j)] = g.r.is_dirichlet(i) || g.xi.is_dirichlet(j);
  return g;
}

std::vector<double> sample(const Grid2D& grid, const Field& f) {
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < grid.r.size(); ++i)
    for (std::size_t j = 0; j < grid.xi.size(); ++j)
      out[grid.index(i, j)] = f(grid.r.nodes[i], grid.xi.nodes[j]);
  return out;
}

SparseOperator assemble(const OperatorSpec& spec, const Grid2D& grid, const WarpProfile& profile,
                        int m) {
  const std::size_t n = grid.size();
  const std::size_t nr = grid.r.size(), nx = grid.xi.size();
  if (!spec.c_nodal.empty() && spec.c_nodal.size() != n)
    throw Error(ErrorKind::DimensionMismatch, "c_nodal does not match the grid");
  if (m < 2) throw Error(ErrorKind::DomainError, "m must be >= 2");

  SparseOperator op;
  op.grid = grid;
  op.m = m;
  op.measure.resize(n);
  op.volume.resize(n);
  op.c_values.resize(n);

  std::vector<double> fiber_cell(nx);
  for (std::size_t j = 0; j < nx; ++j)
    fiber_cell[j] = grid.cross_section.fiber_volume(grid.xi.cell_lo[j], grid.xi.cell_hi[j]);
  std::vector<double> sigma(nr);
  for (std::size_t i = 0; i < nr; ++i) sigma[i] = profile.eval(grid.r.nodes[i]).sigma;

  double a_min = kInfinity, a_max = -kInfinity, c_abs = 0.0;
  for (std::size_t i = 0; i < nr; ++i) {
    const double dr = grid.r.cell_hi[i] - grid.r.cell_lo[i];
    const double radial = std::pow(sigma[i], m - 1);
    for (std::size_t j = 0; j < nx; ++j) {
      const std::size_t p = grid.index(i, j);
      const double r = grid.r.nodes[i], xi = grid.xi.nodes[j];
      op.volume[p] = radial * dr * fiber_cell[j];
      op.measure[p] = std::exp(spec.eta(r, xi)) * op.volume[p];
      if (!(op.measure[p] > 0.0) || !std::isfinite(op.measure[p])) {
        std::ostringstream os;
        os << "measure weight " << op.measure[p] << " at (r, xi) = (" << r << ", " << xi << ")";
        throw Error(ErrorKind::AssemblyError, os.str());
      }
      op.c_values[p] = spec.c_nodal.empty() ? spec.c(r, xi) : spec.c_nodal[p];
      const double a = spec.a(r, xi);
      a_min = std::min(a_min, a);
      a_max = std::max(a_max, a);
      c_abs = std::max(c_abs, std::abs(op.c_values[p]));
    }
  }
  if (!(a_min > 0.0)) throw Error(ErrorKind::AssemblyError, "coefficient a is not positive");
  if (spec.bounds) {
    const CoefficientBounds& b = *spec.bounds;
    if (!(b.c0 > 0.0) || a_min < b.c0 || a_max > b.C0 || c_abs > b.b)
      throw Error(ErrorKind::AssemblyError, "coefficients violate the declared bounds (c0, C0, b)");
    op.bounds = b;
  } else {
    op.bounds = {a_min, a_max, c_abs};
  }

  // Faces: (p, q, conductance), each computed once so the form is exactly symmetric.
  struct Face {
    std::size_t p, q;
    double t;
  };
  std::vector<Face> faces;
  const double hr = grid.r.spacing, hx = grid.xi.spacing;
  for (std::size_t i = 0; i + 1 < nr; ++i) {
    const double rf = 0.5 * (grid.r.nodes[i] + grid.r.nodes[i + 1]);
    const double radial = std::pow(profile.eval(rf).sigma, m - 1);
    for (std::size_t j = 0; j < nx; ++j) {
      const double xi = grid.xi.nodes[j];
      const double t = spec.a(rf, xi) * std::exp(spec.eta(rf, xi)) * radial * fiber_cell[j] / hr;
      faces.push_back({grid.index(i, j), grid.index(i + 1, j), t});
    }
  }
  const std::size_t xi_faces = grid.xi.periodic ? (nx > 1 ? nx : 0) : nx - 1;
  for (std::size_t i = 0; i < nr; ++i) {
    const double r = grid.r.nodes[i];
    const double dr = grid.r.cell_hi[i] - grid.r.cell_lo[i];
    const double metric = std::pow(sigma[i], m - 3);  // sigma^{m-1} / sigma^2
    for (std::size_t j = 0; j < xi_faces; ++j) {
      const std::size_t k = (j + 1) % nx;
      const double xf = grid.xi.nodes[j] + 0.5 * hx;
      const double t = spec.a(r, xf) * std::exp(spec.eta(r, xf)) * metric *
                       grid.cross_section.fiber_weight(xf) * dr / hx;
      faces.push_back({grid.index(i, j), grid.index(i, k), t});
    }
  }

  op.interior_of.assign(n, SparseOperator::npos);
  for (std::size_t p = 0; p < n; ++p)
    if (!grid.dirichlet[p]) {
      op.interior_of[p] = op.interior.size();
      op.interior.push_back(p);
    }
  const std::size_t ni = op.interior.size();

  std::vector<double> flux_sum(n, 0.0);
  CsrBuilder l(n, n), k(ni, ni), coupling(ni, n);
  for (const Face& f : faces) {
    if (!(f.t >= 0.0) || !std::isfinite(f.t))
      throw Error(ErrorKind::AssemblyError, "non-finite or negative face conductance");
    flux_sum[f.p] += f.t;
    flux_sum[f.q] += f.t;
    const std::size_t fp = op.interior_of[f.p], fq = op.interior_of[f.q];
    if (fp != SparseOperator::npos) l.add(f.p, f.q, f.t / op.measure[f.p]);
    if (fq != SparseOperator::npos) l.add(f.q, f.p, f.t / op.measure[f.q]);
    if (fp != SparseOperator::npos && fq != SparseOperator::npos) {
      k.add(fp, fq, -f.t);
      k.add(fq, fp, -f.t);
    } else if (fp != SparseOperator::npos) {
      coupling.add(fp, f.q, f.t);
    } else if (fq != SparseOperator::npos) {
      coupling.add(fq, f.p, f.t);
    }
  }
  for (std::size_t p = 0; p < n; ++p) {
    const std::size_t fp = op.interior_of[p];
    if (fp == SparseOperator::npos) {
      l.add(p, p, 1.0);
      continue;
    }
    l.add(p, p, -flux_sum[p] / op.measure[p] + op.c_values[p]);
    k.add(fp, fp, flux_sum[p] - op.c_values[p] * op.measure[p]);
  }
  op.matrix = l.build();
  op.form = k.build();
  op.boundary_coupling = coupling.build();
  return op;
}

std::vector<double> apply(const SparseOperator& op, std::span<const double> u) {
  if (u.size() != op.dimension())
    throw Error(ErrorKind::DimensionMismatch, "apply: vector length does not match the operator");
  return op.matrix.multiply(u);
}

std::vector<double> solve_dirichlet(const SparseOperator& op, std::span<const double> rhs,
                                    std::span<const double> boundary_values,
                                    const CgOptions& options) {
  const std::size_t n = op.dimension();
  if (rhs.size() != n || (!boundary_values.empty() && boundary_values.size() != n))
    throw Error(ErrorKind::DimensionMismatch, "solve_dirichlet: vector length mismatch");
  std::vector<double> g(n, 0.0);
  if (!boundary_values.empty())
    for (std::size_t p = 0; p < n; ++p)
      if (op.grid.dirichlet[p]) g[p] = boundary_values[p];

  const std::size_t ni = op.interior.size();
  std::vector<double> b(ni);
  const std::vector<double> lift = op.boundary_coupling.multiply(g);
  for (std::size_t f = 0; f < ni; ++f) {
    const std::size_t p = op.interior[f];
    b[f] = -op.measure[p] * rhs[p] + lift[f];
  }
  const CgResult cg = conjugate_gradient(op.form, b, {}, options);
  std::vector<double> u = g;
  for (std::size_t f = 0; f < ni; ++f) u[op.interior[f]] = cg.x[f];
  return u;
}

double weighted_dot(const SparseOperator& op, std::span<const double> u,
                    std::span<const double> v) {
  if (u.size() != op.dimension() || v.size() != op.dimension())
    throw Error(ErrorKind::DimensionMismatch, "weighted_dot: length mismatch");
  double s = 0.0;
  for (std::size_t p = 0; p < u.size(); ++p) s += op.measure[p] * u[p] * v[p];
  return s;
}

MMatrixCheck check_m_matrix(const SparseOperator& op) {
  MMatrixCheck check;
  const CsrMatrix& a = op.matrix;
  for (std::size_t p : op.interior) {
    double diag = 0.0, off = 0.0;
    for (std::size_t k = a.row_offsets[p]; k < a.row_offsets[p + 1]; ++k) {
      const double v = -a.values[k];  // entries of -L
      if (a.col_indices[k] == p) {
        diag = v;
      } else {
        if (v > 0.0) check.off_diagonal_nonpositive = false;
        off += std::abs(v);
      }
    }
    if (!(diag > 0.0)) check.diagonal_positive = false;
    if (diag < off * (1.0 - 1e-14)) check.diagonally_dominant = false;
  }
  return check;
}

void write_coordinate(std::ostream& out, const CsrMatrix& matrix) {
  const auto precision = out.precision(17);
  for (std::size_t i = 0; i < matrix.rows; ++i)
    for (std::size_t k = matrix.row_offsets[i]; k < matrix.row_offsets[i + 1]; ++k)
      out << i << ' ' << matrix.col_indices[k] << ' ' << matrix.values[k] << '\n';
  out.precision(precision);
}

}  // namespace maxprin
