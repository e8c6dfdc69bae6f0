#pragma once

// Flux-form finite volumes for
//   L u = e^{-eta} div(e^{eta} a grad u) + c u = div(a grad u) + g(a grad eta, grad u) + c u
// on (r, xi) tensor grids over warped strips, with metric dr^2 + sigma(r)^2 g_N.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "maxprin/geometry.hpp"
#include "maxprin/linalg.hpp"

namespace maxprin {

using Field = std::function<double(double r, double xi)>;

struct CoefficientBounds {
  double c0 = 1.0;  // lower ellipticity bound on a
  double C0 = 1.0;  // upper bound on a
  double b = 0.0;   // bound on |c|
};

struct OperatorSpec {
  Field a = [](double, double) { return 1.0; };
  Field eta = [](double, double) { return 0.0; };
  Field c = [](double, double) { return 0.0; };
  /// Node values of c; overrides `c` when non-empty (must match the grid size).
  std::vector<double> c_nodal;
  /// Checked at assembly when set; otherwise recorded from the sampled coefficients.
  std::optional<CoefficientBounds> bounds;
};

/// One tensor direction. Natural ends are zero-flux faces half a cell outside the first or
/// last node; Dirichlet ends carry a node on the boundary.
struct Axis {
  std::vector<double> nodes;
  std::vector<double> cell_lo;  // control volume [cell_lo, cell_hi] per node
  std::vector<double> cell_hi;
  double spacing = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  EndCondition lower = EndCondition::Dirichlet;
  EndCondition upper = EndCondition::Dirichlet;
  bool periodic = false;

  std::size_t size() const { return nodes.size(); }
  bool is_dirichlet(std::size_t i) const;
};

Axis make_axis(double lo, double hi, EndCondition lower, EndCondition upper, bool periodic,
               int intervals);

struct Grid2D {
  Axis r;
  Axis xi;
  CrossSection cross_section = CrossSection::full_circle();
  std::vector<std::uint8_t> dirichlet;  // 1 on boundary nodes of the truncated domain

  std::size_t size() const { return r.size() * xi.size(); }
  /// xi is the fast index.
  std::size_t index(std::size_t i, std::size_t j) const { return i * xi.size() + j; }
  std::size_t row_of(std::size_t p) const { return p / xi.size(); }
  std::size_t col_of(std::size_t p) const { return p % xi.size(); }
};

/// Truncation of `domain` at r = R (R = r_max for bounded domains). `density` is nodes per
/// unit length in r; `xi_intervals` <= 0 picks round(extent * density) for proper patches
/// and a single fiber node for closed fibers.
Grid2D make_grid(const StripDomain& domain, double R, double density, int xi_intervals = 0);

std::vector<double> sample(const Grid2D& grid, const Field& f);

struct SparseOperator {
  Grid2D grid;
  int m = 2;
  CsrMatrix matrix;              // L on all nodes, identity rows on Dirichlet nodes
  std::vector<double> measure;   // e^eta sigma^{m-1} dr dv_N per node
  std::vector<double> volume;    // sigma^{m-1} dr dv_N per node (unweighted)
  std::vector<double> c_values;  // zero-order coefficient per node
  CoefficientBounds bounds;
  bool symmetric = true;

  std::vector<std::size_t> interior;     // full index of each free unknown
  std::vector<std::size_t> interior_of;  // free index of each node, npos on the boundary
  CsrMatrix form;                        // K = -diag(mu) L restricted to free nodes
  CsrMatrix boundary_coupling;           // face conductances free -> Dirichlet nodes

  std::size_t dimension() const { return matrix.rows; }
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

SparseOperator assemble(const OperatorSpec& spec, const Grid2D& grid, const WarpProfile& profile,
                        int m);

/// L u (boundary rows return u).
std::vector<double> apply(const SparseOperator& op, std::span<const double> u);

/// Solves L u = rhs on free nodes with u = boundary_values on Dirichlet nodes by PCG on the
/// symmetric form. `boundary_values` may be empty (zero data).
std::vector<double> solve_dirichlet(const SparseOperator& op, std::span<const double> rhs,
                                    std::span<const double> boundary_values = {},
                                    const CgOptions& options = {});

/// Weighted inner product sum mu u v over all nodes.
double weighted_dot(const SparseOperator& op, std::span<const double> u,
                    std::span<const double> v);

struct MMatrixCheck {
  bool off_diagonal_nonpositive = true;  // of -L on free rows
  bool diagonal_positive = true;
  bool diagonally_dominant = true;
  bool holds() const { return off_diagonal_nonpositive && diagonal_positive && diagonally_dominant; }
};

MMatrixCheck check_m_matrix(const SparseOperator& op);

/// "row col value" per line, zero-based.
void write_coordinate(std::ostream& out, const CsrMatrix& matrix);

}  // namespace maxprin
