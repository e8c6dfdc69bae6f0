#include "maxprin/cross_section_spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "maxprin/error.hpp"
#include "maxprin/linalg.hpp"

namespace maxprin {

namespace {

constexpr int kMaxIterations = 10000;
constexpr double kIncrementTolerance = 1e-10;
constexpr double kResidualTolerance = 1e-8;

// Generalized tridiagonal problem K psi = lambda W psi on the free nodes, where K carries
// face conductances and W the control-volume masses. Free nodes start at `first_free`
// in the full node list; Dirichlet ends are excluded.
struct TridiagonalProblem {
  std::vector<double> face;  // face[i] couples free node i and i+1 (size n - 1)
  std::vector<double> mass;  // size n
  std::vector<double> diag;  // size n (includes coupling to the Dirichlet end)
};

CrossEigen inverse_power(const TridiagonalProblem& p, std::vector<double> nodes,
                         std::size_t first_free) {
  const std::size_t n = p.mass.size();
  CsrBuilder builder(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    builder.add(i, i, p.diag[i]);
    if (i + 1 < n) {
      builder.add(i, i + 1, -p.face[i]);
      builder.add(i + 1, i, -p.face[i]);
    }
  }
  const CsrMatrix k = builder.build();
  const BandedLdlt solver(k);

  std::vector<double> v(n, 1.0);
  double lambda = 0.0, previous = kInfinity, residual = kInfinity;
  int it = 0;
  std::vector<double> kv(n), rhs(n);
  for (; it < kMaxIterations; ++it) {
    for (std::size_t i = 0; i < n; ++i) rhs[i] = p.mass[i] * v[i];
    v = solver.solve(rhs);
    const double scale = norm_inf(v);
    for (double& x : v) x /= scale;
    k.multiply(v, kv);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      num += v[i] * kv[i];
      den += v[i] * v[i] * p.mass[i];
    }
    lambda = num / den;
    residual = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      residual = std::max(residual, std::abs(kv[i] / p.mass[i] - lambda * v[i]));
    if (std::abs(lambda - previous) < kIncrementTolerance && residual < kResidualTolerance) break;
    previous = lambda;
  }
  if (it == kMaxIterations)
    throw Error(ErrorKind::SolverDiverged, "inverse power iteration on the fiber did not converge");

  CrossEigen out;
  out.lambda1 = lambda;
  out.nodes = std::move(nodes);
  out.psi.assign(out.nodes.size(), 0.0);
  std::copy(v.begin(), v.end(), out.psi.begin() + static_cast<std::ptrdiff_t>(first_free));
  out.residual = residual;
  out.iterations = it + 1;
  for (std::size_t i = 0; i < n; ++i)
    if (!(v[i] > 0.0)) throw Error(ErrorKind::SignError, "fiber eigenvector is not positive");
  return out;
}

}  // namespace

double lambda1_arc(double theta) {
  if (!(theta > 0.0 && theta < 2.0 * std::numbers::pi))
    throw Error(ErrorKind::DomainError, "lambda1_arc needs 0 < theta < 2 pi");
  const double q = std::numbers::pi / theta;
  return q * q;
}

double lambda1_interval(double length) {
  if (!(length > 0.0)) throw Error(ErrorKind::DomainError, "lambda1_interval needs L > 0");
  const double q = std::numbers::pi / length;
  return q * q;
}

CrossEigen lambda1_cap(double polar_angle, int n_grid) {
  if (!(polar_angle > 0.0 && polar_angle < std::numbers::pi))
    throw Error(ErrorKind::DomainError, "lambda1_cap needs 0 < Theta < pi");
  if (n_grid < 32) throw Error(ErrorKind::DomainError, "lambda1_cap needs n_grid >= 32");

  // Nodes phi_i = i h, i = 0..n_grid; phi = Theta is Dirichlet. Finite volumes with face
  // weight sin(phi_{i+1/2}); node 0 owns [0, h/2], which is the ghost reflection
  // psi_{-1} = psi_1 written in flux form.
  const int n = n_grid;
  const double h = polar_angle / n;
  std::vector<double> nodes(n + 1);
  for (int i = 0; i <= n; ++i) nodes[i] = i * h;

  TridiagonalProblem p;
  p.face.resize(n - 1);
  p.mass.resize(n);
  p.diag.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const double a = i == 0 ? 0.0 : nodes[i] - 0.5 * h;
    const double b = nodes[i] + 0.5 * h;
    p.mass[i] = std::cos(a) - std::cos(b);
    const double conductance = std::sin(b) / h;  // face between i and i + 1
    p.diag[i] += conductance;
    if (i + 1 < n) {
      p.face[i] = conductance;
      p.diag[i + 1] += conductance;
    }
  }
  CrossEigen out = inverse_power(p, std::move(nodes), 0);
  out.grid_size = n_grid;
  return out;
}

CrossEigen eigenfunction_arc(double theta, int n_grid) {
  if (!(theta > 0.0 && theta < 2.0 * std::numbers::pi))
    throw Error(ErrorKind::DomainError, "eigenfunction_arc needs 0 < theta < 2 pi");
  if (n_grid < 4) throw Error(ErrorKind::DomainError, "eigenfunction_arc needs n_grid >= 4");
  const int n = n_grid;
  const double h = theta / n;
  std::vector<double> nodes(n + 1);
  for (int i = 0; i <= n; ++i) nodes[i] = i * h;

  TridiagonalProblem p;
  p.face.assign(n - 2, 1.0 / h);
  p.mass.assign(n - 1, h);
  p.diag.assign(n - 1, 2.0 / h);
  CrossEigen out = inverse_power(p, std::move(nodes), 1);
  out.grid_size = n_grid;
  return out;
}

double cross_section_lambda1(const CrossSection& section, int n_grid) {
  switch (section.kind()) {
    case CrossSectionKind::CircleArc: return lambda1_arc(section.extent());
    case CrossSectionKind::Interval: return lambda1_interval(section.extent());
    case CrossSectionKind::SphereCap: return lambda1_cap(section.extent(), n_grid).lambda1;
    case CrossSectionKind::FullCircle:
    case CrossSectionKind::FullSphere: return 0.0;
  }
  return 0.0;
}

}  // namespace maxprin
