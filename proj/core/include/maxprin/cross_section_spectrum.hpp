#pragma once

#include <vector>

#include "maxprin/geometry.hpp"

namespace maxprin {

/// Principal Dirichlet pair of -Delta on a fiber patch, sampled on a 1-D grid.
/// psi is max-normalized (max node value 1).
struct CrossEigen {
  double lambda1 = 0.0;
  std::vector<double> nodes;  // reduced coordinate, boundary nodes included
  std::vector<double> psi;
  int grid_size = 0;
  double residual = 0.0;  // ||(-Delta_h - lambda1) psi||_inf / ||psi||_inf
  int iterations = 0;
};

/// (pi / theta)^2 for an arc of the unit circle.
double lambda1_arc(double theta);

/// (pi / L)^2 for a flat interval.
double lambda1_interval(double length);

/// Polar cap of S^2 of angle Theta: axisymmetric reduction, reflection at the pole.
CrossEigen lambda1_cap(double polar_angle, int n_grid);

/// Arc of angle theta discretized with n_grid intervals.
CrossEigen eigenfunction_arc(double theta, int n_grid);

/// Closed form for arcs and intervals, numeric (n_grid) for caps.
/// Closed fibers have no Dirichlet boundary and report 0.
double cross_section_lambda1(const CrossSection& section, int n_grid = 512);

}  // namespace maxprin
