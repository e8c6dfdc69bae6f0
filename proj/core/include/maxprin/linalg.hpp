#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace maxprin {

/// Compressed-row sparse matrix. Column indices are sorted within each row.
struct CsrMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> row_offsets{0};
  std::vector<std::size_t> col_indices;
  std::vector<double> values;

  std::size_t nonzeros() const { return values.size(); }
  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> multiply(std::span<const double> x) const;
  /// Entry (i, j), zero when not stored.
  double at(std::size_t i, std::size_t j) const;
  std::vector<double> diagonal() const;
  /// Largest |i - j| over stored entries.
  std::size_t bandwidth() const;
};

/// Accumulates (row, col, value) triplets; duplicates are summed.
class CsrBuilder {
 public:
  CsrBuilder(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {}
  void add(std::size_t row, std::size_t col, double value);
  CsrMatrix build() const;

 private:
  struct Triplet {
    std::size_t row, col;
    double value;
  };
  std::size_t rows_, cols_;
  std::vector<Triplet> triplets_;
};

/// LDL^T factorization of (A - shift * diag(mass)) for a symmetric banded A, no pivoting.
/// The count of negative pivots is the number of eigenvalues below `shift` (Sylvester).
class BandedLdlt {
 public:
  BandedLdlt(const CsrMatrix& a, double shift = 0.0, std::span<const double> mass = {});

  std::vector<double> solve(std::span<const double> b) const;
  std::size_t negative_pivots() const { return negative_pivots_; }
  std::size_t size() const { return n_; }
  std::size_t bandwidth() const { return bw_; }

 private:
  double& lower(std::size_t i, std::size_t j) { return band_[i * (bw_ + 1) + (i - j)]; }
  double lower(std::size_t i, std::size_t j) const { return band_[i * (bw_ + 1) + (i - j)]; }

  std::size_t n_ = 0;
  std::size_t bw_ = 0;
  std::vector<double> band_;  // unit lower factor, diagonal slot holds D
  std::size_t negative_pivots_ = 0;
};

enum class Preconditioner { None, Jacobi, IncompleteCholesky };

struct CgOptions {
  double relative_tolerance = 1e-10;
  std::size_t max_iterations = 0;  // 0 selects 10 n + 100
  Preconditioner preconditioner = Preconditioner::IncompleteCholesky;
};

struct CgResult {
  std::vector<double> x;
  std::size_t iterations = 0;
  double relative_residual = 0.0;
  Preconditioner preconditioner_used = Preconditioner::None;
};

/// Preconditioned conjugate gradients for symmetric positive definite systems.
/// Throws IndefiniteOperator on a nonpositive curvature step, SolverDiverged on the cap.
CgResult conjugate_gradient(const CsrMatrix& a, std::span<const double> b,
                            std::span<const double> x0 = {}, const CgOptions& options = {});

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double norm_inf(std::span<const double> a);

}  // namespace maxprin
