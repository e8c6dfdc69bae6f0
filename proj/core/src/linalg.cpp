#include "maxprin/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <sstream>

#include "maxprin/error.hpp"

namespace maxprin {

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != cols || y.size() != rows)
    throw Error(ErrorKind::DimensionMismatch, "CSR multiply size mismatch");
  for (std::size_t i = 0; i < rows; ++i) {
    double s = 0.0;
    for (std::size_t k = row_offsets[i]; k < row_offsets[i + 1]; ++k)
      s += values[k] * x[col_indices[k]];
    y[i] = s;
  }
}

std::vector<double> CsrMatrix::multiply(std::span<const double> x) const {
  std::vector<double> y(rows);
  multiply(x, y);
  return y;
}

double CsrMatrix::at(std::size_t i, std::size_t j) const {
  const auto first = col_indices.begin() + static_cast<std::ptrdiff_t>(row_offsets[i]);
  const auto last = col_indices.begin() + static_cast<std::ptrdiff_t>(row_offsets[i + 1]);
  const auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return 0.0;
  return values[static_cast<std::size_t>(it - col_indices.begin())];
}

std::vector<double> CsrMatrix::diagonal() const {
  std::vector<double> d(std::min(rows, cols), 0.0);
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = at(i, i);
  return d;
}

std::size_t CsrMatrix::bandwidth() const {
  std::size_t bw = 0;
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t k = row_offsets[i]; k < row_offsets[i + 1]; ++k) {
      const std::size_t j = col_indices[k];
      bw = std::max(bw, i > j ? i - j : j - i);
    }
  return bw;
}

void CsrBuilder::add(std::size_t row, std::size_t col, double value) {
  if (row >= rows_ || col >= cols_)
    throw Error(ErrorKind::DimensionMismatch, "triplet outside matrix bounds");
  triplets_.push_back({row, col, value});
}

CsrMatrix CsrBuilder::build() const {
  std::vector<Triplet> t = triplets_;
  std::stable_sort(t.begin(), t.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  CsrMatrix m;
  m.rows = rows_;
  m.cols = cols_;
  m.row_offsets.assign(rows_ + 1, 0);
  for (std::size_t k = 0; k < t.size();) {
    std::size_t e = k;
    double s = 0.0;
    while (e < t.size() && t[e].row == t[k].row && t[e].col == t[k].col) s += t[e++].value;
    m.col_indices.push_back(t[k].col);
    m.values.push_back(s);
    ++m.row_offsets[t[k].row + 1];
    k = e;
  }
  std::partial_sum(m.row_offsets.begin(), m.row_offsets.end(), m.row_offsets.begin());
  return m;
}

// ---------------------------------------------------------------------------

BandedLdlt::BandedLdlt(const CsrMatrix& a, double shift, std::span<const double> mass)
    : n_(a.rows), bw_(a.bandwidth()) {
  if (a.rows != a.cols) throw Error(ErrorKind::DimensionMismatch, "LDLT needs a square matrix");
  if (!mass.empty() && mass.size() != n_)
    throw Error(ErrorKind::DimensionMismatch, "mass diagonal length mismatch");
  band_.assign(n_ * (bw_ + 1), 0.0);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k) {
      const std::size_t j = a.col_indices[k];
      if (j <= i) lower(i, j) += a.values[k];
    }
  if (shift != 0.0)
    for (std::size_t i = 0; i < n_; ++i) lower(i, i) -= shift * (mass.empty() ? 1.0 : mass[i]);

  // Column-oriented banded LDL^T; lower(i, j) holds L_ij for i > j and D_j for i == j.
  std::vector<double> work(bw_ + 1);
  for (std::size_t j = 0; j < n_; ++j) {
    const std::size_t k0 = j > bw_ ? j - bw_ : 0;
    for (std::size_t k = k0; k < j; ++k) work[j - k] = lower(j, k) * lower(k, k);
    double d = lower(j, j);
    for (std::size_t k = k0; k < j; ++k) d -= lower(j, k) * work[j - k];
    if (d == 0.0 || !std::isfinite(d)) {
      std::ostringstream os;
      os << "zero pivot at row " << j << " (shift " << shift << ")";
      throw Error(ErrorKind::SolverDiverged, os.str());
    }
    lower(j, j) = d;
    if (d < 0.0) ++negative_pivots_;
    const std::size_t i_end = std::min(n_, j + bw_ + 1);
    for (std::size_t i = j + 1; i < i_end; ++i) {
      double s = lower(i, j);
      const std::size_t kk = std::max(k0, i > bw_ ? i - bw_ : 0);
      for (std::size_t k = kk; k < j; ++k) s -= lower(i, k) * work[j - k];
      lower(i, j) = s / d;
    }
  }
}

std::vector<double> BandedLdlt::solve(std::span<const double> b) const {
  if (b.size() != n_) throw Error(ErrorKind::DimensionMismatch, "LDLT solve size mismatch");
  std::vector<double> x(b.begin(), b.end());
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t k0 = i > bw_ ? i - bw_ : 0;
    double s = x[i];
    for (std::size_t k = k0; k < i; ++k) s -= lower(i, k) * x[k];
    x[i] = s;
  }
  for (std::size_t i = 0; i < n_; ++i) x[i] /= lower(i, i);
  for (std::size_t i = n_; i-- > 0;) {
    const std::size_t k_end = std::min(n_, i + bw_ + 1);
    double s = x[i];
    for (std::size_t k = i + 1; k < k_end; ++k) s -= lower(k, i) * x[k];
    x[i] = s;
  }
  return x;
}

// ---------------------------------------------------------------------------

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double norm_inf(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

namespace {

// IC(0) on the sparsity pattern of the lower triangle.
struct IncompleteCholesky {
  CsrMatrix factor;  // lower triangle including diagonal, sorted columns

  static std::optional<IncompleteCholesky> build(const CsrMatrix& a) {
    IncompleteCholesky ic;
    CsrMatrix& l = ic.factor;
    l.rows = l.cols = a.rows;
    l.row_offsets.assign(a.rows + 1, 0);
    for (std::size_t i = 0; i < a.rows; ++i) {
      for (std::size_t k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k)
        if (a.col_indices[k] <= i) {
          l.col_indices.push_back(a.col_indices[k]);
          l.values.push_back(a.values[k]);
        }
      l.row_offsets[i + 1] = l.values.size();
    }
    for (std::size_t i = 0; i < l.rows; ++i) {
      const std::size_t begin = l.row_offsets[i], end = l.row_offsets[i + 1];
      if (end == begin || l.col_indices[end - 1] != i) return std::nullopt;
      for (std::size_t p = begin; p < end; ++p) {
        const std::size_t j = l.col_indices[p];
        // s = sum over common columns c < j of L_ic L_jc
        double s = 0.0;
        std::size_t q = begin, r = l.row_offsets[j];
        const std::size_t r_end = l.row_offsets[j + 1];
        while (q < p && r < r_end && l.col_indices[r] < j) {
          if (l.col_indices[q] == l.col_indices[r]) {
            s += l.values[q] * l.values[r];
            ++q;
            ++r;
          } else if (l.col_indices[q] < l.col_indices[r]) {
            ++q;
          } else {
            ++r;
          }
        }
        if (j < i) {
          l.values[p] = (l.values[p] - s) / l.values[r_end - 1];
        } else {
          const double d = l.values[p] - s;
          if (!(d > 0.0)) return std::nullopt;
          l.values[p] = std::sqrt(d);
        }
      }
    }
    return ic;
  }

  void apply(std::span<const double> r, std::span<double> z) const {
    const CsrMatrix& l = factor;
    for (std::size_t i = 0; i < l.rows; ++i) {
      double s = r[i];
      const std::size_t end = l.row_offsets[i + 1] - 1;
      for (std::size_t k = l.row_offsets[i]; k < end; ++k) s -= l.values[k] * z[l.col_indices[k]];
      z[i] = s / l.values[end];
    }
    for (std::size_t i = l.rows; i-- > 0;) {
      const std::size_t end = l.row_offsets[i + 1] - 1;
      z[i] /= l.values[end];
      for (std::size_t k = l.row_offsets[i]; k < end; ++k) z[l.col_indices[k]] -= l.values[k] * z[i];
    }
  }
};

}  // namespace

CgResult conjugate_gradient(const CsrMatrix& a, std::span<const double> b,
                            std::span<const double> x0, const CgOptions& options) {
  const std::size_t n = a.rows;
  if (a.cols != n || b.size() != n || (!x0.empty() && x0.size() != n))
    throw Error(ErrorKind::DimensionMismatch, "CG size mismatch");

  CgResult result;
  result.x = x0.empty() ? std::vector<double>(n, 0.0) : std::vector<double>(x0.begin(), x0.end());
  const double b_norm = norm2(b);
  if (b_norm == 0.0) {
    std::fill(result.x.begin(), result.x.end(), 0.0);
    return result;
  }

  std::optional<IncompleteCholesky> ic;
  std::vector<double> inv_diag;
  Preconditioner kind = options.preconditioner;
  if (kind == Preconditioner::IncompleteCholesky) {
    ic = IncompleteCholesky::build(a);
    if (!ic) kind = Preconditioner::Jacobi;
  }
  if (kind == Preconditioner::Jacobi) {
    inv_diag = a.diagonal();
    for (double& d : inv_diag) {
      if (!(d > 0.0)) throw Error(ErrorKind::IndefiniteOperator, "nonpositive diagonal");
      d = 1.0 / d;
    }
  }
  result.preconditioner_used = kind;
  auto precondition = [&](std::span<const double> r, std::span<double> z) {
    switch (kind) {
      case Preconditioner::IncompleteCholesky: ic->apply(r, z); break;
      case Preconditioner::Jacobi:
        for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
        break;
      case Preconditioner::None: std::copy(r.begin(), r.end(), z.begin()); break;
    }
  };

  std::vector<double> r(n), z(n), p(n), q(n);
  a.multiply(result.x, q);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
  precondition(r, z);
  p = z;
  double rz = dot(r, z);
  const std::size_t max_it = options.max_iterations ? options.max_iterations : 10 * n + 100;
  double rel = norm2(r) / b_norm;
  std::size_t it = 0;
  while (rel > options.relative_tolerance) {
    if (it == max_it) {
      std::ostringstream os;
      os << "CG reached " << max_it << " iterations at relative residual " << rel;
      throw Error(ErrorKind::SolverDiverged, os.str());
    }
    a.multiply(p, q);
    const double curvature = dot(p, q);
    if (!(curvature > 0.0))
      throw Error(ErrorKind::IndefiniteOperator, "CG met nonpositive curvature p^T A p");
    const double alpha = rz / curvature;
    for (std::size_t i = 0; i < n; ++i) {
      result.x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    ++it;
    rel = norm2(r) / b_norm;
    if (rel <= options.relative_tolerance) break;
    precondition(r, z);
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  // Recursive residuals drift; report the true one.
  a.multiply(result.x, q);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
  result.relative_residual = norm2(r) / b_norm;
  result.iterations = it;
  return result;
}

}  // namespace maxprin
