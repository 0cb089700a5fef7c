#include "mdisp/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace mdisp {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

SparseMatrix::SparseMatrix(int rows, int cols, std::vector<int> row_offsets, std::vector<int> col_indices,
                           std::vector<double> values)
    : rows_(rows),
      cols_(cols),
      row_offsets_(std::move(row_offsets)),
      col_indices_(std::move(col_indices)),
      values_(std::move(values)) {
  if (row_offsets_.size() != static_cast<std::size_t>(rows_) + 1 || col_indices_.size() != values_.size() ||
      static_cast<std::size_t>(row_offsets_.back()) != values_.size())
    throw std::invalid_argument("SparseMatrix: inconsistent CSR arrays");
  for (int i = 0; i < rows_; ++i) {
    if (row_offsets_[i] > row_offsets_[i + 1]) throw std::invalid_argument("SparseMatrix: decreasing row offsets");
    for (int k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
      if (col_indices_[k] < 0 || col_indices_[k] >= cols_) throw std::invalid_argument("SparseMatrix: column out of range");
      if (k > row_offsets_[i] && col_indices_[k] <= col_indices_[k - 1])
        throw std::invalid_argument("SparseMatrix: columns not sorted and unique");
    }
  }
}

namespace {

SparseMatrix build(int rows, int cols, std::span<const Triplet> triplets, bool keep_values) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("from_triplets: negative dimension");
  for (const auto& t : triplets) {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
      throw std::invalid_argument("from_triplets: index (" + std::to_string(t.row) + ", " + std::to_string(t.col) +
                                  ") out of range");
  }
  std::vector<int> counts(rows + 1, 0);
  for (const auto& t : triplets) ++counts[t.row + 1];
  std::partial_sum(counts.begin(), counts.end(), counts.begin());
  std::vector<int> order(triplets.size());
  {
    std::vector<int> next(counts.begin(), counts.end() - 1);
    for (std::size_t k = 0; k < triplets.size(); ++k) order[next[triplets[k].row]++] = static_cast<int>(k);
  }
  std::vector<int> offsets(rows + 1, 0);
  std::vector<int> columns;
  std::vector<double> values;
  columns.reserve(triplets.size());
  values.reserve(triplets.size());
  for (int i = 0; i < rows; ++i) {
    auto first = order.begin() + counts[i];
    auto last = order.begin() + counts[i + 1];
    std::stable_sort(first, last, [&](int a, int b) { return triplets[a].col < triplets[b].col; });
    for (auto it = first; it != last; ++it) {
      const auto& t = triplets[*it];
      if (static_cast<int>(columns.size()) > offsets[i] && columns.back() == t.col) {
        if (keep_values) values.back() += t.value;
      } else {
        columns.push_back(t.col);
        values.push_back(keep_values ? t.value : 0.0);
      }
    }
    offsets[i + 1] = static_cast<int>(columns.size());
  }
  return SparseMatrix(rows, cols, std::move(offsets), std::move(columns), std::move(values));
}

}  // namespace

SparseMatrix SparseMatrix::from_triplets(int rows, int cols, std::span<const Triplet> triplets) {
  return build(rows, cols, triplets, true);
}

SparseMatrix SparseMatrix::from_pattern(int rows, int cols, std::span<const Triplet> entries) {
  return build(rows, cols, entries, false);
}

long SparseMatrix::find(int row, int col) const {
  const auto first = col_indices_.begin() + row_offsets_[row];
  const auto last = col_indices_.begin() + row_offsets_[row + 1];
  const auto it = std::lower_bound(first, last, col);
  if (it == last || *it != col) return -1;
  return it - col_indices_.begin();
}

double SparseMatrix::at(int row, int col) const {
  const long k = find(row, col);
  return k < 0 ? 0.0 : values_[k];
}

void SparseMatrix::add(int row, int col, double value) {
  const long k = find(row, col);
  if (k < 0) throw std::out_of_range("SparseMatrix::add: entry not in pattern");
  values_[k] += value;
}

void SparseMatrix::set_zero() { std::fill(values_.begin(), values_.end(), 0.0); }

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  for (int i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (int k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) s += values_[k] * x[col_indices_[k]];
    y[i] = s;
  }
}

std::vector<double> SparseMatrix::operator*(std::span<const double> x) const {
  if (x.size() != static_cast<std::size_t>(cols_)) throw std::invalid_argument("SparseMatrix: dimension mismatch");
  std::vector<double> y(rows_);
  multiply(x, y);
  return y;
}

std::vector<double> SparseMatrix::diagonal() const {
  std::vector<double> d(std::min(rows_, cols_), 0.0);
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = at(static_cast<int>(i), static_cast<int>(i));
  return d;
}

bool SparseMatrix::is_symmetric(double relative_tolerance) const {
  if (rows_ != cols_) return false;
  double scale = 0.0;
  for (double v : values_) scale = std::max(scale, std::abs(v));
  for (int i = 0; i < rows_; ++i) {
    for (int k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
      if (std::abs(values_[k] - at(col_indices_[k], i)) > relative_tolerance * scale) return false;
    }
  }
  return true;
}

std::vector<double> project_rhs(std::span<const double> b, const Deflation& deflation) {
  const std::size_t n = b.size();
  std::vector<double> ones;
  std::span<const double> kernel = deflation.kernel;
  if (kernel.empty()) {
    ones.assign(n, 1.0);
    kernel = ones;
  }
  const double scale = dot(kernel, b) / dot(kernel, deflation.constraint);
  std::vector<double> out(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) out[i] -= scale * deflation.constraint[i];
  return out;
}

namespace {

// x <- x - (c^T x / c^T z) z
void fix_kernel_component(std::vector<double>& x, std::span<const double> constraint, std::span<const double> kernel,
                          double constraint_dot_kernel) {
  const double s = dot(constraint, x) / constraint_dot_kernel;
  for (std::size_t i = 0; i < x.size(); ++i) x[i] -= s * kernel[i];
}

}  // namespace

SolveReport cg_deflated(const SparseMatrix& a, std::span<const double> b_in, std::vector<double>& x,
                        const std::optional<Deflation>& deflation, const SolverOptions& options) {
  const auto n = static_cast<std::size_t>(a.rows());
  if (a.rows() != a.cols() || b_in.size() != n) throw std::invalid_argument("cg_deflated: dimension mismatch");
  if (!a.is_symmetric(1e-12)) throw std::invalid_argument("cg_deflated: matrix is not symmetric");
  x.resize(n, 0.0);

  std::vector<double> b(b_in.begin(), b_in.end());
  std::vector<double> ones;
  std::span<const double> kernel;
  double c_dot_z = 1.0;
  if (deflation) {
    if (deflation->constraint.size() != n) throw std::invalid_argument("cg_deflated: constraint size mismatch");
    if (deflation->kernel.empty()) {
      ones.assign(n, 1.0);
      kernel = ones;
    } else {
      kernel = deflation->kernel;
    }
    c_dot_z = dot(deflation->constraint, kernel);
    if (c_dot_z == 0.0) throw std::invalid_argument("cg_deflated: constraint orthogonal to kernel");
    b = project_rhs(b_in, *deflation);
    fix_kernel_component(x, deflation->constraint, kernel, c_dot_z);
  }

  std::vector<double> inv_diag = a.diagonal();
  for (double& d : inv_diag) {
    if (!(d > 0.0)) throw std::invalid_argument("cg_deflated: nonpositive diagonal entry");
    d = 1.0 / d;
  }

  SolveReport report;
  const double b_norm = norm2(b);
  std::vector<double> r(n), z(n), p(n), ap(n);
  a.multiply(x, ap);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ap[i];
  if (b_norm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    report.converged = true;
    return report;
  }
  report.relative_residual = norm2(r) / b_norm;
  if (report.relative_residual <= options.relative_tolerance) {
    report.converged = true;
    return report;
  }
  for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
  p = z;
  double rz = dot(r, z);
  while (report.iterations < options.max_iterations) {
    a.multiply(p, ap);
    const double pap = dot(p, ap);
    if (!(pap > 0.0)) break;
    const double alpha = rz / pap;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    ++report.iterations;
    if (deflation) fix_kernel_component(x, deflation->constraint, kernel, c_dot_z);
    report.relative_residual = norm2(r) / b_norm;
    if (report.relative_residual <= options.relative_tolerance) {
      // confirm against the true residual to guard against recurrence drift
      a.multiply(x, ap);
      for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ap[i];
      report.relative_residual = norm2(r) / b_norm;
      if (report.relative_residual <= options.relative_tolerance) break;
    }
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  report.converged = report.relative_residual <= options.relative_tolerance;
  return report;
}

SolveReport gmres(const SparseMatrix& a, std::span<const double> b, std::vector<double>& x, int restart,
                  const SolverOptions& options) {
  const auto n = static_cast<std::size_t>(a.rows());
  if (a.rows() != a.cols() || b.size() != n) throw std::invalid_argument("gmres: dimension mismatch");
  if (restart < 1) throw std::invalid_argument("gmres: restart must be positive");
  x.resize(n, 0.0);
  std::vector<double> inv_diag = a.diagonal();
  for (double& d : inv_diag) {
    if (d == 0.0) throw std::invalid_argument("gmres: zero diagonal entry with Jacobi preconditioner");
    d = 1.0 / d;
  }

  SolveReport report;
  const double b_norm = norm2(b);
  if (b_norm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    report.converged = true;
    return report;
  }

  const auto m = static_cast<std::size_t>(restart);
  std::vector<std::vector<double>> basis(m + 1, std::vector<double>(n));
  std::vector<double> h((m + 1) * m);
  auto H = [&](std::size_t i, std::size_t j) -> double& { return h[i * m + j]; };
  std::vector<double> cs(m), sn(m), g(m + 1), y(m), w(n), tmp(n);

  while (true) {
    a.multiply(x, w);
    for (std::size_t i = 0; i < n; ++i) basis[0][i] = b[i] - w[i];
    double beta = norm2(basis[0]);
    report.relative_residual = beta / b_norm;
    if (report.relative_residual <= options.relative_tolerance || report.iterations >= options.max_iterations) break;
    for (double& v : basis[0]) v /= beta;
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = beta;

    std::size_t k = 0;
    for (; k < m && report.iterations < options.max_iterations; ++k) {
      for (std::size_t i = 0; i < n; ++i) tmp[i] = inv_diag[i] * basis[k][i];
      a.multiply(tmp, w);
      for (std::size_t j = 0; j <= k; ++j) {
        H(j, k) = dot(w, basis[j]);
        for (std::size_t i = 0; i < n; ++i) w[i] -= H(j, k) * basis[j][i];
      }
      H(k + 1, k) = norm2(w);
      if (H(k + 1, k) > 0.0)
        for (std::size_t i = 0; i < n; ++i) basis[k + 1][i] = w[i] / H(k + 1, k);
      for (std::size_t j = 0; j < k; ++j) {
        const double t = cs[j] * H(j, k) + sn[j] * H(j + 1, k);
        H(j + 1, k) = -sn[j] * H(j, k) + cs[j] * H(j + 1, k);
        H(j, k) = t;
      }
      const double r = std::hypot(H(k, k), H(k + 1, k));
      cs[k] = r == 0.0 ? 1.0 : H(k, k) / r;
      sn[k] = r == 0.0 ? 0.0 : H(k + 1, k) / r;
      H(k, k) = r;
      H(k + 1, k) = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = cs[k] * g[k];
      ++report.iterations;
      if (std::abs(g[k + 1]) / b_norm <= options.relative_tolerance || r == 0.0) {
        ++k;
        break;
      }
    }
    // back substitution; x += M^{-1} V y
    for (std::size_t ii = k; ii-- > 0;) {
      double s = g[ii];
      for (std::size_t j = ii + 1; j < k; ++j) s -= H(ii, j) * y[j];
      y[ii] = H(ii, ii) == 0.0 ? 0.0 : s / H(ii, ii);
    }
    std::fill(tmp.begin(), tmp.end(), 0.0);
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t i = 0; i < n; ++i) tmp[i] += y[j] * basis[j][i];
    for (std::size_t i = 0; i < n; ++i) x[i] += inv_diag[i] * tmp[i];
    if (k == 0) break;
  }
  report.converged = report.relative_residual <= options.relative_tolerance;
  return report;
}

}  // namespace mdisp
