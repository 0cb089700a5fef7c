#pragma once

#include <optional>
#include <span>
#include <vector>

namespace mdisp {

struct Triplet {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

/// Compressed sparse row matrix. Column indices are sorted and unique
/// within each row.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(int rows, int cols, std::vector<int> row_offsets, std::vector<int> col_indices,
               std::vector<double> values);

  /// Duplicate (i, j) entries are summed.
  static SparseMatrix from_triplets(int rows, int cols, std::span<const Triplet> triplets);

  /// Structural pattern of the given (i, j) pairs with zero values.
  static SparseMatrix from_pattern(int rows, int cols, std::span<const Triplet> entries);

  [[nodiscard]] int rows() const { return rows_; }
  [[nodiscard]] int cols() const { return cols_; }
  [[nodiscard]] std::size_t nonzeros() const { return values_.size(); }
  [[nodiscard]] const std::vector<int>& row_offsets() const { return row_offsets_; }
  [[nodiscard]] const std::vector<int>& col_indices() const { return col_indices_; }
  [[nodiscard]] const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  /// Position of (i, j) in the value array, or -1 if not stored.
  [[nodiscard]] long find(int row, int col) const;
  [[nodiscard]] double at(int row, int col) const;
  /// Adds to a stored entry; throws if (i, j) is not in the pattern.
  void add(int row, int col, double value);
  void set_zero();

  void multiply(std::span<const double> x, std::span<double> y) const;
  [[nodiscard]] std::vector<double> operator*(std::span<const double> x) const;
  [[nodiscard]] std::vector<double> diagonal() const;
  [[nodiscard]] bool is_symmetric(double relative_tolerance) const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<int> row_offsets_{0};
  std::vector<int> col_indices_;
  std::vector<double> values_;
};

struct SolveReport {
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

struct SolverOptions {
  double relative_tolerance = 1e-10;
  int max_iterations = 10000;
};

/// Singular-system data for deflated CG. `kernel` spans the null space of A
/// (all ones when empty); `constraint` fixes the kernel component of the
/// solution through constraint^T x = 0.
struct Deflation {
  std::vector<double> constraint;
  std::vector<double> kernel;
};

/// Projects b onto the range of A: b - (kernel^T b / kernel^T constraint) constraint.
std::vector<double> project_rhs(std::span<const double> b, const Deflation& deflation);

/// Jacobi-preconditioned conjugate gradients. `x` holds the initial guess on
/// entry and the solution on exit. With deflation the right-hand side is
/// projected onto the range of A and every iterate is shifted along the
/// kernel so that constraint^T x = 0.
SolveReport cg_deflated(const SparseMatrix& a, std::span<const double> b, std::vector<double>& x,
                        const std::optional<Deflation>& deflation, const SolverOptions& options);

/// Restarted GMRES with right Jacobi preconditioning; the reported residual
/// is the true unpreconditioned relative residual.
SolveReport gmres(const SparseMatrix& a, std::span<const double> b, std::vector<double>& x, int restart,
                  const SolverOptions& options);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

}  // namespace mdisp
