#pragma once

#include <stdexcept>
#include <vector>

namespace certiqp {

// Vectors are plain std::vector<double>; length/finiteness requirements are
// enforced where problems are constructed, not on every temporary.
using DenseVector = std::vector<double>;

struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Raised when a pivot falls below 1e-14 x the column's initial magnitude.
struct SingularMatrix : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Dense row-major matrix. rows == 0 is permitted so constraint blocks may be
// empty; cols >= 1 whenever rows >= 1.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(int rows, int cols, double fill = 0.0);
  static DenseMatrix identity(int m);

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& operator()(int i, int j) {
    return a_[static_cast<std::size_t>(i) * cols_ + j];
  }
  double operator()(int i, int j) const {
    return a_[static_cast<std::size_t>(i) * cols_ + j];
  }
  double* row(int i) { return a_.data() + static_cast<std::size_t>(i) * cols_; }
  const double* row(int i) const {
    return a_.data() + static_cast<std::size_t>(i) * cols_;
  }
  std::vector<double>& data() { return a_; }
  const std::vector<double>& data() const { return a_; }

  bool operator==(const DenseMatrix&) const = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> a_;
};

bool all_finite(const DenseVector& x);
bool all_finite(const DenseMatrix& A);

// out = A x. 2*rows*cols flops (multiply-accumulate counted as 2).
void matvec(const DenseMatrix& A, const DenseVector& x, DenseVector& out);
DenseVector matvec(const DenseMatrix& A, const DenseVector& x);

// out = A^T x. 2*rows*cols flops.
void matvec_t(const DenseMatrix& A, const DenseVector& x, DenseVector& out);
DenseVector matvec_t(const DenseMatrix& A, const DenseVector& x);

// 2*len flops.
double dot(const DenseVector& x, const DenseVector& y);

// Componentwise product. len flops.
void hadamard(const DenseVector& x, const DenseVector& y, DenseVector& out);
DenseVector hadamard(const DenseVector& x, const DenseVector& y);

// C = A B. 2*rows(A)*cols(A)*cols(B) flops. Not used inside the certified
// iteration loop.
DenseMatrix matmul(const DenseMatrix& A, const DenseMatrix& B);

// In-place LU factorization with partial pivoting (row interchanges recorded
// in piv). The elimination performs a fixed, input-independent operation count
// for a given m: sum_{p=1}^{m-1} (p + 2p^2) flops. Throws SingularMatrix when
// |pivot| <= 1e-14 * (inf-norm of that column of the input matrix).
void lu_factor(DenseMatrix& A, std::vector<int>& piv);

// Forward/back substitution against factors from lu_factor.
// m(m-1) + m^2 flops.
void lu_backsolve(const DenseMatrix& lu, const std::vector<int>& piv,
                  const DenseVector& rhs, DenseVector& x);

// Factors a copy of A and solves A x = rhs.
DenseVector lu_solve(DenseMatrix A, const DenseVector& rhs);

// Flop totals of the kernels above, for certificate construction.
long long lu_factor_flops(int m);
long long lu_backsolve_flops(int m);

}  // namespace certiqp
