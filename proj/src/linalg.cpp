#include "certiqp/linalg.hpp"

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>

#include "certiqp/flops.hpp"

namespace certiqp {

#ifdef CERTIQP_COUNT_FLOPS
thread_local std::uint64_t flop_counter = 0;
#endif

DenseMatrix::DenseMatrix(int rows, int cols, double fill)
    : rows_(rows), cols_(cols) {
  if (rows < 0 || cols < 0 || (rows >= 1 && cols < 1)) {
    throw DimensionMismatch("DenseMatrix: bad shape " + std::to_string(rows) +
                            "x" + std::to_string(cols));
  }
  a_.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols),
            fill);
}

DenseMatrix DenseMatrix::identity(int m) {
  DenseMatrix I(m, m);
  for (int i = 0; i < m; ++i) I(i, i) = 1.0;
  return I;
}

bool all_finite(const DenseVector& x) {
  for (double t : x) {
    if (!std::isfinite(t)) return false;
  }
  return true;
}

bool all_finite(const DenseMatrix& A) {
  for (double t : A.data()) {
    if (!std::isfinite(t)) return false;
  }
  return true;
}

void matvec(const DenseMatrix& A, const DenseVector& x, DenseVector& out) {
  if (static_cast<int>(x.size()) != A.cols() && A.rows() > 0) {
    throw DimensionMismatch("matvec: A is " + std::to_string(A.rows()) + "x" +
                            std::to_string(A.cols()) + ", x has length " +
                            std::to_string(x.size()));
  }
  out.resize(A.rows());
  for (int i = 0; i < A.rows(); ++i) {
    const double* ai = A.row(i);
    double acc = 0.0;
    for (int j = 0; j < A.cols(); ++j) acc += ai[j] * x[j];
    out[i] = acc;
  }
  CERTIQP_COUNT(2ull * A.rows() * A.cols());
}

DenseVector matvec(const DenseMatrix& A, const DenseVector& x) {
  DenseVector out;
  matvec(A, x, out);
  return out;
}

void matvec_t(const DenseMatrix& A, const DenseVector& x, DenseVector& out) {
  if (static_cast<int>(x.size()) != A.rows()) {
    throw DimensionMismatch("matvec_t: A is " + std::to_string(A.rows()) +
                            "x" + std::to_string(A.cols()) +
                            ", x has length " + std::to_string(x.size()));
  }
  out.assign(A.cols(), 0.0);
  for (int i = 0; i < A.rows(); ++i) {
    const double* ai = A.row(i);
    const double xi = x[i];
    for (int j = 0; j < A.cols(); ++j) out[j] += ai[j] * xi;
  }
  CERTIQP_COUNT(2ull * A.rows() * A.cols());
}

DenseVector matvec_t(const DenseMatrix& A, const DenseVector& x) {
  DenseVector out;
  matvec_t(A, x, out);
  return out;
}

double dot(const DenseVector& x, const DenseVector& y) {
  if (x.size() != y.size()) {
    throw DimensionMismatch("dot: lengths " + std::to_string(x.size()) +
                            " vs " + std::to_string(y.size()));
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
  CERTIQP_COUNT(2ull * x.size());
  return acc;
}

void hadamard(const DenseVector& x, const DenseVector& y, DenseVector& out) {
  if (x.size() != y.size()) {
    throw DimensionMismatch("hadamard: lengths " + std::to_string(x.size()) +
                            " vs " + std::to_string(y.size()));
  }
  out.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] * y[i];
  CERTIQP_COUNT(x.size());
}

DenseVector hadamard(const DenseVector& x, const DenseVector& y) {
  DenseVector out;
  hadamard(x, y, out);
  return out;
}

DenseMatrix matmul(const DenseMatrix& A, const DenseMatrix& B) {
  if (A.cols() != B.rows()) {
    throw DimensionMismatch("matmul: " + std::to_string(A.rows()) + "x" +
                            std::to_string(A.cols()) + " times " +
                            std::to_string(B.rows()) + "x" +
                            std::to_string(B.cols()));
  }
  DenseMatrix C(A.rows(), B.cols());
  for (int i = 0; i < A.rows(); ++i) {
    const double* ai = A.row(i);
    double* ci = C.row(i);
    for (int k = 0; k < A.cols(); ++k) {
      const double aik = ai[k];
      const double* bk = B.row(k);
      for (int j = 0; j < B.cols(); ++j) ci[j] += aik * bk[j];
    }
  }
  CERTIQP_COUNT(2ull * A.rows() * A.cols() * B.cols());
  return C;
}

void lu_factor(DenseMatrix& A, std::vector<int>& piv) {
  const int m = A.rows();
  if (m != A.cols()) {
    throw DimensionMismatch("lu_factor: matrix is " + std::to_string(m) + "x" +
                            std::to_string(A.cols()));
  }
  piv.resize(m);

  // Singularity thresholds from the input matrix, before elimination.
  std::vector<double> colmax(m, 0.0);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const double a = std::fabs(A(i, j));
      if (a > colmax[j]) colmax[j] = a;
    }
  }

  for (int k = 0; k < m; ++k) {
    int p = k;
    double best = std::fabs(A(k, k));
    for (int i = k + 1; i < m; ++i) {
      const double a = std::fabs(A(i, k));
      if (a > best) {
        best = a;
        p = i;
      }
    }
    piv[k] = p;
    if (p != k) {
      for (int j = 0; j < m; ++j) std::swap(A(k, j), A(p, j));
    }
    if (best <= 1e-14 * colmax[k]) {
      throw SingularMatrix("lu_factor: pivot " + std::to_string(best) +
                           " at column " + std::to_string(k));
    }
    const double pivot = A(k, k);
    for (int i = k + 1; i < m; ++i) {
      const double l = A(i, k) / pivot;
      A(i, k) = l;
      double* ri = A.row(i);
      const double* rk = A.row(k);
      for (int j = k + 1; j < m; ++j) ri[j] -= l * rk[j];
    }
  }
  CERTIQP_COUNT(static_cast<std::uint64_t>(lu_factor_flops(m)));
}

void lu_backsolve(const DenseMatrix& lu, const std::vector<int>& piv,
                  const DenseVector& rhs, DenseVector& x) {
  const int m = lu.rows();
  if (static_cast<int>(rhs.size()) != m ||
      static_cast<int>(piv.size()) != m) {
    throw DimensionMismatch("lu_backsolve: size mismatch");
  }
  x = rhs;
  for (int k = 0; k < m; ++k) {
    if (piv[k] != k) std::swap(x[k], x[piv[k]]);
  }
  // L y = P rhs, unit lower triangle.
  for (int i = 1; i < m; ++i) {
    const double* ri = lu.row(i);
    double acc = x[i];
    for (int j = 0; j < i; ++j) acc -= ri[j] * x[j];
    x[i] = acc;
  }
  // U x = y.
  for (int i = m - 1; i >= 0; --i) {
    const double* ri = lu.row(i);
    double acc = x[i];
    for (int j = i + 1; j < m; ++j) acc -= ri[j] * x[j];
    x[i] = acc / ri[i];
  }
  CERTIQP_COUNT(static_cast<std::uint64_t>(lu_backsolve_flops(m)));
}

DenseVector lu_solve(DenseMatrix A, const DenseVector& rhs) {
  std::vector<int> piv;
  lu_factor(A, piv);
  DenseVector x;
  lu_backsolve(A, piv, rhs, x);
  return x;
}

long long lu_factor_flops(int m) {
  // Column k eliminates m-1-k rows: one division each plus 2 flops per
  // trailing entry: sum_{p=1}^{m-1} (p + 2p^2).
  const long long mm = m;
  return mm * (mm - 1) / 2 + mm * (mm - 1) * (2 * mm - 1) / 3;
}

long long lu_backsolve_flops(int m) {
  // Forward: sum 2i = m(m-1). Back: sum (2(m-1-i) + 1) = m(m-1) + m.
  const long long mm = m;
  return 2 * mm * (mm - 1) + mm;
}

}  // namespace certiqp
