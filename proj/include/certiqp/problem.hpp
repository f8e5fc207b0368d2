#pragma once

#include <iosfwd>
#include <string>

#include "certiqp/linalg.hpp"

namespace certiqp {

struct InvalidProblem : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct BoundsInverted : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// min 1/2 z'Qz + c'z  s.t.  Az >= b, z >= 0.
// Q is n_z x n_z symmetric PSD, A is n_b x n_z (n_b may be 0).
struct ConvexQp {
  DenseMatrix Q;
  DenseVector c;
  DenseMatrix A;
  DenseVector b;

  int nz() const { return static_cast<int>(c.size()); }
  int nb() const { return static_cast<int>(b.size()); }
};

// Same data, but z is free (no sign constraint).
struct StandardQp {
  DenseMatrix Q;
  DenseVector c;
  DenseMatrix A;
  DenseVector b;

  int nz() const { return static_cast<int>(c.size()); }
  int nb() const { return static_cast<int>(b.size()); }
};

// Checked construction: conforming dimensions, finite entries, symmetry of Q
// within 1e-12 * max(1, ||Q||_inf) followed by averaging Q <- (Q + Q')/2.
// check_psd additionally requires min eig of Q >= -1e-10 * ||Q||_inf
// (verified via a shifted Cholesky attempt); disable for large instances.
ConvexQp make_convex_qp(DenseMatrix Q, DenseVector c, DenseMatrix A,
                        DenseVector b, bool check_psd = true);
StandardQp make_standard_qp(DenseMatrix Q, DenseVector c, DenseMatrix A,
                            DenseVector b, bool check_psd = true);

// True when the symmetric matrix S has min eigenvalue >= -tol, tested by a
// Cholesky attempt on S + tol*I.
bool psd_within(const DenseMatrix& S, double tol);

// Free z = z+ - z- with z+, z- >= 0:
// Qs = [[Q,-Q],[-Q,Q]], cs = (c,-c), As = [A,-A], same b.
ConvexQp split_free_variables(const StandardQp& p);

// Maps a solved split vector (z+, z-) back to the free variable. The common
// positive part min(z+, z-) is subtracted from both halves first; at an exact
// optimum it is zero, at an eps-approximate one it is O(sqrt(eps)).
struct SplitRecovery {
  DenseVector z;        // z+ - z-
  DenseVector z_plus;   // z+ - min(z+, z-)
  DenseVector z_minus;  // z- - min(z+, z-)
};
SplitRecovery recover_split(const DenseVector& z_split, int nz_orig);

// min 1/2 z'Qz + c'z  s.t.  lb <= z <= ub, A_le z <= b_le  rewritten over
// z' = z - lb >= 0:
//   c' = c + Q lb,  A = [-I; -A_le],  b = [lb - ub; A_le lb - b_le].
// Recover the original variable as z = qp-solution + shift.
struct BoxReduction {
  ConvexQp qp;
  DenseVector shift;        // = lb
  double objective_offset;  // 1/2 lb'Q lb + c'lb, constant dropped from qp
};
BoxReduction from_box_inequality(const DenseMatrix& Q, const DenseVector& c,
                                 const DenseVector& lb, const DenseVector& ub,
                                 const DenseMatrix& A_le,
                                 const DenseVector& b_le);
BoxReduction from_box_inequality(const DenseMatrix& Q, const DenseVector& c,
                                 const DenseVector& lb, const DenseVector& ub);

// Diagonal rescaling toward unit data magnitude: every row of (A, b) is
// divided by its own largest entry and (Q, c) jointly by theirs. The feasible
// set and the argmin are unchanged; objective values are multiplied by
// objective_scale. Improves the accuracy of a fixed-epsilon solve on badly
// scaled data.
struct Equilibration {
  ConvexQp qp;
  double objective_scale;  // scaled objective = objective_scale * original
};
Equilibration equilibrate(const ConvexQp& p);

// Monotone LCP data for the KKT system: w = M x + q, x,w >= 0, x'w = 0 with
// M = [[Q, -A'],[A, 0]], q = (c, -b), n = n_z + n_b. M is not symmetric;
// M + M' is PSD.
struct LcpData {
  DenseMatrix M;
  DenseVector q;
  int nz = 0;
  int nb = 0;

  int n() const { return nz + nb; }
};
LcpData assemble_lcp(const ConvexQp& p);

// 1/2 z'Qz + c'z.
double objective_value(const ConvexQp& p, const DenseVector& z);

// --- problem file format ------------------------------------------------
//
// Line-oriented text, '#' starts a comment, numbers are whitespace separated
// and may wrap lines. Header keys n_z and n_b come first, then sections:
//   canonical mode: Q, c, A, b        (A/b omitted when n_b = 0)
//   box mode:       Q, c, lb, ub, and optionally A_le, b_le (n_b rows)
// Exact grammar in README.md.

struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, int line);
  int line;
};

struct ProblemInput {
  ConvexQp qp;
  DenseVector shift;        // zeros in canonical mode, lb in box mode
  double objective_offset;  // 0 in canonical mode
  bool box_mode;
};

ProblemInput read_problem(std::istream& in);
ProblemInput read_problem_file(const std::string& path);

}  // namespace certiqp
