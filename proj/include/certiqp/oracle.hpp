#pragma once

#include "certiqp/linalg.hpp"
#include "certiqp/problem.hpp"

namespace certiqp {

struct TooLarge : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// KKT residuals of a candidate point in original problem units:
//   v = Qz - A'y + c, w = Az - b, need z,y,v,w >= 0 and z'v = y'w = 0.
struct KktReport {
  double stationarity_inf_norm = 0.0;  // ||Qz - A'y + c - v||_inf
  double primal_inf_norm = 0.0;        // ||Az - b - w||_inf and negativity of z, w
  double complementarity_max = 0.0;    // max |z_i v_i|, |y_j w_j|
  double dual_feas_min = 0.0;          // min over entries of v and y
};

// Slacks taken as given (e.g. a solver's claimed v, w).
KktReport kkt_report(const ConvexQp& p, const DenseVector& z,
                     const DenseVector& y, const DenseVector& v,
                     const DenseVector& w);
// Slacks defined from the data: v = Qz - A'y + c, w = Az - b. Equation
// residuals are then zero and the report reflects sign and complementarity
// violations only.
KktReport kkt_report(const ConvexQp& p, const DenseVector& z,
                     const DenseVector& y);

enum class OracleStatus {
  Optimal,     // best KKT-consistent candidate returned
  Infeasible,  // no subset produced a primal-feasible point
  NoKktPoint,  // feasible points exist but no candidate passed dual signs
};

struct OracleSolution {
  OracleStatus status = OracleStatus::Infeasible;
  DenseVector z, y;        // populated at Optimal
  double objective = 0.0;  // populated at Optimal
};

// Ground-truth reference by exhaustive enumeration: for every subset S of the
// n = n_z + n_b constraints {z_i = 0} union {A_j z = b_j}, solve the
// equality-constrained stationarity system, keep candidates that are primal
// feasible with correct dual signs, and return the best objective. A
// nonempty feasible region always exposes a vertex through some subset, so
// "no primal-feasible candidate anywhere" decides infeasibility. Singular
// subset systems are skipped. Exponential in n; capped at n <= 20.
OracleSolution enumerate_active_sets(const ConvexQp& p);

// True iff x >= -tol, Mx >= -tol elementwise, and q'x < 0 with margin
// |q'x| >= 1e-8 * ||q||_2 * ||x||_2 (so x = 0 is rejected). Such an x proves
// the LCP, and hence the QP it encodes, has no feasible point.
bool verify_infeasibility_certificate(const LcpData& lcp, const DenseVector& x,
                                      double tol);

}  // namespace certiqp
