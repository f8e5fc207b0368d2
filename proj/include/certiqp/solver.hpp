#pragma once

#include <functional>
#include <vector>

#include "certiqp/hlcp.hpp"
#include "certiqp/problem.hpp"

namespace certiqp {

struct InvalidEpsilon : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Raised when an iterate loses strict positivity or finiteness. The theory
// rules this out; it can only surface through floating point, e.g. extremely
// small epsilon combined with ill conditioned data.
struct NumericalBreakdown : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolverConfig {
  double epsilon = 1e-6;   // target level for gap and residual, 0 < eps < n+1
  double beta = 0.414213;  // neighborhood radius; eta = beta/sqrt(n+1), gamma = 1 - eta
};

// N(n, eps) = ceil( log((n+1)/eps) / -log(1 - beta/sqrt(n+1)) ), at least 1.
// Depends only on (n, eps, beta), never on problem data. Evaluated in extended
// precision; ratios within 8 ulps of an integer round to it before the ceiling
// so that eps = (n+1)*(1-eta) gives exactly N = 1.
int iteration_count(int n, double epsilon, double beta = 0.414213);

// Arithmetic cost of one iteration: assembly + LU solve + updates on the
// (n+1)-dimensional Newton system, closed form in (n_z, n_b).
long long per_iteration_flops(int n_z, int n_b);

// Pre-computable execution certificate: exact iteration and flop counts for
// dimensions (n_z, n_b) at level epsilon. total_flops = flops_setup +
// iterations * flops_per_iteration; recovery/reporting after the loop is not
// part of the certified arithmetic.
struct Certificate {
  int n_z = 0;
  int n_b = 0;
  int n = 0;
  double epsilon = 0.0;
  int iterations = 0;
  long long flops_per_iteration = 0;
  long long flops_setup = 0;
  long long total_flops = 0;
};
Certificate certificate(int n_z, int n_b, double epsilon,
                        double beta = 0.414213);

enum class SolveStatus { Optimal, Infeasible };

struct IterateRecord {
  int k = 0;
  double mu_bar = 0.0;
  double residual_norm = 0.0;
  double tau = 0.0;
  double kappa = 0.0;
};

struct SolveResult {
  SolveStatus status = SolveStatus::Optimal;

  // Populated at Optimal: homogeneous iterate divided by tau. These solve the
  // sigma-scaled problem; since scaling divides objective and constraints
  // uniformly, z and y are also primal/dual for the original data, while the
  // original-frame slacks are sigma*v and sigma*w.
  DenseVector z, y, v, w;

  // Populated at Infeasible: x = (z, y)/kappa with x >= 0, Mx >= 0, q'x < 0
  // for the scaled LCP data (up to tolerance 10*epsilon).
  DenseVector infeasibility_certificate;

  double tau = 0.0;
  double kappa = 0.0;
  double sigma = 1.0;

  double final_gap = 0.0;            // x̄'s̄ at termination (scaled frame)
  double final_residual_norm = 0.0;  // ||r̄|| at termination (scaled frame)

  // KKT residuals of (z, y, sigma*v, sigma*w) against the original data
  // (Optimal only; zero otherwise).
  double stationarity_inf_original = 0.0;   // ||Qz - A'y + c - sigma*v||_inf
  double primal_inf_original = 0.0;         // ||Az - b - sigma*w||_inf
  double complementarity_max_original = 0.0;

  int iterations_run = 0;
  Certificate certificate;

  std::vector<IterateRecord> trace;  // filled only when requested
};

struct SolveOptions {
  bool trace = false;
  // Called with k = 0 after initialization and after each iteration k >= 1.
  std::function<void(int, const HlcpState&)> observer;
};

// Newton system of one iteration:
//   K = [[Q + diag(v/z), -A', c], [A, diag(w/y), -b],
//        [-2 z'Q/tau - c', b', z'Qz/tau^2 + kappa/tau]]
//   rhs = (gamma*mu/z - v + eta*r_z, gamma*mu/y - w + eta*r_y,
//          gamma*mu/tau - kappa + eta*r_tau)
// K equals grad_psi(x̄) + diag(s̄/x̄) and is positive definite on the cone.
void assemble_newton(const HlcpState& state, const ScaledQp& qp,
                     const SolverConfig& cfg, DenseMatrix& K, DenseVector& rhs);

// One full Newton step: x̄ += d from lu_solve(K, rhs), caches refreshed,
// s̄ = psi(x̄) + gamma*r̄ componentwise, r̄ *= gamma, mu_bar refreshed.
// Gap and residual each shrink by exactly gamma.
HlcpState step(const HlcpState& state, const ScaledQp& qp,
               const SolverConfig& cfg);

// Runs exactly iteration_count(n, eps) iterations, no early exit, then tests
// tau < kappa for infeasibility and recovers the solution otherwise.
SolveResult solve(const ConvexQp& p, const SolverConfig& cfg,
                  const SolveOptions& opts = {});
SolveResult solve(const ConvexQp& p, double epsilon);

}  // namespace certiqp
