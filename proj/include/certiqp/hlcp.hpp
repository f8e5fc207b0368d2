#pragma once

#include "certiqp/linalg.hpp"
#include "certiqp/problem.hpp"

namespace certiqp {

struct NonpositiveTau : std::domain_error {
  using std::domain_error::domain_error;
};

// psi(xbar) for the homogeneous embedding, xbar = (x, tau) of length n+1:
//   psi = (M x + q tau, -x'Mx/tau - x'q).
// x̄' psi(x̄) = 0 identically and psi is positively homogeneous of degree 1.
DenseVector psi(const LcpData& lcp, const DenseVector& xbar);

// Jacobian of psi:
//   [[M, q], [-x'(M + M')/tau - q', x'Mx/tau^2]].
// Its quadratic form is positive semidefinite for x,tau > 0.
DenseMatrix grad_psi(const LcpData& lcp, const DenseVector& xbar);

// (M, q) divided by sigma = max(1, entries of Me+q, -e'Me - e'q). After this
// the unit initial point has residual r0 = (e - Me - q, 1 + e'Me + e'q) >= 0
// elementwise with ||r0||_2 <= e'r0 = n+1, and initial gap exactly n+1.
struct ScaledLcp {
  LcpData lcp;
  double sigma = 1.0;
};
ScaledLcp compute_sigma_and_scale(const LcpData& in);

// QP-block view of a scaled problem; the iteration loop works on these blocks
// directly rather than on the assembled M.
struct ScaledQp {
  DenseMatrix Q;
  DenseVector c;
  DenseMatrix A;
  DenseVector b;
  double sigma = 1.0;

  int nz() const { return static_cast<int>(c.size()); }
  int nb() const { return static_cast<int>(b.size()); }
};

// Strictly positive iterate (z, y, tau; v, w, kappa) with the cached products
// and residual bookkeeping the iteration needs. mu_bar always corresponds to
// the stored vectors.
struct HlcpState {
  DenseVector z, y;
  double tau = 1.0;
  DenseVector v, w;
  double kappa = 1.0;

  DenseVector Qz, ATy, Az;  // Q z, A'y, A z
  double zc = 0.0, yb = 0.0, zQz = 0.0;

  DenseVector rz, ry;
  double rtau = 0.0;

  double mu_bar = 1.0;

  int nz = 0, nb = 0;
  int n() const { return nz + nb; }
};

// Unit initialization on already-scaled data: z=y=v=w=e, tau=kappa=1, caches
// and residuals populated, mu_bar = 1 and gap = n+1 exactly.
HlcpState init_state(const ScaledLcp& scaled);

// Fused setup used by the solver: unit start, caches at units, sigma from the
// cached products, in-place scaling of the data copies and caches, then the
// initial residuals and mu_bar. Arithmetic cost is scale_and_init_flops.
HlcpState scale_and_init(const ConvexQp& p, ScaledQp& scaled);
long long scale_and_init_flops(int nz, int nb);

// Diagnostics (recomputation; not part of the certified loop arithmetic).
double gap(const HlcpState& s);                // z'v + y'w + tau*kappa
double recompute_mu(const HlcpState& s);       // gap/(n+1)
double residual_norm(const HlcpState& s);      // ||(r_z, r_y, r_tau)||_2
double neighborhood_norm(const HlcpState& s);  // ||x̄∘s̄ - mu e||_2 at recomputed mu

}  // namespace certiqp
