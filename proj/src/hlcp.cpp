#include "certiqp/hlcp.hpp"

#include <algorithm>
#include <cmath>

#include "certiqp/flops.hpp"

namespace certiqp {

namespace {

void check_xbar(const LcpData& lcp, const DenseVector& xbar) {
  const int n = lcp.n();
  if (static_cast<int>(xbar.size()) != n + 1)
    throw DimensionMismatch("xbar must have length n+1");
  if (!(xbar[n] > 0.0)) throw NonpositiveTau("tau must be positive");
}

}  // namespace

DenseVector psi(const LcpData& lcp, const DenseVector& xbar) {
  check_xbar(lcp, xbar);
  const int n = lcp.n();
  const double tau = xbar[n];
  DenseVector x(xbar.begin(), xbar.begin() + n);
  DenseVector Mx = matvec(lcp.M, x);
  const double xMx = dot(x, Mx);
  const double xq = dot(x, lcp.q);
  DenseVector out(n + 1);
  for (int i = 0; i < n; ++i) out[i] = Mx[i] + lcp.q[i] * tau;
  out[n] = -xMx / tau - xq;
  return out;
}

DenseMatrix grad_psi(const LcpData& lcp, const DenseVector& xbar) {
  check_xbar(lcp, xbar);
  const int n = lcp.n();
  const double tau = xbar[n];
  DenseVector x(xbar.begin(), xbar.begin() + n);
  DenseVector Mx = matvec(lcp.M, x);
  DenseVector Mtx = matvec_t(lcp.M, x);
  const double xMx = dot(x, Mx);
  DenseMatrix J(n + 1, n + 1);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) J(i, j) = lcp.M(i, j);
    J(i, n) = lcp.q[i];
  }
  // bottom row: -x'(M + M')/tau - q', and xMx/tau^2 in the corner
  for (int j = 0; j < n; ++j) J(n, j) = -(Mx[j] + Mtx[j]) / tau - lcp.q[j];
  J(n, n) = xMx / (tau * tau);
  return J;
}

ScaledLcp compute_sigma_and_scale(const LcpData& in) {
  const int n = in.n();
  DenseVector e(n, 1.0);
  DenseVector t = matvec(in.M, e);
  double sum = 0.0;
  double sigma = 1.0;
  for (int i = 0; i < n; ++i) {
    t[i] += in.q[i];
    sigma = std::max(sigma, t[i]);
    sum += t[i];
  }
  sigma = std::max(sigma, -sum);
  ScaledLcp out{in, sigma};
  const double inv = 1.0 / sigma;
  for (double& m : out.lcp.M.data()) m *= inv;
  for (double& qi : out.lcp.q) qi *= inv;
  return out;
}

namespace {

// caches Qz, A'y, Az, z'c, y'b, z'Qz at the current (z, y)
void compute_caches(HlcpState& s, const DenseMatrix& Q, const DenseVector& c,
                    const DenseMatrix& A, const DenseVector& b) {
  matvec(Q, s.z, s.Qz);
  matvec_t(A, s.y, s.ATy);
  matvec(A, s.z, s.Az);
  s.zc = dot(s.z, c);
  s.yb = dot(s.y, b);
  s.zQz = dot(s.z, s.Qz);
}

// r_z = v - Qz + A'y - c tau, r_y = w - Az + b tau,
// r_tau = kappa + z'Qz/tau + z'c - y'b; then mu_bar = gap/(n+1)
void compute_residuals_and_mu(HlcpState& s, const DenseVector& c,
                              const DenseVector& b) {
  const int nz = s.nz, nb = s.nb;
  s.rz.resize(nz);
  s.ry.resize(nb);
  for (int i = 0; i < nz; ++i)
    s.rz[i] = s.v[i] - s.Qz[i] + s.ATy[i] - c[i] * s.tau;
  for (int j = 0; j < nb; ++j) s.ry[j] = s.w[j] - s.Az[j] + b[j] * s.tau;
  s.rtau = s.kappa + s.zQz / s.tau + s.zc - s.yb;
  CERTIQP_COUNT(4 * nz + 3 * nb + 4);
  s.mu_bar = (dot(s.z, s.v) + dot(s.y, s.w) + s.tau * s.kappa) / (s.n() + 1);
  CERTIQP_COUNT(4);
}

HlcpState unit_state(int nz, int nb) {
  HlcpState s;
  s.nz = nz;
  s.nb = nb;
  s.z.assign(nz, 1.0);
  s.y.assign(nb, 1.0);
  s.v.assign(nz, 1.0);
  s.w.assign(nb, 1.0);
  s.tau = 1.0;
  s.kappa = 1.0;
  return s;
}

}  // namespace

HlcpState init_state(const ScaledLcp& scaled) {
  const int n = scaled.lcp.n();
  const int nz = scaled.lcp.nz, nb = scaled.lcp.nb;
  if (nz + nb != n) throw DimensionMismatch("inconsistent block sizes");
  // extract QP blocks of M = [[Q, -A'], [A, 0]], q = (c, -b)
  DenseMatrix Q(nz, nz), A(nb, nz);
  for (int i = 0; i < nz; ++i)
    for (int j = 0; j < nz; ++j) Q(i, j) = scaled.lcp.M(i, j);
  for (int i = 0; i < nb; ++i)
    for (int j = 0; j < nz; ++j) A(i, j) = scaled.lcp.M(nz + i, j);
  DenseVector c(scaled.lcp.q.begin(), scaled.lcp.q.begin() + nz);
  DenseVector b(nb);
  for (int j = 0; j < nb; ++j) b[j] = -scaled.lcp.q[nz + j];

  HlcpState s = unit_state(nz, nb);
  compute_caches(s, Q, c, A, b);
  compute_residuals_and_mu(s, c, b);
  return s;
}

HlcpState scale_and_init(const ConvexQp& p, ScaledQp& scaled) {
  const int nz = p.nz(), nb = p.nb();
  scaled.Q = p.Q;
  scaled.c = p.c;
  // normalize an empty constraint block to 0 x n_z so transposed products
  // still know the column count
  scaled.A = (nb == 0 && p.A.cols() != nz) ? DenseMatrix(0, nz) : p.A;
  scaled.b = p.b;

  HlcpState s = unit_state(nz, nb);
  compute_caches(s, scaled.Q, scaled.c, scaled.A, scaled.b);

  // sigma = max(1, Qz - A'y + c, Az - b, -z'Qz - z'c + y'b) at the unit point
  double sigma = 1.0;
  for (int i = 0; i < nz; ++i) {
    const double t = s.Qz[i] - s.ATy[i] + scaled.c[i];
    sigma = std::max(sigma, t);
  }
  for (int j = 0; j < nb; ++j) {
    const double t = s.Az[j] - scaled.b[j];
    sigma = std::max(sigma, t);
  }
  {
    const double t = s.yb - s.zc - s.zQz;
    sigma = std::max(sigma, t);
  }
  CERTIQP_COUNT(2 * nz + nb + 2);

  // scale the data copies and the caches by 1/sigma in place
  const double inv = 1.0 / sigma;
  for (double& x : scaled.Q.data()) x *= inv;
  for (double& x : scaled.c) x *= inv;
  for (double& x : scaled.A.data()) x *= inv;
  for (double& x : scaled.b) x *= inv;
  for (double& x : s.Qz) x *= inv;
  for (double& x : s.ATy) x *= inv;
  for (double& x : s.Az) x *= inv;
  s.zc *= inv;
  s.yb *= inv;
  s.zQz *= inv;
  CERTIQP_COUNT(1 + static_cast<long long>(nz) * nz + nz +
                static_cast<long long>(nb) * nz + nb + 2 * nz + nb + 3);
  scaled.sigma = sigma;

  compute_residuals_and_mu(s, scaled.c, scaled.b);
  return s;
}

long long scale_and_init_flops(int nz, int nb) {
  const long long z = nz, m = nb;
  // caches 2z^2+4zm+4z+2m, sigma 2z+m+2, scaling z^2+zm+3z+2m+4,
  // residuals 4z+3m+4, initial mu 2(z+m)+4
  return 3 * z * z + 5 * z * m + 15 * z + 10 * m + 14;
}

double gap(const HlcpState& s) {
  return dot(s.z, s.v) + dot(s.y, s.w) + s.tau * s.kappa;
}

double recompute_mu(const HlcpState& s) { return gap(s) / (s.n() + 1); }

double residual_norm(const HlcpState& s) {
  double acc = dot(s.rz, s.rz) + dot(s.ry, s.ry) + s.rtau * s.rtau;
  return std::sqrt(acc);
}

double neighborhood_norm(const HlcpState& s) {
  const double mu = recompute_mu(s);
  double acc = 0.0;
  for (int i = 0; i < s.nz; ++i) {
    const double d = s.z[i] * s.v[i] - mu;
    acc += d * d;
  }
  for (int j = 0; j < s.nb; ++j) {
    const double d = s.y[j] * s.w[j] - mu;
    acc += d * d;
  }
  const double d = s.tau * s.kappa - mu;
  acc += d * d;
  return std::sqrt(acc);
}

}  // namespace certiqp
