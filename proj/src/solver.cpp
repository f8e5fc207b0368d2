#include "certiqp/solver.hpp"

#include <cfloat>
#include <cmath>
#include <limits>

#include "certiqp/flops.hpp"

namespace certiqp {

int iteration_count(int n, double epsilon, double beta) {
  if (n < 1) throw std::invalid_argument("dimension n must be >= 1");
  if (!(beta > 0.0) || !(beta < std::sqrt(2.0) - 1.0))
    throw std::invalid_argument("beta must lie in (0, sqrt(2)-1)");
  const long double np1 = static_cast<long double>(n) + 1.0L;
  if (!(epsilon > 0.0) || !(static_cast<long double>(epsilon) < np1))
    throw InvalidEpsilon(
        "epsilon must satisfy 0 < epsilon < n+1 (pick epsilon < 1 in "
        "practice)");
  const long double eta = static_cast<long double>(beta) / sqrtl(np1);
  const long double num = logl(np1 / static_cast<long double>(epsilon));
  const long double den = -log1pl(-eta);  // -log(1 - eta) > 0
  long double ratio = num / den;
  // snap near-integer ratios (e.g. eps = (n+1)*(1-eta) gives ratio = 1 up to
  // double rounding in the caller's eps) so the ceiling does not overshoot
  const long double nearest = roundl(ratio);
  if (fabsl(ratio - nearest) <=
      8.0L * DBL_EPSILON * std::max(1.0L, fabsl(ratio)))
    ratio = nearest;
  long long N = static_cast<long long>(ceill(ratio));
  if (N < 1) N = 1;
  if (N > std::numeric_limits<int>::max())
    throw InvalidEpsilon("epsilon too small: iteration count overflows");
  return static_cast<int>(N);
}

long long per_iteration_flops(int n_z, int n_b) {
  const long long z = n_z, b = n_b;
  const long long m = z + b + 1;  // Newton system size n+1
  const long long lu = lu_factor_flops(static_cast<int>(m)) +
                       lu_backsolve_flops(static_cast<int>(m));
  // assembly z*b+8z+6b+10, x̄ update m, caches 2z^2+4zb+4z+2b,
  // s̄ update 5z+4b+5, residual decay m, mu refresh 2(z+b)+4
  return lu + 2 * z * z + 5 * z * b + 21 * z + 16 * b + 21;
}

Certificate certificate(int n_z, int n_b, double epsilon, double beta) {
  if (n_z < 1 || n_b < 0)
    throw std::invalid_argument("need n_z >= 1 and n_b >= 0");
  Certificate ct;
  ct.n_z = n_z;
  ct.n_b = n_b;
  ct.n = n_z + n_b;
  ct.epsilon = epsilon;
  ct.iterations = iteration_count(ct.n, epsilon, beta);
  ct.flops_per_iteration = per_iteration_flops(n_z, n_b);
  ct.flops_setup = scale_and_init_flops(n_z, n_b);
  ct.total_flops =
      ct.flops_setup +
      static_cast<long long>(ct.iterations) * ct.flops_per_iteration;
  return ct;
}

namespace {

struct NewtonWorkspace {
  DenseMatrix K;
  DenseVector rhs;
  DenseVector d;
  std::vector<int> piv;
};

void assemble_system(const HlcpState& s, const ScaledQp& qp, double gamma,
                     double eta, DenseMatrix& K, DenseVector& rhs) {
  const int nz = s.nz, nb = s.nb, n = nz + nb;
  if (K.rows() != n + 1 || K.cols() != n + 1) K = DenseMatrix(n + 1, n + 1);
  rhs.resize(n + 1);

  // top rows: [Q + diag(v/z), -A', c]
  for (int i = 0; i < nz; ++i) {
    double* Ki = K.row(i);
    const double* Qi = qp.Q.row(i);
    for (int j = 0; j < nz; ++j) Ki[j] = Qi[j];
    Ki[i] += s.v[i] / s.z[i];
    for (int j = 0; j < nb; ++j) Ki[nz + j] = -qp.A(j, i);
    Ki[n] = qp.c[i];
  }
  CERTIQP_COUNT(2 * nz + static_cast<long long>(nz) * nb);

  // middle rows: [A, diag(w/y), -b]
  for (int j = 0; j < nb; ++j) {
    double* Kj = K.row(nz + j);
    const double* Aj = qp.A.row(j);
    for (int i = 0; i < nz; ++i) Kj[i] = Aj[i];
    for (int l = 0; l < nb; ++l) Kj[nz + l] = 0.0;
    Kj[nz + j] = s.w[j] / s.y[j];
    Kj[n] = -qp.b[j];
  }
  CERTIQP_COUNT(2 * nb);

  // bottom row: [-2 z'Q/tau - c', b', z'Qz/tau^2 + kappa/tau]
  {
    double* Kb = K.row(n);
    const double coef = -2.0 / s.tau;
    for (int i = 0; i < nz; ++i) Kb[i] = coef * s.Qz[i] - qp.c[i];
    for (int j = 0; j < nb; ++j) Kb[nz + j] = qp.b[j];
    Kb[n] = s.zQz / (s.tau * s.tau) + s.kappa / s.tau;
    CERTIQP_COUNT(2 * nz + 1 + 4);
  }

  // rhs = gamma*mu/x̄ - s̄ + eta*r̄
  const double g = gamma * s.mu_bar;
  for (int i = 0; i < nz; ++i) rhs[i] = g / s.z[i] - s.v[i] + eta * s.rz[i];
  for (int j = 0; j < nb; ++j)
    rhs[nz + j] = g / s.y[j] - s.w[j] + eta * s.ry[j];
  rhs[n] = g / s.tau - s.kappa + eta * s.rtau;
  CERTIQP_COUNT(1 + 4 * nz + 4 * nb + 4);
}

void check_positive_finite(const HlcpState& s, const char* what) {
  auto bad = [](double x) { return !(x > 0.0) || !std::isfinite(x); };
  bool ok = !bad(s.tau) && !bad(s.kappa);
  for (int i = 0; ok && i < s.nz; ++i) ok = !bad(s.z[i]) && !bad(s.v[i]);
  for (int j = 0; ok && j < s.nb; ++j) ok = !bad(s.y[j]) && !bad(s.w[j]);
  if (!ok)
    throw NumericalBreakdown(std::string("iterate lost positivity during ") +
                             what);
}

void recompute_caches(HlcpState& s, const ScaledQp& qp) {
  matvec(qp.Q, s.z, s.Qz);
  matvec_t(qp.A, s.y, s.ATy);
  matvec(qp.A, s.z, s.Az);
  s.zc = dot(s.z, qp.c);
  s.yb = dot(s.y, qp.b);
  s.zQz = dot(s.z, s.Qz);
}

void step_in_place(HlcpState& s, const ScaledQp& qp, double gamma, double eta,
                   NewtonWorkspace& ws) {
  const int nz = s.nz, nb = s.nb, n = nz + nb;

  assemble_system(s, qp, gamma, eta, ws.K, ws.rhs);
  lu_factor(ws.K, ws.piv);
  lu_backsolve(ws.K, ws.piv, ws.rhs, ws.d);

  // x̄ += d
  for (int i = 0; i < nz; ++i) s.z[i] += ws.d[i];
  for (int j = 0; j < nb; ++j) s.y[j] += ws.d[nz + j];
  s.tau += ws.d[n];
  CERTIQP_COUNT(n + 1);
  check_positive_finite(s, "the x update");

  recompute_caches(s, qp);

  // s̄ = psi(x̄) + gamma*r̄
  for (int i = 0; i < nz; ++i)
    s.v[i] = s.Qz[i] - s.ATy[i] + qp.c[i] * s.tau + gamma * s.rz[i];
  for (int j = 0; j < nb; ++j)
    s.w[j] = s.Az[j] - qp.b[j] * s.tau + gamma * s.ry[j];
  s.kappa = gamma * s.rtau + s.yb - s.zc - s.zQz / s.tau;
  CERTIQP_COUNT(5 * nz + 4 * nb + 5);
  check_positive_finite(s, "the s update");

  // r̄ *= gamma
  for (int i = 0; i < nz; ++i) s.rz[i] *= gamma;
  for (int j = 0; j < nb; ++j) s.ry[j] *= gamma;
  s.rtau *= gamma;
  CERTIQP_COUNT(n + 1);

  s.mu_bar = (dot(s.z, s.v) + dot(s.y, s.w) + s.tau * s.kappa) / (n + 1);
  CERTIQP_COUNT(4);
}

}  // namespace

void assemble_newton(const HlcpState& state, const ScaledQp& qp,
                     const SolverConfig& cfg, DenseMatrix& K,
                     DenseVector& rhs) {
  const double eta = cfg.beta / std::sqrt(static_cast<double>(state.n() + 1));
  assemble_system(state, qp, 1.0 - eta, eta, K, rhs);
}

HlcpState step(const HlcpState& state, const ScaledQp& qp,
               const SolverConfig& cfg) {
  const double eta = cfg.beta / std::sqrt(static_cast<double>(state.n() + 1));
  HlcpState out = state;
  NewtonWorkspace ws;
  step_in_place(out, qp, 1.0 - eta, eta, ws);
  return out;
}

SolveResult solve(const ConvexQp& p, const SolverConfig& cfg,
                  const SolveOptions& opts) {
  const int nz = p.nz(), nb = p.nb(), n = nz + nb;
  const int N = iteration_count(n, cfg.epsilon, cfg.beta);
  const double eta = cfg.beta / std::sqrt(static_cast<double>(n + 1));
  const double gamma = 1.0 - eta;

  ScaledQp scaled;
  HlcpState s = scale_and_init(p, scaled);

  SolveResult res;
  res.certificate = certificate(nz, nb, cfg.epsilon, cfg.beta);
  res.sigma = scaled.sigma;
  if (opts.trace) {
    res.trace.reserve(N + 1);
    res.trace.push_back({0, s.mu_bar, residual_norm(s), s.tau, s.kappa});
  }
  if (opts.observer) opts.observer(0, s);

  NewtonWorkspace ws;
  for (int k = 1; k <= N; ++k) {
    step_in_place(s, scaled, gamma, eta, ws);
    if (opts.trace)
      res.trace.push_back({k, s.mu_bar, residual_norm(s), s.tau, s.kappa});
    if (opts.observer) opts.observer(k, s);
  }

  res.iterations_run = N;
  res.tau = s.tau;
  res.kappa = s.kappa;
  res.final_gap = gap(s);
  res.final_residual_norm = residual_norm(s);

  if (s.tau < s.kappa) {
    res.status = SolveStatus::Infeasible;
    res.infeasibility_certificate.resize(n);
    for (int i = 0; i < nz; ++i)
      res.infeasibility_certificate[i] = s.z[i] / s.kappa;
    for (int j = 0; j < nb; ++j)
      res.infeasibility_certificate[nz + j] = s.y[j] / s.kappa;
    return res;
  }

  res.status = SolveStatus::Optimal;
  res.z.resize(nz);
  res.y.resize(nb);
  res.v.resize(nz);
  res.w.resize(nb);
  for (int i = 0; i < nz; ++i) {
    res.z[i] = s.z[i] / s.tau;
    res.v[i] = s.v[i] / s.tau;
  }
  for (int j = 0; j < nb; ++j) {
    res.y[j] = s.y[j] / s.tau;
    res.w[j] = s.w[j] / s.tau;
  }

  // KKT residuals against the original (unscaled) data; original-frame slacks
  // are sigma*v and sigma*w
  DenseVector Qz = matvec(p.Q, res.z);
  DenseVector ATy = nb > 0 ? matvec_t(p.A, res.y) : DenseVector(nz, 0.0);
  DenseVector Az = nb > 0 ? matvec(p.A, res.z) : DenseVector();
  double stat = 0.0, prim = 0.0, comp = 0.0;
  for (int i = 0; i < nz; ++i) {
    stat = std::max(stat, std::fabs(Qz[i] - ATy[i] + p.c[i] -
                                    res.sigma * res.v[i]));
    comp = std::max(comp, std::fabs(res.z[i] * res.sigma * res.v[i]));
  }
  for (int j = 0; j < nb; ++j) {
    prim = std::max(prim, std::fabs(Az[j] - p.b[j] - res.sigma * res.w[j]));
    comp = std::max(comp, std::fabs(res.y[j] * res.sigma * res.w[j]));
  }
  res.stationarity_inf_original = stat;
  res.primal_inf_original = prim;
  res.complementarity_max_original = comp;
  return res;
}

SolveResult solve(const ConvexQp& p, double epsilon) {
  SolverConfig cfg;
  cfg.epsilon = epsilon;
  return solve(p, cfg);
}

}  // namespace certiqp
