#include "certiqp/bench.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "certiqp/rng.hpp"
#include "certiqp/solver.hpp"

namespace certiqp {

double Rng::gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = uniform(-1.0, 1.0);
    v = uniform(-1.0, 1.0);
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

namespace {

// columns of a Gaussian matrix, orthonormalized by modified Gram-Schmidt
DenseMatrix random_orthogonal(int n, Rng& rng) {
  DenseMatrix U(n, n);
  for (double& x : U.data()) x = rng.gaussian();
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < j; ++k) {
      double proj = 0.0;
      for (int i = 0; i < n; ++i) proj += U(i, k) * U(i, j);
      for (int i = 0; i < n; ++i) U(i, j) -= proj * U(i, k);
    }
    double norm = 0.0;
    for (int i = 0; i < n; ++i) norm += U(i, j) * U(i, j);
    norm = std::sqrt(norm);
    for (int i = 0; i < n; ++i) U(i, j) /= norm;
  }
  return U;
}

// Q = U diag(d) U', d log-spaced on [1, cond]
DenseMatrix random_spd(int n, double cond, Rng& rng) {
  DenseMatrix U = random_orthogonal(n, rng);
  DenseVector d(n, 1.0);
  for (int i = 0; i < n; ++i)
    d[i] = n > 1 ? std::pow(cond, static_cast<double>(i) / (n - 1)) : 1.0;
  DenseMatrix Q(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += U(i, k) * d[k] * U(j, k);
      Q(i, j) = s;
      Q(j, i) = s;
    }
  return Q;
}

void fill_random_parts(int nz, int nb, double cond, Rng& rng, DenseMatrix& Q,
                       DenseVector& c, DenseMatrix& A, DenseVector& b,
                       bool nonneg_z0) {
  Q = random_spd(nz, cond, rng);
  c.resize(nz);
  for (double& x : c) x = rng.gaussian();
  A = DenseMatrix(nb, nz);
  for (double& x : A.data()) x = rng.gaussian();
  DenseVector z0(nz);
  for (double& x : z0) x = nonneg_z0 ? std::fabs(rng.gaussian()) : rng.gaussian();
  b = matvec(A, z0);
  for (double& x : b) x -= 0.1 + std::fabs(rng.gaussian());
}

}  // namespace

StandardQp gen_random_qp(const RandomQpSpec& spec) {
  Rng rng(spec.seed);
  DenseMatrix Q, A;
  DenseVector c, b;
  fill_random_parts(spec.n_z, spec.n_b, spec.cond, rng, Q, c, A, b, false);
  return make_standard_qp(Q, c, A, b, false);
}

ConvexQp gen_random_convex_qp(const RandomQpSpec& spec) {
  Rng rng(spec.seed ^ 0x5ca1ab1eull);
  DenseMatrix Q, A;
  DenseVector c, b;
  fill_random_parts(spec.n_z, spec.n_b, spec.cond, rng, Q, c, A, b, true);
  return make_convex_qp(Q, c, A, b, false);
}

namespace {

template <typename Qp>
Qp append_contradiction(const Qp& p) {
  const int nz = p.nz(), nb = p.nb();
  if (nb < 2)
    throw TooFewRows("contradiction injection needs at least two rows");
  Qp out = p;
  out.A = DenseMatrix(nb + 2, nz);
  for (int j = 0; j < nb; ++j)
    for (int i = 0; i < nz; ++i) out.A(j, i) = p.A(j, i);
  for (int r = 0; r < 2; ++r)
    for (int i = 0; i < nz; ++i) out.A(nb + r, i) = -p.A(r, i);
  out.b = p.b;
  // -A_r x >= -b_r + 1 contradicts A_r x >= b_r with gap one
  out.b.push_back(-p.b[0] + 1.0);
  out.b.push_back(-p.b[1] + 1.0);
  return out;
}

}  // namespace

StandardQp make_infeasible(const StandardQp& p) {
  return append_contradiction(p);
}
ConvexQp make_infeasible(const ConvexQp& p) { return append_contradiction(p); }

std::vector<DetectionRow> detection_experiment(
    const std::vector<double>& decades, int per_decade, double epsilon,
    int n_z, int n_b, std::uint64_t seed) {
  std::vector<DetectionRow> rows;
  if (per_decade <= 0) return rows;
  rows.reserve(decades.size());
  for (std::size_t di = 0; di < decades.size(); ++di) {
    DetectionRow row;
    row.cond_decade = decades[di];
    row.instances = per_decade;
    for (int t = 0; t < per_decade; ++t) {
      RandomQpSpec spec;
      spec.n_z = n_z;
      spec.n_b = n_b;
      spec.cond = decades[di];
      spec.seed = seed + 1000003ull * di + static_cast<std::uint64_t>(t);
      StandardQp bad = make_infeasible(gen_random_qp(spec));
      SolveResult res = solve(split_free_variables(bad), epsilon);
      if (res.status == SolveStatus::Infeasible) ++row.detected;
    }
    row.rate = static_cast<double>(row.detected) / row.instances;
    rows.push_back(row);
  }
  return rows;
}

void write_detection_csv(std::ostream& os,
                         const std::vector<DetectionRow>& rows) {
  os << "cond_decade,instances,detected,rate\n";
  char buf[64];
  for (const DetectionRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%.0e,%d,%d,%.2f", r.cond_decade,
                  r.instances, r.detected, r.rate);
    os << buf << '\n';
  }
}

}  // namespace certiqp
