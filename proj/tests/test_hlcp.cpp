#include <cmath>

#include "certiqp/bench.hpp"
#include "certiqp/hlcp.hpp"
#include "certiqp/problem.hpp"
#include "certiqp/rng.hpp"
#include "doctest.h"

using namespace certiqp;

namespace {

LcpData hand_lcp() {
  LcpData lcp;
  lcp.nz = 1;
  lcp.nb = 1;
  lcp.M = DenseMatrix(2, 2);
  lcp.M(0, 0) = 2.0;
  lcp.M(0, 1) = -1.0;
  lcp.M(1, 0) = 1.0;
  lcp.M(1, 1) = 0.0;
  lcp.q = DenseVector{3.0, -1.0};
  return lcp;
}

}  // namespace

TEST_CASE("psi on a hand example") {
  LcpData lcp = hand_lcp();
  DenseVector xbar{1.0, 1.0, 1.0};
  DenseVector p = psi(lcp, xbar);
  REQUIRE(p.size() == 3);
  // Mx + q*tau = (2-1+3, 1+0-1) = (4, 0); last = -x'Mx/tau - x'q = -2 - 2 = -4
  CHECK(p[0] == doctest::Approx(4.0));
  CHECK(p[1] == doctest::Approx(0.0));
  CHECK(p[2] == doctest::Approx(-4.0));

  DenseVector bad{1.0, 1.0, 0.0};
  CHECK_THROWS_AS(psi(lcp, bad), NonpositiveTau);
  DenseVector wrong{1.0, 1.0};
  CHECK_THROWS_AS(psi(lcp, wrong), DimensionMismatch);
}

TEST_CASE("psi is orthogonal to its argument") {
  Rng rng(11);
  for (int t = 0; t < 50; ++t) {
    RandomQpSpec spec;
    spec.n_z = 3;
    spec.n_b = 2;
    spec.seed = 100 + t;
    ConvexQp p = gen_random_convex_qp(spec);
    LcpData lcp = assemble_lcp(p);
    DenseVector xbar(lcp.n() + 1);
    for (double& v : xbar) v = 0.05 + rng.uniform01() * 3.0;
    DenseVector val = psi(lcp, xbar);
    double ip = dot(xbar, val);
    double scale = 0.0;
    for (std::size_t i = 0; i < xbar.size(); ++i)
      scale += std::fabs(xbar[i] * val[i]);
    CHECK(std::fabs(ip) <= 1e-12 * std::max(1.0, scale));
  }
}

TEST_CASE("grad_psi matches finite differences") {
  Rng rng(17);
  for (int t = 0; t < 20; ++t) {
    RandomQpSpec spec;
    spec.n_z = 2;
    spec.n_b = 3;
    spec.seed = 300 + t;
    ConvexQp p = gen_random_convex_qp(spec);
    LcpData lcp = assemble_lcp(p);
    const int m = lcp.n() + 1;
    DenseVector xbar(m);
    for (double& v : xbar) v = 0.3 + rng.uniform01();
    DenseMatrix J = grad_psi(lcp, xbar);
    const double h = 1e-6;
    for (int j = 0; j < m; ++j) {
      DenseVector xp = xbar, xm = xbar;
      xp[j] += h;
      xm[j] -= h;
      DenseVector fp = psi(lcp, xp), fm = psi(lcp, xm);
      for (int i = 0; i < m; ++i) {
        double fd = (fp[i] - fm[i]) / (2.0 * h);
        CHECK(J(i, j) == doctest::Approx(fd).epsilon(1e-5));
      }
    }
  }
}

TEST_CASE("sigma scaling bounds the initial residual") {
  RandomQpSpec spec;
  spec.n_z = 4;
  spec.n_b = 3;
  for (int t = 0; t < 30; ++t) {
    spec.seed = 40 + t;
    ConvexQp p = gen_random_convex_qp(spec);
    LcpData lcp = assemble_lcp(p);
    ScaledLcp sc = compute_sigma_and_scale(lcp);
    CHECK(sc.sigma >= 1.0);
    // scaling divides M and q by sigma
    CHECK(sc.lcp.M(0, 0) == doctest::Approx(lcp.M(0, 0) / sc.sigma));
    CHECK(sc.lcp.q[0] == doctest::Approx(lcp.q[0] / sc.sigma));

    HlcpState s = init_state(sc);
    const int n = lcp.n();
    // unit start
    CHECK(s.tau == 1.0);
    CHECK(s.kappa == 1.0);
    for (double zi : s.z) CHECK(zi == 1.0);
    for (double vi : s.v) CHECK(vi == 1.0);

    // r0 = e - psi(e,1): componentwise nonnegative and ||r0||_2 <= n+1
    DenseVector r(n + 1);
    for (int i = 0; i < s.nz; ++i) r[i] = s.rz[i];
    for (int j = 0; j < s.nb; ++j) r[s.nz + j] = s.ry[j];
    r[n] = s.rtau;
    double norm2 = std::sqrt(dot(r, r));
    for (double ri : r) CHECK(ri >= -1e-12);
    CHECK(norm2 <= (n + 1) * (1.0 + 1e-12));

    // duality gap at the start is exactly n+1 and mu_bar is 1
    CHECK(gap(s) == doctest::Approx(n + 1).epsilon(1e-14));
    CHECK(s.mu_bar == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("scale_and_init agrees with the assembled-matrix path") {
  RandomQpSpec spec;
  spec.n_z = 3;
  spec.n_b = 4;
  for (int t = 0; t < 15; ++t) {
    spec.seed = 900 + t;
    ConvexQp p = gen_random_convex_qp(spec);

    LcpData lcp = assemble_lcp(p);
    ScaledLcp sc = compute_sigma_and_scale(lcp);
    HlcpState ref = init_state(sc);

    ScaledQp scaled;
    HlcpState s = scale_and_init(p, scaled);
    CHECK(scaled.sigma == doctest::Approx(sc.sigma).epsilon(1e-15));
    REQUIRE(s.nz == ref.nz);
    REQUIRE(s.nb == ref.nb);
    for (int i = 0; i < s.nz; ++i) {
      CHECK(s.rz[i] == doctest::Approx(ref.rz[i]).epsilon(1e-12));
      CHECK(s.Qz[i] == doctest::Approx(ref.Qz[i]).epsilon(1e-12));
    }
    for (int j = 0; j < s.nb; ++j)
      CHECK(s.ry[j] == doctest::Approx(ref.ry[j]).epsilon(1e-12));
    CHECK(s.rtau == doctest::Approx(ref.rtau).epsilon(1e-12));
    CHECK(s.mu_bar == doctest::Approx(ref.mu_bar).epsilon(1e-12));
  }
}

TEST_CASE("residual and neighborhood helpers") {
  RandomQpSpec spec;
  spec.n_z = 2;
  spec.n_b = 2;
  spec.seed = 5;
  ConvexQp p = gen_random_convex_qp(spec);
  ScaledQp scaled;
  HlcpState s = scale_and_init(p, scaled);
  DenseVector r(s.n() + 1);
  for (int i = 0; i < s.nz; ++i) r[i] = s.rz[i];
  for (int j = 0; j < s.nb; ++j) r[s.nz + j] = s.ry[j];
  r[s.n()] = s.rtau;
  CHECK(residual_norm(s) == doctest::Approx(std::sqrt(dot(r, r))));

  // at the unit start every product x_i s_i equals mu_bar, so the
  // neighborhood distance is zero
  CHECK(neighborhood_norm(s) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(recompute_mu(s) == doctest::Approx(1.0));
}
