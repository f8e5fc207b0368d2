#include "certiqp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace certiqp {

namespace {

void check_point_dims(const ConvexQp& p, const DenseVector& z,
                      const DenseVector& y) {
  if (static_cast<int>(z.size()) != p.nz() ||
      static_cast<int>(y.size()) != p.nb())
    throw DimensionMismatch("candidate point has wrong dimensions");
}

}  // namespace

KktReport kkt_report(const ConvexQp& p, const DenseVector& z,
                     const DenseVector& y, const DenseVector& v,
                     const DenseVector& w) {
  check_point_dims(p, z, y);
  if (v.size() != z.size() || w.size() != y.size())
    throw DimensionMismatch("slacks have wrong dimensions");
  const int nz = p.nz(), nb = p.nb();
  DenseVector Qz = matvec(p.Q, z);
  DenseVector ATy = nb > 0 ? matvec_t(p.A, y) : DenseVector(nz, 0.0);
  DenseVector Az = nb > 0 ? matvec(p.A, z) : DenseVector();

  KktReport rep;
  rep.dual_feas_min = std::numeric_limits<double>::infinity();
  for (int i = 0; i < nz; ++i) {
    rep.stationarity_inf_norm = std::max(
        rep.stationarity_inf_norm, std::fabs(Qz[i] - ATy[i] + p.c[i] - v[i]));
    rep.primal_inf_norm = std::max(rep.primal_inf_norm, std::max(0.0, -z[i]));
    rep.complementarity_max =
        std::max(rep.complementarity_max, std::fabs(z[i] * v[i]));
    rep.dual_feas_min = std::min(rep.dual_feas_min, v[i]);
  }
  for (int j = 0; j < nb; ++j) {
    rep.primal_inf_norm =
        std::max(rep.primal_inf_norm,
                 std::max(std::fabs(Az[j] - p.b[j] - w[j]),
                          std::max(0.0, -w[j])));
    rep.complementarity_max =
        std::max(rep.complementarity_max, std::fabs(y[j] * w[j]));
    rep.dual_feas_min = std::min(rep.dual_feas_min, y[j]);
  }
  if (!std::isfinite(rep.dual_feas_min)) rep.dual_feas_min = 0.0;  // nb=nz=0
  return rep;
}

KktReport kkt_report(const ConvexQp& p, const DenseVector& z,
                     const DenseVector& y) {
  check_point_dims(p, z, y);
  DenseVector Qz = matvec(p.Q, z);
  DenseVector ATy =
      p.nb() > 0 ? matvec_t(p.A, y) : DenseVector(p.nz(), 0.0);
  DenseVector Az = p.nb() > 0 ? matvec(p.A, z) : DenseVector();
  DenseVector v(p.nz()), w(p.nb());
  for (int i = 0; i < p.nz(); ++i) v[i] = Qz[i] - ATy[i] + p.c[i];
  for (int j = 0; j < p.nb(); ++j) w[j] = Az[j] - p.b[j];
  return kkt_report(p, z, y, v, w);
}

OracleSolution enumerate_active_sets(const ConvexQp& p) {
  const int nz = p.nz(), nb = p.nb(), n = nz + nb;
  if (n > 20) throw TooLarge("active-set enumeration capped at n <= 20");
  // feasibility / sign slacks, relative to the magnitudes involved so that
  // fp noise in the subset solves is absorbed at any data scale
  const double ptol = 1e-8;
  const double dtol = 1e-8;

  OracleSolution best;
  best.status = OracleStatus::Infeasible;
  bool feasible_found = false;
  double best_obj = std::numeric_limits<double>::infinity();

  std::vector<int> active_z, active_y;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    active_z.clear();
    active_y.clear();
    for (int i = 0; i < nz; ++i)
      if (mask & (1u << i)) active_z.push_back(i);
    for (int j = 0; j < nb; ++j)
      if (mask & (1u << (nz + j))) active_y.push_back(j);
    const int na = static_cast<int>(active_y.size());
    const int m = nz + na;

    // unknowns (z, y_S); rows: stationarity on i with z_i free, z_i = 0 on
    // the active set, A_j z = b_j on active rows
    DenseMatrix K(m, m);
    DenseVector rhs(m, 0.0);
    int r = 0;
    for (int i = 0; i < nz; ++i) {
      const bool zi_active =
          std::binary_search(active_z.begin(), active_z.end(), i);
      if (zi_active) {
        K(r, i) = 1.0;
        rhs[r] = 0.0;
      } else {
        for (int j = 0; j < nz; ++j) K(r, j) = p.Q(i, j);
        for (int a = 0; a < na; ++a) K(r, nz + a) = -p.A(active_y[a], i);
        rhs[r] = -p.c[i];
      }
      ++r;
    }
    for (int a = 0; a < na; ++a) {
      for (int j = 0; j < nz; ++j) K(r, j) = p.A(active_y[a], j);
      rhs[r] = p.b[active_y[a]];
      ++r;
    }

    DenseVector sol;
    try {
      sol = lu_solve(K, rhs);
    } catch (const SingularMatrix&) {
      continue;  // degenerate subset, skipped
    }
    if (!all_finite(sol)) continue;

    DenseVector z(sol.begin(), sol.begin() + nz);
    DenseVector y(nb, 0.0);
    for (int a = 0; a < na; ++a) y[active_y[a]] = sol[nz + a];

    // primal feasibility
    bool feas = true;
    for (int i = 0; i < nz && feas; ++i)
      feas = z[i] >= -ptol * std::max(1.0, std::fabs(z[i]));
    DenseVector Az = matvec(p.A, z);
    for (int j = 0; j < nb && feas; ++j)
      feas = Az[j] - p.b[j] >=
             -ptol * std::max({1.0, std::fabs(Az[j]), std::fabs(p.b[j])});
    if (!feas) continue;
    feasible_found = true;

    // dual signs: y_S >= 0 and v_i = (Qz - A'y + c)_i >= 0 on active z
    bool dual_ok = true;
    for (int a = 0; a < na && dual_ok; ++a)
      dual_ok = sol[nz + a] >= -dtol * std::max(1.0, std::fabs(sol[nz + a]));
    if (dual_ok && !active_z.empty()) {
      DenseVector Qz = matvec(p.Q, z);
      DenseVector ATy = nb > 0 ? matvec_t(p.A, y) : DenseVector(nz, 0.0);
      for (int i : active_z) {
        const double vi = Qz[i] - ATy[i] + p.c[i];
        const double mag =
            std::fabs(Qz[i]) + std::fabs(ATy[i]) + std::fabs(p.c[i]);
        if (vi < -dtol * std::max(1.0, mag)) {
          dual_ok = false;
          break;
        }
      }
    }
    if (!dual_ok) continue;

    const double obj = objective_value(p, z);
    if (obj < best_obj) {
      best_obj = obj;
      best.status = OracleStatus::Optimal;
      best.z = z;
      best.y = y;
      best.objective = obj;
    }
  }

  if (best.status != OracleStatus::Optimal)
    best.status =
        feasible_found ? OracleStatus::NoKktPoint : OracleStatus::Infeasible;
  return best;
}

bool verify_infeasibility_certificate(const LcpData& lcp, const DenseVector& x,
                                      double tol) {
  if (static_cast<int>(x.size()) != lcp.n())
    throw DimensionMismatch("certificate has wrong dimension");
  if (!all_finite(x)) return false;
  for (double xi : x)
    if (xi < -tol) return false;
  DenseVector Mx = matvec(lcp.M, x);
  for (double mi : Mx)
    if (mi < -tol) return false;
  const double qx = dot(lcp.q, x);
  const double margin =
      1e-8 * std::sqrt(dot(lcp.q, lcp.q)) * std::sqrt(dot(x, x));
  return qx < 0.0 && qx <= -margin;
}

}  // namespace certiqp
