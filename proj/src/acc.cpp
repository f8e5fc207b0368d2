#include "certiqp/acc.hpp"

#include <cmath>

namespace certiqp {

double rolling_resistance(const AccParams& prm, double v) {
  const double sgn = v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
  return prm.f0 * sgn + prm.f1 * v + prm.f2 * v * v;
}

AccQp assemble_acc_qp(const AccState& x, const AccParams& prm) {
  const double M = prm.mass;
  const double Fr = rolling_resistance(prm, x.v);
  const double dv = x.v - prm.v_d;
  const double u_lo = -prm.c_d * M * prm.grav;
  const double u_hi = prm.c_a * M * prm.grav;

  // (u - F_r)^2/M^2 + p delta^2 = 1/2 u' H u + F' u + const
  DenseMatrix H(2, 2);
  H(0, 0) = 2.0 / (M * M);
  H(1, 1) = 2.0 * prm.p_acc;
  DenseVector F{-2.0 * Fr / (M * M), 0.0};

  // never-binding relaxation cap: eps (v-v_d)^2 plus the largest CLF
  // left-hand side any admissible u can produce, plus one
  const double delta_ub =
      prm.eps_clf * dv * dv +
      (2.0 * std::fabs(dv) / M) *
          std::max(std::fabs(u_lo - Fr), std::fabs(u_hi - Fr)) +
      1.0;

  DenseVector lb{u_lo, 0.0}, ub{u_hi, delta_ub};

  // rows in A_le x <= b_le form:
  //  safety:  u/M <= F_r/M + 2(v_p - v) + (z - delta)
  //  tracking: (2(v-v_d)/M) u - delta_acc <= 2(v-v_d)F_r/M - eps (v-v_d)^2
  DenseMatrix A_le(2, 2);
  DenseVector b_le(2);
  A_le(0, 0) = 1.0 / M;
  A_le(0, 1) = 0.0;
  b_le[0] = Fr / M + 2.0 * (prm.v_p - x.v) + (x.z - prm.delta);
  A_le(1, 0) = 2.0 * dv / M;
  A_le(1, 1) = -1.0;
  b_le[1] = 2.0 * dv * Fr / M - prm.eps_clf * dv * dv;

  BoxReduction red = from_box_inequality(H, F, lb, ub, A_le, b_le);
  AccQp out;
  out.qp = std::move(red.qp);
  out.shift = std::move(red.shift);
  out.delta_ub = delta_ub;
  return out;
}

namespace {

struct Deriv {
  double dz, dv;
};

Deriv dynamics(const AccParams& prm, double /*z*/, double v, double u) {
  return {prm.v_p - v, (u - rolling_resistance(prm, v)) / prm.mass};
}

}  // namespace

AccReport simulate_acc(const AccParams& prm, double T_final, double dt,
                       double epsilon) {
  if (!(dt > 0.0) || !(T_final > 0.0))
    throw InvalidProblem("acc: need dt > 0 and T_final > 0");
  const int K = static_cast<int>(std::lround(T_final / dt));

  AccReport rep;
  rep.min_b = prm.z0 - prm.delta;
  AccState x{prm.z0, prm.v0};
  int iters0 = -1;
  bool iters_constant = true;
  const double u_lo = -prm.c_d * prm.mass * prm.grav;
  const double u_hi = prm.c_a * prm.mass * prm.grav;

  for (int k = 0; k < K; ++k) {
    const double t = k * dt;
    AccQp aq = assemble_acc_qp(x, prm);
    // row scaling makes the infeasibility verdict scale-free: a marginally
    // violated row is normalized by its own |b|, so the pinch against the
    // braking bound is unit-sized for the solver instead of ~1e-3 against
    // data of magnitude ~1e4
    SolveResult res = solve(equilibrate(aq.qp).qp, epsilon);

    AccStep step;
    step.t = t;
    step.z = x.z;
    step.v = x.v;
    step.b = x.z - prm.delta;
    step.status = res.status;
    step.iters = res.iterations_run;
    if (iters0 < 0)
      iters0 = res.iterations_run;
    else if (res.iterations_run != iters0)
      iters_constant = false;
    rep.min_b = std::min(rep.min_b, step.b);

    if (res.status == SolveStatus::Infeasible) {
      rep.any_infeasible = true;
      rep.steps.push_back(step);
      break;
    }

    const double u = res.z[0] + aq.shift[0];
    step.u = u;
    step.delta_acc = res.z[1] + aq.shift[1];
    rep.steps.push_back(step);
    rep.max_abs_u = std::max(rep.max_abs_u, std::fabs(u));
    rep.max_u_bound_violation =
        std::max({rep.max_u_bound_violation, u - u_hi, u_lo - u});

    // RK4 with u held over [t, t+dt]
    const Deriv k1 = dynamics(prm, x.z, x.v, u);
    const Deriv k2 =
        dynamics(prm, x.z + 0.5 * dt * k1.dz, x.v + 0.5 * dt * k1.dv, u);
    const Deriv k3 =
        dynamics(prm, x.z + 0.5 * dt * k2.dz, x.v + 0.5 * dt * k2.dv, u);
    const Deriv k4 = dynamics(prm, x.z + dt * k3.dz, x.v + dt * k3.dv, u);
    x.z += dt / 6.0 * (k1.dz + 2.0 * k2.dz + 2.0 * k3.dz + k4.dz);
    x.v += dt / 6.0 * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv);
    rep.min_b = std::min(rep.min_b, x.z - prm.delta);
  }

  rep.final_b = x.z - prm.delta;
  rep.iters_per_step = iters_constant && iters0 > 0 ? iters0 : 0;
  return rep;
}

}  // namespace certiqp
