#pragma once

#include <vector>

#include "certiqp/problem.hpp"
#include "certiqp/solver.hpp"

namespace certiqp {

// Adaptive cruise control scenario constants (SI units).
struct AccParams {
  double delta = 10.0;    // minimum safe gap, m
  double v_d = 24.0;      // desired speed, m/s
  double mass = 1650.0;   // vehicle mass, kg
  double grav = 9.81;     // gravity, m/s^2
  double f0 = 0.1;        // friction: f0 sgn(v) + f1 v + f2 v^2
  double f1 = 5.0;
  double f2 = 0.25;
  double eps_clf = 10.0;  // CLF convergence rate
  double c_a = 0.4;       // max acceleration, fraction of g
  double c_d = 0.4;       // max deceleration, fraction of g
  double p_acc = 1.0;     // relaxation penalty
  double v_p = 13.89;     // preceding vehicle speed, m/s
  double z0 = 100.0;      // initial gap, m
  double v0 = 20.0;       // initial ego speed, m/s
};

struct AccState {
  double z = 0.0;  // gap to the preceding vehicle
  double v = 0.0;  // ego speed
};

// F_r(v) = f0 sgn(v) + f1 v + f2 v^2, with sgn(0) = 0.
double rolling_resistance(const AccParams& prm, double v);

// Pointwise QP in (u, delta_acc):
//   min (u - F_r)^2/M^2 + p_acc delta_acc^2
//   s.t. (F_r - u)/M + 2(v_p - v) + (z - delta) >= 0           (safety)
//        2(v - v_d)(u - F_r)/M + eps_clf (v - v_d)^2 <= delta_acc  (tracking)
//        -c_d M g <= u <= c_a M g
// assembled in nonnegative form through the box front end; delta_acc is
// boxed into [0, delta_ub] with delta_ub large enough to never bind.
struct AccQp {
  ConvexQp qp;
  DenseVector shift;  // (u, delta_acc) = decision + shift
  double delta_ub = 0.0;
};
AccQp assemble_acc_qp(const AccState& x, const AccParams& prm);

struct AccStep {
  double t = 0.0;
  double z = 0.0, v = 0.0;     // state at the step start
  double u = 0.0;              // applied wheel force
  double delta_acc = 0.0;      // CLF relaxation chosen by the QP
  double b = 0.0;              // barrier value z - delta
  SolveStatus status = SolveStatus::Optimal;
  int iters = 0;
};

struct AccReport {
  std::vector<AccStep> steps;
  double min_b = 0.0;
  double final_b = 0.0;
  double max_abs_u = 0.0;
  double max_u_bound_violation = 0.0;
  bool any_infeasible = false;
  int iters_per_step = 0;  // 0 if it ever varied
};

// Integrates dz/dt = v_p - v, dv/dt = (u - F_r(v))/M with RK4 and the QP
// input held over each sample. An Infeasible verdict stops the run with the
// flag set; the report carries the trajectory up to that point.
AccReport simulate_acc(const AccParams& prm, double T_final, double dt,
                       double epsilon);

}  // namespace certiqp
