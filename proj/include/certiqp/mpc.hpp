#pragma once

#include <functional>
#include <vector>

#include "certiqp/problem.hpp"
#include "certiqp/solver.hpp"

namespace certiqp {

// Continuous-time LTI plant with sampled outputs y = C x.
struct LtiModel {
  DenseMatrix A_c;
  DenseMatrix B_c;
  DenseMatrix C;
  double Ts = 0.05;
};

struct DiscreteModel {
  DenseMatrix A;
  DenseMatrix B;
  DenseMatrix C;
};

// exp(M) by scaling and squaring with a truncated Taylor series: scale M by
// 2^-s until ||M||_inf <= 0.5, sum terms through order 16 (remainder below
// double rounding at that norm), then square s times.
DenseMatrix expm(const DenseMatrix& M);

// A_d = exp(A_c Ts), B_d = integral of exp(A_c s) ds * B_c, both read off the
// exponential of the augmented matrix [[A_c, B_c], [0, 0]] * Ts.
DiscreteModel zoh_discretize(const LtiModel& model);

// Pitch-axis flight-control model, two inputs (elevator, flaperon), outputs
// (attack angle, pitch angle), 50 ms sampling.
LtiModel afti16_model();

struct MpcSpec {
  int Np = 10;
  DenseVector wy{10.0, 10.0};    // output tracking weights (diagonal)
  DenseVector wdu{0.1, 0.1};     // input increment weights (diagonal)
  double u_min = -25.0;
  double u_max = 25.0;
  DenseVector y_min{-0.5, -100.0};
  DenseVector y_max{0.5, 100.0};
};

// Condensed tracking QP over U = col(u_0..u_{Np-1}) with the state sequence
// eliminated through the prediction matrices Y = Gamma x0 + S U:
//   J = ||Y - R||^2_Wy + ||D U - E u_prev||^2_Wdu
// subject to u_min <= U <= u_max elementwise and y_min <= Y <= y_max rowwise,
// expressed over the shifted decision vector z = U - u_min >= 0.
struct CondensedQp {
  ConvexQp qp;
  DenseVector shift;        // U = z + shift
  double objective_offset;  // constant dropped from J
};
CondensedQp condense(const MpcSpec& spec, const DiscreteModel& model,
                     const DenseVector& x0, const DenseVector& u_prev,
                     const std::vector<DenseVector>& r_seq);

struct ClosedLoopStep {
  double t = 0.0;
  DenseVector x;  // state at the step start
  DenseVector y;  // C x
  DenseVector u;  // applied input
  SolveStatus status = SolveStatus::Optimal;
  int iters = 0;
};

struct ClosedLoopReport {
  std::vector<ClosedLoopStep> steps;
  double average_cost = 0.0;   // mean stage cost ||y-r||^2_Wy + ||du||^2_Wdu
  double max_output_violation = 0.0;
  double max_input_violation = 0.0;
  bool all_optimal = true;
  int iters_per_step = 0;      // 0 if it ever varied (it must not)
};

// Reference as a function of time; the default scenario steps the pitch
// angle to 10 degrees at t = 0 and back to 0 at T_sim/2.
using ReferenceFn = std::function<DenseVector(double)>;
ReferenceFn step_reference(double t_down);

// Simulates the discrete plant in closed loop, re-solving the condensed QP
// each sample with the certified solver. An Infeasible verdict holds the
// previous input and clears all_optimal.
ClosedLoopReport closed_loop(const MpcSpec& spec, double T_sim, double epsilon,
                             const ReferenceFn& ref);
ClosedLoopReport closed_loop(const MpcSpec& spec, double T_sim,
                             double epsilon);

}  // namespace certiqp
