#include "certiqp/mpc.hpp"

#include <cmath>

namespace certiqp {

namespace {

double inf_norm(const DenseMatrix& M) {
  double best = 0.0;
  for (int i = 0; i < M.rows(); ++i) {
    double s = 0.0;
    for (int j = 0; j < M.cols(); ++j) s += std::fabs(M(i, j));
    best = std::max(best, s);
  }
  return best;
}

}  // namespace

DenseMatrix expm(const DenseMatrix& M) {
  if (M.rows() != M.cols())
    throw DimensionMismatch("expm: matrix must be square");
  const int n = M.rows();

  int s = 0;
  double norm = inf_norm(M);
  while (norm > 0.5) {
    norm *= 0.5;
    ++s;
  }
  DenseMatrix T = M;
  const double scale = std::ldexp(1.0, -s);
  for (double& x : T.data()) x *= scale;

  // I + T + T^2/2! + ... + T^16/16!; remainder below 1e-19 at ||T|| <= 1/2
  DenseMatrix E = DenseMatrix::identity(n);
  DenseMatrix P = DenseMatrix::identity(n);
  for (int k = 1; k <= 16; ++k) {
    P = matmul(P, T);
    const double inv = 1.0 / k;
    for (double& x : P.data()) x *= inv;
    for (std::size_t i = 0; i < E.data().size(); ++i) E.data()[i] += P.data()[i];
  }
  for (int i = 0; i < s; ++i) E = matmul(E, E);
  return E;
}

DiscreteModel zoh_discretize(const LtiModel& model) {
  if (!(model.Ts > 0.0)) throw InvalidProblem("zoh: Ts must be positive");
  const int nx = model.A_c.rows();
  const int nu = model.B_c.cols();
  if (model.A_c.cols() != nx || model.B_c.rows() != nx)
    throw DimensionMismatch("zoh: A_c/B_c dimensions disagree");

  // exp([[A, B], [0, 0]] Ts) = [[A_d, B_d], [0, I]]
  DenseMatrix G(nx + nu, nx + nu);
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < nx; ++j) G(i, j) = model.A_c(i, j) * model.Ts;
    for (int j = 0; j < nu; ++j) G(i, nx + j) = model.B_c(i, j) * model.Ts;
  }
  DenseMatrix E = expm(G);

  DiscreteModel d;
  d.A = DenseMatrix(nx, nx);
  d.B = DenseMatrix(nx, nu);
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < nx; ++j) d.A(i, j) = E(i, j);
    for (int j = 0; j < nu; ++j) d.B(i, j) = E(i, nx + j);
  }
  d.C = model.C;
  return d;
}

LtiModel afti16_model() {
  LtiModel m;
  m.A_c = DenseMatrix(4, 4);
  const double a[4][4] = {{-0.0151, -60.5651, 0.0, -32.174},
                          {-0.0001, -1.3411, 0.9929, 0.0},
                          {0.00018, 43.2541, -0.86939, 0.0},
                          {0.0, 0.0, 1.0, 0.0}};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m.A_c(i, j) = a[i][j];
  m.B_c = DenseMatrix(4, 2);
  const double b[4][2] = {
      {-2.516, -13.136}, {-0.1689, -0.2514}, {-17.251, -1.5766}, {0.0, 0.0}};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 2; ++j) m.B_c(i, j) = b[i][j];
  m.C = DenseMatrix(2, 4);
  m.C(0, 1) = 1.0;  // attack angle
  m.C(1, 3) = 1.0;  // pitch angle
  m.Ts = 0.05;
  return m;
}

CondensedQp condense(const MpcSpec& spec, const DiscreteModel& model,
                     const DenseVector& x0, const DenseVector& u_prev,
                     const std::vector<DenseVector>& r_seq) {
  const int nx = model.A.rows();
  const int nu = model.B.cols();
  const int ny = model.C.rows();
  const int Np = spec.Np;
  if (Np < 1) throw InvalidProblem("mpc: horizon must be >= 1");
  if (static_cast<int>(x0.size()) != nx ||
      static_cast<int>(u_prev.size()) != nu)
    throw DimensionMismatch("mpc: state/input sizes disagree with the model");
  if (static_cast<int>(r_seq.size()) != Np)
    throw DimensionMismatch("mpc: need one reference per horizon step");
  const int NU = Np * nu;
  const int NY = Np * ny;

  // prediction: y stack = Gamma x0 + S U with S block (k, j) = C A^(k-j) B
  std::vector<DenseMatrix> CApow(Np);  // C A^(k+1), k = 0..Np-1
  std::vector<DenseMatrix> CAB(Np);    // C A^k B,   k = 0..Np-1
  DenseMatrix Apow = DenseMatrix::identity(nx);
  for (int k = 0; k < Np; ++k) {
    CAB[k] = matmul(matmul(model.C, Apow), model.B);
    Apow = matmul(Apow, model.A);  // wasteful for tiny nx, clear
    CApow[k] = matmul(model.C, Apow);
  }
  DenseMatrix Gamma(NY, nx);
  DenseMatrix S(NY, NU);
  for (int k = 0; k < Np; ++k) {
    for (int r = 0; r < ny; ++r)
      for (int j = 0; j < nx; ++j) Gamma(k * ny + r, j) = CApow[k](r, j);
    for (int j = 0; j <= k; ++j)
      for (int r = 0; r < ny; ++r)
        for (int cidx = 0; cidx < nu; ++cidx)
          S(k * ny + r, j * nu + cidx) = CAB[k - j](r, cidx);
  }

  // stacked weights
  DenseVector Wy(NY), Wdu(NU);
  for (int k = 0; k < Np; ++k) {
    for (int r = 0; r < ny; ++r) Wy[k * ny + r] = spec.wy[r];
    for (int cidx = 0; cidx < nu; ++cidx) Wdu[k * nu + cidx] = spec.wdu[cidx];
  }

  // Hessian 2(S' Wy S + D' Wdu D) with D the backward-difference stack
  DenseMatrix WS(NY, NU);
  for (int i = 0; i < NY; ++i)
    for (int j = 0; j < NU; ++j) WS(i, j) = Wy[i] * S(i, j);
  DenseMatrix Q(NU, NU);
  for (int i = 0; i < NU; ++i)
    for (int j = 0; j < NU; ++j) {
      double acc = 0.0;
      for (int r = 0; r < NY; ++r) acc += S(r, i) * WS(r, j);
      Q(i, j) = 2.0 * acc;
    }
  // D'Wdu D: block tridiagonal; D row block k is u_k - u_{k-1}
  for (int k = 0; k < Np; ++k)
    for (int cidx = 0; cidx < nu; ++cidx) {
      const int i = k * nu + cidx;
      const double w = Wdu[i];
      Q(i, i) += 2.0 * w;
      if (k + 1 < Np) {
        const double wn = Wdu[(k + 1) * nu + cidx];
        Q(i, i) += 2.0 * wn;
        Q(i, i + nu) -= 2.0 * wn;
        Q(i + nu, i) -= 2.0 * wn;
      }
    }

  // gradient 2 S' Wy (Gamma x0 - R) - 2 D' Wdu E u_prev
  DenseVector g(NY);
  DenseVector Gx0 = matvec(Gamma, x0);
  for (int k = 0; k < Np; ++k)
    for (int r = 0; r < ny; ++r)
      g[k * ny + r] = Gx0[k * ny + r] - r_seq[k][r];
  DenseVector c(NU, 0.0);
  for (int j = 0; j < NU; ++j) {
    double acc = 0.0;
    for (int r = 0; r < NY; ++r) acc += S(r, j) * Wy[r] * g[r];
    c[j] = 2.0 * acc;
  }
  for (int cidx = 0; cidx < nu; ++cidx)
    c[cidx] -= 2.0 * Wdu[cidx] * u_prev[cidx];

  // bounds and stacked output constraints in y_min <= Gamma x0 + S U <= y_max
  DenseVector lb(NU, spec.u_min), ub(NU, spec.u_max);
  DenseMatrix A_le(2 * NY, NU);
  DenseVector b_le(2 * NY);
  for (int i = 0; i < NY; ++i) {
    const int r = i % ny;
    for (int j = 0; j < NU; ++j) {
      A_le(i, j) = S(i, j);
      A_le(NY + i, j) = -S(i, j);
    }
    b_le[i] = spec.y_max[r] - Gx0[i];
    b_le[NY + i] = Gx0[i] - spec.y_min[r];
  }

  BoxReduction red = from_box_inequality(Q, c, lb, ub, A_le, b_le);

  // constant dropped from J: g'Wy g + u_prev'Wdu u_prev
  double cst = 0.0;
  for (int r = 0; r < NY; ++r) cst += g[r] * Wy[r] * g[r];
  for (int cidx = 0; cidx < nu; ++cidx)
    cst += Wdu[cidx] * u_prev[cidx] * u_prev[cidx];

  CondensedQp out;
  out.qp = std::move(red.qp);
  out.shift = std::move(red.shift);
  out.objective_offset = red.objective_offset + cst;
  return out;
}

ReferenceFn step_reference(double t_down) {
  return [t_down](double t) {
    return DenseVector{0.0, t < t_down ? 10.0 : 0.0};
  };
}

ClosedLoopReport closed_loop(const MpcSpec& spec, double T_sim, double epsilon,
                             const ReferenceFn& ref) {
  const LtiModel plant = afti16_model();
  const DiscreteModel model = zoh_discretize(plant);
  const int nx = model.A.rows(), nu = model.B.cols(), ny = model.C.rows();
  const int K = static_cast<int>(std::lround(T_sim / plant.Ts));

  ClosedLoopReport rep;
  DenseVector x(nx, 0.0), u_prev(nu, 0.0);
  double cost_total = 0.0;
  int iters0 = -1;
  bool iters_constant = true;

  for (int k = 0; k < K; ++k) {
    const double t = k * plant.Ts;
    // hold the current setpoint across the horizon: the controller has no
    // preview of future reference changes
    std::vector<DenseVector> r_seq(spec.Np, ref(t));

    CondensedQp cq = condense(spec, model, x, u_prev, r_seq);
    // rescaling preserves the feasible set and argmin while improving the
    // accuracy delivered by a fixed-epsilon solve on this badly scaled data
    SolveResult res = solve(equilibrate(cq.qp).qp, epsilon);

    DenseVector u = u_prev;  // held on an Infeasible verdict
    if (res.status == SolveStatus::Optimal) {
      for (int i = 0; i < nu; ++i) u[i] = res.z[i] + cq.shift[i];
    } else {
      rep.all_optimal = false;
    }
    if (iters0 < 0)
      iters0 = res.iterations_run;
    else if (res.iterations_run != iters0)
      iters_constant = false;

    ClosedLoopStep step;
    step.t = t;
    step.x = x;
    step.y = matvec(model.C, x);
    step.u = u;
    step.status = res.status;
    step.iters = res.iterations_run;
    rep.steps.push_back(std::move(step));

    for (int i = 0; i < nu; ++i) {
      rep.max_input_violation =
          std::max({rep.max_input_violation, u[i] - spec.u_max,
                    spec.u_min - u[i]});
    }

    // advance the plant and accumulate the realized stage cost
    DenseVector xn = matvec(model.A, x);
    DenseVector Bu = matvec(model.B, u);
    for (int i = 0; i < nx; ++i) xn[i] += Bu[i];
    DenseVector yn = matvec(model.C, xn);
    const DenseVector rn = ref(t + plant.Ts);
    for (int r = 0; r < ny; ++r) {
      const double e = yn[r] - rn[r];
      cost_total += spec.wy[r] * e * e;
      rep.max_output_violation =
          std::max({rep.max_output_violation, yn[r] - spec.y_max[r],
                    spec.y_min[r] - yn[r]});
    }
    for (int i = 0; i < nu; ++i) {
      const double du = u[i] - u_prev[i];
      cost_total += spec.wdu[i] * du * du;
    }
    x = std::move(xn);
    u_prev = u;
  }

  rep.average_cost = K > 0 ? cost_total / K : 0.0;
  rep.iters_per_step = iters_constant && iters0 > 0 ? iters0 : 0;
  return rep;
}

ClosedLoopReport closed_loop(const MpcSpec& spec, double T_sim,
                             double epsilon) {
  return closed_loop(spec, T_sim, epsilon, step_reference(T_sim / 2.0));
}

}  // namespace certiqp
