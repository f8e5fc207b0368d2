#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "certiqp/problem.hpp"

namespace certiqp {

struct TooFewRows : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct RandomQpSpec {
  int n_z = 10;
  int n_b = 10;
  double cond = 10.0;  // target condition number of Q
  std::uint64_t seed = 0;
};

// Random free-variable QP: Q = U diag(d) U' with d log-spaced on [1, cond]
// and U orthogonal (modified Gram-Schmidt on a Gaussian matrix); c, A
// Gaussian; b = A z0 - slack for a random z0 >= 0 and slack > 0, so the
// instance is strictly feasible. Same spec, same bytes.
StandardQp gen_random_qp(const RandomQpSpec& spec);

// Canonical-form variant (z >= 0 kept): same construction, strictly feasible
// with an interior z0 >= 0. Used where a ground-truth oracle needs a unique
// optimum on the nonnegative orthant.
ConvexQp gen_random_convex_qp(const RandomQpSpec& spec);

// Appends the negations of the first two rows with right-hand sides shifted
// by one: row j gives A_j x >= b_j and -A_j x >= -b_j + 1, i.e.
// A_j x <= b_j - 1, so the feasible set is provably empty.
StandardQp make_infeasible(const StandardQp& p);
ConvexQp make_infeasible(const ConvexQp& p);

struct DetectionRow {
  double cond_decade = 0.0;
  int instances = 0;
  int detected = 0;
  double rate = 0.0;
};

// For each condition decade: generate per_decade feasible instances, inject
// the contradictory rows, split free variables, solve, and count Infeasible
// verdicts.
std::vector<DetectionRow> detection_experiment(
    const std::vector<double>& decades, int per_decade, double epsilon,
    int n_z = 10, int n_b = 10, std::uint64_t seed = 1);

// header: cond_decade,instances,detected,rate
void write_detection_csv(std::ostream& os,
                         const std::vector<DetectionRow>& rows);

}  // namespace certiqp
