#pragma once

// Dense primal-dual interior-point method for
//
//   minimize c'x  subject to  G x + s = h,  s in K,
//   maximize -h'z subject to  G'z + c = 0,  z in K,
//
// where K is a product of a nonnegative orthant and second-order cones
// {(u0, u1) : u0 >= ||u1||_2}. Nesterov-Todd scaling, Mehrotra
// predictor-corrector, static regularization with iterative refinement.

#include <vector>

#include "wl1/model.hpp"

namespace wl1::conic {

struct Cones {
  Index lp = 0;
  std::vector<Index> soc;

  Index dim() const;
  /// Barrier degree: one per orthant coordinate, one per second-order cone.
  Index degree() const;
};

struct Problem {
  Vector c;
  Matrix G;
  Vector h;
  Cones cones;
};

struct Settings {
  double feas_tol = 1e-10;
  double gap_tol = 1e-10;
  int max_iters = 100;
  double step_fraction = 0.99;
  int refine_steps = 3;
};

enum class Status { Optimal, MaxIters, Stalled };

struct Result {
  Vector x;
  Vector s;
  Vector z;
  Status status = Status::MaxIters;
  int iterations = 0;
  double primal_obj = 0.0;
  double dual_obj = 0.0;
  double primal_res = 0.0;
  double dual_res = 0.0;
  double gap = 0.0;
};

Result solve(const Problem& problem, const Settings& settings = {});

/// Nesterov-Todd scaling point for one second-order cone block.
/// W = eta (2 v v' - J), J = diag(1, -1, ..., -1); W z = W^{-1} s.
struct SocScaling {
  double eta = 1.0;
  Vector v;

  static SocScaling compute(const Vector& s, const Vector& z);
  Vector apply(const Vector& u) const;
  Vector apply_inverse(const Vector& u) const;
};

/// Largest alpha with u + alpha d in the second-order cone (u interior); +inf if unbounded.
double soc_max_step(const Vector& u, const Vector& d);

}  // namespace wl1::conic
