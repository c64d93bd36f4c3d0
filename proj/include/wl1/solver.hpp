#pragma once

// Weighted l1 minimization over the l2-ball and Dantzig-box noise sets.
//
//   minimize ||x||_{1,w}  subject to  ||y - A x||_2 <= eps          (l2)
//   minimize ||x||_{1,w}  subject to  ||A'(y - A x)||_inf <= eps     (ds)
//
// Both are solved as cone programs; every report carries a weak-duality
// certificate computed independently of the solver internals.

#include <optional>
#include <string>

#include "wl1/model.hpp"

namespace wl1 {

struct SolverOptions {
  double feas_tol = 1e-8;
  double opt_tol = 1e-8;
  int max_iters = 50000;
  /// Solves are deterministic; kept for configuration round-trips.
  bool deterministic = true;

  /// Throws ParameterError unless both tolerances lie in (0, 1e-2] and max_iters >= 1.
  void validate() const;
};

enum class SolveStatus { Optimal, MaxIters, Infeasible };

const char* to_string(SolveStatus s);

struct Certificate {
  double feas_violation = 0.0;
  /// Valid lower bound on the optimal value (+inf when the instance is infeasible).
  double dual_bound = 0.0;
  double objective = 0.0;
  /// objective - dual_bound
  double gap = 0.0;
  /// Dual vector achieving dual_bound: lambda in R^n (l2) or mu in R^N (ds).
  Vector dual;
};

struct RecoveryReport {
  Vector x_hat;
  double objective = 0.0;
  double feas_violation = 0.0;
  Certificate certificate;
  int iterations = 0;
  SolveStatus status = SolveStatus::MaxIters;
};

RecoveryReport solve_weighted_bp(const ProblemInstance& inst, const WeightVector& w,
                                 const SolverOptions& opts = {});
RecoveryReport solve_weighted_ds(const ProblemInstance& inst, const WeightVector& w,
                                 const SolverOptions& opts = {});
/// Dispatches on inst.noise_set.
RecoveryReport solve_weighted(const ProblemInstance& inst, const WeightVector& w,
                              const SolverOptions& opts = {});

/// Feasibility residual and a dual lower bound for x_hat. The optional hint is a
/// dual vector in the same space as Certificate::dual; candidates reconstructed
/// from x_hat alone are always tried as well and the best bound is kept.
Certificate optimality_certificate(const ProblemInstance& inst, const WeightVector& w,
                                   const Vector& x_hat,
                                   const std::optional<Vector>& dual_hint = std::nullopt);

struct ConeDiagnostic {
  double lhs;
  double rhs;
  bool holds;
};

/// With h = x_hat - x:
///   lhs = ||h_{T0^c}||_1
///   rhs = omega ||h_{T0}||_1 + (1-omega) ||h_{T0 xor T~}||_1
///         + 2 (omega ||x_{T0^c}||_1 + (1-omega) ||x_{T~^c and T0^c}||_1)
/// Every minimizer satisfies lhs <= rhs.
ConeDiagnostic cone_diagnostic(const Vector& x, const Vector& x_hat, const IndexSet& T0,
                               const IndexSet& T_tilde, double omega);

}  // namespace wl1
