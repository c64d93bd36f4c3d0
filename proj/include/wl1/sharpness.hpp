#pragma once

// Explicit instance on which the weighted l1 program fails although
// delta_{tk} exceeds the sufficient threshold only by an arbitrarily small margin.
// Only the d = 1 geometry is supported.

#include <optional>
#include <vector>

#include "wl1/io.hpp"
#include "wl1/model.hpp"
#include "wl1/rip.hpp"
#include "wl1/solver.hpp"

namespace wl1 {

/// 1 + (1 - sqrt(1-g^2))^2 / (g^2 + 2 (1 - sqrt(1-g^2))), for 0 < gamma <= 1.
double minimal_t(double gamma);

struct CounterexampleParams {
  Index k = 0;
  double t = 0.0;
  double omega = 1.0;
  double rho = 0.0;
  double alpha = 0.0;
  double gamma = 1.0;
  double epsilon = 0.0;
};

struct Counterexample {
  Matrix A;
  Vector x0;
  Vector eta0;
  Vector x1;
  double m_prime = 0.0;
  Index m = 0;
  IndexSet T_tilde;
  CounterexampleParams params;

  Index N() const { return x0.size(); }
  WeightVector weights() const { return build_weights(T_tilde, params.omega, N()); }
};

/// sqrt(1 + sqrt((t-1)/(t-1+gamma^2))), the scale of the projection map.
double counterexample_scale(double t, double gamma);

/// Builds and verifies the instance. N defaults to max(k + max(m, rho k), ceil(k + m')).
/// Throws UnsupportedGeometry when d != 1, ParameterError for t below minimal_t(gamma),
/// k < 6/epsilon, non-integral block sizes or N too small, and DomainError when
/// the weighted norm ordering ||eta0||_{1,w} < ||x0||_{1,w} fails.
Counterexample construct_counterexample(Index k, double t, double omega, double rho, double alpha,
                                        double epsilon, std::optional<Index> N = std::nullopt);

struct RicBoundCheck {
  double delta = 0.0;
  double bound = 0.0;
  bool ok = false;
  RicResult ric;
};

/// Exact delta_{ceil(tk)} of ce.A against sqrt((t-1)/(t-1+gamma^2)) + epsilon.
RicBoundCheck verify_ric_bound(const Counterexample& ce, double epsilon, const RicOptions& opts = {});

struct FailureRun {
  double noise_norm = 0.0;
  Vector x_hat;
  double error = 0.0;
  double objective = 0.0;
  SolveStatus status = SolveStatus::MaxIters;
  double gap = 0.0;
  double feas_violation = 0.0;
};

struct FailureReport {
  /// Recomputed from T~ against supp(x0).
  double rho = 0.0;
  double alpha = 0.0;
  double x0_norm = 0.0;
  double eta0_norm = 0.0;
  FailureRun noiseless;
  std::vector<FailureRun> noisy;
  /// ||x_hat||_{1,w} <= ||eta0||_{1,w} + opt_tol < ||x0||_{1,w}
  bool objective_ok = false;
  /// ||x_hat - x0||_2 >= 0.1 in the noiseless solve
  bool recovery_failed = false;
  double min_noisy_error = 0.0;
};

/// Solves with y = A x0 (noise set {0}) and with y = A x0 + z for ||z|| in {1e-1, 1e-2, 1e-3}
/// over the l2 ball of radius ||z||. Only the l2 noise set is supported.
FailureReport demonstrate_failure(const Counterexample& ce, NoiseSet kind, const SolverOptions& opts = {});

/// A is not stored; it is rebuilt from x1 and the parameters.
Json counterexample_to_json(const Counterexample& ce);
Counterexample counterexample_from_json(const Json& j);
Json failure_report_to_json(const FailureReport& r);

}  // namespace wl1
