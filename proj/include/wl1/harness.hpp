#pragma once

// Seeded experiments: Gaussian ensembles, support estimates of prescribed
// accuracy, recovery sweeps over (omega, alpha), the certified error-bound check
// and figure data.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "wl1/io.hpp"
#include "wl1/model.hpp"
#include "wl1/solver.hpp"

namespace wl1 {

enum class Amplitude { Sign, Gaussian };

struct NoiseSpec {
  NoiseSet kind = NoiseSet::L2Ball;
  /// Radius of the noise set; drawn noise is rescaled to 0.99 eps in the kind's norm.
  double eps = 0.0;
  /// When positive, i.i.d. N(0, sigma^2) noise with the matching Gaussian radius instead of eps.
  double sigma = 0.0;
};

struct ExperimentConfig {
  Index n = 64;
  Index N = 128;
  Index k = 8;
  Amplitude amplitude = Amplitude::Sign;
  /// Off-support entries are tail_scale * N(0,1); zero gives exactly sparse signals.
  double tail_scale = 0.0;
  NoiseSpec noise;
  std::vector<double> omegas{0.5};
  std::vector<double> alphas{0.9};
  double rho = 1.0;
  std::uint64_t trials = 1;
  std::uint64_t seed = 0;
  std::string output;
  /// 0 reads WL1_WORKERS.
  unsigned workers = 0;
  SolverOptions solver;

  /// Throws ParameterError on inconsistent sizes, empty grids or non-integral rho k.
  /// alpha rho k is rounded to the nearest integer.
  void validate() const;
};

Json config_to_json(const ExperimentConfig& cfg);
/// Unknown keys are rejected.
ExperimentConfig config_from_json(const Json& j);

struct GaussianInstance {
  Matrix A;
  Vector x;
  /// Support of the best k-term approximation of x.
  IndexSet T0;
};

/// A has i.i.d. N(0, 1/n) entries; x has a uniform k-support. Pure in (cfg.seed, trial_id).
GaussianInstance gen_gaussian_instance(const ExperimentConfig& cfg, std::uint64_t trial_id);

/// |T~| = rho k with round(alpha rho k) indices drawn from T0 and the rest from its complement,
/// k = |T0|. The realised accuracy is reported by the returned estimate.
SupportEstimate gen_support_estimate(const IndexSet& T0, double alpha, double rho, Index N,
                                     std::uint64_t seed, std::uint64_t trial_id = 0);

/// Noise for the instance, rescaled or Gaussian per spec; also returns the radius to solve with.
struct DrawnNoise {
  Vector z;
  double radius = 0.0;
};
DrawnNoise draw_noise(const Matrix& A, const NoiseSpec& spec, std::uint64_t seed, std::uint64_t trial_id);

struct TrialRecord {
  std::uint64_t trial = 0;
  double omega = 0.0;
  double alpha = 0.0;
  double error = 0.0;
  bool success = false;
  SolveStatus status = SolveStatus::MaxIters;
  /// NaN unless certified.
  double bound_rhs = 0.0;
  double margin = 0.0;
  double wall_seconds = 0.0;
  double feas_violation = 0.0;
  double gap = 0.0;
  double objective = 0.0;
};

struct CellSummary {
  double omega = 0.0;
  double alpha = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  double success_rate = 0.0;
  double mean_error = 0.0;
};

struct ExperimentResult {
  std::vector<TrialRecord> records;
  std::vector<CellSummary> cells;
};

/// Records are ordered by (trial, omega, alpha). Writes trials.csv and summary.json
/// into cfg.output when it is nonempty.
ExperimentResult run_recovery_experiment(const ExperimentConfig& cfg);

void write_trials_csv(std::ostream& os, const std::vector<TrialRecord>& records);
Json summary_to_json(const ExperimentConfig& cfg, const std::vector<CellSummary>& cells);
std::vector<CellSummary> aggregate(const std::vector<TrialRecord>& records);

struct BoundCheckRecord {
  std::uint64_t trial = 0;
  double omega = 0.0;
  double alpha = 0.0;
  NoiseSet kind = NoiseSet::L2Ball;
  bool certified = false;
  /// Certified t with the smallest bound (NaN when uncertified).
  double t = 0.0;
  double delta = 0.0;
  double threshold = 0.0;
  double error = 0.0;
  double bound_rhs = 0.0;
  double margin = 0.0;
  /// Number of certified t values; error is compared with every one of their bounds.
  int certified_cells = 0;
  bool violation = false;
  SolveStatus status = SolveStatus::MaxIters;
  double feas_violation = 0.0;
  double gap = 0.0;
  double objective = 0.0;
};

struct BoundCheckResult {
  std::vector<BoundCheckRecord> records;
  std::uint64_t certified_l2 = 0;
  std::uint64_t certified_ds = 0;
  std::uint64_t violations = 0;
};

/// For every trial, both noise sets and every (omega, alpha): exact delta_{ceil(tk)}
/// over t in {j/k : t > d, ceil(tk) <= n}, solve, and compare the error with each
/// certified bound (tolerance 1e-6). Needs N <= 14, n <= 10. Writes bound_check.csv
/// and bound_check.json into cfg.output when it is nonempty.
BoundCheckResult run_certified_bound_check(const ExperimentConfig& cfg);

/// fig1a/fig1b/fig1c (delta 0.1), fig1b_prime/fig1c_prime (delta 0.6) and fig2d/fig2e/fig2f
/// (comparison columns) as CSV under out_dir. Returns the written paths.
std::vector<std::filesystem::path> emit_figures(const std::filesystem::path& out_dir, int omega_steps = 101);

}  // namespace wl1
