#pragma once

// Restricted isometry constants by exhaustive support enumeration, Monte Carlo
// lower bounds, and certification of the recovery threshold for a concrete A.

#include <cstdint>

#include "wl1/bounds.hpp"
#include "wl1/model.hpp"

namespace wl1 {

enum class RicMode { Exact, LowerBound };

const char* to_string(RicMode m);

struct RicResult {
  /// Support size actually enumerated: ceil(k).
  Index k_eff = 0;
  double delta = 0.0;
  RicMode mode = RicMode::Exact;
  /// Support achieving delta (lexicographically smallest on ties).
  IndexSet witness;
  /// The extremal Gram eigenvalue that realises delta on the witness.
  double witness_eigenvalue = 1.0;
  std::uint64_t supports_examined = 0;
};

struct RicOptions {
  std::uint64_t budget = 2'000'000;
  /// 0 reads WL1_WORKERS (default 1).
  unsigned workers = 0;
};

/// ceil(k), treating values within 1e-9 relative of an integer as that integer.
Index ric_order(double k);

/// C(n, k), saturating at UINT64_MAX.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

/// max(lambda_max - 1, 1 - lambda_min) of gram(S, S); optionally reports the extremal eigenvalue.
double support_delta(const Matrix& gram, const IndexSet& S, double* extremal = nullptr);

/// Exact delta_{ceil(k)}. Throws BudgetExceeded when C(N, ceil k) exceeds the budget.
RicResult exact_ric(const Matrix& A, double k, const RicOptions& opts = {});

/// Max over `trials` uniformly drawn supports; exhaustive when trials >= C(N, ceil k).
RicResult mc_ric_lower_bound(const Matrix& A, double k, std::uint64_t trials, std::uint64_t seed,
                             const RicOptions& opts = {});

struct CertifyOptions {
  RicOptions ric;
  /// When positive, a Monte Carlo pass runs first and may refute without enumeration.
  std::uint64_t mc_trials = 0;
  std::uint64_t seed = 0;
};

struct RecoveryCertification {
  double delta = 0.0;
  double threshold = 0.0;
  bool certified = false;
  double margin = 0.0;
  bool refuted_by_lower_bound = false;
  RicResult ric;
};

/// Compares delta_{ceil(t k)} of A with the threshold of g. Certification needs exact mode.
RecoveryCertification certify_recovery(const Matrix& A, Index k, const GeometryParams& g,
                                       const CertifyOptions& opts = {});

/// Worker count from WL1_WORKERS, default 1.
unsigned default_workers();

}  // namespace wl1
