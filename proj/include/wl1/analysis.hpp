#pragma once

// Convex decomposition of T(alpha, k) = {v : ||v||_inf <= alpha, ||v||_1 <= k alpha}
// into k-sparse vectors, and the shifted power inequality for sorted sequences.

#include <array>
#include <string>
#include <vector>

#include "wl1/model.hpp"

namespace wl1 {

struct SparsePart {
  double lambda;
  Vector u;
};

struct ConvexSparseDecomposition {
  std::vector<SparsePart> parts;
};

/// v = sum lambda_i u_i with each u_i k-sparse, supp(u_i) in supp(v),
/// ||u_i||_1 = ||v||_1 and ||u_i||_inf <= alpha. At most |supp(v)| parts.
/// Throws ParameterError when v is not in T(alpha, k).
ConvexSparseDecomposition sparse_decompose(const Vector& v, double alpha, Index k);

struct InvariantCheck {
  std::string name;
  double worst = 0.0;
  bool ok = true;
};

struct DecompositionReport {
  bool valid = true;
  /// "convex weights", "sparsity", "norms", "reconstruction", in that order.
  std::array<InvariantCheck, 4> checks;

  const InvariantCheck& operator[](const std::string& name) const;
};

DecompositionReport verify_decomposition(const Vector& v, const ConvexSparseDecomposition& dec,
                                         double alpha, Index k);

struct PowerInequality {
  double lhs;
  double rhs;
  bool holds;
};

/// For a nonincreasing nonnegative a with sum_{i<=k} a_i + lambda >= sum_{i>k} a_i:
///   lhs = sum_{j>k} a_j^p,  rhs = k ((sum_{i<=k} a_i^p / k)^{1/p} + lambda / k)^p.
PowerInequality shifted_power_inequality(const Vector& a, Index k, double lambda, double p);

}  // namespace wl1
