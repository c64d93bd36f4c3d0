#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace wl1 {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Sorted, duplicate-free set of 0-based indices.
class IndexSet {
 public:
  IndexSet() = default;
  /// Sorts the input; duplicates are rejected.
  explicit IndexSet(std::vector<Index> indices);
  IndexSet(std::initializer_list<Index> indices);

  /// Builds from 1-based indices as used by every external file format.
  static IndexSet from_one_based(std::span<const long long> indices);
  std::vector<long long> to_one_based() const;

  /// All indices {0..n-1} not in this set.
  IndexSet complement(Index n) const;
  /// Throws ParameterError unless every index is < n.
  void check_range(Index n) const;

  bool contains(Index i) const;
  std::size_t size() const { return idx_.size(); }
  bool empty() const { return idx_.empty(); }
  const std::vector<Index>& indices() const { return idx_; }
  Index operator[](std::size_t i) const { return idx_[i]; }
  auto begin() const { return idx_.begin(); }
  auto end() const { return idx_.end(); }

  friend bool operator==(const IndexSet&, const IndexSet&) = default;

 private:
  std::vector<Index> idx_;
};

IndexSet set_intersection(const IndexSet& a, const IndexSet& b);
IndexSet set_union(const IndexSet& a, const IndexSet& b);
IndexSet set_difference(const IndexSet& a, const IndexSet& b);

/// Indices of the nonzero entries of x.
IndexSet support_of(const Vector& x);

/// Returns value as an integer when it is integral up to a 1e-9 relative slack;
/// otherwise throws ParameterError naming `what`.
long long integral_count(double value, const char* what);

/// Throws ParameterError when x has non-finite entries or is empty.
void check_signal(const Vector& x, const char* what = "signal");

struct KTermSplit {
  Vector head;
  Vector tail;
};

/// Best k-term approximation. Ties in magnitude go to the lower index.
KTermSplit best_k_term(const Vector& x, Index k);

/// Support of the best k-term approximation, restricted to its nonzero entries.
IndexSet best_k_support(const Vector& x, Index k);

struct SupportStats {
  double rho = 0.0;
  double alpha = 0.0;
  double beta = 1.0;
};

/// rho = |T~|/k, alpha = |T~ ∩ T0| / |T~| (0 for an empty estimate), beta = 1 - alpha.
SupportStats support_stats(const IndexSet& T0, const IndexSet& T_tilde, Index k);

/// A support estimate T~ together with its accuracy relative to a reference support.
class SupportEstimate {
 public:
  SupportEstimate(IndexSet T_tilde, const IndexSet& T0, Index k);

  const IndexSet& indices() const { return indices_; }
  Index k() const { return k_; }
  double rho() const { return stats_.rho; }
  double alpha() const { return stats_.alpha; }
  double beta() const { return stats_.beta; }
  /// |T~ ∩ T0|
  std::size_t correct() const { return correct_; }
  /// |T~ \ T0|
  std::size_t wrong() const { return indices_.size() - correct_; }

 private:
  IndexSet indices_;
  Index k_;
  SupportStats stats_;
  std::size_t correct_;
};

/// Weights omega on T~ and 1 elsewhere.
class WeightVector {
 public:
  WeightVector(const IndexSet& T_tilde, double omega, Index n);
  /// Arbitrary weights in [0,1]; omega is reported as the smallest weight.
  static WeightVector from_values(Vector weights);

  const Vector& values() const { return w_; }
  double omega() const { return omega_; }
  Index size() const { return w_.size(); }
  double operator[](Index i) const { return w_[i]; }

 private:
  WeightVector() = default;
  Vector w_;
  double omega_ = 1.0;
};

WeightVector build_weights(const IndexSet& T_tilde, double omega, Index n);

/// sum_i w_i |x_i|
double weighted_l1_norm(const Vector& x, const WeightVector& w);

/// l1 norm of x restricted to the given indices.
double l1_norm_on(const Vector& x, const IndexSet& set);

enum class NoiseSet { L2Ball, DantzigBox };

const char* to_string(NoiseSet kind);
NoiseSet noise_set_from_string(const std::string& name);

/// Sensing matrix, measurements and the noise-set descriptor.
struct ProblemInstance {
  ProblemInstance(Matrix A, Vector y, NoiseSet noise_set, double radius);

  Index rows() const { return A.rows(); }
  Index cols() const { return A.cols(); }
  /// Columns that are identically zero (permitted, only recorded).
  const std::vector<Index>& zero_columns() const { return zero_columns_; }

  Matrix A;
  Vector y;
  NoiseSet noise_set;
  double radius;

 private:
  std::vector<Index> zero_columns_;
};

}  // namespace wl1
