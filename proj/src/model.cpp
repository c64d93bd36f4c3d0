#include "wl1/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "wl1/errors.hpp"

namespace wl1 {

IndexSet::IndexSet(std::vector<Index> indices) : idx_(std::move(indices)) {
  std::sort(idx_.begin(), idx_.end());
  if (std::adjacent_find(idx_.begin(), idx_.end()) != idx_.end()) {
    throw ParameterError("index set contains duplicates");
  }
  if (!idx_.empty() && idx_.front() < 0) {
    throw ParameterError("index set contains a negative index");
  }
}

IndexSet::IndexSet(std::initializer_list<Index> indices)
    : IndexSet(std::vector<Index>(indices)) {}

IndexSet IndexSet::from_one_based(std::span<const long long> indices) {
  std::vector<Index> zero_based;
  zero_based.reserve(indices.size());
  for (long long i : indices) {
    if (i < 1) throw ParameterError("1-based index must be >= 1, got " + std::to_string(i));
    zero_based.push_back(static_cast<Index>(i - 1));
  }
  return IndexSet(std::move(zero_based));
}

std::vector<long long> IndexSet::to_one_based() const {
  std::vector<long long> out(idx_.size());
  std::transform(idx_.begin(), idx_.end(), out.begin(),
                 [](Index i) { return static_cast<long long>(i) + 1; });
  return out;
}

IndexSet IndexSet::complement(Index n) const {
  std::vector<Index> out;
  out.reserve(static_cast<std::size_t>(std::max<Index>(0, n - static_cast<Index>(idx_.size()))));
  auto it = idx_.begin();
  for (Index i = 0; i < n; ++i) {
    while (it != idx_.end() && *it < i) ++it;
    if (it == idx_.end() || *it != i) out.push_back(i);
  }
  IndexSet result;
  result.idx_ = std::move(out);
  return result;
}

void IndexSet::check_range(Index n) const {
  if (!idx_.empty() && idx_.back() >= n) {
    throw ParameterError("index " + std::to_string(idx_.back() + 1) + " exceeds dimension " +
                         std::to_string(n));
  }
}

bool IndexSet::contains(Index i) const {
  return std::binary_search(idx_.begin(), idx_.end(), i);
}

IndexSet set_intersection(const IndexSet& a, const IndexSet& b) {
  std::vector<Index> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return IndexSet(std::move(out));
}

IndexSet set_union(const IndexSet& a, const IndexSet& b) {
  std::vector<Index> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return IndexSet(std::move(out));
}

IndexSet set_difference(const IndexSet& a, const IndexSet& b) {
  std::vector<Index> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return IndexSet(std::move(out));
}

IndexSet support_of(const Vector& x) {
  std::vector<Index> out;
  for (Index i = 0; i < x.size(); ++i) {
    if (x[i] != 0.0) out.push_back(i);
  }
  return IndexSet(std::move(out));
}

long long integral_count(double value, const char* what) {
  const double r = std::round(value);
  if (!std::isfinite(value) || std::abs(value - r) > 1e-9 * std::max(1.0, std::abs(value))) {
    throw ParameterError(std::string(what) + " must be an integer, got " + std::to_string(value));
  }
  return static_cast<long long>(r);
}

void check_signal(const Vector& x, const char* what) {
  if (x.size() < 1) throw ParameterError(std::string(what) + " must have length >= 1");
  if (!x.allFinite()) throw ParameterError(std::string(what) + " has non-finite entries");
}

namespace {

// Indices ordered by decreasing magnitude, lower index first on ties.
std::vector<Index> magnitude_order(const Vector& x) {
  std::vector<Index> order(static_cast<std::size_t>(x.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return std::abs(x[a]) > std::abs(x[b]); });
  return order;
}

}  // namespace

KTermSplit best_k_term(const Vector& x, Index k) {
  check_signal(x, "x");
  if (k < 1 || k > x.size()) {
    throw ParameterError("k must lie in [1, N], got " + std::to_string(k));
  }
  const auto order = magnitude_order(x);
  KTermSplit out{Vector::Zero(x.size()), x};
  for (Index j = 0; j < k; ++j) {
    const Index i = order[static_cast<std::size_t>(j)];
    out.head[i] = x[i];
    out.tail[i] = 0.0;
  }
  return out;
}

IndexSet best_k_support(const Vector& x, Index k) {
  return support_of(best_k_term(x, k).head);
}

SupportStats support_stats(const IndexSet& T0, const IndexSet& T_tilde, Index k) {
  if (k < 1) throw ParameterError("k must be positive");
  if (static_cast<Index>(T0.size()) > k) throw ParameterError("|T0| must not exceed k");
  SupportStats s;
  s.rho = static_cast<double>(T_tilde.size()) / static_cast<double>(k);
  if (T_tilde.empty()) {
    s.alpha = 0.0;
  } else {
    s.alpha = static_cast<double>(set_intersection(T0, T_tilde).size()) /
              static_cast<double>(T_tilde.size());
  }
  s.beta = 1.0 - s.alpha;
  return s;
}

SupportEstimate::SupportEstimate(IndexSet T_tilde, const IndexSet& T0, Index k)
    : indices_(std::move(T_tilde)), k_(k), stats_(support_stats(T0, indices_, k)),
      correct_(set_intersection(T0, indices_).size()) {}

WeightVector::WeightVector(const IndexSet& T_tilde, double omega, Index n) {
  if (!(omega >= 0.0 && omega <= 1.0)) {
    throw ParameterError("omega must lie in [0,1], got " + std::to_string(omega));
  }
  if (n < 1) throw ParameterError("weight vector length must be positive");
  T_tilde.check_range(n);
  w_ = Vector::Ones(n);
  for (Index i : T_tilde) w_[i] = omega;
  omega_ = omega;
}

WeightVector WeightVector::from_values(Vector weights) {
  if (weights.size() < 1) throw ParameterError("weight vector length must be positive");
  for (Index i = 0; i < weights.size(); ++i) {
    if (!(weights[i] >= 0.0 && weights[i] <= 1.0)) {
      throw ParameterError("weights must lie in [0,1]");
    }
  }
  WeightVector w;
  w.omega_ = weights.minCoeff();
  w.w_ = std::move(weights);
  return w;
}

WeightVector build_weights(const IndexSet& T_tilde, double omega, Index n) {
  return WeightVector(T_tilde, omega, n);
}

double weighted_l1_norm(const Vector& x, const WeightVector& w) {
  if (x.size() != w.size()) {
    throw ParameterError("signal and weight lengths differ: " + std::to_string(x.size()) +
                         " vs " + std::to_string(w.size()));
  }
  return w.values().cwiseProduct(x.cwiseAbs()).sum();
}

double l1_norm_on(const Vector& x, const IndexSet& set) {
  double s = 0.0;
  for (Index i : set) s += std::abs(x[i]);
  return s;
}

const char* to_string(NoiseSet kind) {
  return kind == NoiseSet::L2Ball ? "l2" : "ds";
}

NoiseSet noise_set_from_string(const std::string& name) {
  if (name == "l2") return NoiseSet::L2Ball;
  if (name == "ds") return NoiseSet::DantzigBox;
  throw ParameterError("noise set must be 'l2' or 'ds', got '" + name + "'");
}

ProblemInstance::ProblemInstance(Matrix A_, Vector y_, NoiseSet noise_set_, double radius_)
    : A(std::move(A_)), y(std::move(y_)), noise_set(noise_set_), radius(radius_) {
  if (A.rows() < 1 || A.cols() < 1) throw ParameterError("sensing matrix must be nonempty");
  if (A.rows() != y.size()) {
    throw ParameterError("measurement length " + std::to_string(y.size()) +
                         " does not match matrix rows " + std::to_string(A.rows()));
  }
  if (!A.allFinite() || !y.allFinite()) throw ParameterError("non-finite problem data");
  if (!(radius >= 0.0) || !std::isfinite(radius)) {
    throw ParameterError("noise radius must be finite and >= 0");
  }
  for (Index j = 0; j < A.cols(); ++j) {
    if ((A.col(j).array() == 0.0).all()) zero_columns_.push_back(j);
  }
}

}  // namespace wl1
