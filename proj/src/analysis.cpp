#include "wl1/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "wl1/errors.hpp"

namespace wl1 {

namespace {

constexpr double kTol = 1e-12;

// Vertex of the smallest face of {u in [0,alpha]^p : sum u = sum x} that contains x.
// Coordinates of x at a bound stay there; the free ones are filled greedily.
Vector face_vertex(const Vector& x, const std::vector<char>& fixed, double alpha) {
  Vector u = Vector::Zero(x.size());
  std::vector<Index> free;
  double remaining = x.sum();
  for (Index j = 0; j < x.size(); ++j) {
    if (fixed[j]) {
      u[j] = x[j];
      remaining -= x[j];
    } else {
      free.push_back(j);
    }
  }
  std::stable_sort(free.begin(), free.end(), [&](Index a, Index b) { return x[a] > x[b]; });
  Index last = -1;
  for (Index j : free) {
    if (remaining <= kTol * alpha) break;
    u[j] = std::min(alpha, remaining);
    remaining -= u[j];
    last = j;
  }
  if (last >= 0 && remaining > 0.0) u[last] += remaining;
  return u;
}

}  // namespace

ConvexSparseDecomposition sparse_decompose(const Vector& v, double alpha, Index k) {
  check_signal(v, "v");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ParameterError("alpha must be positive");
  if (k < 1) throw ParameterError("k must be positive");
  if (v.lpNorm<Eigen::Infinity>() > alpha * (1.0 + kTol)) {
    throw ParameterError("v is not in T(alpha, k): ||v||_inf exceeds alpha");
  }
  if (v.lpNorm<1>() > static_cast<double>(k) * alpha * (1.0 + kTol)) {
    throw ParameterError("v is not in T(alpha, k): ||v||_1 exceeds k alpha");
  }

  const IndexSet supp = support_of(v);
  const Index p = static_cast<Index>(supp.size());
  ConvexSparseDecomposition dec;
  if (p <= k) {
    dec.parts.push_back({1.0, v});
    return dec;
  }

  Vector x(p);
  for (Index j = 0; j < p; ++j) x[j] = std::min(alpha, std::abs(v[supp[j]]));
  auto lift = [&](const Vector& mag) {
    Vector u = Vector::Zero(v.size());
    for (Index j = 0; j < p; ++j) u[supp[j]] = v[supp[j]] > 0 ? mag[j] : -mag[j];
    return u;
  };

  double weight = 1.0;
  std::vector<char> fixed(static_cast<std::size_t>(p));
  for (Index iter = 0; iter <= p; ++iter) {
    for (Index j = 0; j < p; ++j) {
      if (x[j] <= kTol * alpha) x[j] = 0.0;
      if (x[j] >= alpha * (1.0 - kTol)) x[j] = alpha;
      fixed[j] = x[j] == 0.0 || x[j] == alpha;
    }
    const Vector u = face_vertex(x, fixed, alpha);
    const Vector d = x - u;
    if (d.lpNorm<Eigen::Infinity>() <= kTol * alpha) {
      dec.parts.push_back({weight, lift(u)});
      break;
    }
    // Extend the ray from u through x to the boundary of the face.
    double tau = std::numeric_limits<double>::infinity();
    Index hit = -1;
    for (Index j = 0; j < p; ++j) {
      if (fixed[j] || d[j] == 0.0) continue;
      const double lim = d[j] > 0.0 ? (alpha - u[j]) / d[j] : u[j] / -d[j];
      if (lim < tau) {
        tau = lim;
        hit = j;
      }
    }
    tau = std::max(tau, 1.0);
    Vector next = (u + tau * d).cwiseMax(0.0).cwiseMin(alpha);
    next[hit] = d[hit] > 0.0 ? alpha : 0.0;
    dec.parts.push_back({weight * (1.0 - 1.0 / tau), lift(u)});
    weight /= tau;
    x = next;
  }
  return dec;
}

const InvariantCheck& DecompositionReport::operator[](const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return c;
  }
  throw ParameterError("no invariant named '" + name + "'");
}

DecompositionReport verify_decomposition(const Vector& v, const ConvexSparseDecomposition& dec,
                                         double alpha, Index k) {
  DecompositionReport rep;
  rep.checks = {InvariantCheck{"convex weights"}, InvariantCheck{"sparsity"}, InvariantCheck{"norms"},
                InvariantCheck{"reconstruction"}};
  auto& weights = rep.checks[0];
  auto& sparsity = rep.checks[1];
  auto& norms = rep.checks[2];
  auto& recon = rep.checks[3];

  if (dec.parts.empty()) {
    weights.worst = 1.0;
    recon.worst = v.lpNorm<Eigen::Infinity>();
  }
  double total = 0.0;
  Vector sum = Vector::Zero(v.size());
  const double v1 = v.lpNorm<1>();
  for (const auto& part : dec.parts) {
    total += part.lambda;
    weights.worst = std::max({weights.worst, -part.lambda, part.lambda - 1.0});
    if (part.u.size() != v.size()) {
      sparsity.worst = std::max(sparsity.worst, static_cast<double>(v.size() + 1));
      continue;
    }
    Index nnz = 0;
    Index outside = 0;
    for (Index i = 0; i < v.size(); ++i) {
      if (part.u[i] != 0.0) {
        ++nnz;
        if (v[i] == 0.0) ++outside;
      }
    }
    sparsity.worst = std::max(sparsity.worst, static_cast<double>(std::max<Index>(0, nnz - k) + outside));
    norms.worst = std::max({norms.worst, std::abs(part.u.lpNorm<1>() - v1) / std::max(1.0, v1),
                            (part.u.lpNorm<Eigen::Infinity>() - alpha) / alpha});
    sum += part.lambda * part.u;
  }
  if (!dec.parts.empty()) {
    weights.worst = std::max(weights.worst, std::abs(total - 1.0));
    recon.worst = (sum - v).lpNorm<Eigen::Infinity>();
  }
  weights.ok = weights.worst <= kTol;
  sparsity.ok = sparsity.worst == 0.0;
  norms.ok = norms.worst <= kTol;
  recon.ok = recon.worst <= 1e-10;
  rep.valid = weights.ok && sparsity.ok && norms.ok && recon.ok;
  return rep;
}

PowerInequality shifted_power_inequality(const Vector& a, Index k, double lambda, double p) {
  if (k < 1) throw ParameterError("k must be positive");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ParameterError("lambda must be >= 0");
  if (!(p >= 1.0) || !std::isfinite(p)) throw ParameterError("exponent must be >= 1");
  for (Index i = 0; i < a.size(); ++i) {
    if (!(a[i] >= 0.0) || !std::isfinite(a[i])) throw ParameterError("entries must be finite and >= 0");
    if (i > 0 && a[i] > a[i - 1]) throw ParameterError("sequence must be nonincreasing");
  }
  const Index head_len = std::min(k, a.size());
  const double head = a.head(head_len).sum();
  const double tail = a.tail(a.size() - head_len).sum();
  if (head + lambda < tail - kTol * std::max(1.0, tail)) {
    throw ParameterError("hypothesis violated: sum of the first k entries plus lambda is below the tail sum");
  }
  PowerInequality r;
  r.lhs = a.tail(a.size() - head_len).array().pow(p).sum();
  const double kd = static_cast<double>(k);
  const double mean = a.head(head_len).array().pow(p).sum() / kd;
  r.rhs = kd * std::pow(std::pow(mean, 1.0 / p) + lambda / kd, p);
  r.holds = r.lhs <= r.rhs * (1.0 + kTol);
  return r;
}

}  // namespace wl1
