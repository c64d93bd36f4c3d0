#include "wl1/rip.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "wl1/errors.hpp"
#include "wl1/rng.hpp"

namespace wl1 {

namespace {

__extension__ typedef unsigned __int128 u128;

struct Best {
  double delta = -1.0;
  double extremal = 1.0;
  std::vector<Index> support;

  // Larger delta wins; ties go to the lexicographically smaller support.
  void offer(double d, double ext, const std::vector<Index>& s) {
    if (d > delta || (d == delta && s < support)) {
      delta = d;
      extremal = ext;
      support = s;
    }
  }
};

class SupportEvaluator {
 public:
  SupportEvaluator(const Matrix& gram, Index K) : gram_(gram), sub_(K, K), es_(K) {}

  double operator()(const std::vector<Index>& s, double& extremal) {
    const Index K = static_cast<Index>(s.size());
    if (K == 1) {
      extremal = gram_(s[0], s[0]);
      return std::abs(extremal - 1.0);
    }
    for (Index j = 0; j < K; ++j) {
      for (Index i = j; i < K; ++i) sub_(i, j) = gram_(s[i], s[j]);
    }
    es_.compute(sub_, Eigen::EigenvaluesOnly);
    const double lo = es_.eigenvalues()[0];
    const double hi = es_.eigenvalues()[K - 1];
    if (hi - 1.0 >= 1.0 - lo) {
      extremal = hi;
      return hi - 1.0;
    }
    extremal = lo;
    return 1.0 - lo;
  }

 private:
  const Matrix& gram_;
  Matrix sub_;
  Eigen::SelfAdjointEigenSolver<Matrix> es_;
};

// Lexicographic rank -> combination of K elements from [0, N).
std::vector<Index> unrank(std::uint64_t r, Index N, Index K) {
  std::vector<Index> c;
  c.reserve(static_cast<std::size_t>(K));
  Index x = 0;
  for (Index i = 0; i < K; ++i) {
    for (;; ++x) {
      const std::uint64_t cnt = binomial(static_cast<std::uint64_t>(N - x - 1),
                                         static_cast<std::uint64_t>(K - i - 1));
      if (r < cnt) break;
      r -= cnt;
    }
    c.push_back(x++);
  }
  return c;
}

bool next_combination(std::vector<Index>& c, Index N) {
  const Index K = static_cast<Index>(c.size());
  Index i = K - 1;
  while (i >= 0 && c[i] == N - K + i) --i;
  if (i < 0) return false;
  ++c[i];
  for (Index j = i + 1; j < K; ++j) c[j] = c[j - 1] + 1;
  return true;
}

// Runs body(chunk) for chunk in [0, chunks) on `workers` threads.
template <class Body>
void parallel_chunks(std::size_t chunks, unsigned workers, Body&& body) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(chunks)));
  if (workers == 1) {
    for (std::size_t c = 0; c < chunks; ++c) body(c);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t c; (c = next.fetch_add(1)) < chunks;) body(c);
    });
  }
  for (auto& t : pool) t.join();
}

Best merge(const std::vector<Best>& parts) {
  Best best;
  for (const auto& p : parts) {
    if (p.delta >= 0.0) best.offer(p.delta, p.extremal, p.support);
  }
  return best;
}

RicResult to_result(const Best& b, Index K, RicMode mode, std::uint64_t examined) {
  RicResult r;
  r.k_eff = K;
  r.delta = std::max(0.0, b.delta);
  r.mode = mode;
  r.witness = IndexSet(b.support);
  r.witness_eigenvalue = b.extremal;
  r.supports_examined = examined;
  return r;
}

Index checked_order(const Matrix& A, double k) {
  if (!(k > 0.0) || !std::isfinite(k)) throw ParameterError("RIC order must be positive");
  const Index K = ric_order(k);
  if (K > A.cols()) {
    throw ParameterError("RIC order " + std::to_string(K) + " exceeds N = " + std::to_string(A.cols()));
  }
  return K;
}

RicResult enumerate_all(const Matrix& A, Index K, RicMode mode, unsigned workers) {
  const Index N = A.cols();
  const Matrix gram = A.transpose() * A;
  const std::uint64_t total = binomial(static_cast<std::uint64_t>(N), static_cast<std::uint64_t>(K));
  const std::size_t chunks =
      static_cast<std::size_t>(std::min<std::uint64_t>(total, std::max(1u, workers) * 8ull));
  std::vector<Best> parts(chunks);
  parallel_chunks(chunks, workers, [&](std::size_t c) {
    const std::uint64_t lo = total * c / chunks;
    const std::uint64_t hi = total * (c + 1) / chunks;
    SupportEvaluator eval(gram, K);
    std::vector<Index> s = unrank(lo, N, K);
    for (std::uint64_t r = lo; r < hi; ++r) {
      double ext = 1.0;
      const double d = eval(s, ext);
      if (d > parts[c].delta) parts[c].offer(d, ext, s);
      next_combination(s, N);
    }
  });
  return to_result(merge(parts), K, mode, total);
}

}  // namespace

const char* to_string(RicMode m) { return m == RicMode::Exact ? "Exact" : "LowerBound"; }

unsigned default_workers() {
  if (const char* env = std::getenv("WL1_WORKERS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  return 1;
}

Index ric_order(double k) {
  if (!(k >= 0.0) || !std::isfinite(k)) throw ParameterError("RIC order must be finite and >= 0");
  const double r = std::round(k);
  if (std::abs(k - r) <= 1e-9 * std::max(1.0, k)) return static_cast<Index>(r);
  return static_cast<Index>(std::ceil(k));
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  u128 r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(r);
}

double support_delta(const Matrix& gram, const IndexSet& S, double* extremal) {
  if (S.empty()) throw ParameterError("support must be nonempty");
  S.check_range(gram.cols());
  SupportEvaluator eval(gram, static_cast<Index>(S.size()));
  double ext = 1.0;
  const double d = eval(S.indices(), ext);
  if (extremal) *extremal = ext;
  return d;
}

RicResult exact_ric(const Matrix& A, double k, const RicOptions& opts) {
  const Index K = checked_order(A, k);
  const std::uint64_t total = binomial(static_cast<std::uint64_t>(A.cols()), static_cast<std::uint64_t>(K));
  if (total > opts.budget) {
    throw BudgetExceeded("exact RIC needs " + std::to_string(total) + " supports, budget is " +
                         std::to_string(opts.budget) + "; use mc_ric_lower_bound or a smaller problem");
  }
  return enumerate_all(A, K, RicMode::Exact, opts.workers ? opts.workers : default_workers());
}

RicResult mc_ric_lower_bound(const Matrix& A, double k, std::uint64_t trials, std::uint64_t seed,
                             const RicOptions& opts) {
  if (trials < 1) throw ParameterError("trials must be >= 1");
  const Index K = checked_order(A, k);
  const Index N = A.cols();
  const unsigned workers = opts.workers ? opts.workers : default_workers();
  const std::uint64_t total = binomial(static_cast<std::uint64_t>(N), static_cast<std::uint64_t>(K));
  if (trials >= total) return enumerate_all(A, K, RicMode::LowerBound, workers);

  const Matrix gram = A.transpose() * A;
  const std::size_t chunks =
      static_cast<std::size_t>(std::min<std::uint64_t>(trials, std::max(1u, workers) * 8ull));
  std::vector<Best> parts(chunks);
  parallel_chunks(chunks, workers, [&](std::size_t c) {
    SupportEvaluator eval(gram, K);
    std::vector<Index> s(static_cast<std::size_t>(K));
    for (std::uint64_t t = trials * c / chunks; t < trials * (c + 1) / chunks; ++t) {
      Philox rng(seed, t, stream::kSupport);
      const auto draw = rng.sample(N, K);
      std::copy(draw.begin(), draw.end(), s.begin());
      double ext = 1.0;
      const double d = eval(s, ext);
      parts[c].offer(d, ext, s);
    }
  });
  return to_result(merge(parts), K, RicMode::LowerBound, trials);
}

RecoveryCertification certify_recovery(const Matrix& A, Index k, const GeometryParams& g,
                                       const CertifyOptions& opts) {
  if (k < 1) throw ParameterError("k must be positive");
  RecoveryCertification cert;
  cert.threshold = ric_threshold(g);
  const double order = g.t * static_cast<double>(k);
  if (opts.mc_trials > 0) {
    auto lb = mc_ric_lower_bound(A, order, opts.mc_trials, opts.seed, opts.ric);
    if (lb.delta >= cert.threshold) {
      cert.delta = lb.delta;
      cert.certified = false;
      cert.margin = cert.threshold - lb.delta;
      cert.refuted_by_lower_bound = true;
      cert.ric = std::move(lb);
      return cert;
    }
  }
  cert.ric = exact_ric(A, order, opts.ric);
  cert.delta = cert.ric.delta;
  cert.certified = cert.delta < cert.threshold;
  cert.margin = cert.threshold - cert.delta;
  return cert;
}

}  // namespace wl1
