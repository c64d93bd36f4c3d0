// Acceptance run: one PASS/FAIL line per criterion, exit status 1 on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "wl1/analysis.hpp"
#include "wl1/bounds.hpp"
#include "wl1/harness.hpp"
#include "wl1/rip.hpp"
#include "wl1/sharpness.hpp"

using namespace wl1;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

// Every Optimal report seen by any criterion, for the certificate audit.
struct Audit {
  std::size_t optimal = 0;
  std::size_t bad = 0;
  double worst_feas = 0.0;
  double worst_gap = 0.0;

  void add(SolveStatus status, double feas, double gap, double objective) {
    if (status != SolveStatus::Optimal) return;
    ++optimal;
    worst_feas = std::max(worst_feas, feas);
    worst_gap = std::max(worst_gap, gap / (1.0 + objective));
    if (!(feas <= 1e-8 && gap <= 1e-8 * (1.0 + objective))) ++bad;
  }
};

Audit audit;

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<std::vector<double>> read_table(const fs::path& p, std::vector<std::string>& header) {
  std::ifstream in(p);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::getline(in, line);
  header.clear();
  std::stringstream hs(line);
  for (std::string c; std::getline(hs, c, ',');) header.push_back(c);
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) row.push_back(c == "inf" ? INFINITY : std::stod(c));
    rows.push_back(row);
  }
  return rows;
}

std::size_t col(const std::vector<std::string>& h, const std::string& name) {
  return static_cast<std::size_t>(std::find(h.begin(), h.end(), name) - h.begin());
}

Outcome thresholds() {
  const double a = ric_threshold(GeometryParams::make(4, 0.4, 1, 0.9));
  const double b = ric_threshold(GeometryParams::make(4, 1, 1, 0.9));
  const bool ok = std::abs(a - 0.9330) <= 5e-5 && std::abs(b - 0.8660) <= 5e-5;
  return {ok, fmt("delta_t^0.4 = %.6f, delta_t^1 = %.6f", a, b)};
}

Outcome reductions() {
  double worst = 0.0;
  int points = 0;
  for (int i = 0; i < 10; ++i) {
    const double t = 1.4 + (6.0 - 1.4) * i / 9.0;
    const double thr = std::sqrt((t - 1) / t);
    for (int j = 0; j < 10; ++j) {
      const double delta = 0.95 * thr * j / 9.0;
      const auto cz = cz_constants(t, delta, 3);
      const auto check = [&](double omega, double alpha) {
        const auto c = stability_constants_l2(GeometryParams::make(t, omega, 1.0, alpha), delta);
        worst = std::max({worst, std::abs(c.D0 - cz.C0) / cz.C0, std::abs(c.D1 - cz.C1) / cz.C1});
      };
      check(1.0, 0.9);
      check(1.0, 0.2);
      for (double omega : {0.0, 0.3, 0.7}) check(omega, 0.5);
      ++points;
    }
  }
  return {worst <= 1e-12, fmt("%d grid points, worst relative difference %.2e", points, worst)};
}

Outcome figure_orderings() {
  const fs::path dir = fs::temp_directory_path() / "wl1_acceptance_figures";
  fs::remove_all(dir);
  emit_figures(dir);
  std::vector<std::string> h;
  int violations = 0, rows_checked = 0;
  for (const char* name : {"fig1a", "fig1b", "fig1c", "fig1b_prime", "fig1c_prime"}) {
    const auto rows = read_table(dir / (std::string(name) + ".csv"), h);
    const auto co = col(h, "omega"), ca = col(h, "alpha"), ct = col(h, "delta_t_omega");
    for (const auto& r : rows) {
      if (r[ca] < 0.5) continue;
      // delta_t^1 is the omega = 1 row with the same alpha.
      double unweighted = NAN;
      for (const auto& s : rows)
        if (s[ca] == r[ca] && s[co] == 1.0) unweighted = s[ct];
      ++rows_checked;
      violations += !(r[ct] >= unweighted);
    }
  }
  for (const char* name : {"fig2d", "fig2e", "fig2f"}) {
    const auto rows = read_table(dir / (std::string(name) + ".csv"), h);
    const auto ct = col(h, "delta_t_omega"), ca = col(h, "delta_a_omega");
    const auto d0 = col(h, "D0"), d1 = col(h, "D1"), c0 = col(h, "C0pp"), c1 = col(h, "C1pp");
    for (const auto& r : rows) {
      ++rows_checked;
      violations += !(r[ct] >= r[ca]);
      if (std::isfinite(r[d0]) && std::isfinite(r[c0])) violations += !(r[d0] <= r[c0]);
      if (std::isfinite(r[d1]) && std::isfinite(r[c1])) violations += !(r[d1] <= r[c1]);
    }
  }
  return {violations == 0, fmt("%d rows, %d ordering violations", rows_checked, violations)};
}

Outcome ric_oracle() {
  double worst = 0.0;
  int mc_violations = 0;
  for (unsigned seed = 0; seed < 20; ++seed) {
    std::mt19937 g(seed);
    std::normal_distribution<double> nd;
    Matrix A(8, 16);
    oracle::Dense D(8, std::vector<double>(16));
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 16; ++j) D[i][j] = A(i, j) = nd(g) / std::sqrt(8.0);
    for (int k = 1; k <= 3; ++k) {
      const double exact = exact_ric(A, k).delta;
      worst = std::max(worst, std::abs(exact - oracle::brute_ric(D, k)));
      for (std::uint64_t trials : {10, 100, 1000}) {
        mc_violations += mc_ric_lower_bound(A, k, trials, seed).delta > exact;
      }
    }
  }
  return {worst <= 1e-10 && mc_violations == 0,
          fmt("60 (matrix, k) pairs, worst |exact - brute| %.2e, %d Monte Carlo values above exact", worst,
              mc_violations)};
}

Outcome certified_bounds() {
  ExperimentConfig cfg;
  cfg.n = 10;
  cfg.N = 14;
  cfg.k = 1;
  cfg.omegas = {0.0, 0.5};
  cfg.alphas = {1.0};
  cfg.trials = 1000;
  cfg.seed = 2024;
  cfg.noise.eps = 0.01;
  const auto res = run_certified_bound_check(cfg);
  double min_margin = INFINITY;
  for (const auto& r : res.records) {
    audit.add(r.status, r.feas_violation, r.gap, r.objective);
    if (r.certified) min_margin = std::min(min_margin, r.margin);
  }
  const bool ok = res.certified_l2 >= 100 && res.certified_ds >= 100 && res.violations == 0;
  return {ok, fmt("certified trials l2 %llu, ds %llu; %llu violations; smallest margin %.3g",
                  static_cast<unsigned long long>(res.certified_l2),
                  static_cast<unsigned long long>(res.certified_ds),
                  static_cast<unsigned long long>(res.violations), min_margin)};
}

Outcome monte_carlo() {
  std::string detail;
  bool ok = true;
  for (NoiseSet kind : {NoiseSet::L2Ball, NoiseSet::DantzigBox}) {
    ExperimentConfig cfg;
    cfg.n = 64;
    cfg.N = 128;
    cfg.k = 8;
    cfg.omegas = {0.5};
    cfg.alphas = {0.9};
    cfg.rho = 1.0;
    cfg.trials = 100;
    cfg.noise.kind = kind;
    const auto res = run_recovery_experiment(cfg);
    std::size_t exact = 0;
    for (const auto& r : res.records) {
      audit.add(r.status, r.feas_violation, r.gap, r.objective);
      exact += r.status == SolveStatus::Optimal && r.error <= 1e-6;
    }
    ok = ok && exact >= 95;
    detail += fmt("%s %zu/100 exact; ", to_string(kind), exact);
  }
  detail.resize(detail.size() - 2);
  return {ok, detail};
}

Outcome sharpness() {
  const double t = 4.0 / 3.0, eps = 0.5;
  const auto ce = construct_counterexample(12, t, 1.0, 0.0, 0.0, eps);
  const bool m_ok = ce.m_prime == 12.0 && ce.m == 11;
  const double x1 = std::abs(ce.x1.norm() - 1.0);
  const double kernel = (ce.A * (ce.x0 - ce.eta0)).norm();
  const auto ric = verify_ric_bound(ce, eps);
  const double bound = std::sqrt((t - 1) / t) + eps + 1e-10;
  const auto rep = demonstrate_failure(ce, NoiseSet::L2Ball);
  audit.add(rep.noiseless.status, rep.noiseless.feas_violation, rep.noiseless.gap, rep.noiseless.objective);
  for (const auto& r : rep.noisy) audit.add(r.status, r.feas_violation, r.gap, r.objective);
  const bool ok = m_ok && x1 <= 1e-12 && kernel <= 1e-10 && ric.delta <= bound &&
                  rep.noiseless.status == SolveStatus::Optimal &&
                  rep.noiseless.objective <= rep.eta0_norm + 1e-8 && rep.noiseless.error >= 0.1;
  return {ok, fmt("m' = %g, m = %lld, | ||x1|| - 1 | = %.1e, ||A(x0 - eta0)|| = %.1e, delta_16 = %.6f <= %.6f, "
                  "||x_hat||_w = %.6f vs ||eta0||_w = %.6f, error %.4f",
                  ce.m_prime, static_cast<long long>(ce.m), x1, kernel, ric.delta, bound,
                  rep.noiseless.objective, rep.eta0_norm, rep.noiseless.error)};
}

Outcome decomposition_suites() {
  std::mt19937 g(31337);
  std::uniform_real_distribution<double> u;
  int bad_dec = 0, bad_pow = 0;
  for (int rep = 0; rep < 500; ++rep) {
    const Index N = 2 + static_cast<Index>(u(g) * 49);
    const Index k = 1 + static_cast<Index>(u(g) * N);
    const double alpha = 0.05 + 5 * u(g);
    Vector v(N);
    for (Index i = 0; i < N; ++i) v[i] = (u(g) < 0.3 ? 0.0 : (u(g) < 0.5 ? -1 : 1) * alpha * u(g));
    if (v.isZero()) v[0] = alpha;
    const double cap = static_cast<double>(k) * alpha * (u(g) < 0.3 ? 1.0 : u(g));
    if (v.lpNorm<1>() > cap) v *= cap / v.lpNorm<1>();
    bad_dec += !verify_decomposition(v, sparse_decompose(v, alpha, k), alpha, k).valid;
  }
  for (int rep = 0; rep < 10000; ++rep) {
    const Index m = 2 + static_cast<Index>(u(g) * 29);
    const Index k = 1 + static_cast<Index>(u(g) * (m - 1));
    Vector a(m);
    for (Index i = 0; i < m; ++i) a[i] = u(g) < 0.1 ? 0.0 : u(g);
    std::sort(a.begin(), a.end(), std::greater<>());
    const double gap = a.tail(m - k).sum() - a.head(k).sum();
    const double lambda = std::max(0.0, gap) + (u(g) < 0.5 ? 0.0 : u(g));
    bad_pow += !shifted_power_inequality(a, k, lambda, 1 + 3 * u(g)).holds;
  }
  return {bad_dec == 0 && bad_pow == 0,
          fmt("500 decompositions with %d invalid, 10000 power inequalities with %d failures", bad_dec, bad_pow)};
}

Outcome certificates() {
  return {audit.optimal > 0 && audit.bad == 0,
          fmt("%zu Optimal reports, %zu out of tolerance; worst feasibility %.2e, worst relative gap %.2e",
              audit.optimal, audit.bad, audit.worst_feas, audit.worst_gap)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"threshold values", thresholds},
      {"reductions to the unweighted constants", reductions},
      {"figure orderings", figure_orderings},
      {"exact RIC oracle equivalence", ric_oracle},
      {"certified bound check", certified_bounds},
      {"Monte Carlo recovery", monte_carlo},
      {"sharpness demonstration", sharpness},
      {"decomposition and power inequality", decomposition_suites},
      {"solver certificates", certificates},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %zu %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str(),
                secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed ? 1 : 0;
}
