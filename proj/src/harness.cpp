#include "wl1/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <thread>

#include "wl1/bounds.hpp"
#include "wl1/errors.hpp"
#include "wl1/rip.hpp"
#include "wl1/rng.hpp"

namespace wl1 {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Runs body(trial) for every trial on the configured number of threads.
template <class Body>
void for_each_trial(std::uint64_t trials, unsigned workers, Body&& body) {
  workers = std::max(1u, static_cast<unsigned>(std::min<std::uint64_t>(workers, trials)));
  if (workers == 1) {
    for (std::uint64_t t = 0; t < trials; ++t) body(t);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::uint64_t t; (t = next.fetch_add(1)) < trials;) body(t);
    });
  }
  for (auto& th : pool) th.join();
}

unsigned worker_count(const ExperimentConfig& cfg) {
  return cfg.workers ? cfg.workers : default_workers();
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ParameterError("cannot write " + path.string());
  return out;
}

const char* amplitude_name(Amplitude a) { return a == Amplitude::Sign ? "sign" : "gaussian"; }

Amplitude amplitude_from_string(const std::string& s) {
  if (s == "sign") return Amplitude::Sign;
  if (s == "gaussian") return Amplitude::Gaussian;
  throw ParameterError("unknown amplitude model '" + s + "' (expected sign or gaussian)");
}

void reject_unknown(const Json& j, std::initializer_list<const char*> keys, const char* where) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    bool known = false;
    for (const char* k : keys) known = known || key == k;
    if (!known) throw ParameterError(std::string(where) + ": unknown key '" + key + "'");
  }
}

double trial_seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

void ExperimentConfig::validate() const {
  if (k < 1 || n < k || N < n) throw ParameterError("config needs 1 <= k <= n <= N");
  if (trials < 1) throw ParameterError("trials must be >= 1");
  if (omegas.empty() || alphas.empty()) throw ParameterError("omega and alpha grids must be nonempty");
  for (double w : omegas) {
    if (!(w >= 0.0 && w <= 1.0)) throw ParameterError("omega grid values must lie in [0,1]");
  }
  if (!(rho >= 0.0)) throw ParameterError("rho must be >= 0");
  const double kd = static_cast<double>(k);
  const long long rk = integral_count(rho * kd, "rho k");
  if (rk > N) throw ParameterError("rho k exceeds N");
  for (double a : alphas) {
    if (!(a >= 0.0 && a <= 1.0)) throw ParameterError("alpha grid values must lie in [0,1]");
    const long long ark = std::llround(a * rho * kd);
    if (ark > k || rk - ark > N - k) throw ParameterError("support estimate cardinalities are infeasible");
  }
  if (!(tail_scale >= 0.0)) throw ParameterError("tail_scale must be >= 0");
  if (!(noise.eps >= 0.0) || !(noise.sigma >= 0.0)) throw ParameterError("noise levels must be >= 0");
  solver.validate();
}

Json config_to_json(const ExperimentConfig& cfg) {
  return Json{{"n", cfg.n},
              {"N", cfg.N},
              {"k", cfg.k},
              {"amplitude", amplitude_name(cfg.amplitude)},
              {"tail_scale", cfg.tail_scale},
              {"noise", {{"kind", to_string(cfg.noise.kind)}, {"eps", cfg.noise.eps}, {"sigma", cfg.noise.sigma}}},
              {"omegas", cfg.omegas},
              {"alphas", cfg.alphas},
              {"rho", cfg.rho},
              {"trials", cfg.trials},
              {"seed", cfg.seed},
              {"output", cfg.output},
              {"workers", cfg.workers},
              {"solver",
               {{"feas_tol", cfg.solver.feas_tol},
                {"opt_tol", cfg.solver.opt_tol},
                {"max_iters", cfg.solver.max_iters}}}};
}

ExperimentConfig config_from_json(const Json& j) {
  reject_unknown(j,
                 {"n", "N", "k", "amplitude", "tail_scale", "noise", "omegas", "alphas", "rho", "trials",
                  "seed", "output", "workers", "solver"},
                 "config");
  ExperimentConfig cfg;
  try {
    if (j.contains("n")) cfg.n = j.at("n").get<Index>();
    if (j.contains("N")) cfg.N = j.at("N").get<Index>();
    if (j.contains("k")) cfg.k = j.at("k").get<Index>();
    if (j.contains("amplitude")) cfg.amplitude = amplitude_from_string(j.at("amplitude").get<std::string>());
    if (j.contains("tail_scale")) cfg.tail_scale = j.at("tail_scale").get<double>();
    if (j.contains("noise")) {
      const auto& nz = j.at("noise");
      reject_unknown(nz, {"kind", "eps", "sigma"}, "config.noise");
      if (nz.contains("kind")) cfg.noise.kind = noise_set_from_string(nz.at("kind").get<std::string>());
      if (nz.contains("eps")) cfg.noise.eps = nz.at("eps").get<double>();
      if (nz.contains("sigma")) cfg.noise.sigma = nz.at("sigma").get<double>();
    }
    if (j.contains("omegas")) cfg.omegas = j.at("omegas").get<std::vector<double>>();
    if (j.contains("alphas")) cfg.alphas = j.at("alphas").get<std::vector<double>>();
    if (j.contains("rho")) cfg.rho = j.at("rho").get<double>();
    if (j.contains("trials")) cfg.trials = j.at("trials").get<std::uint64_t>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("output")) cfg.output = j.at("output").get<std::string>();
    if (j.contains("workers")) cfg.workers = j.at("workers").get<unsigned>();
    if (j.contains("solver")) {
      const auto& s = j.at("solver");
      reject_unknown(s, {"feas_tol", "opt_tol", "max_iters"}, "config.solver");
      if (s.contains("feas_tol")) cfg.solver.feas_tol = s.at("feas_tol").get<double>();
      if (s.contains("opt_tol")) cfg.solver.opt_tol = s.at("opt_tol").get<double>();
      if (s.contains("max_iters")) cfg.solver.max_iters = s.at("max_iters").get<int>();
    }
  } catch (const Json::exception& e) {
    throw ParameterError(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

GaussianInstance gen_gaussian_instance(const ExperimentConfig& cfg, std::uint64_t trial_id) {
  GaussianInstance g;
  const double scale = 1.0 / std::sqrt(static_cast<double>(cfg.n));
  Philox mat(cfg.seed, trial_id, stream::kMatrix);
  g.A.resize(cfg.n, cfg.N);
  for (Index j = 0; j < cfg.N; ++j) {
    for (Index i = 0; i < cfg.n; ++i) g.A(i, j) = scale * mat.normal();
  }
  Philox sup(cfg.seed, trial_id, stream::kSupport);
  const auto support = sup.sample(cfg.N, cfg.k);
  Philox amp(cfg.seed, trial_id, stream::kAmplitude);
  g.x = Vector::Zero(cfg.N);
  for (auto i : support) {
    if (cfg.amplitude == Amplitude::Sign) {
      g.x[i] = (amp() & 1u) ? 1.0 : -1.0;
    } else {
      double v = 0.0;
      while (v == 0.0) v = amp.normal();
      g.x[i] = v;
    }
  }
  if (cfg.tail_scale > 0.0) {
    std::size_t s = 0;
    for (Index i = 0; i < cfg.N; ++i) {
      if (s < support.size() && support[s] == i) {
        ++s;
        continue;
      }
      g.x[i] = cfg.tail_scale * amp.normal();
    }
  }
  g.T0 = best_k_support(g.x, cfg.k);
  return g;
}

SupportEstimate gen_support_estimate(const IndexSet& T0, double alpha, double rho, Index N,
                                     std::uint64_t seed, std::uint64_t trial_id) {
  const Index k = static_cast<Index>(T0.size());
  if (k < 1) throw ParameterError("reference support is empty");
  T0.check_range(N);
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ParameterError("alpha must lie in [0,1]");
  if (!(rho >= 0.0)) throw ParameterError("rho must be >= 0");
  const Index total = static_cast<Index>(integral_count(rho * static_cast<double>(k), "rho k"));
  const Index correct = static_cast<Index>(std::llround(alpha * static_cast<double>(total)));
  const Index wrong = total - correct;
  const IndexSet off = T0.complement(N);
  if (correct > k || wrong > static_cast<Index>(off.size())) {
    throw ParameterError("support estimate needs " + std::to_string(correct) + " indices inside and " +
                         std::to_string(wrong) + " outside the reference support");
  }
  Philox rng(seed, trial_id, stream::kEstimate);
  std::vector<Index> chosen;
  for (auto j : rng.sample(k, correct)) chosen.push_back(T0[static_cast<std::size_t>(j)]);
  for (auto j : rng.sample(static_cast<Index>(off.size()), wrong)) chosen.push_back(off[static_cast<std::size_t>(j)]);
  return SupportEstimate(IndexSet(std::move(chosen)), T0, k);
}

DrawnNoise draw_noise(const Matrix& A, const NoiseSpec& spec, std::uint64_t seed, std::uint64_t trial_id) {
  DrawnNoise d;
  d.z = Vector::Zero(A.rows());
  Philox rng(seed, trial_id, stream::kNoise);
  if (spec.sigma > 0.0) {
    for (Index i = 0; i < d.z.size(); ++i) d.z[i] = spec.sigma * rng.normal();
    d.radius = spec.kind == NoiseSet::L2Ball ? gaussian_noise_radius(RadiusKind::L2, A.rows(), spec.sigma)
                                             : gaussian_noise_radius(RadiusKind::DS, A.cols(), spec.sigma);
    return d;
  }
  if (spec.eps > 0.0) {
    for (Index i = 0; i < d.z.size(); ++i) d.z[i] = rng.normal();
    const double size = spec.kind == NoiseSet::L2Ball ? d.z.norm()
                                                      : (A.transpose() * d.z).lpNorm<Eigen::Infinity>();
    if (size > 0.0) d.z *= 0.99 * spec.eps / size;
    d.radius = spec.eps;
  }
  return d;
}

ExperimentResult run_recovery_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::size_t cells = cfg.omegas.size() * cfg.alphas.size();
  std::vector<std::vector<TrialRecord>> per_trial(cfg.trials);
  for_each_trial(cfg.trials, worker_count(cfg), [&](std::uint64_t trial) {
    const auto inst = gen_gaussian_instance(cfg, trial);
    const auto noise = draw_noise(inst.A, cfg.noise, cfg.seed, trial);
    const ProblemInstance problem(inst.A, inst.A * inst.x + noise.z, cfg.noise.kind, noise.radius);
    std::vector<SupportEstimate> estimates;
    for (std::size_t ai = 0; ai < cfg.alphas.size(); ++ai) {
      estimates.push_back(gen_support_estimate(inst.T0, cfg.alphas[ai], cfg.rho, cfg.N, cfg.seed,
                                               trial * cfg.alphas.size() + ai));
    }
    auto& out = per_trial[trial];
    out.reserve(cells);
    const double tol = 1e-6 * std::max(1.0, inst.x.norm());
    for (double omega : cfg.omegas) {
      for (std::size_t ai = 0; ai < cfg.alphas.size(); ++ai) {
        const auto start = std::chrono::steady_clock::now();
        TrialRecord r;
        r.trial = trial;
        r.omega = omega;
        r.alpha = cfg.alphas[ai];
        r.bound_rhs = kNaN;
        r.margin = kNaN;
        try {
          const auto w = build_weights(estimates[ai].indices(), omega, cfg.N);
          const auto rep = solve_weighted(problem, w, cfg.solver);
          r.error = (rep.x_hat - inst.x).norm();
          r.status = rep.status;
          r.feas_violation = rep.feas_violation;
          r.gap = rep.certificate.gap;
          r.objective = rep.objective;
          r.success = r.status == SolveStatus::Optimal && r.error <= tol;
        } catch (const std::exception&) {
          r.error = kNaN;
          r.status = SolveStatus::MaxIters;
          r.success = false;
        }
        r.wall_seconds = trial_seconds(start);
        out.push_back(r);
      }
    }
  });

  ExperimentResult res;
  for (auto& v : per_trial) res.records.insert(res.records.end(), v.begin(), v.end());
  res.cells = aggregate(res.records);
  if (!cfg.output.empty()) {
    const std::filesystem::path dir(cfg.output);
    std::filesystem::create_directories(dir);
    auto csv = open_output(dir / "trials.csv");
    write_trials_csv(csv, res.records);
    write_json(dir / "summary.json", summary_to_json(cfg, res.cells));
  }
  return res;
}

void write_trials_csv(std::ostream& os, const std::vector<TrialRecord>& records) {
  os << "trial,omega,alpha,error,success,status,bound_rhs,margin\n";
  for (const auto& r : records) {
    os << r.trial << ',' << format_double(r.omega) << ',' << format_double(r.alpha) << ','
       << format_double(r.error) << ',' << (r.success ? 1 : 0) << ',' << to_string(r.status) << ','
       << format_double(r.bound_rhs) << ',' << format_double(r.margin) << '\n';
  }
}

std::vector<CellSummary> aggregate(const std::vector<TrialRecord>& records) {
  std::vector<CellSummary> cells;
  std::map<std::pair<double, double>, std::size_t> index;
  std::vector<double> error_sums;
  for (const auto& r : records) {
    const auto key = std::make_pair(r.omega, r.alpha);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, cells.size()).first;
      cells.push_back({r.omega, r.alpha, 0, 0, 0.0, 0.0});
      error_sums.push_back(0.0);
    }
    auto& c = cells[it->second];
    ++c.trials;
    c.successes += r.success ? 1 : 0;
    error_sums[it->second] += r.error;
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    cells[i].success_rate = static_cast<double>(cells[i].successes) / static_cast<double>(cells[i].trials);
    cells[i].mean_error = error_sums[i] / static_cast<double>(cells[i].trials);
  }
  return cells;
}

Json summary_to_json(const ExperimentConfig& cfg, const std::vector<CellSummary>& cells) {
  Json arr = Json::array();
  for (const auto& c : cells) {
    arr.push_back({{"omega", c.omega},
                   {"alpha", c.alpha},
                   {"trials", c.trials},
                   {"successes", c.successes},
                   {"success_rate", c.success_rate},
                   {"mean_error", c.mean_error}});
  }
  return Json{{"config", config_to_json(cfg)}, {"cells", arr}};
}

BoundCheckResult run_certified_bound_check(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.N > 14 || cfg.n > 10) throw ParameterError("the certified bound check needs N <= 14 and n <= 10");
  const Index k = cfg.k;
  const double kd = static_cast<double>(k);
  std::vector<std::vector<BoundCheckRecord>> per_trial(cfg.trials);

  for_each_trial(cfg.trials, worker_count(cfg), [&](std::uint64_t trial) {
    const auto inst = gen_gaussian_instance(cfg, trial);
    std::map<Index, double> delta;  // exact delta by order
    for (Index j = k + 1; j <= cfg.n; ++j) delta[j] = exact_ric(inst.A, static_cast<double>(j)).delta;

    std::vector<SupportEstimate> estimates;
    for (std::size_t ai = 0; ai < cfg.alphas.size(); ++ai) {
      estimates.push_back(gen_support_estimate(inst.T0, cfg.alphas[ai], cfg.rho, cfg.N, cfg.seed,
                                               trial * cfg.alphas.size() + ai));
    }
    auto& out = per_trial[trial];
    for (NoiseSet kind : {NoiseSet::L2Ball, NoiseSet::DantzigBox}) {
      NoiseSpec spec = cfg.noise;
      spec.kind = kind;
      const auto noise = draw_noise(inst.A, spec, cfg.seed, trial);
      const ProblemInstance problem(inst.A, inst.A * inst.x + noise.z, kind, noise.radius);
      for (double omega : cfg.omegas) {
        for (std::size_t ai = 0; ai < cfg.alphas.size(); ++ai) {
          const auto& est = estimates[ai];
          BoundCheckRecord r;
          r.trial = trial;
          r.omega = omega;
          r.alpha = est.alpha();
          r.kind = kind;
          r.t = r.delta = r.threshold = r.bound_rhs = r.margin = kNaN;
          const auto w = build_weights(est.indices(), omega, cfg.N);
          const auto rep = solve_weighted(problem, w, cfg.solver);
          r.error = (rep.x_hat - inst.x).norm();
          r.status = rep.status;
          r.feas_violation = rep.feas_violation;
          r.gap = rep.certificate.gap;
          r.objective = rep.objective;
          for (const auto& [order, dlt] : delta) {
            const auto g = GeometryParams::make(static_cast<double>(order) / kd, omega, est.rho(), est.alpha());
            if (!(g.t > g.d)) continue;
            const double thr = ric_threshold(g);
            if (!(dlt < thr)) continue;
            const double rhs = error_bound_rhs(g, dlt, k, noise.radius, inst.x, inst.T0, est.indices(), kind);
            ++r.certified_cells;
            r.violation = r.violation || r.error > rhs + 1e-6;
            if (!r.certified || rhs < r.bound_rhs) {
              r.certified = true;
              r.t = g.t;
              r.delta = dlt;
              r.threshold = thr;
              r.bound_rhs = rhs;
              r.margin = rhs - r.error;
            }
          }
          out.push_back(r);
        }
      }
    }
  });

  BoundCheckResult res;
  std::set<std::uint64_t> l2_trials, ds_trials;
  for (auto& v : per_trial) {
    for (const auto& r : v) {
      if (r.certified) (r.kind == NoiseSet::L2Ball ? l2_trials : ds_trials).insert(r.trial);
      res.violations += r.violation ? 1 : 0;
      res.records.push_back(r);
    }
  }
  res.certified_l2 = l2_trials.size();
  res.certified_ds = ds_trials.size();

  if (!cfg.output.empty()) {
    const std::filesystem::path dir(cfg.output);
    std::filesystem::create_directories(dir);
    auto csv = open_output(dir / "bound_check.csv");
    csv << "trial,omega,alpha,noise,certified,t,delta,threshold,error,bound_rhs,margin,status\n";
    for (const auto& r : res.records) {
      csv << r.trial << ',' << format_double(r.omega) << ',' << format_double(r.alpha) << ','
          << to_string(r.kind) << ',' << (r.certified ? 1 : 0) << ',' << format_double(r.t) << ','
          << format_double(r.delta) << ',' << format_double(r.threshold) << ',' << format_double(r.error)
          << ',' << format_double(r.bound_rhs) << ',' << format_double(r.margin) << ','
          << to_string(r.status) << '\n';
    }
    write_json(dir / "bound_check.json", Json{{"config", config_to_json(cfg)},
                                             {"certified_trials_l2", res.certified_l2},
                                             {"certified_trials_ds", res.certified_ds},
                                             {"violations", res.violations},
                                             {"records", res.records.size()}});
  }
  return res;
}

std::vector<std::filesystem::path> emit_figures(const std::filesystem::path& out_dir, int omega_steps) {
  std::filesystem::create_directories(out_dir);
  SweepSpec base;
  base.t = 4.0;
  base.rho = 1.0;
  base.alphas = {0.3, 0.5, 0.7, 0.9};
  base.omega_steps = omega_steps;

  SweepSpec low = base;
  low.delta = 0.1;
  SweepSpec high = base;
  high.delta = 0.6;
  SweepSpec cmp = base;
  cmp.delta = 0.1;
  cmp.comparison = SweepSpec::Comparison{3.0, 0.05, 0.1};

  const SweepTable t_low = figure_sweep(low);
  const SweepTable t_high = figure_sweep(high);
  const SweepTable t_cmp = figure_sweep(cmp);
  const std::vector<std::pair<std::string, const SweepTable*>> files{
      {"fig1a", &t_low},         {"fig1b", &t_low},  {"fig1c", &t_low},  {"fig1b_prime", &t_high},
      {"fig1c_prime", &t_high},  {"fig2d", &t_cmp},  {"fig2e", &t_cmp},  {"fig2f", &t_cmp}};
  std::vector<std::filesystem::path> written;
  for (const auto& [name, table] : files) {
    const auto path = out_dir / (name + ".csv");
    auto out = open_output(path);
    write_csv(out, *table);
    written.push_back(path);
  }
  return written;
}

}  // namespace wl1
