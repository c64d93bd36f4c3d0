#include "wl1/sharpness.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wl1/bounds.hpp"
#include "wl1/errors.hpp"
#include "wl1/rng.hpp"

namespace wl1 {

namespace {

Matrix projection_map(const Vector& x1, double t, double gamma) {
  const Index N = x1.size();
  return counterexample_scale(t, gamma) * (Matrix::Identity(N, N) - x1 * x1.transpose());
}

void check_invariants(const Counterexample& ce) {
  const double x1n = ce.x1.norm();
  if (std::abs(x1n - 1.0) > 1e-12) throw DomainError("construction: ||x1|| = " + format_double(x1n));
  if ((ce.A * ce.x1).norm() > 1e-12) throw DomainError("construction: A x1 != 0");
  if ((ce.A * (ce.x0 - ce.eta0)).norm() > 1e-10) throw DomainError("construction: A x0 != A eta0");
  if (!(static_cast<double>(ce.m) < ce.m_prime && ce.m_prime <= static_cast<double>(ce.m) + 1.0)) {
    throw DomainError("construction: m is not the largest integer below m'");
  }
  const WeightVector w = ce.weights();
  const double nx = weighted_l1_norm(ce.x0, w);
  const double ne = weighted_l1_norm(ce.eta0, w);
  if (!(ne < nx)) {
    throw DomainError("weighted norm ordering fails: ||eta0||_w = " + format_double(ne) +
                      " is not below ||x0||_w = " + format_double(nx));
  }
}

}  // namespace

double minimal_t(double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ParameterError("gamma must lie in (0, 1]");
  const double s = 1.0 - std::sqrt(1.0 - gamma * gamma);
  return 1.0 + s * s / (gamma * gamma + 2.0 * s);
}

double counterexample_scale(double t, double gamma) {
  return std::sqrt(1.0 + std::sqrt((t - 1.0) / (t - 1.0 + gamma * gamma)));
}

Counterexample construct_counterexample(Index k, double t, double omega, double rho, double alpha,
                                        double epsilon, std::optional<Index> N_opt) {
  if (k < 1) throw ParameterError("k must be positive");
  if (!(epsilon > 0.0)) throw ParameterError("epsilon must be positive");
  const auto [d, a] = sparsity_d(omega, rho, alpha);
  (void)a;
  if (std::abs(d - 1.0) > 1e-12) {
    throw UnsupportedGeometry("the counterexample needs d = 1, got d = " + format_double(d));
  }
  const double gamma = gamma_factor(omega, rho, alpha);
  if (!(gamma > 0.0)) throw UnsupportedGeometry("the counterexample needs gamma > 0");
  const double kd = static_cast<double>(k);
  if (t < minimal_t(gamma) * (1.0 - 1e-12)) {
    throw ParameterError("t = " + format_double(t) + " is below the minimal value " +
                         format_double(minimal_t(gamma)));
  }
  if (kd < 6.0 / epsilon * (1.0 - 1e-12)) throw ParameterError("k must be at least 6 / epsilon");

  const Index rk = static_cast<Index>(integral_count(rho * kd, "rho k"));
  const Index ark = static_cast<Index>(integral_count(alpha * rho * kd, "alpha rho k"));
  const Index head = k - ark;
  if (head < 0) throw ParameterError("alpha rho k exceeds k");

  const double g2 = gamma * gamma;
  double m_prime = (1.0 + std::sqrt(1.0 - g2)) / g2 * (t - 1.0 + std::sqrt((t - 1.0) * (t - 1.0 + g2))) * kd;
  const double r = std::round(m_prime);
  if (std::abs(m_prime - r) <= 1e-9 * std::max(1.0, m_prime)) m_prime = r;
  const Index m = m_prime == std::floor(m_prime) ? static_cast<Index>(m_prime) - 1
                                                   : static_cast<Index>(std::floor(m_prime));

  const Index layout = k + std::max(m, rk);
  const Index N = N_opt ? *N_opt : std::max(layout, static_cast<Index>(std::ceil(kd + m_prime - 1e-9)));
  if (N < layout) throw ParameterError("N must be at least " + std::to_string(layout));

  Counterexample ce;
  ce.m_prime = m_prime;
  ce.m = m;
  ce.params = {k, t, omega, rho, alpha, gamma, epsilon};

  const double small = kd / m_prime;
  const double scale = std::sqrt(kd + static_cast<double>(m) * kd * kd / (m_prime * m_prime));
  ce.x0 = Vector::Zero(N);
  ce.eta0 = Vector::Zero(N);
  ce.x0.segment(0, head).setOnes();
  ce.x0.segment(head + rk, ark).setOnes();
  if (m > rk) {
    ce.eta0.segment(head, rk).setConstant(small);
    ce.eta0.segment(head + rk + ark, m - rk).setConstant(small);
  } else {
    ce.eta0.segment(head, m).setConstant(small);
  }
  ce.x1 = (ce.x0 - ce.eta0) / scale;

  std::vector<Index> tt;
  for (Index i = head + ark; i < head + rk + ark; ++i) tt.push_back(i);  // last (rk - ark) of the middle block, then the ones block
  ce.T_tilde = IndexSet(std::move(tt));
  ce.A = projection_map(ce.x1, t, gamma);
  check_invariants(ce);
  return ce;
}

RicBoundCheck verify_ric_bound(const Counterexample& ce, double epsilon, const RicOptions& opts) {
  const auto& p = ce.params;
  RicBoundCheck r;
  r.ric = exact_ric(ce.A, p.t * static_cast<double>(p.k), opts);
  r.delta = r.ric.delta;
  r.bound = std::sqrt((p.t - 1.0) / (p.t - 1.0 + p.gamma * p.gamma)) + epsilon;
  r.ok = r.delta <= r.bound + 1e-10;
  return r;
}

FailureReport demonstrate_failure(const Counterexample& ce, NoiseSet kind, const SolverOptions& opts) {
  if (kind != NoiseSet::L2Ball) {
    throw ParameterError("the failure demonstration covers the l2 noise set and the noiseless case only");
  }
  opts.validate();
  FailureReport rep;
  const IndexSet T0 = support_of(ce.x0);
  const SupportEstimate est(ce.T_tilde, T0, ce.params.k);
  rep.rho = est.rho();
  rep.alpha = est.alpha();
  const WeightVector w = ce.weights();
  rep.x0_norm = weighted_l1_norm(ce.x0, w);
  rep.eta0_norm = weighted_l1_norm(ce.eta0, w);

  auto run = [&](const Vector& z) {
    const ProblemInstance inst(ce.A, ce.A * ce.x0 + z, NoiseSet::L2Ball, z.norm());
    const auto sol = solve_weighted_bp(inst, w, opts);
    FailureRun fr;
    fr.noise_norm = z.norm();
    fr.x_hat = sol.x_hat;
    fr.error = (sol.x_hat - ce.x0).norm();
    fr.objective = sol.objective;
    fr.status = sol.status;
    fr.gap = sol.certificate.gap;
    fr.feas_violation = sol.feas_violation;
    return fr;
  };

  rep.noiseless = run(Vector::Zero(ce.N()));
  rep.objective_ok = rep.noiseless.objective <= rep.eta0_norm + opts.opt_tol &&
                     rep.eta0_norm + opts.opt_tol < rep.x0_norm;
  rep.recovery_failed = rep.noiseless.error >= 0.1;

  Philox rng(0, 0, stream::kNoise);
  Vector dir(ce.N());
  for (Index i = 0; i < dir.size(); ++i) dir[i] = rng.normal();
  dir.normalize();
  rep.min_noisy_error = std::numeric_limits<double>::infinity();
  for (double level : {1e-1, 1e-2, 1e-3}) {
    rep.noisy.push_back(run(level * dir));
    rep.min_noisy_error = std::min(rep.min_noisy_error, rep.noisy.back().error);
  }
  return rep;
}

Json counterexample_to_json(const Counterexample& ce) {
  const auto& p = ce.params;
  return Json{{"params",
               {{"k", p.k}, {"t", p.t}, {"omega", p.omega}, {"rho", p.rho}, {"alpha", p.alpha},
                {"gamma", p.gamma}, {"epsilon", p.epsilon}}},
              {"N", ce.N()},
              {"m_prime", ce.m_prime},
              {"m", ce.m},
              {"x0", signal_to_json(ce.x0)},
              {"eta0", signal_to_json(ce.eta0)},
              {"x1", signal_to_json(ce.x1)},
              {"T_tilde", index_set_to_json(ce.T_tilde)}};
}

Counterexample counterexample_from_json(const Json& j) {
  Counterexample ce;
  const auto& p = j.at("params");
  ce.params.k = p.at("k").get<Index>();
  ce.params.t = p.at("t").get<double>();
  ce.params.omega = p.at("omega").get<double>();
  ce.params.rho = p.at("rho").get<double>();
  ce.params.alpha = p.at("alpha").get<double>();
  ce.params.gamma = p.at("gamma").get<double>();
  ce.params.epsilon = p.at("epsilon").get<double>();
  ce.m_prime = j.at("m_prime").get<double>();
  ce.m = j.at("m").get<Index>();
  ce.x0 = signal_from_json(j.at("x0"));
  ce.eta0 = signal_from_json(j.at("eta0"));
  ce.x1 = signal_from_json(j.at("x1"));
  ce.T_tilde = index_set_from_json(j.at("T_tilde"));
  if (ce.x1.size() != ce.x0.size() || ce.eta0.size() != ce.x0.size()) {
    throw ParameterError("counterexample JSON: signal lengths differ");
  }
  ce.T_tilde.check_range(ce.N());
  ce.A = projection_map(ce.x1, ce.params.t, ce.params.gamma);
  check_invariants(ce);
  return ce;
}

Json failure_report_to_json(const FailureReport& r) {
  auto run_json = [](const FailureRun& fr) {
    return Json{{"noise_norm", fr.noise_norm},   {"error", fr.error},
                {"objective", fr.objective},     {"status", to_string(fr.status)},
                {"gap", fr.gap},                 {"feas_violation", fr.feas_violation},
                {"x_hat", signal_to_json(fr.x_hat)}};
  };
  Json noisy = Json::array();
  for (const auto& fr : r.noisy) noisy.push_back(run_json(fr));
  return Json{{"rho", r.rho},
              {"alpha", r.alpha},
              {"x0_weighted_norm", r.x0_norm},
              {"eta0_weighted_norm", r.eta0_norm},
              {"noiseless", run_json(r.noiseless)},
              {"noisy", noisy},
              {"objective_ok", r.objective_ok},
              {"recovery_failed", r.recovery_failed},
              {"min_noisy_error", r.min_noisy_error}};
}

}  // namespace wl1
