#include <cmath>

#include "doctest.h"
#include "wl1/errors.hpp"
#include "wl1/sharpness.hpp"

using namespace wl1;
using doctest::Approx;

TEST_CASE("minimal t") {
  CHECK(minimal_t(1.0) == Approx(4.0 / 3.0).epsilon(1e-15));
  CHECK(minimal_t(1e-6) == Approx(1.0).epsilon(1e-9));
  const long double g = 0.6L, s = 1 - std::sqrt(1 - g * g);
  CHECK(minimal_t(0.6) == Approx(static_cast<double>(1 + s * s / (g * g + 2 * s))).epsilon(1e-15));
  CHECK_THROWS_AS(minimal_t(0.0), ParameterError);
}

TEST_CASE("construction at gamma = 1, t = 4/3") {
  for (Index k : {6, 12}) {
    const auto ce = construct_counterexample(k, 4.0 / 3.0, 1.0, 0.0, 0.0, 6.0 / k);
    CHECK(ce.m_prime == static_cast<double>(k));
    CHECK(ce.m == k - 1);
    CHECK(ce.N() == 2 * k);
    CHECK(std::abs(ce.x1.norm() - 1) <= 1e-12);
    CHECK((ce.A * (ce.x0 - ce.eta0)).norm() <= 1e-10);
    CHECK(ce.eta0.lpNorm<1>() <= ce.m * k / ce.m_prime + 1e-12);
    CHECK(ce.eta0.lpNorm<1>() < ce.x0.lpNorm<1>());
    CHECK(ce.x0.lpNorm<1>() == static_cast<double>(k));
  }
}

TEST_CASE("construction with an accurate support estimate") {
  // alpha >= 1/2 keeps d = 1; omega < 1 makes gamma < 1.
  const double gamma = gamma_factor(0.95, 1, 0.75);
  REQUIRE(gamma < 1.0);
  const auto ce = construct_counterexample(12, 1.5, 0.95, 1.0, 0.75, 0.5);
  CHECK(ce.params.gamma == gamma);
  CHECK(ce.T_tilde.size() == 12);
  const auto stats = support_stats(support_of(ce.x0), ce.T_tilde, 12);
  CHECK(stats.rho == 1.0);
  CHECK(stats.alpha == 0.75);
  CHECK((ce.A * (ce.x0 - ce.eta0)).norm() <= 1e-10);
  CHECK(std::abs(ce.x1.norm() - 1) <= 1e-12);
  const auto w = ce.weights();
  CHECK(weighted_l1_norm(ce.eta0, w) < weighted_l1_norm(ce.x0, w));
  const auto rep = demonstrate_failure(ce, NoiseSet::L2Ball);
  CHECK(rep.recovery_failed);

  // With a heavier discount the correct part of T~ shrinks ||x0||_{1,w} below ||eta0||_{1,w}.
  CHECK_THROWS_AS(construct_counterexample(12, 1.5, 0.5, 1.0, 0.75, 0.5), DomainError);
  for (double omega : {0.0, 0.3, 0.5}) {
    const double g = gamma_factor(omega, 1, 0.75);
    CHECK_THROWS_AS(construct_counterexample(12, std::max(1.5, minimal_t(g)), omega, 1.0, 0.75, 0.5),
                    DomainError);
  }
}

TEST_CASE("construction preconditions") {
  CHECK_THROWS_AS(construct_counterexample(12, 2.0, 0.5, 1.0, 0.3, 0.5), UnsupportedGeometry);
  CHECK_THROWS_AS(construct_counterexample(12, 1.2, 1.0, 0.0, 0.0, 0.5), ParameterError);
  CHECK_THROWS_AS(construct_counterexample(6, 4.0 / 3.0, 1.0, 0.0, 0.0, 0.5), ParameterError);
  CHECK_THROWS_AS(construct_counterexample(6, 4.0 / 3.0, 1.0, 0.0, 0.0, 1.0, Index{8}), ParameterError);
}

TEST_CASE("restricted isometry of the constructed map") {
  const auto ce = construct_counterexample(6, 4.0 / 3.0, 1.0, 0.0, 0.0, 1.0);
  const auto r = verify_ric_bound(ce, 1.0);
  CHECK(r.ok);
  CHECK(r.ric.mode == RicMode::Exact);
  CHECK(r.ric.k_eff == 8);
  CHECK(r.bound == Approx(0.5 + 1.0));
  // The instance sits at the edge of the sufficient condition.
  CHECK(r.delta >= std::sqrt(0.25) - 1e-9);
  const auto cert = certify_recovery(ce.A, 6, GeometryParams::make(4.0 / 3.0, 1, 0, 0));
  CHECK_FALSE(cert.certified);

  auto scaled = ce;
  scaled.A *= 2.0;
  CHECK_FALSE(verify_ric_bound(scaled, 1.0).ok);
}

TEST_CASE("weighted l1 fails on the constructed instance") {
  const auto ce = construct_counterexample(6, 4.0 / 3.0, 1.0, 0.0, 0.0, 1.0);
  const auto rep = demonstrate_failure(ce, NoiseSet::L2Ball);
  REQUIRE(rep.noiseless.status == SolveStatus::Optimal);
  CHECK(rep.noiseless.objective <= rep.eta0_norm + 1e-8);
  CHECK(rep.objective_ok);
  CHECK(rep.recovery_failed);
  CHECK(rep.noiseless.error >= 0.1);
  CHECK(rep.noisy.size() == 3);
  CHECK(rep.min_noisy_error >= 0.1);
  for (const auto& run : rep.noisy) {
    CHECK(run.status == SolveStatus::Optimal);
    CHECK(run.feas_violation <= 1e-8);
    CHECK(run.gap <= 1e-8 * (1 + run.objective));
  }
  CHECK_THROWS_AS(demonstrate_failure(ce, NoiseSet::DantzigBox), ParameterError);
}

TEST_CASE("json round trip rebuilds the map") {
  const auto ce = construct_counterexample(6, 4.0 / 3.0, 1.0, 0.0, 0.0, 1.0);
  const auto back = counterexample_from_json(counterexample_to_json(ce));
  CHECK(back.A == ce.A);
  CHECK(back.x0 == ce.x0);
  CHECK(back.eta0 == ce.eta0);
  CHECK(back.T_tilde == ce.T_tilde);
  CHECK(back.m == ce.m);

  auto j = counterexample_to_json(ce);
  j["x0"]["entries"][0] = 5.0;
  CHECK_THROWS_AS(counterexample_from_json(j), DomainError);
}
