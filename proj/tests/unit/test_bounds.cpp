#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "wl1/bounds.hpp"
#include "wl1/errors.hpp"

using namespace wl1;
using doctest::Approx;

namespace {

double rel(double a, long double b) { return static_cast<double>(std::abs(a - b) / std::abs(b)); }

}  // namespace

TEST_CASE("gamma") {
  for (double rho : {0.0, 0.5, 1.0, 2.0})
    for (double alpha : {0.0, 0.3, 0.5, 1.0}) {
      if (1 + rho - 2 * alpha * rho < 0) continue;
      CHECK(gamma_factor(1.0, rho, alpha) == 1.0);
    }
  for (double omega : {0.0, 0.2, 0.7}) CHECK(gamma_factor(omega, 3.0, 0.5) == Approx(1.0).epsilon(1e-15));
  CHECK(gamma_factor(0.4, 1.0, 0.9) == Approx(0.4 + 0.6 * std::sqrt(0.2)).epsilon(1e-15));
  CHECK(gamma_factor(0.4, 1.0, 0.9) == Approx(0.668328).epsilon(1e-6));
  CHECK_THROWS_AS(gamma_factor(0.5, 3.0, 1.0), ParameterError);
  CHECK_THROWS_AS(gamma_factor(1.2, 1.0, 0.5), ParameterError);
}

TEST_CASE("sparsity d and a") {
  CHECK(sparsity_d(1.0, 1.0, 0.3).d == 1.0);
  auto s = sparsity_d(0.4, 1.0, 0.9);
  CHECK(s.a == Approx(0.9));
  CHECK(s.d == Approx(1.0));
  s = sparsity_d(0.0, 1.0, 0.3);
  CHECK(s.a == Approx(0.7));
  CHECK(s.d == Approx(1.4));
}

TEST_CASE("recovery threshold") {
  CHECK(ric_threshold(GeometryParams::make(4, 0.4, 1, 0.9)) == Approx(0.9330).epsilon(5e-5 / 0.933));
  CHECK(ric_threshold(GeometryParams::make(4, 1, 1, 0.9)) == Approx(0.8660).epsilon(5e-5 / 0.866));
  CHECK(ric_threshold(GeometryParams::make(2, 1, 1, 0.2)) == Approx(std::sqrt(0.5)).epsilon(1e-15));
  CHECK_THROWS_AS(ric_threshold(GeometryParams::make(1.0, 0.5, 1, 0.3)), DomainError);
  CHECK_THROWS_AS(ric_threshold(GeometryParams::make(1.4, 0.0, 1, 0.3)), DomainError);
}

TEST_CASE("stability constants match a term-by-term transcription") {
  std::mt19937 gen(11);
  std::uniform_real_distribution<double> u;
  int checked = 0;
  while (checked < 500) {
    const double omega = u(gen) < 0.2 ? 1.0 : u(gen);
    const double rho = 2 * u(gen), alpha = u(gen), t = 1 + 6 * u(gen);
    if (1 + rho - 2 * alpha * rho < 0) continue;
    const auto g = GeometryParams::make(t, omega, rho, alpha);
    if (!(g.t > g.d)) continue;
    const double delta = 0.99 * u(gen) * ric_threshold(g);
    CHECK(rel(ric_threshold(g), oracle::threshold(t, omega, rho, alpha)) < 1e-13);
    const auto c = stability_constants_l2(g, delta);
    CHECK(rel(c.D0, oracle::D0(t, omega, rho, alpha, delta)) < 1e-11);
    CHECK(rel(c.D1, oracle::D1(t, omega, rho, alpha, delta)) < 1e-11);
    const Index k = 1 + checked % 9;
    const auto ds = stability_constants_ds(g, delta, k);
    const long long tk = static_cast<long long>(std::ceil(t * k - 1e-9));
    CHECK(rel(ds.D0, oracle::Dp0(t, omega, rho, alpha, delta, tk)) < 1e-11);
    CHECK(ds.D1 == c.D1);
    CHECK(c.D0 > 0);
    CHECK(c.D1 > 0);
    ++checked;
  }
}

TEST_CASE("stability constants reduce to the unweighted ones") {
  for (double t = 1.4; t <= 6.0; t += 0.23) {
    for (double frac : {0.0, 0.3, 0.6, 0.95}) {
      const double delta = frac * std::sqrt((t - 1) / t);
      const auto cz = cz_constants(t, delta, 5);
      const auto a = stability_constants_l2(GeometryParams::make(t, 1.0, 1.0, 0.8), delta);
      CHECK(a.D0 == Approx(cz.C0).epsilon(1e-12));
      CHECK(a.D1 == Approx(cz.C1).epsilon(1e-12));
      for (double omega : {0.0, 0.35, 0.8}) {
        const auto b = stability_constants_l2(GeometryParams::make(t, omega, 1.0, 0.5), delta);
        CHECK(b.D0 == Approx(cz.C0).epsilon(1e-12));
        CHECK(b.D1 == Approx(cz.C1).epsilon(1e-12));
      }
      if (std::abs(t * 5 - std::round(t * 5)) < 1e-9) {
        const auto ds = stability_constants_ds(GeometryParams::make(t, 1.0, 1.0, 0.8), delta, 5);
        CHECK(ds.D0 == Approx(cz.C0_ds).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("worked point t=4, omega=0.4, alpha=0.9, delta=0.1") {
  const auto c = stability_constants_l2(GeometryParams::make(4, 0.4, 1, 0.9), 0.1);
  CHECK(rel(c.D0, oracle::D0(4, 0.4, 1, 0.9, 0.1)) < 1e-13);
  CHECK(rel(c.D1, oracle::D1(4, 0.4, 1, 0.9, 0.1)) < 1e-13);
  CHECK(c.D0 < cz_constants(4, 0.1, 1).C0);
}

TEST_CASE("constants diverge at the threshold") {
  const auto g = GeometryParams::make(4, 0.4, 1, 0.9);
  CHECK_THROWS_AS(stability_constants_l2(g, ric_threshold(g)), DomainError);
  CHECK_THROWS_AS(stability_constants_ds(g, 0.99, 3), DomainError);
  CHECK_THROWS_AS(cz_constants(4, 0.9, 1), DomainError);
  CHECK_THROWS_AS(cz_constants(1, 0.0, 1), DomainError);
}

TEST_CASE("bracket rule") {
  CHECK(bracket_int(6.0) == 6);
  CHECK(bracket_int(5.7) == 6);
  CHECK(bracket_int(0.0) == 0);
  CHECK(bracket_int(1.9 * 3) == 6);
  CHECK(bracket_int(2.0 * 3) == 6);
  CHECK(bracket_int(4.0 / 3.0 * 12) == 16);
  const auto a = stability_constants_ds(GeometryParams::make(2.0, 1, 1, 0.5), 0.1, 3);
  const auto b = stability_constants_ds(GeometryParams::make(1.9, 1, 1, 0.5), 0.1, 3);
  CHECK(rel(a.D0, oracle::Dp0(2.0, 1, 1, 0.5, 0.1, 6)) < 1e-13);
  CHECK(rel(b.D0, oracle::Dp0(1.9, 1, 1, 0.5, 0.1, 6)) < 1e-13);
}

TEST_CASE("unweighted constants") {
  const auto c = cz_constants(2.0, 0.0, 1);
  CHECK(rel(c.C0, oracle::C0(2, 0)) < 1e-15);
  CHECK(c.C0 == Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(c.C1 == 1.0);
  CHECK(cz_constants(2.0, 1e-12, 1).C1 == Approx(1.0).epsilon(1e-5));
  for (double t : {1.5, 3.0, 7.0})
    for (double delta : {0.05, 0.2}) {
      const auto cc = cz_constants(t, delta, 4);
      CHECK(rel(cc.C0, oracle::C0(t, delta)) < 1e-13);
      CHECK(rel(cc.C1, oracle::C1(t, delta)) < 1e-13);
      CHECK(rel(cc.C0_ds, oracle::Cp0(t, delta, 4)) < 1e-13);
      CHECK(cc.C1_ds == cc.C1);
    }
}

TEST_CASE("comparison threshold and constants") {
  CHECK(fmsy_threshold(3, 1, 1, 0.5) == Approx(0.5).epsilon(1e-15));
  const double g = gamma_factor(0.3, 1, 0.9);
  CHECK(fmsy_threshold(g * g, 0.3, 1, 0.9) == Approx(0.0).epsilon(1e-15));
  for (int i = 0; i <= 20; ++i) {
    const double omega = i / 20.0;
    for (double alpha : {0.3, 0.5, 0.7, 0.9}) {
      CHECK(ric_threshold(GeometryParams::make(4, omega, 1, alpha)) > fmsy_threshold(3, omega, 1, alpha));
    }
  }

  const auto c = fmsy_constants(4, 0, 0, 1, 1, 0.5);
  CHECK(c.C0pp == Approx(3.0).epsilon(1e-15));
  const double g1 = gamma_factor(0.6, 1, 0.7);
  const auto d = fmsy_constants(3, 0.05, 0.1, 0.6, 1, 0.7);
  CHECK(rel(d.C0pp, oracle::Cpp0(3, 0.05, 0.1, g1)) < 1e-13);
  CHECK(rel(d.C1pp, oracle::Cpp1(3, 0.05, 0.1, g1)) < 1e-13);
  // gamma = 0 at omega = 0, alpha = 1, rho = 1.
  CHECK(fmsy_constants(3, 0.05, 0.1, 0, 1, 1).C0pp == Approx(1 / std::sqrt(0.9)).epsilon(1e-14));
  CHECK_THROWS_AS(fmsy_constants(1, 0.5, 0.5, 1, 1, 0.5), DomainError);
}

TEST_CASE("2k threshold") {
  CHECK(dirac_2k_threshold(1, 1, 0.5) == Approx(1 / (std::sqrt(2.0) + 1)).epsilon(1e-15));
  CHECK(dirac_2k_threshold(1, 1, 0.5) == Approx(0.41421).epsilon(1e-5));
  CHECK(dirac_2k_threshold(0, 1, 1) == 1.0);
  for (int i = 0; i <= 20; ++i)
    for (double alpha : {0.55, 0.7, 0.9, 0.99}) {
      const double omega = i / 20.0;
      CHECK(ric_threshold(GeometryParams::make(2, omega, 1, alpha)) > dirac_2k_threshold(omega, 1, alpha));
    }
}

TEST_CASE("gaussian noise radii") {
  const long double l2 = std::sqrt(100.0L + 2 * std::sqrt(100.0L * std::log(100.0L)));
  CHECK(rel(gaussian_noise_radius(RadiusKind::L2, 100, 1.0), l2) < 1e-15);
  CHECK(rel(gaussian_noise_radius(RadiusKind::DS, 3, 2.0), 2 * std::sqrt(2 * std::log(3.0L))) < 1e-15);
  CHECK(gaussian_noise_radius(RadiusKind::L2, 50, 0.0) == 0.0);
  CHECK(gaussian_noise_radius(RadiusKind::DS, 50, 0.0) == 0.0);
  CHECK_THROWS_AS(gaussian_noise_radius(RadiusKind::L2, 1, 1.0), ParameterError);
}

TEST_CASE("error bound right-hand side") {
  Vector x = Vector::Zero(10);
  x[1] = 2;
  x[4] = -1;
  const IndexSet T0{1, 4};
  const auto g = GeometryParams::make(3, 0.5, 1, 0.5);
  CHECK(error_bound_rhs(g, 0.2, 2, 0.0, x, T0, IndexSet{1, 7}, NoiseSet::L2Ball) == 0.0);
  CHECK(error_bound_rhs(g, 0.2, 2, 0.0, x, T0, IndexSet{1, 7}, NoiseSet::DantzigBox) == 0.0);

  std::mt19937 gen(5);
  std::normal_distribution<double> nd;
  Vector xc(10);
  for (int i = 0; i < 10; ++i) xc[i] = nd(gen) / (1 + i * i);
  const IndexSet T0c = best_k_support(xc, 2);
  const auto g1 = GeometryParams::make(3, 1.0, 1, 0.5);
  const double tail = best_k_term(xc, 2).tail.lpNorm<1>();
  const auto cz = cz_constants(3, 0.2, 2);
  CHECK(error_bound_rhs(g1, 0.2, 2, 0.1, xc, T0c, IndexSet{0, 5}, NoiseSet::L2Ball) ==
        Approx(cz.C0 * 0.2 + cz.C1 * 2 * tail / std::sqrt(2.0)).epsilon(1e-12));

  double prev = -1;
  for (double eps : {0.0, 0.01, 0.1, 1.0}) {
    const double r = error_bound_rhs(g, 0.2, 2, eps, xc, T0c, IndexSet{0, 5}, NoiseSet::L2Ball);
    CHECK(r >= prev);
    prev = r;
  }
}

TEST_CASE("figure sweeps") {
  SweepSpec spec;
  spec.delta = 0.1;
  spec.alphas = {0.5, 0.7, 0.9};
  const auto t = figure_sweep(spec);
  CHECK(t.rows.size() == 303);
  const auto c_omega = t.column("omega"), c_alpha = t.column("alpha"), c_thr = t.column("delta_t_omega");
  for (const auto& row : t.rows) {
    CHECK(row[c_thr] >= std::sqrt(0.75) - 1e-15);
    if (std::abs(row[c_omega] - 0.4) < 1e-12 && row[c_alpha] == 0.9) CHECK(row[c_thr] == Approx(0.9330).epsilon(5e-5));
  }

  SweepSpec high = spec;
  high.delta = 0.6;
  const auto th = figure_sweep(high);
  const auto c_d1 = th.column("D1");
  for (int i = 0; i < 101; ++i) {
    const double d05 = th.rows[i][c_d1], d07 = th.rows[101 + i][c_d1], d09 = th.rows[202 + i][c_d1];
    if (std::isinf(d05) || std::isinf(d07) || std::isinf(d09)) continue;
    if (th.rows[i][c_omega] < 1.0) {
      CHECK(d07 < d05);
      CHECK(d09 < d07);
    }
  }

  SweepSpec one = spec;
  one.omega_steps = 1;
  one.omega_min = 0.25;
  one.alphas = {0.7};
  one.comparison = SweepSpec::Comparison{};
  const auto t1 = figure_sweep(one);
  REQUIRE(t1.rows.size() == 1);
  const auto g = GeometryParams::make(4, 0.25, 1, 0.7);
  const auto c = stability_constants_l2(g, 0.1);
  const auto f = fmsy_constants(3, 0.05, 0.1, 0.25, 1, 0.7);
  CHECK(t1.rows[0][t1.column("delta_t_omega")] == ric_threshold(g));
  CHECK(t1.rows[0][t1.column("D0")] == c.D0);
  CHECK(t1.rows[0][t1.column("D1")] == c.D1);
  CHECK(t1.rows[0][t1.column("delta_a_omega")] == fmsy_threshold(3, 0.25, 1, 0.7));
  CHECK(t1.rows[0][t1.column("C0pp")] == f.C0pp);
  CHECK(t1.rows[0][t1.column("C1pp")] == f.C1pp);

  std::ostringstream os;
  write_csv(os, t1);
  CHECK(os.str().rfind("omega,alpha,delta_t_omega,D0,D1,delta_a_omega,C0pp,C1pp\n", 0) == 0);
}
