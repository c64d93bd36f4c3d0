#include <cmath>
#include <random>

#include "doctest.h"
#include "wl1/conic.hpp"

using namespace wl1;
using namespace wl1::conic;
using doctest::Approx;

TEST_CASE("linear program with a known vertex solution") {
  // min -x1 - x2  s.t. x1 + 2 x2 <= 4, 3 x1 + x2 <= 6, x >= 0  ->  x = (1.6, 1.2)
  Problem p;
  p.c = Vector::Constant(2, -1.0);
  p.G.resize(4, 2);
  p.G << 1, 2, 3, 1, -1, 0, 0, -1;
  p.h.resize(4);
  p.h << 4, 6, 0, 0;
  p.cones.lp = 4;
  const auto r = solve(p);
  REQUIRE(r.status == Status::Optimal);
  CHECK(r.x[0] == Approx(1.6).epsilon(1e-9));
  CHECK(r.x[1] == Approx(1.2).epsilon(1e-9));
  CHECK(r.primal_obj == Approx(-2.8).epsilon(1e-9));
  CHECK(r.dual_obj == Approx(-2.8).epsilon(1e-9));
  CHECK(r.z.minCoeff() >= 0.0);
}

TEST_CASE("second-order cone projection") {
  // min ||x - p||_2 as  min t  s.t. (t, x - p) in SOC  ->  x lies on the constraint sum x >= 3.
  Problem p;
  p.c = Vector::Zero(3);
  p.c[2] = 1.0;
  p.G = Matrix::Zero(4, 3);
  p.h = Vector::Zero(4);
  // -x1 - x2 <= -3
  p.G(0, 0) = -1;
  p.G(0, 1) = -1;
  p.h[0] = -3;
  // (t, x1 - 0, x2 - 0) in SOC: s = h - G v
  p.G(1, 2) = -1;
  p.G(2, 0) = -1;
  p.G(3, 1) = -1;
  p.cones.lp = 1;
  p.cones.soc = {3};
  const auto r = solve(p);
  REQUIRE(r.status == Status::Optimal);
  CHECK(r.x[0] == Approx(1.5).epsilon(1e-8));
  CHECK(r.x[1] == Approx(1.5).epsilon(1e-8));
  CHECK(r.x[2] == Approx(3 / std::sqrt(2.0)).epsilon(1e-8));
}

TEST_CASE("cone bookkeeping") {
  Cones k;
  k.lp = 3;
  k.soc = {4, 2};
  CHECK(k.dim() == 9);
  CHECK(k.degree() == 5);
}

TEST_CASE("Nesterov-Todd scaling maps z to the same point as s") {
  std::mt19937 gen(1);
  std::normal_distribution<double> nd;
  for (int rep = 0; rep < 100; ++rep) {
    const int m = 2 + rep % 5;
    Vector s(m), z(m);
    for (int i = 1; i < m; ++i) {
      s[i] = nd(gen);
      z[i] = nd(gen);
    }
    s[0] = s.tail(m - 1).norm() + 0.1 + std::abs(nd(gen));
    z[0] = z.tail(m - 1).norm() + 0.1 + std::abs(nd(gen));
    const auto W = SocScaling::compute(s, z);
    const Vector lhs = W.apply(z);
    const Vector rhs = W.apply_inverse(s);
    CHECK((lhs - rhs).norm() <= 1e-10 * (1 + lhs.norm()));
    const Vector u = s - 0.3 * z;
    CHECK((W.apply(W.apply_inverse(u)) - u).norm() <= 1e-10 * (1 + u.norm()));
  }
}

TEST_CASE("max step to the cone boundary") {
  Vector u(3), d(3);
  u << 2, 0, 0;
  d << -1, 0, 0;
  CHECK(soc_max_step(u, d) == Approx(2.0));
  d << 0, 1, 0;
  CHECK(soc_max_step(u, d) == Approx(2.0));
  d << 1, 0, 0;
  CHECK(std::isinf(soc_max_step(u, d)));
  d << 0, 1, 1;
  const double a = soc_max_step(u, d);
  CHECK(a == Approx(std::sqrt(2.0)));
}
