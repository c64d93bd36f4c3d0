#include <cmath>
#include <set>

#include "doctest.h"
#include "wl1/rng.hpp"

using namespace wl1;

TEST_CASE("Philox4x32-10 known-answer vectors") {
  CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) == PhiloxBlock{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        PhiloxBlock{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        PhiloxBlock{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are pure functions of their key") {
  Philox a(42, 7, stream::kNoise), b(42, 7, stream::kNoise);
  for (int i = 0; i < 1000; ++i) REQUIRE(a() == b());

  Philox c(42, 7, stream::kMatrix), d(42, 8, stream::kNoise), e(43, 7, stream::kNoise);
  Philox f(42, 7, stream::kNoise);
  int same_c = 0, same_d = 0, same_e = 0;
  for (int i = 0; i < 100; ++i) {
    const auto v = f();
    same_c += c() == v;
    same_d += d() == v;
    same_e += e() == v;
  }
  CHECK(same_c < 3);
  CHECK(same_d < 3);
  CHECK(same_e < 3);

  // The first block is Philox of counter (0, 0, trial, stream) under the seed key.
  Philox g(0x0000000500000003ULL, 9, 2);
  const auto blk = philox4x32_10({0, 0, 9, 2}, {3, 5});
  for (int i = 0; i < 4; ++i) CHECK(g() == blk[i]);
}

TEST_CASE("uniform and normal moments") {
  Philox r(1, 0, 0);
  const int n = 200000;
  double s = 0, s2 = 0, lo = 1, hi = 0;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    s += u;
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  CHECK(lo >= 0.0);
  CHECK(hi < 1.0);
  CHECK(std::abs(s / n - 0.5) < 5e-3);

  s = 0;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    s += z;
    s2 += z * z;
  }
  CHECK(std::abs(s / n) < 1e-2);
  CHECK(std::abs(s2 / n - 1.0) < 2e-2);
}

TEST_CASE("bounded integers and sampling without replacement") {
  Philox r(2, 0, 0);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) ++counts[r.below(7)];
  for (int c : counts) CHECK(std::abs(c - 10000) < 500);

  for (int rep = 0; rep < 200; ++rep) {
    const auto s = r.sample(30, rep % 31);
    CHECK(static_cast<int>(s.size()) == rep % 31);
    CHECK(std::is_sorted(s.begin(), s.end()));
    CHECK(std::set<std::int64_t>(s.begin(), s.end()).size() == s.size());
    for (auto v : s) CHECK((v >= 0 && v < 30));
  }
  std::vector<int> hits(10, 0);
  for (int rep = 0; rep < 20000; ++rep)
    for (auto v : r.sample(10, 3)) ++hits[v];
  for (int h : hits) CHECK(std::abs(h - 6000) < 400);
}
