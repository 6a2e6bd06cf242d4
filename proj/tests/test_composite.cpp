#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "fpp/composite.hpp"
#include "fpp/phase_decode.hpp"
#include "support.hpp"

using namespace fpp;

namespace {

FloatMap hundred_values() {
  FloatMap m(10, 10);
  for (int i = 0; i < 99; ++i) m[static_cast<std::size_t>(i)] = i + 1;
  m[99] = 1000;
  return m;
}

}  // namespace

TEST_CASE("normalization of the hundred-value example") {
  const NormalizedMap n = intra_frame_normalize(hundred_values());
  CHECK(n.report.removed_count == 1);
  CHECK(n.report.t_max == 99.0);
  CHECK(n.map[99] == 1.0);
  CHECK(n.map[98] == 1.0);
  CHECK(normalize_value(49.5, n.report.t_max) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(n.map[0] == doctest::Approx(1.0 / 99));
}

TEST_CASE("normalization boundary cases") {
  const NormalizedMap c = intra_frame_normalize(FloatMap(4, 4, 7.5));
  CHECK(c.report.t_max == 7.5);
  for (double v : c.map.values()) CHECK(v == 1.0);

  FloatMap single(3, 1);
  single[1] = 4.0;
  single.invalidate(0);
  single.invalidate(2);
  const NormalizedMap s = intra_frame_normalize(single);
  CHECK(s.report.removed_count == 0);
  CHECK(s.map[1] == 1.0);
  CHECK_FALSE(s.map.valid(std::size_t{0}));
  CHECK(s.map[0] == 0.0);

  CHECK(normalization_removal_count(1) == 0);
  CHECK(normalization_removal_count(100) == 1);
  CHECK(normalization_removal_count(101) == 2);
  CHECK(normalization_removal_count(2) == 1);

  FloatMap none(2, 2);
  for (std::size_t i = 0; i < 4; ++i) none.invalidate(i);
  CHECK_THROWS(intra_frame_normalize(none));
  CHECK_THROWS(intra_frame_normalize(FloatMap(2, 2, 0.0)));
}

TEST_CASE("normalization is order preserving and scale invariant") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    FloatMap m = test::random_map(rng, 23, 17, 0.1, 500);
    m.invalidate(static_cast<std::size_t>(trial));
    const NormalizedMap base = intra_frame_normalize(m);
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (m.valid(i)) idx.push_back(i);
    }
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return m[a] < m[b]; });
    for (std::size_t j = 1; j < idx.size(); ++j) REQUIRE(base.map[idx[j - 1]] <= base.map[idx[j]]);

    std::size_t ones = 0;
    for (auto i : idx) ones += base.map[i] == 1.0;
    CHECK(ones <= base.report.removed_count + 1);

    for (double s : {0.5, 3.0, 100.0}) {
      FloatMap scaled = m;
      for (double& v : scaled.values()) v *= s;
      const NormalizedMap n = intra_frame_normalize(scaled);
      for (std::size_t i = 0; i < m.size(); ++i) REQUIRE(std::abs(n.map[i] - base.map[i]) < 1e-12);
    }
  }
}

TEST_CASE("phase normalization") {
  FloatMap p(4, 1);
  p[0] = kPi;
  p[1] = 0.0;
  p[2] = -kPi + 1e-6;
  p.invalidate(3);
  const FloatMap n = normalize_phase(p);
  CHECK(n[0] == 1.0);
  CHECK(n[1] == 0.5);
  CHECK(n[2] == doctest::Approx(1.59e-7).epsilon(0.01));
  CHECK(n[3] == 0.0);
  CHECK_FALSE(n.valid(std::size_t{3}));
}

TEST_CASE("pmi of a plane scene") {
  const int w = 64, h = 48;
  const FloatMap carrier = linear_carrier(w, h, 4, FringeDirection::Vertical);
  FloatMap mod(w, h, 50.0);
  for (int y = 10; y < 20; ++y)
    for (int x = 30; x < 45; ++x) mod(x, y) = 0.0;
  const FringeStack stack = synthesize_fringes(carrier, FloatMap(w, h, 100.0), mod, {4});
  const PmiBuild b = build_pmi(stack);

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const bool dark = y >= 10 && y < 20 && x >= 30 && x < 45;
      CHECK(static_cast<bool>(b.validity(x, y)) == !dark);
      if (dark) {
        CHECK(b.pmi.phase(x, y) == 0.0);
        CHECK(b.pmi.modulation(x, y) == 0.0);
        CHECK(b.pmi.intensity(x, y) == 0.0);
      }
    }
  }
  for (const FloatMap* c : {&b.pmi.phase, &b.pmi.modulation, &b.pmi.intensity}) {
    for (double v : c->values()) {
      REQUIRE(v >= 0.0);
      REQUIRE(v <= 1.0);
    }
  }
  CHECK(kDefaultBackgroundThreshold == 2.0);
}

TEST_CASE("pmi drops specks below one percent of the map") {
  const int w = 40, h = 40;
  FloatMap mod(w, h, 0.0);
  for (int y = 0; y < 20; ++y)
    for (int x = 0; x < 40; ++x) mod(x, y) = 30.0;
  for (int y = 30; y < 33; ++y)
    for (int x = 5; x < 9; ++x) mod(x, y) = 30.0;  // 12 points < 16
  const FringeStack stack =
      synthesize_fringes(linear_carrier(w, h, 3, FringeDirection::Vertical), FloatMap(w, h, 60.0), mod, {4});
  const PmiBuild b = build_pmi(stack);
  CHECK(b.validity(6, 31) == 0);
  CHECK(b.validity(6, 10) == 1);
}
