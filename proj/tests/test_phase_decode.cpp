#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "fpp/phase_decode.hpp"
#include "support.hpp"

using namespace fpp;

namespace {

FringeStack single_point_stack(double phi, double bg, double mod, int n) {
  FloatMap p(1, 1, phi), b(1, 1, bg), m(1, 1, mod);
  return synthesize_fringes(p, b, m, {n});
}

}  // namespace

TEST_CASE("wrap examples") {
  CHECK(wrap(0.0) == 0.0);
  CHECK(wrap(3 * kPi) == doctest::Approx(kPi).epsilon(1e-15));
  CHECK(wrap(3 * kPi) > 0.0);
  CHECK(wrap(-kPi) == doctest::Approx(kPi));
  CHECK(wrap(6.0) == doctest::Approx(6.0 - kTwoPi).epsilon(1e-15));
  CHECK(wrap(6.0) == doctest::Approx(-0.28319).epsilon(1e-5));
  CHECK_THROWS(wrap(std::numeric_limits<double>::quiet_NaN()));
  CHECK_THROWS(wrap(std::numeric_limits<double>::infinity()));
}

TEST_CASE("wrap properties") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int i = 0; i < 10000; ++i) {
    const double x = u(rng);
    const double w = wrap(x);
    REQUIRE(w > -kPi);
    REQUIRE(w <= kPi);
    REQUIRE(wrap(w) == w);
    const double turns = (x - w) / kTwoPi;
    REQUIRE(std::abs(turns - std::round(turns)) < 1e-9);
  }
}

TEST_CASE("order_step reproduces the wrapped difference") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  for (int i = 0; i < 1000; ++i) {
    const double a = u(rng), b = u(rng);
    const int n = order_step(a, b);
    REQUIRE(std::abs((b + kTwoPi * n) - a - wrap(b - a)) < 1e-12);
  }
}

TEST_CASE("synthesis example") {
  const FringeStack s = single_point_stack(kPi / 3, 100, 50, 4);
  REQUIRE(s.n_steps() == 4);
  CHECK(s.frame(0)[0] == doctest::Approx(125.0));
  CHECK(s.frame(1)[0] == doctest::Approx(56.699).epsilon(1e-5));
  CHECK(s.frame(2)[0] == doctest::Approx(75.0));
  CHECK(s.frame(3)[0] == doctest::Approx(143.301).epsilon(1e-5));
}

TEST_CASE("synthesis edge cases") {
  const FringeStack flat = single_point_stack(1.0, 80, 0, 5);
  for (int n = 0; n < 5; ++n) CHECK(flat.frame(n)[0] == 80.0);
  const FringeStack a = single_point_stack(0.7, 100, 40, 6);
  const FringeStack b = single_point_stack(0.7 + kTwoPi, 100, 40, 6);
  for (int n = 0; n < 6; ++n) CHECK(a.frame(n)[0] == doctest::Approx(b.frame(n)[0]).epsilon(1e-13));
  FloatMap p(2, 2), q(3, 2);
  CHECK_THROWS(synthesize_fringes(p, p, q, {4}));
  CHECK_THROWS(synthesize_fringes(p, p, p, {2}));
}

TEST_CASE("decode examples") {
  std::vector<FloatMap> frames;
  for (double v : {125.0, 56.69872981077807, 75.0, 143.30127018922193}) frames.emplace_back(1, 1, v);
  FringeStack s(frames);
  CHECK(decode_wrapped(s)[0] == doctest::Approx(kPi / 3).epsilon(1e-12));
  CHECK(decode_wrapped(s)[0] == doctest::Approx(1.04720).epsilon(1e-5));
  CHECK(decode_background(s)[0] == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(decode_modulation(s)[0] == doctest::Approx(50.0).epsilon(1e-12));

  const FringeStack flat = single_point_stack(0.3, 42, 0, 4);
  CHECK_FALSE(decode_wrapped(flat).valid(std::size_t{0}));
  CHECK(decode_modulation(flat)[0] == 0.0);
  CHECK(decode_background(flat)[0] == doctest::Approx(42.0));

  const FringeStack over = single_point_stack(kPi + 0.1, 100, 50, 4);
  CHECK(decode_wrapped(over)[0] == doctest::Approx(-kPi + 0.1).epsilon(1e-12));
}

TEST_CASE("decode round trip over random maps and step counts") {
  std::mt19937_64 rng(17);
  for (int n = 3; n <= 16; ++n) {
    const FloatMap phi = test::random_map(rng, 16, 16, -50, 50);
    const FloatMap bg = test::random_map(rng, 16, 16, 10, 200);
    const FloatMap mod = test::random_map(rng, 16, 16, 0.5, 100);
    const FringeStack s = synthesize_fringes(phi, bg, mod, {n});
    const DecodedPhase d = decode_all(s);
    for (std::size_t i = 0; i < phi.size(); ++i) {
      REQUIRE(std::abs(wrap(d.phase[i] - wrap(phi[i]))) < 1e-9);
      REQUIRE(d.phase[i] > -kPi);
      REQUIRE(d.phase[i] <= kPi);
      REQUIRE(std::abs(d.background[i] - bg[i]) <= 1e-9 * bg[i]);
      REQUIRE(std::abs(d.modulation[i] - mod[i]) <= 1e-9 * mod[i]);
    }
    CHECK(decode_wrapped(s) == d.phase);
    CHECK(decode_background(s) == d.background);
    CHECK(decode_modulation(s) == d.modulation);
  }
}

TEST_CASE("wrapped phase ignores offset and gain of the frames") {
  std::mt19937_64 rng(21);
  const FloatMap phi = test::random_map(rng, 8, 8, -kPi, kPi);
  const FringeStack s = synthesize_fringes(phi, FloatMap(8, 8, 90), FloatMap(8, 8, 30), {5});
  std::vector<FloatMap> shifted, scaled;
  for (const auto& f : s.frames()) {
    FloatMap a = f, b = f;
    for (double& v : a.values()) v += 17.5;
    for (double& v : b.values()) v *= 3.0;
    shifted.push_back(a);
    scaled.push_back(b);
  }
  const FloatMap base = decode_wrapped(s);
  const FloatMap p1 = decode_wrapped(FringeStack(shifted));
  const FloatMap p2 = decode_wrapped(FringeStack(scaled));
  const FloatMap m2 = decode_modulation(FringeStack(scaled));
  const FloatMap m0 = decode_modulation(s);
  const FloatMap b1 = decode_background(FringeStack(shifted));
  for (std::size_t i = 0; i < base.size(); ++i) {
    CHECK(std::abs(wrap(p1[i] - base[i])) < 1e-9);
    CHECK(std::abs(wrap(p2[i] - base[i])) < 1e-9);
    CHECK(m2[i] == doctest::Approx(3.0 * m0[i]).epsilon(1e-12));
    CHECK(b1[i] == doctest::Approx(90.0 + 17.5).epsilon(1e-12));
  }
}

TEST_CASE("phase noise matches the analytic standard deviation") {
  // sigma_phi = sqrt(2) sigma / (I'' sqrt(N)) at moderate SNR
  std::mt19937_64 rng(99);
  std::normal_distribution<double> noise(0.0, 1.0);
  const int n_steps = 4;
  const double sigma = 2.78, mod = 50.0;
  const int samples = 20000;
  double sum2 = 0.0;
  const double phi = 0.4;
  for (int t = 0; t < samples; ++t) {
    std::vector<FloatMap> frames;
    for (int n = 0; n < n_steps; ++n) {
      frames.emplace_back(1, 1, 100 + mod * std::cos(phi + kTwoPi * n / n_steps) + sigma * noise(rng));
    }
    const double e = wrap(decode_wrapped(FringeStack(frames))[0] - phi);
    sum2 += e * e;
  }
  const double measured = std::sqrt(sum2 / samples);
  const double predicted = std::sqrt(2.0) * sigma / (mod * std::sqrt(double(n_steps)));
  CHECK(measured == doctest::Approx(predicted).epsilon(0.03));
}

TEST_CASE("binary patterns without defocus are square waves of half duty") {
  BinaryPatternParams p;
  p.defocus_sigma = 0.0;
  const FringeStack s = synthesize_binary_patterns(84, 4, p);
  REQUIRE(s.n_steps() == 14);
  for (int n = 0; n < 14; ++n) {
    int bright = 0;
    for (double v : s.frame(n).values()) {
      REQUIRE((v == p.low || v == p.high));
      bright += v == p.high;
    }
    CHECK(bright == doctest::Approx(84 * 4 / 2).epsilon(0.05));
  }
}

TEST_CASE("defocused binary patterns approximate the sinusoidal carrier") {
  BinaryPatternParams p;  // period 42, 14 steps, sigma 7
  const int w = 256, h = 256;
  const FringeStack s = synthesize_binary_patterns(w, h, p);
  const FloatMap phi = decode_wrapped(s);
  const int margin = 4 * static_cast<int>(std::ceil(p.defocus_sigma));
  double sum2 = 0.0;
  std::size_t count = 0;
  for (int y = margin; y < h - margin; ++y) {
    for (int x = margin; x < w - margin; ++x) {
      const double e = wrap(phi(x, y) - kTwoPi * x / p.period);
      sum2 += e * e;
      ++count;
    }
  }
  CHECK(std::sqrt(sum2 / count) < 0.05);
}

TEST_CASE("heavy defocus washes out the fringes") {
  BinaryPatternParams p;
  p.defocus_sigma = p.period;
  p.direction = FringeDirection::Horizontal;
  const FringeStack s = synthesize_binary_patterns(8, 512, p);
  const FloatMap m = decode_modulation(s);
  // rows further than 4 sigma from the clamped edges
  for (int y = 180; y < 332; ++y) CHECK(m(4, y) < 0.01);
}

TEST_CASE("linear carrier orders equal fringe indices") {
  const FloatMap c = linear_carrier(256, 8, 16, FringeDirection::Vertical);
  for (int x = 0; x < 256; ++x) {
    const double k = (c(x, 3) - wrap(c(x, 3))) / kTwoPi;
    CHECK(std::lround(k) == x / 16);
  }
  const FloatMap r = linear_carrier(4, 64, 8, FringeDirection::Horizontal);
  CHECK(r(0, 63) == doctest::Approx(kTwoPi * 8 * 63.5 / 64 - kPi));
}
