#include <doctest.h>

#include <cmath>
#include <random>

#include "fpp/phase_decode.hpp"
#include "fpp/unwrap_temporal.hpp"
#include "support.hpp"

using namespace fpp;

namespace {

// Fringe orders of a continuous phase map under the (-pi, pi] wrap.
long order_of(double phase) { return std::lround((phase - wrap(phase)) / kTwoPi); }

}  // namespace

TEST_CASE("gray code helpers") {
  CHECK(graycode_bits(16) == 4);
  CHECK(graycode_bits(17) == 5);
  CHECK(graycode_bits(1) == 1);
  CHECK(gray_decode(0b0110) == 4);
  for (std::uint32_t i = 0; i < 1024; ++i) {
    REQUIRE(gray_encode(i) == (i ^ (i >> 1)));
    REQUIRE(gray_decode(gray_encode(i)) == i);
  }
}

TEST_CASE("synthesized code set for 16 fringes") {
  const int w = 256, h = 4;
  const GraycodeSet set = synthesize_graycode(16, w, h);
  CHECK(set.n_bits == 4);
  REQUIRE(set.codes.size() == 5);
  for (int x = 0; x < w; ++x) {
    const std::uint32_t fringe = static_cast<std::uint32_t>(x / 16);
    std::uint32_t code = 0;
    for (int b = 0; b < 4; ++b) code = (code << 1) | (set.codes[static_cast<std::size_t>(b)](x, 2) > 0.5 ? 1u : 0u);
    REQUIRE(code == gray_encode(fringe));
    if (fringe == 0) CHECK(code == 0);
    // complementary bit: least significant bit of the half-fringe Gray code
    const std::uint32_t half = static_cast<std::uint32_t>(x / 8);
    REQUIRE((set.codes[4](x, 2) > 0.5) == ((gray_encode(half) & 1u) != 0));
  }
}

TEST_CASE("noise-free decode reproduces every fringe index") {
  const int w = 256, h = 256;
  const FloatMap carrier = linear_carrier(w, h, 16, FringeDirection::Vertical);
  const FringeStack s = synthesize_fringes(carrier, FloatMap(w, h, 100), FloatMap(w, h, 50), {4});
  const FloatMap phi = decode_wrapped(s);
  const GraycodeSet set = synthesize_graycode(16, w, h);
  const FringeOrders k = decode_fringe_order(set, phi);
  const FloatMap abs_phase = tpu_unwrap(phi, k);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      REQUIRE(k.valid(x, y) == 1);
      REQUIRE(k.order(x, y) == x / 16);
      REQUIRE(std::abs(abs_phase(x, y) - carrier(x, y)) < 1e-9);
      REQUIRE(std::abs(wrap(abs_phase(x, y)) - phi(x, y)) < 1e-12);
    }
  }
}

TEST_CASE("decoded orders survive boundary phase errors up to a quarter period") {
  // Codes rendered from Phi; the wrapped phase carries an error delta.
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-kPi / 4, kPi / 4);
  const int fringes = 16, w = 512, h = 8;
  FloatMap truth(w, h), phi(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      // keep Phi + delta inside the code range
      const double base = kTwoPi * fringes * (x + 0.5) / w - kPi;
      truth(x, y) = std::clamp(base, -kPi + kPi / 4 + 1e-9, kTwoPi * fringes - kPi - kPi / 4 - 1e-9);
    }
  }
  FloatMap bg(w, h, 0.5), mod(w, h, 0.5);
  const GraycodeSet set = render_graycode(truth, fringes, bg, mod);
  for (int trial = 0; trial < 20; ++trial) {
    FloatMap perturbed(w, h);
    for (std::size_t i = 0; i < truth.size(); ++i) {
      perturbed[i] = truth[i] + u(rng);
      phi[i] = wrap(perturbed[i]);
    }
    const FringeOrders k = decode_fringe_order(set, phi);
    const FloatMap out = tpu_unwrap(phi, k);
    for (std::size_t i = 0; i < truth.size(); ++i) {
      REQUIRE(k.valid[i] == 1);
      REQUIRE(k.order[i] == order_of(perturbed[i]));
      REQUIRE(std::abs(out[i] - perturbed[i]) < 1e-9);
    }
  }
}

TEST_CASE("orders outside the code range are invalid") {
  FloatMap truth(3, 1);
  truth[0] = 0.0;
  truth[1] = kTwoPi * 3;
  truth[2] = kTwoPi * 7;
  const GraycodeSet set = render_graycode(truth, 5, FloatMap(3, 1, 0.5), FloatMap(3, 1, 0.5));
  FloatMap phi(3, 1);
  const FringeOrders k = decode_fringe_order(set, phi);
  CHECK(k.valid[0] == 1);
  CHECK(k.order[0] == 0);
  CHECK(k.valid[1] == 1);
  CHECK(k.order[1] == 3);
  CHECK(k.valid[2] == 0);

  FloatMap bad(3, 1);
  bad.invalidate(0);
  CHECK(decode_fringe_order(set, bad).valid[0] == 0);
  CHECK_FALSE(tpu_unwrap(bad, decode_fringe_order(set, bad)).valid(std::size_t{0}));
}

TEST_CASE("tpu examples") {
  FloatMap phi(2, 1);
  phi[0] = 1.0;
  phi[1] = -0.5;
  FringeOrders k{OrderMap(2, 1), Mask(2, 1, 1)};
  k.order[0] = 3;
  const FloatMap out = tpu_unwrap(phi, k);
  CHECK(out[0] == doctest::Approx(19.84956).epsilon(1e-6));
  CHECK(out[1] == -0.5);
}

TEST_CASE("code sets round trip through files") {
  auto dir = test::scratch_dir("graycode");
  const GraycodeSet set = synthesize_graycode(16, 32, 4, FringeDirection::Horizontal);
  save_graycode(dir / "g", set);
  const GraycodeSet back = load_graycode(dir / "g", 16, set.reference);
  REQUIRE(back.codes.size() == set.codes.size());
  for (std::size_t b = 0; b < set.codes.size(); ++b) CHECK(back.codes[b] == set.codes[b]);
}
