#include "fpp/unwrap_temporal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fpp/phase_decode.hpp"

namespace fpp {

int graycode_bits(int num_fringes) {
  if (num_fringes < 1) throw std::invalid_argument("graycode_bits: need at least one fringe");
  int bits = 1;
  while ((1 << bits) < num_fringes) ++bits;
  return bits;
}

std::uint32_t gray_encode(std::uint32_t binary) { return binary ^ (binary >> 1); }

std::uint32_t gray_decode(std::uint32_t gray) {
  std::uint32_t binary = gray;
  for (std::uint32_t shift = gray >> 1; shift != 0; shift >>= 1) binary ^= shift;
  return binary;
}

GraycodeSet render_graycode(const FloatMap& absolute_phase, int num_fringes, const FloatMap& background,
                            const FloatMap& modulation) {
  if (!absolute_phase.same_shape(background) || !absolute_phase.same_shape(modulation)) {
    throw std::invalid_argument("render_graycode: dimension mismatch");
  }
  GraycodeSet set;
  set.n_bits = graycode_bits(num_fringes);
  set.num_fringes = num_fringes;
  set.codes.assign(static_cast<std::size_t>(set.n_bits + 1), FloatMap(absolute_phase.width(), absolute_phase.height()));
  set.reference = background;
  const std::int64_t max_index = (std::int64_t{1} << set.n_bits) - 1;
  for (std::size_t i = 0; i < absolute_phase.size(); ++i) {
    const double u = (absolute_phase[i] + kPi) / kTwoPi;
    // Outside the projector's code range the pattern saturates at the end code.
    const auto half = static_cast<std::int64_t>(std::floor(2.0 * u));
    const auto m = static_cast<std::uint32_t>(std::clamp<std::int64_t>(half, 0, 2 * max_index + 1));
    const std::uint32_t code = gray_encode(m);  // n_bits + 1 bits; top n_bits are gray(m >> 1)
    for (int b = 0; b <= set.n_bits; ++b) {
      const bool bit = (code >> (set.n_bits - b)) & 1U;
      set.codes[static_cast<std::size_t>(b)][i] = background[i] + modulation[i] * (bit ? 1.0 : -1.0);
    }
  }
  return set;
}

GraycodeSet synthesize_graycode(int num_fringes, int width, int height, FringeDirection direction) {
  FloatMap carrier = linear_carrier(width, height, num_fringes, direction);
  FloatMap half(width, height, 0.5);
  return render_graycode(carrier, num_fringes, half, half);
}

FringeOrders decode_fringe_order(const GraycodeSet& set, const FloatMap& wrapped_phase) {
  if (set.codes.size() != static_cast<std::size_t>(set.n_bits + 1)) {
    throw std::invalid_argument("decode_fringe_order: expected n_bits + 1 code images");
  }
  for (const auto& c : set.codes) {
    if (!c.same_shape(wrapped_phase) || !c.same_shape(set.reference)) {
      throw std::invalid_argument("decode_fringe_order: dimension mismatch");
    }
  }
  FringeOrders out{OrderMap(wrapped_phase.width(), wrapped_phase.height(), 0),
                   Mask(wrapped_phase.width(), wrapped_phase.height(), 0)};
  for (std::size_t i = 0; i < wrapped_phase.size(); ++i) {
    if (!wrapped_phase.valid(i)) continue;
    std::uint32_t regular = 0;
    for (int b = 0; b < set.n_bits; ++b) {
      regular = (regular << 1) | (set.codes[static_cast<std::size_t>(b)][i] > set.reference[i] ? 1U : 0U);
    }
    const std::uint32_t complementary = set.codes.back()[i] > set.reference[i] ? 1U : 0U;
    const auto k1 = static_cast<std::int64_t>(gray_decode(regular));
    const auto k2 = static_cast<std::int64_t>(gray_decode((regular << 1) | complementary));
    const std::int64_t k2_half = (k2 + 1) / 2;

    const double phi = wrapped_phase[i];
    std::int64_t k = k1;
    if (phi < -kPi / 2) {
      k = k2_half;
    } else if (phi >= kPi / 2) {
      k = k2_half - 1;
    }
    if (k < 0 || k >= set.num_fringes) continue;
    out.order[i] = static_cast<std::int32_t>(k);
    out.valid[i] = 1;
  }
  return out;
}

FloatMap tpu_unwrap(const FloatMap& wrapped_phase, const FringeOrders& orders) {
  if (!wrapped_phase.same_shape(orders.order)) throw std::invalid_argument("tpu_unwrap: dimension mismatch");
  FloatMap out(wrapped_phase.width(), wrapped_phase.height());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (wrapped_phase.valid(i) && orders.valid[i]) {
      out[i] = wrapped_phase[i] + kTwoPi * orders.order[i];
    } else {
      out.invalidate(i);
    }
  }
  return out;
}

void save_graycode(const std::filesystem::path& prefix, const GraycodeSet& set) {
  for (std::size_t b = 0; b < set.codes.size(); ++b) save_fpm(stack_frame_path(prefix, static_cast<int>(b)), set.codes[b]);
}

GraycodeSet load_graycode(const std::filesystem::path& prefix, int num_fringes, FloatMap reference) {
  GraycodeSet set;
  set.num_fringes = num_fringes;
  set.n_bits = graycode_bits(num_fringes);
  for (int b = 0; b <= set.n_bits; ++b) set.codes.push_back(load_fpm(stack_frame_path(prefix, b)));
  set.reference = std::move(reference);
  return set;
}

}  // namespace fpp
