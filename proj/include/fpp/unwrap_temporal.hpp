// Complementary Gray-code temporal unwrapping.
//
// Code fringe i covers absolute phase [2 pi i - pi, 2 pi i + pi), i.e. the
// span over which the (-pi, pi] wrapped phase has order i. The n regular
// patterns carry the reflected Gray code of i. The extra complementary
// pattern is the least significant bit of the (n + 1)-bit Gray code of the
// half-fringe index m = floor(2 u), u = (Phi + pi) / (2 pi): a double-frequency
// pattern shifted by half a fringe. Together the n + 1 bits decode to m.
#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "fpp/formats.hpp"

namespace fpp {

struct GraycodeSet {
  int n_bits = 0;
  int num_fringes = 0;
  std::vector<FloatMap> codes;  // n_bits regular patterns, most significant first, then the complementary one
  FloatMap reference;           // per-point binarization threshold
};

/// Smallest n with 2^n >= num_fringes (at least 1).
int graycode_bits(int num_fringes);
std::uint32_t gray_encode(std::uint32_t binary);
std::uint32_t gray_decode(std::uint32_t gray);

/// Renders code images for the given absolute phase: each pattern is
/// background + modulation * (2 b - 1), reference = background.
GraycodeSet render_graycode(const FloatMap& absolute_phase, int num_fringes, const FloatMap& background,
                            const FloatMap& modulation);

/// 0/1 code maps for a flat linear carrier (see linear_carrier), reference 0.5.
GraycodeSet synthesize_graycode(int num_fringes, int width, int height,
                                FringeDirection direction = FringeDirection::Vertical);

struct FringeOrders {
  OrderMap order;
  Mask valid;
};

/// k1 from the regular bits, k2 from all n + 1 bits, k2' = floor((k2 + 1) / 2):
///   phi < -pi/2  -> k2'
///   phi >= pi/2  -> k2' - 1
///   otherwise    -> k1
/// Orders outside [0, num_fringes) and invalid phase points are marked invalid.
FringeOrders decode_fringe_order(const GraycodeSet& set, const FloatMap& wrapped_phase);

/// Phi = phi + 2 pi k on valid points.
FloatMap tpu_unwrap(const FloatMap& wrapped_phase, const FringeOrders& orders);

void save_graycode(const std::filesystem::path& prefix, const GraycodeSet& set);
/// Loads "<prefix>_NN.fpm" code images; the reference must be supplied.
GraycodeSet load_graycode(const std::filesystem::path& prefix, int num_fringes, FloatMap reference);

}  // namespace fpp
