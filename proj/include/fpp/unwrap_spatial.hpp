// Spatial phase unwrapping over a validity mask.
//
// All three unwrappers work region by region on the 4-connected components of
// (mask AND phase-valid). Each fixes k = 0 at its region seed, tracks integer
// fringe orders, and reports Phi = phi + 2 pi k at every unwrapped point.
#pragma once

#include <span>
#include <string>
#include <vector>

#include "fpp/formats.hpp"
#include "fpp/masking.hpp"

namespace fpp {

struct UnwrapResult {
  FloatMap phase;   // continuous phase; invalid outside the unwrapped set
  OrderMap order;   // fringe order k, 0 outside the unwrapped set
  RegionDecomposition regions;
  std::vector<Pixel> seeds;  // seeds[r - 1] anchors region r
};

enum class UnwrapMethod { FloodFill, ModuSort, Fspu };

/// Midpoint of the region's points listed column by column, top to bottom:
/// element floor(count / 2) of that ordering. Throws on an empty region.
Pixel select_seed(std::span<const Pixel> region);

/// Breadth-first from select_seed, neighbours visited up, left, right, down;
/// each point is unwrapped against the point it was reached from.
UnwrapResult flood_fill_unwrap(const FloatMap& phase, const Mask& mask);

/// Quality-guided: each region starts at its highest-quality point and
/// always unwraps the best frontier point next, against its best unwrapped
/// neighbour. Ties go to the lower row-major index.
UnwrapResult modu_sort_unwrap(const FloatMap& phase, const FloatMap& quality, const Mask& mask);

/// Reliability from wrapped second differences; edges merged in order of
/// decreasing reliability, shifting the smaller group.
UnwrapResult fspu_unwrap(const FloatMap& phase, const Mask& mask);

/// Per-point second difference used by fspu_unwrap; 0 outside the mask.
FloatMap fspu_second_difference(const FloatMap& phase, const Mask& mask);

inline constexpr double kFspuEpsilon = 1e-12;

/// Dispatch helper; quality is only consulted by ModuSort.
UnwrapResult unwrap(UnwrapMethod method, const FloatMap& phase, const FloatMap& quality, const Mask& mask);

const char* method_name(UnwrapMethod method);
UnwrapMethod parse_method(const std::string& name);

}  // namespace fpp
