#pragma once

#include <cstdint>
#include <vector>

#include "fpp/formats.hpp"

namespace fpp {

/// 4-connected components of a mask. Ids are 1..R in first-encounter
/// row-major order; 0 marks points outside every region.
struct RegionDecomposition {
  Grid<std::int32_t> region_id;
  std::vector<std::size_t> region_sizes;  // region_sizes[r - 1] is the size of region r

  int region_count() const { return static_cast<int>(region_sizes.size()); }
  /// Points of each region in row-major order; entry r - 1 holds region r.
  std::vector<std::vector<std::size_t>> members() const;
};

/// True where the map is valid and its value is strictly above the threshold.
Mask threshold_mask(const FloatMap& modulation, double threshold);

RegionDecomposition connected_components_4(const Mask& mask);

/// Drops regions with fewer than min_fraction * (width * height) points.
Mask remove_small_regions(const Mask& mask, double min_fraction);

/// True exactly where the label is Reliable.
Mask mask_from_labels(const LabelMap& labels);

Mask mask_and(const Mask& a, const Mask& b);

struct HeuristicParams {
  double min_modulation = 0.08;    // on the normalized modulation channel
  double max_second_diff = 1.0;    // radians
};

/// Rule-based stand-in for a learned classifier: invalid points are
/// background; points with weak normalized modulation or a large wrapped
/// second difference are unreliable; the rest are reliable.
LabelMap heuristic_classify(const PMIImage& pmi, const Mask& validity, const HeuristicParams& params = {});

}  // namespace fpp
