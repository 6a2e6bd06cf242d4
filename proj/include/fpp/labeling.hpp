// Ground-truth label generation from depth maps.
#pragma once

#include "fpp/formats.hpp"

namespace fpp {

struct OutlierParams {
  double spatial_sigma = 3.0;       // pixels
  double range_sigma = 0.5;         // depth units
  int variance_window = 5;          // odd, >= 3
  double variance_threshold = 1.0;  // depth units squared
  double small_region_fraction = 0.01;

  void validate() const;
};

/// Edge-preserving reference depth at every valid point: a bilateral average
/// over the neighbourhood excluding the point itself, with the range kernel
/// centred on the neighbourhood median. Invalid points (depth 0) get 0.
FloatMap bilateral_reference(const FloatMap& depth, const OutlierParams& params);

/// Zeroes outlier depths. Survivors keep their original values; zeros stay zero.
///  1. reference depth from bilateral_reference;
///  2. for each window whose variance exceeds the threshold, repeatedly drop
///     the point of largest |depth - reference| until the variance falls to
///     the threshold or half of the window's points are gone;
///  3. remove_small_regions on what survives.
FloatMap detect_outliers(const FloatMap& depth, const OutlierParams& params = {});

/// 0 where modulation <= threshold, 1 where modulation > threshold and depth == 0, 2 otherwise.
LabelMap make_labels(const FloatMap& modulation, const FloatMap& filtered_depth, double modulation_threshold = 2.0);

}  // namespace fpp
