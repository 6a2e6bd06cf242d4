// Phase-modulation-intensity (PMI) composite images.
#pragma once

#include <cstddef>

#include "fpp/formats.hpp"

namespace fpp {

struct NormalizationReport {
  double t_max = 0.0;
  std::size_t removed_count = 0;
};

struct NormalizedMap {
  FloatMap map;
  NormalizationReport report;
};

/// Number of top values dropped before picking T_max: ceil(1% of n), capped at n - 1.
std::size_t normalization_removal_count(std::size_t n_valid);

/// 1 above t_max, value / t_max otherwise, clamped at 0 from below.
double normalize_value(double value, double t_max);

/// Per-map normalization: sort the valid values, drop the top 1%, scale by
/// the largest survivor. Invalid points stay invalid with value 0.
NormalizedMap intra_frame_normalize(const FloatMap& map);

/// (phi + pi) / (2 pi); invalid points 0.
FloatMap normalize_phase(const FloatMap& phase);

struct PmiBuild {
  PMIImage pmi;
  FloatMap phase;
  FloatMap modulation;
  FloatMap background;
  Mask validity;
  NormalizationReport modulation_report;
  NormalizationReport background_report;
};

inline constexpr double kDefaultBackgroundThreshold = 2.0;
inline constexpr double kDefaultSmallRegionFraction = 0.01;

/// Decode, modulation threshold, small-region removal, intra-frame
/// normalization of modulation and background, then phase normalization.
PmiBuild build_pmi(const FringeStack& stack, double background_threshold = kDefaultBackgroundThreshold,
                   double small_region_fraction = kDefaultSmallRegionFraction);

}  // namespace fpp
