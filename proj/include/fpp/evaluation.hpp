// Scoring of unwrapped phase against temporal ground truth, and of label
// maps against reference labels.
#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "fpp/formats.hpp"
#include "fpp/masking.hpp"

namespace fpp {

struct AlignResult {
  FloatMap phase;
  std::vector<int> offsets;             // per region, in units of 2 pi
  std::vector<int> unaligned_regions;   // region ids with no point valid in both maps
};

/// Shifts each region by the most frequent round((gt - rel) / 2 pi) over its
/// points valid in both maps. Ties pick the offset of smaller magnitude, then
/// the smaller value.
AlignResult align_relative(const FloatMap& relative, const FloatMap& truth, const RegionDecomposition& regions);

enum class FailureMode { Order, Phase03 };

struct ErrorRegion {
  std::size_t size = 0;
  double fraction = 0.0;
  double mean_order_error = 0.0;
};

struct FailureReport {
  bool is_failure = false;
  std::vector<ErrorRegion> regions;  // every 4-connected error region
  double threshold = 0.0;
};

inline constexpr double kPhaseErrorTolerance = 0.3;  // radians

/// Error points: jointly valid points with a nonzero order difference
/// (Order) or a phase difference above 0.3 rad (Phase03). The map fails when
/// some 4-connected error region holds more than err_fraction of all points.
FailureReport detect_failure(const FloatMap& phase, const FloatMap& truth, double err_fraction,
                             FailureMode mode = FailureMode::Order);

/// RMS difference over jointly valid points; throws if there are none.
double depth_rmse(const FloatMap& depth, const FloatMap& truth);

struct ClassMetrics {
  double pa = 0.0;
  double mpa = 0.0;
  double miou = 0.0;
  double fwiou = 0.0;
  std::array<std::optional<double>, 3> cpa;  // empty for classes absent from the reference
  std::array<std::optional<double>, 3> iou;
  std::array<std::array<std::size_t, 3>, 3> confusion{};  // [reference][predicted]
};

ClassMetrics classification_metrics(const LabelMap& predicted, const LabelMap& truth);
/// Same metrics from a precomputed confusion matrix, indexed [reference][predicted].
ClassMetrics metrics_from_confusion(const std::array<std::array<std::size_t, 3>, 3>& confusion);

FailureMode parse_failure_mode(const std::string& name);

}  // namespace fpp
