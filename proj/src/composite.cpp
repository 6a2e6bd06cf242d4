#include "fpp/composite.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>
#include <vector>

#include "fpp/masking.hpp"
#include "fpp/phase_decode.hpp"

namespace fpp {

std::size_t normalization_removal_count(std::size_t n_valid) {
  if (n_valid == 0) return 0;
  std::size_t top = (n_valid + 99) / 100;
  return std::min(top, n_valid - 1);
}

double normalize_value(double value, double t_max) {
  if (value > t_max) return 1.0;
  return std::max(0.0, value / t_max);
}

NormalizedMap intra_frame_normalize(const FloatMap& map) {
  std::vector<double> sorted;
  sorted.reserve(map.size());
  for (std::size_t i = 0; i < map.size(); ++i) {
    if (map.valid(i)) sorted.push_back(map[i]);
  }
  if (sorted.empty()) throw std::invalid_argument("intra_frame_normalize: no valid points");
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  NormalizationReport report;
  report.removed_count = normalization_removal_count(sorted.size());
  report.t_max = sorted[report.removed_count];
  if (report.t_max <= 0.0) throw std::invalid_argument("intra_frame_normalize: degenerate map (T_max <= 0)");

  FloatMap out(map.width(), map.height());
  for (std::size_t i = 0; i < map.size(); ++i) {
    if (map.valid(i)) {
      out[i] = normalize_value(map[i], report.t_max);
    } else {
      out.invalidate(i);
    }
  }
  return {std::move(out), report};
}

FloatMap normalize_phase(const FloatMap& phase) {
  FloatMap out(phase.width(), phase.height());
  for (std::size_t i = 0; i < phase.size(); ++i) {
    if (phase.valid(i)) {
      out[i] = (phase[i] + kPi) / kTwoPi;
    } else {
      out.invalidate(i);
    }
  }
  return out;
}

PmiBuild build_pmi(const FringeStack& stack, double background_threshold, double small_region_fraction) {
  auto decoded = decode_all(stack);

  Mask valid = mask_and(threshold_mask(decoded.modulation, background_threshold), decoded.phase.validity());
  valid = remove_small_regions(valid, small_region_fraction);

  decoded.phase.restrict_to(valid);
  decoded.modulation.restrict_to(valid);
  decoded.background.restrict_to(valid);

  auto modulation = intra_frame_normalize(decoded.modulation);
  auto background = intra_frame_normalize(decoded.background);

  PmiBuild out;
  out.pmi = PMIImage{normalize_phase(decoded.phase), std::move(modulation.map), std::move(background.map)};
  out.modulation_report = modulation.report;
  out.background_report = background.report;
  out.phase = std::move(decoded.phase);
  out.modulation = std::move(decoded.modulation);
  out.background = std::move(decoded.background);
  out.validity = std::move(valid);
  return out;
}

}  // namespace fpp
