#include "fpp/masking.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fpp/phase_decode.hpp"

namespace fpp {

std::vector<std::vector<std::size_t>> RegionDecomposition::members() const {
  std::vector<std::vector<std::size_t>> out(region_sizes.size());
  for (std::size_t r = 0; r < region_sizes.size(); ++r) out[r].reserve(region_sizes[r]);
  for (std::size_t i = 0; i < region_id.size(); ++i) {
    if (auto id = region_id[i]; id > 0) out[static_cast<std::size_t>(id - 1)].push_back(i);
  }
  return out;
}

Mask threshold_mask(const FloatMap& modulation, double threshold) {
  Mask out(modulation.width(), modulation.height(), 0);
  for (std::size_t i = 0; i < modulation.size(); ++i) {
    out[i] = modulation.valid(i) && modulation[i] > threshold ? 1 : 0;
  }
  return out;
}

RegionDecomposition connected_components_4(const Mask& mask) {
  const int w = mask.width();
  const int h = mask.height();
  RegionDecomposition out{Grid<std::int32_t>(w, h, 0), {}};
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < mask.size(); ++start) {
    if (!mask[start] || out.region_id[start] != 0) continue;
    const auto id = static_cast<std::int32_t>(out.region_sizes.size() + 1);
    std::size_t count = 0;
    out.region_id[start] = id;
    stack.push_back(start);
    while (!stack.empty()) {
      std::size_t i = stack.back();
      stack.pop_back();
      ++count;
      auto [x, y] = mask.pixel(i);
      const Pixel nbrs[4] = {{x, y - 1}, {x - 1, y}, {x + 1, y}, {x, y + 1}};
      for (auto [nx, ny] : nbrs) {
        if (!mask.contains(nx, ny)) continue;
        std::size_t j = mask.index(nx, ny);
        if (mask[j] && out.region_id[j] == 0) {
          out.region_id[j] = id;
          stack.push_back(j);
        }
      }
    }
    out.region_sizes.push_back(count);
  }
  return out;
}

Mask remove_small_regions(const Mask& mask, double min_fraction) {
  if (min_fraction < 0.0 || min_fraction > 1.0) throw std::invalid_argument("remove_small_regions: fraction outside [0,1]");
  const double bound = min_fraction * static_cast<double>(mask.size());
  auto regions = connected_components_4(mask);
  Mask out(mask.width(), mask.height(), 0);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    auto id = regions.region_id[i];
    if (id > 0 && static_cast<double>(regions.region_sizes[static_cast<std::size_t>(id - 1)]) >= bound) out[i] = 1;
  }
  return out;
}

Mask mask_from_labels(const LabelMap& labels) {
  Mask out(labels.width(), labels.height(), 0);
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = labels[i] == Label::Reliable ? 1 : 0;
  return out;
}

Mask mask_and(const Mask& a, const Mask& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("mask_and: dimension mismatch");
  Mask out(a.width(), a.height(), 0);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] && b[i] ? 1 : 0;
  return out;
}

LabelMap heuristic_classify(const PMIImage& pmi, const Mask& validity, const HeuristicParams& params) {
  const auto& phase_channel = pmi.phase;
  if (!phase_channel.same_shape(validity) || !phase_channel.same_shape(pmi.modulation)) {
    throw std::invalid_argument("heuristic_classify: dimension mismatch");
  }
  const int w = validity.width();
  const int h = validity.height();
  auto usable = [&](int x, int y) { return validity.contains(x, y) && validity(x, y); };
  auto phi = [&](int x, int y) { return phase_channel(x, y) * kTwoPi - kPi; };
  // Wrapped second difference through (x, y) along (dx, dy); 0 if a neighbour is missing.
  auto second_diff = [&](int x, int y, int dx, int dy) {
    if (!usable(x - dx, y - dy) || !usable(x + dx, y + dy)) return 0.0;
    double c = phi(x, y);
    return wrap(phi(x - dx, y - dy) - c) - wrap(c - phi(x + dx, y + dy));
  };

  LabelMap out(w, h, Label::Background);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!usable(x, y)) continue;
      double d = std::max(std::abs(second_diff(x, y, 1, 0)), std::abs(second_diff(x, y, 0, 1)));
      bool weak = pmi.modulation(x, y) < params.min_modulation;
      out(x, y) = weak || d > params.max_second_diff ? Label::Unreliable : Label::Reliable;
    }
  }
  return out;
}

}  // namespace fpp
