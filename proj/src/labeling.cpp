#include "fpp/labeling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "fpp/masking.hpp"

namespace fpp {

void OutlierParams::validate() const {
  if (variance_window < 3 || variance_window % 2 == 0) throw std::invalid_argument("variance window must be odd and >= 3");
  if (!(spatial_sigma > 0.0) || !(range_sigma > 0.0)) throw std::invalid_argument("bilateral sigmas must be positive");
  if (small_region_fraction < 0.0 || small_region_fraction > 1.0) {
    throw std::invalid_argument("small-region fraction outside [0,1]");
  }
}

namespace {

bool has_depth(const FloatMap& depth, std::size_t i) { return depth.valid(i) && depth[i] != 0.0; }

}  // namespace

FloatMap bilateral_reference(const FloatMap& depth, const OutlierParams& params) {
  params.validate();
  const int radius = static_cast<int>(std::ceil(2.0 * params.spatial_sigma));
  const double inv_s = 1.0 / (2.0 * params.spatial_sigma * params.spatial_sigma);
  const double inv_r = 1.0 / (2.0 * params.range_sigma * params.range_sigma);
  FloatMap ref(depth.width(), depth.height());
  std::vector<double> window;
  for (int y = 0; y < depth.height(); ++y) {
    for (int x = 0; x < depth.width(); ++x) {
      const std::size_t i = depth.index(x, y);
      if (!has_depth(depth, i)) {
        ref.invalidate(i);
        continue;
      }
      window.clear();
      for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
          if (depth.contains(x + dx, y + dy) && has_depth(depth, depth.index(x + dx, y + dy))) {
            window.push_back(depth(x + dx, y + dy));
          }
        }
      }
      auto mid = window.begin() + static_cast<std::ptrdiff_t>(window.size() / 2);
      std::nth_element(window.begin(), mid, window.end());
      const double median = *mid;

      double num = 0.0, den = 0.0;
      for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
          if ((dx == 0 && dy == 0) || !depth.contains(x + dx, y + dy)) continue;
          const std::size_t j = depth.index(x + dx, y + dy);
          if (!has_depth(depth, j)) continue;
          double dz = depth[j] - median;
          double wgt = std::exp(-(dx * dx + dy * dy) * inv_s - dz * dz * inv_r);
          num += wgt * depth[j];
          den += wgt;
        }
      }
      ref[i] = den > 0.0 ? num / den : median;
    }
  }
  return ref;
}

FloatMap detect_outliers(const FloatMap& depth, const OutlierParams& params) {
  params.validate();
  const FloatMap ref = bilateral_reference(depth, params);
  const int half = params.variance_window / 2;

  Mask alive(depth.width(), depth.height(), 0);
  for (std::size_t i = 0; i < depth.size(); ++i) alive[i] = has_depth(depth, i) ? 1 : 0;

  std::vector<std::size_t> members;
  for (int y = 0; y < depth.height(); ++y) {
    for (int x = 0; x < depth.width(); ++x) {
      if (!alive(x, y)) continue;
      members.clear();
      for (int dy = -half; dy <= half; ++dy) {
        for (int dx = -half; dx <= half; ++dx) {
          if (depth.contains(x + dx, y + dy) && alive(x + dx, y + dy)) members.push_back(depth.index(x + dx, y + dy));
        }
      }
      const std::size_t initial = members.size();
      std::size_t removed = 0;
      while (members.size() >= 2 && 2 * removed < initial) {
        double mean = 0.0;
        for (auto j : members) mean += depth[j];
        mean /= static_cast<double>(members.size());
        double var = 0.0;
        for (auto j : members) var += (depth[j] - mean) * (depth[j] - mean);
        var /= static_cast<double>(members.size());
        if (var <= params.variance_threshold) break;

        // members are in row-major order, so the first maximum wins ties
        auto worst = std::max_element(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
          return std::abs(depth[a] - ref[a]) < std::abs(depth[b] - ref[b]);
        });
        alive[*worst] = 0;
        members.erase(worst);
        ++removed;
      }
    }
  }

  alive = remove_small_regions(alive, params.small_region_fraction);
  FloatMap out(depth.width(), depth.height());
  for (std::size_t i = 0; i < depth.size(); ++i) out[i] = alive[i] ? depth[i] : 0.0;
  return out;
}

LabelMap make_labels(const FloatMap& modulation, const FloatMap& filtered_depth, double modulation_threshold) {
  if (!modulation.same_shape(filtered_depth)) throw std::invalid_argument("make_labels: dimension mismatch");
  LabelMap out(modulation.width(), modulation.height(), Label::Background);
  for (std::size_t i = 0; i < modulation.size(); ++i) {
    if (!modulation.valid(i) || modulation[i] <= modulation_threshold) continue;
    out[i] = has_depth(filtered_depth, i) ? Label::Reliable : Label::Unreliable;
  }
  return out;
}

}  // namespace fpp
