#include "fpp/evaluation.hpp"

#include <cmath>
#include <cstdlib>
#include <map>
#include <stdexcept>

#include "fpp/phase_decode.hpp"

namespace fpp {

namespace {

long order_difference(double phase, double truth) { return std::lround((phase - truth) / kTwoPi); }

}  // namespace

AlignResult align_relative(const FloatMap& relative, const FloatMap& truth, const RegionDecomposition& regions) {
  if (!relative.same_shape(truth) || !relative.same_shape(regions.region_id)) {
    throw std::invalid_argument("align_relative: dimension mismatch");
  }
  const auto count = static_cast<std::size_t>(regions.region_count());
  std::vector<std::map<long, std::size_t>> histograms(count);
  for (std::size_t i = 0; i < relative.size(); ++i) {
    const auto id = regions.region_id[i];
    if (id <= 0 || !relative.valid(i) || !truth.valid(i)) continue;
    ++histograms[static_cast<std::size_t>(id - 1)][-order_difference(relative[i], truth[i])];
  }

  AlignResult out{relative, std::vector<int>(count, 0), {}};
  for (std::size_t r = 0; r < count; ++r) {
    if (histograms[r].empty()) {
      out.unaligned_regions.push_back(static_cast<int>(r + 1));
      continue;
    }
    long best = 0;
    std::size_t best_count = 0;
    for (auto [offset, n] : histograms[r]) {
      bool better = n > best_count ||
                    (n == best_count && (std::labs(offset) < std::labs(best) ||
                                         (std::labs(offset) == std::labs(best) && offset < best)));
      if (better) {
        best = offset;
        best_count = n;
      }
    }
    out.offsets[r] = static_cast<int>(best);
  }
  for (std::size_t i = 0; i < relative.size(); ++i) {
    const auto id = regions.region_id[i];
    if (id > 0 && out.phase.valid(i)) out.phase[i] += kTwoPi * out.offsets[static_cast<std::size_t>(id - 1)];
  }
  return out;
}

FailureReport detect_failure(const FloatMap& phase, const FloatMap& truth, double err_fraction, FailureMode mode) {
  if (!phase.same_shape(truth)) throw std::invalid_argument("detect_failure: dimension mismatch");
  Mask errors(phase.width(), phase.height(), 0);
  for (std::size_t i = 0; i < phase.size(); ++i) {
    if (!phase.valid(i) || !truth.valid(i)) continue;
    bool bad = mode == FailureMode::Order ? order_difference(phase[i], truth[i]) != 0
                                          : std::abs(phase[i] - truth[i]) > kPhaseErrorTolerance;
    errors[i] = bad ? 1 : 0;
  }
  auto regions = connected_components_4(errors);
  const double total = static_cast<double>(phase.size());

  FailureReport report;
  report.threshold = err_fraction;
  report.regions.resize(regions.region_sizes.size());
  for (std::size_t i = 0; i < phase.size(); ++i) {
    if (auto id = regions.region_id[i]; id > 0) {
      report.regions[static_cast<std::size_t>(id - 1)].mean_order_error +=
          static_cast<double>(order_difference(phase[i], truth[i]));
    }
  }
  for (std::size_t r = 0; r < report.regions.size(); ++r) {
    auto& region = report.regions[r];
    region.size = regions.region_sizes[r];
    region.fraction = static_cast<double>(region.size) / total;
    region.mean_order_error /= static_cast<double>(region.size);
    if (static_cast<double>(region.size) > err_fraction * total) report.is_failure = true;
  }
  return report;
}

double depth_rmse(const FloatMap& depth, const FloatMap& truth) {
  if (!depth.same_shape(truth)) throw std::invalid_argument("depth_rmse: dimension mismatch");
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < depth.size(); ++i) {
    if (!depth.valid(i) || !truth.valid(i)) continue;
    const double d = depth[i] - truth[i];
    sum += d * d;
    ++n;
  }
  if (n == 0) throw std::invalid_argument("depth_rmse: no jointly valid points");
  return std::sqrt(sum / static_cast<double>(n));
}

ClassMetrics metrics_from_confusion(const std::array<std::array<std::size_t, 3>, 3>& confusion) {
  ClassMetrics m;
  m.confusion = confusion;
  std::array<std::size_t, 3> ref_total{}, pred_total{};
  std::size_t total = 0, correct = 0;
  for (std::size_t r = 0; r < 3; ++r) {
    for (std::size_t p = 0; p < 3; ++p) {
      ref_total[r] += confusion[r][p];
      pred_total[p] += confusion[r][p];
      total += confusion[r][p];
    }
    correct += confusion[r][r];
  }
  if (total == 0) return m;
  m.pa = static_cast<double>(correct) / static_cast<double>(total);

  int present = 0;
  for (std::size_t c = 0; c < 3; ++c) {
    if (ref_total[c] == 0) continue;
    ++present;
    const double tp = static_cast<double>(confusion[c][c]);
    const double cpa = tp / static_cast<double>(ref_total[c]);
    const double iou = tp / static_cast<double>(ref_total[c] + pred_total[c] - confusion[c][c]);
    m.cpa[c] = cpa;
    m.iou[c] = iou;
    m.mpa += cpa;
    m.miou += iou;
    m.fwiou += static_cast<double>(ref_total[c]) / static_cast<double>(total) * iou;
  }
  m.mpa /= present;
  m.miou /= present;
  return m;
}

ClassMetrics classification_metrics(const LabelMap& predicted, const LabelMap& truth) {
  if (!predicted.same_shape(truth)) throw std::invalid_argument("classification_metrics: dimension mismatch");
  std::array<std::array<std::size_t, 3>, 3> confusion{};
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ++confusion[static_cast<std::size_t>(truth[i])][static_cast<std::size_t>(predicted[i])];
  }
  return metrics_from_confusion(confusion);
}

FailureMode parse_failure_mode(const std::string& name) {
  if (name == "order") return FailureMode::Order;
  if (name == "phase03") return FailureMode::Phase03;
  throw std::invalid_argument("unknown failure mode: " + name);
}

}  // namespace fpp
