// Scene-level benchmark: decode, mask, unwrap and score against ground truth.
#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "fpp/composite.hpp"
#include "fpp/evaluation.hpp"
#include "fpp/masking.hpp"
#include "fpp/synth_scenes.hpp"
#include "fpp/unwrap_spatial.hpp"

namespace fpp {

/// oracle: label_gt == 2. threshold: decoded modulation above a threshold
/// with small regions removed. heuristic: Reliable points of
/// heuristic_classify on the PMI image. none: every decodable point.
enum class MaskKind { Oracle, Threshold, Heuristic, None };

const char* mask_kind_name(MaskKind kind);
MaskKind parse_mask_kind(const std::string& name);

struct BenchOptions {
  double modulation_threshold = kDefaultBackgroundThreshold;
  double small_region_fraction = kDefaultSmallRegionFraction;
  std::vector<double> thresholds{0.001, 0.01};
  FailureMode mode = FailureMode::Order;
  HeuristicParams heuristic;
};

struct MaskChoice {
  Mask mask;
  LabelMap predicted;  // labels the mask stands for, scored against label_gt
};

MaskChoice scene_mask(MaskKind kind, const SceneTruth& truth, const BenchOptions& options);

/// True when every 4-neighbour edge inside the label-2 set has a wrapped
/// phase difference that matches the true difference, i.e. path-following
/// over label-2 points cannot pick up an order error.
bool label2_consistent(const SceneTruth& truth, const FloatMap& wrapped);

struct MethodOutcome {
  UnwrapMethod method = UnwrapMethod::FloodFill;
  std::vector<bool> failures;  // one per BenchOptions::thresholds entry
  double rmse = 0.0;           // depth units, over the evaluated points
  double max_residual = 0.0;   // radians, after alignment
  std::size_t evaluated = 0;   // label-2 points that were unwrapped
  AlignResult aligned;
};

/// Aligns the unwrapped phase to truth on label-2 points and scores it.
MethodOutcome score_unwrap(UnwrapMethod method, const UnwrapResult& result, const SceneSpec& spec,
                           const SceneTruth& truth, const BenchOptions& options);

struct SceneOutcome {
  std::string id;
  MaskKind mask = MaskKind::Oracle;
  bool consistent = false;
  ClassMetrics metrics;
  std::vector<MethodOutcome> methods;
};

SceneOutcome run_scene(const std::string& id, const SceneSpec& spec, const SceneTruth& truth, MaskKind mask,
                       const std::vector<UnwrapMethod>& methods, const BenchOptions& options);

/// map_id,method,threshold,failure,rmse,pa,mpa,miou,fwiou,cpa0,cpa1,cpa2
std::string csv_header();
/// One row per (method, threshold).
std::string csv_rows(const SceneOutcome& outcome, const std::vector<double>& thresholds);

/// Runs fn(i) for i in [0, n) on up to hardware_concurrency threads. The
/// first exception thrown is rethrown after all workers finish.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_lock;
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> hold(error_lock);
        if (!error) error = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace fpp
