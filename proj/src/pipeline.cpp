#include "fpp/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "fpp/phase_decode.hpp"

namespace fpp {

const char* mask_kind_name(MaskKind kind) {
  switch (kind) {
    case MaskKind::Oracle:
      return "oracle";
    case MaskKind::Threshold:
      return "threshold";
    case MaskKind::Heuristic:
      return "heuristic";
    case MaskKind::None:
      return "none";
  }
  return "?";
}

MaskKind parse_mask_kind(const std::string& name) {
  if (name == "oracle") return MaskKind::Oracle;
  if (name == "threshold") return MaskKind::Threshold;
  if (name == "heuristic") return MaskKind::Heuristic;
  if (name == "none") return MaskKind::None;
  throw std::invalid_argument("unknown mask kind: " + name);
}

MaskChoice scene_mask(MaskKind kind, const SceneTruth& truth, const BenchOptions& options) {
  switch (kind) {
    case MaskKind::Oracle:
      return {mask_from_labels(truth.labels), truth.labels};
    case MaskKind::Threshold: {
      const FloatMap modulation = decode_modulation(truth.stack);
      Mask m = remove_small_regions(threshold_mask(modulation, options.modulation_threshold),
                                    options.small_region_fraction);
      return {m, validity_to_labels(m)};
    }
    case MaskKind::Heuristic: {
      const PmiBuild pmi = build_pmi(truth.stack, options.modulation_threshold, options.small_region_fraction);
      LabelMap labels = heuristic_classify(pmi.pmi, pmi.validity, options.heuristic);
      return {mask_from_labels(labels), labels};
    }
    case MaskKind::None: {
      const FloatMap wrapped = decode_wrapped(truth.stack);
      Mask m = wrapped.validity();
      return {m, validity_to_labels(m)};
    }
  }
  throw std::invalid_argument("scene_mask: bad mask kind");
}

bool label2_consistent(const SceneTruth& truth, const FloatMap& wrapped) {
  const auto& labels = truth.labels;
  // Correctly unwrapped decoded phase: truth plus the wrapped decoding error.
  auto ideal = [&](int x, int y) { return truth.phase(x, y) + wrap(wrapped(x, y) - truth.phase(x, y)); };
  for (int y = 0; y < labels.height(); ++y) {
    for (int x = 0; x < labels.width(); ++x) {
      if (labels(x, y) != Label::Reliable || !wrapped.valid(x, y)) continue;
      const Pixel nbrs[2] = {{x + 1, y}, {x, y + 1}};
      for (auto [nx, ny] : nbrs) {
        if (!labels.contains(nx, ny) || labels(nx, ny) != Label::Reliable || !wrapped.valid(nx, ny)) continue;
        if (std::abs(ideal(nx, ny) - ideal(x, y)) >= kPi) return false;
      }
    }
  }
  return true;
}

MethodOutcome score_unwrap(UnwrapMethod method, const UnwrapResult& result, const SceneSpec& spec,
                           const SceneTruth& truth, const BenchOptions& options) {
  FloatMap reference = truth.phase;
  reference.restrict_to(mask_from_labels(truth.labels));

  MethodOutcome out;
  out.method = method;
  out.aligned = align_relative(result.phase, reference, result.regions);
  for (double t : options.thresholds) {
    out.failures.push_back(detect_failure(out.aligned.phase, reference, t, options.mode).is_failure);
  }

  FloatMap joint = out.aligned.phase;
  for (std::size_t i = 0; i < joint.size(); ++i) {
    if (!joint.valid(i) || !reference.valid(i)) {
      joint.invalidate(i);
      continue;
    }
    ++out.evaluated;
    out.max_residual = std::max(out.max_residual, std::abs(joint[i] - reference[i]));
  }
  if (out.evaluated > 0) out.rmse = depth_rmse(phase_to_depth(joint, spec), truth.depth);
  return out;
}

SceneOutcome run_scene(const std::string& id, const SceneSpec& spec, const SceneTruth& truth, MaskKind mask,
                       const std::vector<UnwrapMethod>& methods, const BenchOptions& options) {
  const DecodedPhase decoded = decode_all(truth.stack);
  const MaskChoice choice = scene_mask(mask, truth, options);

  SceneOutcome out;
  out.id = id;
  out.mask = mask;
  out.consistent = label2_consistent(truth, decoded.phase);
  out.metrics = classification_metrics(choice.predicted, truth.labels);
  for (UnwrapMethod m : methods) {
    const UnwrapResult result = unwrap(m, decoded.phase, decoded.modulation, choice.mask);
    out.methods.push_back(score_unwrap(m, result, spec, truth, options));
  }
  return out;
}

std::string csv_header() { return "map_id,method,threshold,failure,rmse,pa,mpa,miou,fwiou,cpa0,cpa1,cpa2\n"; }

std::string csv_rows(const SceneOutcome& outcome, const std::vector<double>& thresholds) {
  std::string rows;
  char buf[256];
  std::string cpa;
  for (const auto& c : outcome.metrics.cpa) {
    if (c) {
      std::snprintf(buf, sizeof buf, ",%.6f", *c);
      cpa += buf;
    } else {
      cpa += ",";
    }
  }
  for (const auto& m : outcome.methods) {
    for (std::size_t t = 0; t < thresholds.size(); ++t) {
      std::snprintf(buf, sizeof buf, "%s,%s,%g,%d,%.9g,%.6f,%.6f,%.6f,%.6f", outcome.id.c_str(), method_name(m.method),
                    thresholds[t], m.failures[t] ? 1 : 0, m.rmse, outcome.metrics.pa, outcome.metrics.mpa,
                    outcome.metrics.miou, outcome.metrics.fwiou);
      rows += buf;
      rows += cpa;
      rows += '\n';
    }
  }
  return rows;
}

}  // namespace fpp
