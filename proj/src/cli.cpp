#include "fpp/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <ostream>

#include <CLI11.hpp>

#include "fpp/composite.hpp"
#include "fpp/evaluation.hpp"
#include "fpp/formats.hpp"
#include "fpp/labeling.hpp"
#include "fpp/masking.hpp"
#include "fpp/phase_decode.hpp"
#include "fpp/pipeline.hpp"
#include "fpp/reconstruct3d.hpp"
#include "fpp/synth_scenes.hpp"
#include "fpp/unwrap_spatial.hpp"
#include "fpp/unwrap_temporal.hpp"

namespace fpp::cli {

namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kMethodNames{"flood", "modu", "fspu"};
const std::vector<std::string> kSuiteNames{"simple", "reflectivity", "blur", "discontinuity", "complex"};
const std::vector<std::string> kMaskNames{"oracle", "threshold", "heuristic", "none"};

fs::path with_suffix(const fs::path& prefix, const std::string& suffix) {
  fs::path p = prefix;
  p += suffix;
  return p;
}

void write_text(const fs::path& path, const std::string& text) {
  write_file_atomic(path, std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

struct Args {
  // shared
  std::string stack, out, phase, modulation, labels, quality, orders;
  double threshold = kDefaultBackgroundThreshold;
  double min_region = kDefaultSmallRegionFraction;
  std::string method = "flood";
  // classify
  std::string pmi;
  HeuristicParams heuristic;
  // tpu
  std::string gray;
  int fringes = 16;
  // label
  std::string depth, filtered;
  OutlierParams outlier;
  // eval
  std::string truth, truth_labels, pred_labels, map_id = "map", failure_mode = "order";
  std::vector<double> thresholds{0.001, 0.01};
  double scale = 1.0;
  // synth / bench
  std::string suite = "simple", scenes, mask = "oracle";
  int count = 10;
  std::uint64_t seed = 1;
  int width = 256, height = 256;
  std::vector<std::string> methods = kMethodNames;
  // reconstruct
  std::string calib, ply;
};

int cmd_decode(const Args& a, std::ostream& out) {
  const FringeStack stack = load_stack(a.stack);
  const DecodedPhase d = decode_all(stack);
  save_fpm(with_suffix(a.out, "_phi.fpm"), d.phase);
  save_fpm(with_suffix(a.out, "_bg.fpm"), d.background);
  save_fpm(with_suffix(a.out, "_mod.fpm"), d.modulation);
  out << "decoded " << stack.n_steps() << " frames " << stack.width() << "x" << stack.height() << "\n";
  return kExitOk;
}

int cmd_pmi(const Args& a, std::ostream& out) {
  const PmiBuild b = build_pmi(load_stack(a.stack), a.threshold, a.min_region);
  save_fpm(with_suffix(a.out, "_p.fpm"), b.pmi.phase);
  save_fpm(with_suffix(a.out, "_m.fpm"), b.pmi.modulation);
  save_fpm(with_suffix(a.out, "_i.fpm"), b.pmi.intensity);
  save_labelmap(with_suffix(a.out, "_valid.pgm"), validity_to_labels(b.validity));
  out << "modulation t_max " << b.modulation_report.t_max << ", background t_max " << b.background_report.t_max
      << "\n";
  return kExitOk;
}

int cmd_classify(const Args& a, std::ostream& out) {
  PMIImage pmi{load_fpm(with_suffix(a.pmi, "_p.fpm")), load_fpm(with_suffix(a.pmi, "_m.fpm")),
               load_fpm(with_suffix(a.pmi, "_i.fpm"))};
  const Mask valid = labels_to_validity(load_labelmap(with_suffix(a.pmi, "_valid.pgm")));
  const LabelMap labels = heuristic_classify(pmi, valid, a.heuristic);
  save_labelmap(a.out, labels);
  std::size_t counts[3] = {0, 0, 0};
  for (Label l : labels.data()) ++counts[static_cast<int>(l)];
  out << "labels 0/1/2: " << counts[0] << " " << counts[1] << " " << counts[2] << "\n";
  return kExitOk;
}

int cmd_unwrap(const Args& a, std::ostream& out) {
  const FloatMap phase = load_fpm(a.phase);
  const UnwrapMethod method = parse_method(a.method);
  FloatMap modulation;
  if (!a.modulation.empty()) modulation = load_fpm(a.modulation);
  Mask mask = phase.validity();
  if (!a.labels.empty()) mask = mask_and(mask, mask_from_labels(load_labelmap(a.labels)));
  if (!a.modulation.empty()) {
    mask = mask_and(mask, remove_small_regions(threshold_mask(modulation, a.threshold), a.min_region));
  }
  FloatMap quality = !a.quality.empty() ? load_fpm(a.quality) : modulation;
  if (method == UnwrapMethod::ModuSort && quality.empty()) {
    throw std::invalid_argument("modu needs --quality or --modulation");
  }
  if (quality.empty()) quality = FloatMap(phase.width(), phase.height(), 1.0);
  const UnwrapResult r = unwrap(method, phase, quality, mask);
  save_fpm(a.out, r.phase);
  if (!a.orders.empty()) save_order_map(a.orders, r.order);
  out << method_name(method) << ": " << r.regions.region_count() << " regions, " << r.phase.valid_count()
      << " points\n";
  return kExitOk;
}

int cmd_tpu(const Args& a, std::ostream& out) {
  const FringeStack stack = load_stack(a.stack);
  const DecodedPhase d = decode_all(stack);
  const GraycodeSet set = load_graycode(a.gray, a.fringes, d.background);
  const FringeOrders orders = decode_fringe_order(set, d.phase);
  const FloatMap phase = tpu_unwrap(d.phase, orders);
  save_fpm(a.out, phase);
  if (!a.orders.empty()) save_order_map(a.orders, orders.order);
  out << "tpu: " << phase.valid_count() << " of " << phase.size() << " points ordered\n";
  return kExitOk;
}

int cmd_label(const Args& a, std::ostream& out) {
  const FloatMap modulation = load_fpm(a.modulation);
  const FloatMap depth = load_fpm(a.depth);
  const FloatMap filtered = detect_outliers(depth, a.outlier);
  const LabelMap labels = make_labels(modulation, filtered, a.threshold);
  save_labelmap(a.out, labels);
  if (!a.filtered.empty()) save_fpm(a.filtered, filtered);
  std::size_t counts[3] = {0, 0, 0};
  for (Label l : labels.data()) ++counts[static_cast<int>(l)];
  out << "labels 0/1/2: " << counts[0] << " " << counts[1] << " " << counts[2] << "\n";
  return kExitOk;
}

int cmd_eval(const Args& a, std::ostream& out) {
  const FloatMap phase = load_fpm(a.phase);
  FloatMap truth = load_fpm(a.truth);
  if (!phase.same_shape(truth)) throw std::invalid_argument("eval: phase and truth differ in size");
  std::optional<LabelMap> truth_labels;
  if (!a.truth_labels.empty()) {
    truth_labels = load_labelmap(a.truth_labels);
    truth.restrict_to(mask_from_labels(*truth_labels));
  }
  const FailureMode mode = parse_failure_mode(a.failure_mode);
  const RegionDecomposition regions = connected_components_4(phase.validity());
  const AlignResult aligned = align_relative(phase, truth, regions);

  SceneOutcome outcome;
  outcome.id = a.map_id;
  MethodOutcome m;
  m.method = parse_method(a.method);
  for (double t : a.thresholds) m.failures.push_back(detect_failure(aligned.phase, truth, t, mode).is_failure);
  double sum = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (!aligned.phase.valid(i) || !truth.valid(i)) continue;
    const double d = a.scale * (aligned.phase[i] - truth[i]);
    sum += d * d;
    ++m.evaluated;
  }
  if (m.evaluated == 0) throw std::invalid_argument("eval: no jointly valid points");
  m.rmse = std::sqrt(sum / static_cast<double>(m.evaluated));
  outcome.methods.push_back(std::move(m));
  if (!a.pred_labels.empty()) {
    if (!truth_labels) throw std::invalid_argument("eval: --pred-labels needs --truth-labels");
    outcome.metrics = classification_metrics(load_labelmap(a.pred_labels), *truth_labels);
  }
  const std::string csv = csv_header() + csv_rows(outcome, a.thresholds);
  if (a.out.empty()) {
    out << csv;
  } else {
    write_text(a.out, csv);
  }
  return kExitOk;
}

std::string scene_name(SuiteKind kind, std::size_t index) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%03zu", suite_kind_name(kind), index);
  return buf;
}

int cmd_synth(const Args& a, std::ostream& out) {
  const SuiteKind kind = parse_suite_kind(a.suite);
  const auto specs = scene_suite(kind, a.count, a.seed, a.width, a.height);
  parallel_for(specs.size(), [&](std::size_t i) {
    save_scene(fs::path(a.out) / scene_name(kind, i), specs[i], generate_scene(specs[i]));
  });
  out << "wrote " << specs.size() << " " << suite_kind_name(kind) << " scenes to " << a.out << "\n";
  return kExitOk;
}

int cmd_reconstruct(const Args& a, std::ostream& out) {
  const FloatMap phase = load_fpm(a.phase);
  const SystemCalibration calib = load_calibration(a.calib);
  const Reconstruction r = reconstruct(phase, calib);
  write_text(a.ply, export_ply(r.cloud));
  if (!a.depth.empty()) save_fpm(a.depth, r.depth);
  out << "reconstructed " << r.cloud.size() << " points\n";
  return kExitOk;
}

int cmd_bench(const Args& a, std::ostream& out) {
  BenchOptions options;
  options.modulation_threshold = a.threshold;
  options.small_region_fraction = a.min_region;
  options.thresholds = a.thresholds;
  options.mode = parse_failure_mode(a.failure_mode);
  options.heuristic = a.heuristic;
  const MaskKind mask = parse_mask_kind(a.mask);
  std::vector<UnwrapMethod> methods;
  for (const auto& m : a.methods) methods.push_back(parse_method(m));

  std::vector<fs::path> dirs;
  std::vector<SceneSpec> specs;
  SuiteKind kind = SuiteKind::Simple;
  if (!a.scenes.empty()) {
    for (const auto& entry : fs::directory_iterator(a.scenes)) {
      if (entry.is_directory() && fs::exists(entry.path() / "spec.txt")) dirs.push_back(entry.path());
    }
    std::sort(dirs.begin(), dirs.end());
    if (dirs.empty()) throw std::runtime_error("no scene directories under " + a.scenes);
  } else {
    kind = parse_suite_kind(a.suite);
    specs = scene_suite(kind, a.count, a.seed, a.width, a.height);
  }
  const std::size_t n = dirs.empty() ? specs.size() : dirs.size();

  std::vector<SceneOutcome> outcomes(n);
  parallel_for(n, [&](std::size_t i) {
    if (!dirs.empty()) {
      const LoadedScene scene = load_scene(dirs[i]);
      outcomes[i] = run_scene(dirs[i].filename().string(), scene.spec, scene.truth, mask, methods, options);
    } else {
      outcomes[i] = run_scene(scene_name(kind, i), specs[i], generate_scene(specs[i]), mask, methods, options);
    }
  });

  std::string csv = csv_header();
  for (const auto& o : outcomes) csv += csv_rows(o, options.thresholds);
  if (!a.out.empty()) write_text(a.out, csv);

  out << "mask " << mask_kind_name(mask) << ", " << n << " scenes\n";
  out << "method";
  for (double t : options.thresholds) out << "  fail@" << t;
  out << "  mean_rmse\n";
  for (std::size_t m = 0; m < methods.size(); ++m) {
    out << method_name(methods[m]);
    for (std::size_t t = 0; t < options.thresholds.size(); ++t) {
      std::size_t failures = 0;
      for (const auto& o : outcomes) failures += o.methods[m].failures[t] ? 1 : 0;
      char buf[64];
      std::snprintf(buf, sizeof buf, "  %zu/%zu (%.2f%%)", failures, n, 100.0 * failures / n);
      out << buf;
    }
    double rmse = 0.0;
    for (const auto& o : outcomes) rmse += o.methods[m].rmse;
    char buf[32];
    std::snprintf(buf, sizeof buf, "  %.6g\n", rmse / n);
    out << buf;
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fringe projection phase decoding, masking, unwrapping and evaluation", "fpp"};
  app.require_subcommand(1);
  Args a;

  auto method_opt = [&](CLI::App* sub) {
    sub->add_option("--method", a.method, "flood, modu or fspu")->check(CLI::IsMember(kMethodNames));
  };
  auto threshold_opts = [&](CLI::App* sub) {
    sub->add_option("--threshold", a.threshold, "modulation threshold")->check(CLI::NonNegativeNumber);
    sub->add_option("--min-region", a.min_region, "smallest kept region, fraction of all points")
        ->check(CLI::Range(0.0, 1.0));
  };
  auto heuristic_opts = [&](CLI::App* sub) {
    sub->add_option("--min-modulation", a.heuristic.min_modulation, "normalized modulation below which points are unreliable");
    sub->add_option("--max-second-diff", a.heuristic.max_second_diff, "wrapped second difference above which points are unreliable");
  };
  auto failure_opts = [&](CLI::App* sub) {
    sub->add_option("--thresholds", a.thresholds, "error-percent thresholds as fractions")
        ->delimiter(',')
        ->check(CLI::PositiveNumber & CLI::Range(0.0, 1.0));
    sub->add_option("--failure-mode", a.failure_mode, "order or phase03")
        ->check(CLI::IsMember({"order", "phase03"}));
  };
  auto suite_opts = [&](CLI::App* sub) {
    sub->add_option("--suite", a.suite, "scene family")->check(CLI::IsMember(kSuiteNames));
    sub->add_option("--count", a.count, "number of scenes")->check(CLI::PositiveNumber);
    sub->add_option("--seed", a.seed, "master seed");
    sub->add_option("--width", a.width)->check(CLI::Range(2, 1 << 14));
    sub->add_option("--height", a.height)->check(CLI::Range(2, 1 << 14));
  };

  auto* decode = app.add_subcommand("decode", "fringe stack to wrapped phase, background and modulation");
  decode->add_option("--stack", a.stack, "stack prefix (<prefix>_NN.fpm)")->required();
  decode->add_option("--out", a.out, "output prefix")->required();

  auto* pmi = app.add_subcommand("pmi", "fringe stack to PMI channels and validity");
  pmi->add_option("--stack", a.stack, "stack prefix")->required();
  pmi->add_option("--out", a.out, "output prefix")->required();
  threshold_opts(pmi);

  auto* classify = app.add_subcommand("classify", "PMI to label map with the rule-based classifier");
  classify->add_option("--pmi", a.pmi, "PMI prefix")->required();
  classify->add_option("--out", a.out, "label map (.pgm)")->required();
  heuristic_opts(classify);

  auto* unwrap_cmd = app.add_subcommand("unwrap", "spatial unwrapping of a wrapped phase map");
  unwrap_cmd->add_option("--phase", a.phase, "wrapped phase (.fpm)")->required();
  unwrap_cmd->add_option("--out", a.out, "continuous phase (.fpm)")->required();
  unwrap_cmd->add_option("--labels", a.labels, "label map; only label 2 is unwrapped");
  unwrap_cmd->add_option("--modulation", a.modulation, "modulation map, thresholded into the mask");
  unwrap_cmd->add_option("--quality", a.quality, "quality map for modu (default: modulation)");
  unwrap_cmd->add_option("--orders", a.orders, "fringe orders (.k16)");
  method_opt(unwrap_cmd);
  threshold_opts(unwrap_cmd);

  auto* tpu = app.add_subcommand("tpu", "temporal unwrapping with complementary Gray code");
  tpu->add_option("--stack", a.stack, "stack prefix")->required();
  tpu->add_option("--gray", a.gray, "Gray-code prefix (n regular patterns then the complementary one)")->required();
  tpu->add_option("--fringes", a.fringes, "fringe count of the code")->check(CLI::PositiveNumber);
  tpu->add_option("--out", a.out, "absolute phase (.fpm)")->required();
  tpu->add_option("--orders", a.orders, "fringe orders (.k16)");

  auto* label = app.add_subcommand("label", "modulation and depth to a ground-truth label map");
  label->add_option("--modulation", a.modulation, "modulation (.fpm)")->required();
  label->add_option("--depth", a.depth, "depth (.fpm)")->required();
  label->add_option("--out", a.out, "label map (.pgm)")->required();
  label->add_option("--filtered-depth", a.filtered, "depth after outlier removal (.fpm)");
  label->add_option("--threshold", a.threshold, "modulation threshold")->check(CLI::NonNegativeNumber);
  label->add_option("--spatial-sigma", a.outlier.spatial_sigma);
  label->add_option("--range-sigma", a.outlier.range_sigma);
  label->add_option("--window", a.outlier.variance_window);
  label->add_option("--variance", a.outlier.variance_threshold);
  label->add_option("--min-region", a.outlier.small_region_fraction)->check(CLI::Range(0.0, 1.0));

  auto* eval = app.add_subcommand("eval", "score a continuous phase map against ground truth");
  eval->add_option("--phase", a.phase, "continuous phase (.fpm)")->required();
  eval->add_option("--truth", a.truth, "ground-truth phase (.fpm)")->required();
  eval->add_option("--truth-labels", a.truth_labels, "reference labels; scoring is restricted to label 2");
  eval->add_option("--pred-labels", a.pred_labels, "predicted labels for classification metrics");
  eval->add_option("--map-id", a.map_id);
  eval->add_option("--scale", a.scale, "depth units per radian for the rmse column");
  eval->add_option("--out", a.out, "CSV report (default: stdout)");
  method_opt(eval);
  failure_opts(eval);

  auto* synth = app.add_subcommand("synth", "write a synthetic scene suite");
  synth->add_option("--out", a.out, "output directory")->required();
  suite_opts(synth);

  auto* recon = app.add_subcommand("reconstruct", "absolute phase and calibration to a point cloud");
  recon->add_option("--phase", a.phase, "absolute phase (.fpm)")->required();
  recon->add_option("--calib", a.calib, "calibration text file")->required();
  recon->add_option("--ply", a.ply, "output point cloud")->required();
  recon->add_option("--depth", a.depth, "output depth map (.fpm)");

  auto* bench = app.add_subcommand("bench", "full pipeline over a suite with a per-method failure table");
  suite_opts(bench);
  bench->add_option("--scenes", a.scenes, "directory written by synth (instead of --suite)");
  bench->add_option("--mask", a.mask, "oracle, threshold, heuristic or none")->check(CLI::IsMember(kMaskNames));
  bench->add_option("--methods", a.methods, "unwrappers to run")->delimiter(',')->check(CLI::IsMember(kMethodNames));
  bench->add_option("--out", a.out, "CSV report");
  threshold_opts(bench);
  heuristic_opts(bench);
  failure_opts(bench);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  const std::map<CLI::App*, int (*)(const Args&, std::ostream&)> commands{
      {decode, cmd_decode}, {pmi, cmd_pmi},     {classify, cmd_classify}, {unwrap_cmd, cmd_unwrap},
      {tpu, cmd_tpu},       {label, cmd_label}, {eval, cmd_eval},         {synth, cmd_synth},
      {recon, cmd_reconstruct}, {bench, cmd_bench}};
  try {
    for (const auto& [sub, fn] : commands) {
      if (sub->parsed()) return fn(a, out);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  err << app.help();
  return kExitUsage;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace fpp::cli
