#include <doctest.h>

#include <cmath>

#include "fpp/evaluation.hpp"
#include "fpp/phase_decode.hpp"
#include "fpp/synth_scenes.hpp"
#include "fpp/unwrap_spatial.hpp"
#include "support.hpp"

using namespace fpp;

namespace {

SceneSpec small_spec() {
  SceneSpec s;
  s.width = 96;
  s.height = 64;
  s.fringes = 6;
  return s;
}

std::size_t structural_kinds(const SceneSpec& s) {
  std::size_t n = 0;
  for (const auto& k : s.degradation_kinds()) n += k != "noise";
  return n;
}

}  // namespace

TEST_CASE("portable generator is deterministic") {
  SceneRng a(42), b(42);
  for (int i = 0; i < 100; ++i) {
    REQUIRE(a.uniform() == b.uniform());
    REQUIRE(a.normal() == b.normal());
    const int k = a.uniform_int(-3, 4);
    REQUIRE(k == b.uniform_int(-3, 4));
    REQUIRE(k >= -3);
    REQUIRE(k <= 4);
  }
  SceneRng c(1);
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double z = c.normal();
    sum += z;
    sum2 += z * z;
  }
  CHECK(std::abs(sum / 20000) < 0.03);
  CHECK(sum2 / 20000 == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("flat clean scene") {
  const SceneSpec spec = small_spec();
  const SceneTruth t = generate_scene(spec);
  const FloatMap carrier = scene_carrier(spec);
  const FloatMap phi = decode_wrapped(t.stack);
  for (std::size_t i = 0; i < phi.size(); ++i) {
    REQUIRE(t.labels[i] == Label::Reliable);
    REQUIRE(t.phase[i] == carrier[i]);
    REQUIRE(std::abs(wrap(phi[i] - wrap(t.phase[i]))) < 1e-9);
    REQUIRE(t.order[i] == std::lround((t.phase[i] - wrap(t.phase[i])) / kTwoPi));
    REQUIRE(t.depth[i] == spec.depth_base);
  }
  CHECK(spec.degradation_kinds().empty());
}

TEST_CASE("shadowed points have no modulation and background labels") {
  SceneSpec spec = small_spec();
  spec.shadows.push_back({{{20, 10}, {50, 10}, {50, 30}, {20, 30}}});
  const SceneTruth t = generate_scene(spec);
  const FloatMap m = decode_modulation(t.stack);
  CHECK(m(30, 20) < 1e-9);
  CHECK(t.labels(30, 20) == Label::Background);
  CHECK_FALSE(t.depth.valid(30, 20));
  CHECK(t.labels(70, 50) == Label::Reliable);
  CHECK(spec.shadows[0].contains(30.5, 20.5));
  CHECK_FALSE(spec.shadows[0].contains(60.5, 20.5));
}

TEST_CASE("noisy dark patch is labelled unreliable") {
  SceneSpec spec = small_spec();
  spec.patches.push_back({{10, 10, 40, 40}, 0.05});
  spec.noise_sigma = 2.78;
  spec.seed = 3;
  const SceneTruth t = generate_scene(spec);
  CHECK(predicted_phase_sigma(2.78, 50 * 0.05, 4) > kUnreliablePhaseSigma);
  CHECK(predicted_phase_sigma(2.78, 50, 4) < kUnreliablePhaseSigma);
  CHECK(t.labels(25, 25) == Label::Unreliable);
  CHECK(t.labels(70, 50) == Label::Reliable);
}

TEST_CASE("steps mark both sides of the jump and blur widens the band") {
  SceneSpec spec = small_spec();
  spec.steps.push_back({{40, 0, 96, 64}, 4.0});
  const SceneTruth sharp = generate_scene(spec);
  CHECK(sharp.labels(39, 30) == Label::Unreliable);
  CHECK(sharp.labels(40, 30) == Label::Unreliable);
  CHECK(sharp.labels(37, 30) == Label::Reliable);
  CHECK(sharp.depth(50, 30) == doctest::Approx(spec.depth_base + 4.0));

  spec.blur_length = 5;
  const SceneTruth blurred = generate_scene(spec);
  CHECK(blurred.labels(35, 30) == Label::Unreliable);
  CHECK(blurred.labels(44, 30) == Label::Unreliable);
  CHECK(blurred.labels(30, 30) == Label::Reliable);
}

TEST_CASE("scene spec validation and text round trip") {
  SceneSpec spec = small_spec();
  spec.tilts.push_back({0.01, -0.02});
  spec.bumps.push_back({40.5, 30.25, 12.0, 1.5});
  spec.steps.push_back({{10, 10, 30, 30}, -3.25});
  spec.patches.push_back({{50, 5, 70, 25}, 0.1});
  spec.shadows.push_back({{{1.5, 2.5}, {10, 3}, {4, 9}}});
  spec.noise_sigma = 1.0 / 3.0;
  spec.blur_length = 3;
  spec.blur_axis = BlurAxis::Vertical;
  spec.seed = 0xFFFFFFFFFFFFFFFFULL;
  CHECK(parse_scene_spec(format_scene_spec(spec)) == spec);

  SceneSpec overlap = spec;
  overlap.steps.push_back({{20, 20, 40, 40}, 2.0});
  CHECK_THROWS_AS(overlap.validate(), std::invalid_argument);
  overlap = spec;
  overlap.patches.push_back({{60, 10, 80, 30}, 0.5});
  CHECK_THROWS_AS(generate_scene(overlap), std::invalid_argument);

  SceneSpec bad = small_spec();
  bad.fringes = 0;
  CHECK_THROWS(bad.validate());
  bad = small_spec();
  bad.noise_sigma = -1;
  CHECK_THROWS(bad.validate());
  bad = small_spec();
  bad.blur_length = 0;
  CHECK_THROWS(bad.validate());
  CHECK_THROWS(parse_scene_spec("width 10\nsparkle 3\n"));
  CHECK_THROWS(parse_scene_spec("width ten\n"));
}

TEST_CASE("suites are deterministic and follow their categories") {
  const auto simple = scene_suite(SuiteKind::Simple, 3, 7);
  REQUIRE(simple.size() == 3);
  for (const auto& s : simple) CHECK(s.degradation_kinds().empty());
  CHECK(scene_suite(SuiteKind::Simple, 3, 7) == simple);
  CHECK(scene_suite(SuiteKind::Simple, 3, 8) != simple);

  for (const auto& s : scene_suite(SuiteKind::Complex, 30, 7)) CHECK(structural_kinds(s) >= 2);
  for (const auto& s : scene_suite(SuiteKind::Reflectivity, 5, 7)) CHECK_FALSE(s.patches.empty());
  for (const auto& s : scene_suite(SuiteKind::Blur, 5, 7)) CHECK(s.blur_length % 2 == 1);
  for (const auto& s : scene_suite(SuiteKind::Discontinuity, 5, 7)) CHECK_FALSE(s.steps.empty());
  CHECK_THROWS(scene_suite(SuiteKind::Simple, 0, 7));
  CHECK_THROWS(parse_suite_kind("glossy"));
  CHECK(parse_suite_kind(suite_kind_name(SuiteKind::Blur)) == SuiteKind::Blur);
}

TEST_CASE("generated truth is byte identical for identical specs") {
  const SceneSpec spec = scene_suite(SuiteKind::Complex, 1, 5, 64, 64).front();
  const SceneTruth a = generate_scene(spec);
  const SceneTruth b = generate_scene(spec);
  CHECK(encode_fpm(a.phase) == encode_fpm(b.phase));
  CHECK(a.labels == b.labels);
  for (int n = 0; n < a.stack.n_steps(); ++n) CHECK(a.stack.frame(n) == b.stack.frame(n));
  for (std::size_t k = 0; k < a.graycode.codes.size(); ++k) CHECK(a.graycode.codes[k] == b.graycode.codes[k]);
}

TEST_CASE("clean suite scenes unwrap to ground truth on reliable points") {
  for (const auto& spec : scene_suite(SuiteKind::Simple, 3, 21, 128, 128)) {
    const SceneTruth t = generate_scene(spec);
    const FloatMap phi = decode_wrapped(t.stack);
    const UnwrapResult r = flood_fill_unwrap(phi, mask_from_labels(t.labels));
    const AlignResult a = align_relative(r.phase, t.phase, r.regions);
    for (std::size_t i = 0; i < phi.size(); ++i) {
      if (t.labels[i] == Label::Reliable) REQUIRE(std::abs(a.phase[i] - t.phase[i]) < 1e-9);
    }
  }
}

TEST_CASE("temporal unwrapping of a generated scene recovers its phase") {
  const SceneSpec spec = scene_suite(SuiteKind::Discontinuity, 1, 4, 128, 96).front();
  const SceneTruth t = generate_scene(spec);
  SceneSpec clean = spec;
  clean.noise_sigma = 0;
  const SceneTruth c = generate_scene(clean);
  const FloatMap phi = decode_wrapped(c.stack);
  const FringeOrders k = decode_fringe_order(c.graycode, phi);
  const FloatMap abs_phase = tpu_unwrap(phi, k);
  for (std::size_t i = 0; i < phi.size(); ++i) {
    if (c.labels[i] == Label::Background) continue;
    REQUIRE(k.order[i] == c.order[i]);
    REQUIRE(std::abs(abs_phase[i] - c.phase[i]) < 1e-9);
  }
  CHECK(t.phase == c.phase);
}

TEST_CASE("scenes round trip through their directory layout") {
  auto dir = test::scratch_dir("scene");
  const SceneSpec spec = scene_suite(SuiteKind::Reflectivity, 1, 2, 48, 40).front();
  const SceneTruth t = generate_scene(spec);
  save_scene(dir, spec, t);
  for (const char* f : {"spec.txt", "stack_00.fpm", "gray_00.fpm", "phi_gt.fpm", "k_gt.k16", "labels_gt.pgm",
                        "depth_gt.fpm", "mod_gt.fpm"}) {
    CHECK(std::filesystem::exists(dir / f));
  }
  const LoadedScene back = load_scene(dir);
  CHECK(back.spec == spec);
  CHECK(back.truth.labels == t.labels);
  CHECK(back.truth.order == t.order);
  CHECK(back.truth.stack.n_steps() == t.stack.n_steps());
  CHECK(back.truth.graycode.codes.size() == t.graycode.codes.size());
}
