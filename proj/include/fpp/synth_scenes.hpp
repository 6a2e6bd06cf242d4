// Deterministic synthetic fringe-projection scenes with ground truth.
//
// Absolute phase is a linear carrier along x plus surface primitives (tilts,
// Gaussian bumps, rectangular steps). The carrier sits order_margin fringes
// inside the projector's code range so primitives may push it either way.
// Degradations: reflectivity patches, shadow polygons, box motion blur and
// additive Gaussian noise.
#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "fpp/formats.hpp"
#include "fpp/phase_decode.hpp"
#include "fpp/unwrap_temporal.hpp"

namespace fpp {

/// Portable normal and uniform deviates over mt19937_64 (std distributions
/// are implementation-defined and would make suites library-dependent).
class SceneRng {
 public:
  explicit SceneRng(std::uint64_t seed) : engine_(seed) {}
  double uniform();  // [0, 1)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int uniform_int(int lo, int hi);  // inclusive
  double normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

struct Rect {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // half-open [x0, x1) x [y0, y1)
  bool contains(int x, int y) const { return x >= x0 && x < x1 && y >= y0 && y < y1; }
  bool overlaps(const Rect& o) const { return x0 < o.x1 && o.x0 < x1 && y0 < o.y1 && o.y0 < y1; }
  friend bool operator==(const Rect&, const Rect&) = default;
};

struct Tilt {
  double gx = 0.0, gy = 0.0;  // radians per pixel about the image centre
  friend bool operator==(const Tilt&, const Tilt&) = default;
};

struct Bump {
  double cx = 0.0, cy = 0.0, sigma = 1.0, amplitude = 0.0;  // amplitude in radians
  friend bool operator==(const Bump&, const Bump&) = default;
};

struct Step {
  Rect rect;
  double height = 0.0;  // radians
  friend bool operator==(const Step&, const Step&) = default;
};

struct ReflectivityPatch {
  Rect rect;
  double factor = 1.0;
  friend bool operator==(const ReflectivityPatch&, const ReflectivityPatch&) = default;
};

struct Vertex {
  double x = 0.0, y = 0.0;
  friend bool operator==(const Vertex&, const Vertex&) = default;
};

struct ShadowPolygon {
  std::vector<Vertex> vertices;
  bool contains(double x, double y) const;
  friend bool operator==(const ShadowPolygon&, const ShadowPolygon&) = default;
};

enum class BlurAxis { Horizontal, Vertical };

struct SceneSpec {
  int width = 256;
  int height = 256;
  int fringes = 16;
  int order_margin = 1;
  int n_steps = 4;
  double background = 100.0;  // I'_0
  double modulation = 50.0;   // I''_0
  double noise_sigma = 0.0;   // intensity units
  int blur_length = 1;        // pixels; 1 disables blur
  BlurAxis blur_axis = BlurAxis::Horizontal;
  double depth_base = 100.0;
  double depth_per_radian = 1.0;
  std::uint64_t seed = 0;
  std::vector<Tilt> tilts;
  std::vector<Bump> bumps;
  std::vector<Step> steps;
  std::vector<ReflectivityPatch> patches;
  std::vector<ShadowPolygon> shadows;

  /// Throws std::invalid_argument on bad values or contradictory primitives
  /// (overlapping steps or overlapping reflectivity patches).
  void validate() const;
  /// Projector code range in fringes: fringes + 2 * order_margin.
  int code_fringes() const { return fringes + 2 * order_margin; }
  /// Any of "reflectivity", "blur", "discontinuity", "shadow", "noise".
  std::vector<std::string> degradation_kinds() const;

  friend bool operator==(const SceneSpec&, const SceneSpec&) = default;
};

/// Human-editable key/value text, one item per line, '#' comments.
std::string format_scene_spec(const SceneSpec& spec);
SceneSpec parse_scene_spec(const std::string& text);

struct SceneTruth {
  FloatMap phase;               // absolute phase
  OrderMap order;               // fringe order of phase under the (-pi, pi] wrap
  LabelMap labels;
  FloatMap depth;               // invalid where the label is background
  FloatMap expected_modulation; // modulation after blur, before noise
  FringeStack stack;
  GraycodeSet graycode;
};

/// Primitive phase contribution (tilts + bumps + steps) at every point.
FloatMap primitive_phase(const SceneSpec& spec);
/// Carrier plus margin offset, without primitives.
FloatMap scene_carrier(const SceneSpec& spec);
/// Inverse of the generator's phase-to-depth mapping.
FloatMap phase_to_depth(const FloatMap& phase, const SceneSpec& spec);

/// Predicted wrapped-phase standard deviation for N-step decoding:
/// sqrt(2) * sigma / (modulation * sqrt(N)).
double predicted_phase_sigma(double noise_sigma, double modulation, int n_steps);

inline constexpr double kUnreliablePhaseSigma = kPi / 4;
inline constexpr double kDiscontinuityJump = kPi / 2;

/// Labels: 0 where the blurred modulation is <= 2; 1 where the predicted
/// phase sigma exceeds pi/4, on either side of a neighbour jump above pi/2,
/// (with blur) within blur_length of such a jump, or where the noise-free
/// degraded stack decodes more than pi/4 away from the true phase; 2 otherwise.
SceneTruth generate_scene(const SceneSpec& spec);

enum class SuiteKind { Simple, Reflectivity, Blur, Discontinuity, Complex };
SuiteKind parse_suite_kind(const std::string& name);
const char* suite_kind_name(SuiteKind kind);

std::vector<SceneSpec> scene_suite(SuiteKind kind, int count, std::uint64_t master_seed, int width = 256,
                                   int height = 256);

/// Writes spec.txt, stack_NN.fpm, gray_NN.fpm, phi_gt.fpm, k_gt.k16,
/// labels_gt.pgm, depth_gt.fpm and mod_gt.fpm into dir.
void save_scene(const std::filesystem::path& dir, const SceneSpec& spec, const SceneTruth& truth);

struct LoadedScene {
  SceneSpec spec;
  SceneTruth truth;
};

/// Reads a directory written by save_scene. The Gray-code reference is the
/// background decoded from the stored stack.
LoadedScene load_scene(const std::filesystem::path& dir);

}  // namespace fpp
