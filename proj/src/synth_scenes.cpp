#include "fpp/synth_scenes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "fpp/phase_decode.hpp"

namespace fpp {

double SceneRng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

int SceneRng::uniform_int(int lo, int hi) {
  const double span = static_cast<double>(hi) - static_cast<double>(lo) + 1.0;
  return std::min(hi, lo + static_cast<int>(std::floor(uniform() * span)));
}

double SceneRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  spare_ = r * std::sin(kTwoPi * u2);
  has_spare_ = true;
  return r * std::cos(kTwoPi * u2);
}

bool ShadowPolygon::contains(double x, double y) const {
  bool inside = false;
  const std::size_t n = vertices.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const auto& a = vertices[i];
    const auto& b = vertices[j];
    if ((a.y > y) != (b.y > y) && x < (b.x - a.x) * (y - a.y) / (b.y - a.y) + a.x) inside = !inside;
  }
  return inside;
}

namespace {

void check_rect(const Rect& r, const SceneSpec& spec, const char* what) {
  if (r.x0 < 0 || r.y0 < 0 || r.x1 > spec.width || r.y1 > spec.height || r.x0 >= r.x1 || r.y0 >= r.y1) {
    throw std::invalid_argument(std::string("scene spec: ") + what + " rectangle outside the image or empty");
  }
}

}  // namespace

void SceneSpec::validate() const {
  if (width < 2 || height < 2) throw std::invalid_argument("scene spec: image must be at least 2x2");
  if (fringes < 1) throw std::invalid_argument("scene spec: fringe count must be >= 1");
  if (order_margin < 0) throw std::invalid_argument("scene spec: order margin must be >= 0");
  if (n_steps < 3) throw std::invalid_argument("scene spec: need at least 3 phase steps");
  if (!(noise_sigma >= 0.0)) throw std::invalid_argument("scene spec: noise sigma must be >= 0");
  if (blur_length < 1) throw std::invalid_argument("scene spec: blur length must be >= 1");
  if (!(background >= 0.0) || !(modulation >= 0.0)) throw std::invalid_argument("scene spec: negative intensity level");
  for (const auto& b : bumps) {
    if (!(b.sigma > 0.0)) throw std::invalid_argument("scene spec: bump sigma must be positive");
  }
  for (std::size_t i = 0; i < steps.size(); ++i) {
    check_rect(steps[i].rect, *this, "step");
    for (std::size_t j = 0; j < i; ++j) {
      if (steps[i].rect.overlaps(steps[j].rect)) throw std::invalid_argument("scene spec: overlapping steps");
    }
  }
  for (std::size_t i = 0; i < patches.size(); ++i) {
    check_rect(patches[i].rect, *this, "reflectivity patch");
    if (!(patches[i].factor >= 0.0 && patches[i].factor <= 1.0)) {
      throw std::invalid_argument("scene spec: reflectivity factor outside [0,1]");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (patches[i].rect.overlaps(patches[j].rect)) {
        throw std::invalid_argument("scene spec: overlapping reflectivity patches");
      }
    }
  }
  for (const auto& s : shadows) {
    if (s.vertices.size() < 3) throw std::invalid_argument("scene spec: shadow polygon needs 3 vertices");
  }
}

std::vector<std::string> SceneSpec::degradation_kinds() const {
  std::vector<std::string> kinds;
  if (!patches.empty()) kinds.emplace_back("reflectivity");
  if (blur_length > 1) kinds.emplace_back("blur");
  if (!steps.empty()) kinds.emplace_back("discontinuity");
  if (!shadows.empty()) kinds.emplace_back("shadow");
  if (noise_sigma > 0.0) kinds.emplace_back("noise");
  return kinds;
}

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string rect_text(const Rect& r) {
  return std::to_string(r.x0) + " " + std::to_string(r.y0) + " " + std::to_string(r.x1) + " " + std::to_string(r.y1);
}

}  // namespace

std::string format_scene_spec(const SceneSpec& spec) {
  std::ostringstream out;
  out << "# synthetic fringe projection scene\n";
  out << "width " << spec.width << "\nheight " << spec.height << "\n";
  out << "fringes " << spec.fringes << "\norder_margin " << spec.order_margin << "\n";
  out << "n_steps " << spec.n_steps << "\n";
  out << "background " << num(spec.background) << "\nmodulation " << num(spec.modulation) << "\n";
  out << "noise " << num(spec.noise_sigma) << "\n";
  out << "blur " << spec.blur_length << ' ' << (spec.blur_axis == BlurAxis::Horizontal ? "horizontal" : "vertical")
      << "\n";
  out << "depth " << num(spec.depth_base) << ' ' << num(spec.depth_per_radian) << "\n";
  out << "seed " << spec.seed << "\n";
  for (const auto& t : spec.tilts) out << "tilt " << num(t.gx) << ' ' << num(t.gy) << "\n";
  for (const auto& b : spec.bumps) {
    out << "bump " << num(b.cx) << ' ' << num(b.cy) << ' ' << num(b.sigma) << ' ' << num(b.amplitude) << "\n";
  }
  for (const auto& s : spec.steps) out << "step " << rect_text(s.rect) << ' ' << num(s.height) << "\n";
  for (const auto& p : spec.patches) out << "patch " << rect_text(p.rect) << ' ' << num(p.factor) << "\n";
  for (const auto& s : spec.shadows) {
    out << "shadow";
    for (const auto& v : s.vertices) out << ' ' << num(v.x) << ' ' << num(v.y);
    out << "\n";
  }
  return out.str();
}

SceneSpec parse_scene_spec(const std::string& text) {
  SceneSpec spec;
  std::istringstream lines(text);
  int line_no = 0;
  for (std::string line; std::getline(lines, line);) {
    ++line_no;
    line = line.substr(0, line.find('#'));
    std::istringstream in(line);
    std::string key;
    if (!(in >> key)) continue;
    auto fail = [&](const std::string& why) {
      throw std::invalid_argument("scene spec line " + std::to_string(line_no) + ": " + why);
    };
    auto read_rect = [&] {
      Rect r;
      if (!(in >> r.x0 >> r.y0 >> r.x1 >> r.y1)) fail("expected x0 y0 x1 y1");
      return r;
    };
    bool ok = true;
    if (key == "width") {
      ok = static_cast<bool>(in >> spec.width);
    } else if (key == "height") {
      ok = static_cast<bool>(in >> spec.height);
    } else if (key == "fringes") {
      ok = static_cast<bool>(in >> spec.fringes);
    } else if (key == "order_margin") {
      ok = static_cast<bool>(in >> spec.order_margin);
    } else if (key == "n_steps") {
      ok = static_cast<bool>(in >> spec.n_steps);
    } else if (key == "background") {
      ok = static_cast<bool>(in >> spec.background);
    } else if (key == "modulation") {
      ok = static_cast<bool>(in >> spec.modulation);
    } else if (key == "noise") {
      ok = static_cast<bool>(in >> spec.noise_sigma);
    } else if (key == "blur") {
      std::string axis = "horizontal";
      ok = static_cast<bool>(in >> spec.blur_length);
      in >> axis;
      if (axis == "horizontal") {
        spec.blur_axis = BlurAxis::Horizontal;
      } else if (axis == "vertical") {
        spec.blur_axis = BlurAxis::Vertical;
      } else {
        fail("blur axis must be horizontal or vertical");
      }
    } else if (key == "depth") {
      ok = static_cast<bool>(in >> spec.depth_base >> spec.depth_per_radian);
    } else if (key == "seed") {
      ok = static_cast<bool>(in >> spec.seed);
    } else if (key == "tilt") {
      Tilt t;
      ok = static_cast<bool>(in >> t.gx >> t.gy);
      spec.tilts.push_back(t);
    } else if (key == "bump") {
      Bump b;
      ok = static_cast<bool>(in >> b.cx >> b.cy >> b.sigma >> b.amplitude);
      spec.bumps.push_back(b);
    } else if (key == "step") {
      Step s;
      s.rect = read_rect();
      ok = static_cast<bool>(in >> s.height);
      spec.steps.push_back(s);
    } else if (key == "patch") {
      ReflectivityPatch p;
      p.rect = read_rect();
      ok = static_cast<bool>(in >> p.factor);
      spec.patches.push_back(p);
    } else if (key == "shadow") {
      ShadowPolygon s;
      for (Vertex v; in >> v.x >> v.y;) s.vertices.push_back(v);
      spec.shadows.push_back(std::move(s));
    } else {
      fail("unknown key '" + key + "'");
    }
    if (!ok) fail("malformed value for '" + key + "'");
  }
  spec.validate();
  return spec;
}

FloatMap primitive_phase(const SceneSpec& spec) {
  FloatMap out(spec.width, spec.height);
  const double cx = spec.width / 2.0;
  const double cy = spec.height / 2.0;
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      double v = 0.0;
      for (const auto& t : spec.tilts) v += t.gx * (x + 0.5 - cx) + t.gy * (y + 0.5 - cy);
      for (const auto& b : spec.bumps) {
        const double dx = x - b.cx;
        const double dy = y - b.cy;
        v += b.amplitude * std::exp(-(dx * dx + dy * dy) / (2.0 * b.sigma * b.sigma));
      }
      for (const auto& s : spec.steps) {
        if (s.rect.contains(x, y)) v += s.height;
      }
      out(x, y) = v;
    }
  }
  return out;
}

FloatMap scene_carrier(const SceneSpec& spec) {
  FloatMap carrier = linear_carrier(spec.width, spec.height, spec.fringes, FringeDirection::Vertical);
  for (double& v : carrier.values()) v += kTwoPi * spec.order_margin;
  return carrier;
}

FloatMap phase_to_depth(const FloatMap& phase, const SceneSpec& spec) {
  if (phase.width() != spec.width || phase.height() != spec.height) {
    throw std::invalid_argument("phase_to_depth: dimension mismatch");
  }
  const FloatMap carrier = scene_carrier(spec);
  FloatMap out(spec.width, spec.height);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (phase.valid(i)) {
      out[i] = spec.depth_base + spec.depth_per_radian * (phase[i] - carrier[i]);
    } else {
      out.invalidate(i);
    }
  }
  return out;
}

double predicted_phase_sigma(double noise_sigma, double modulation, int n_steps) {
  if (modulation <= 0.0) return noise_sigma > 0.0 ? kPi : 0.0;
  return std::sqrt(2.0) * noise_sigma / (modulation * std::sqrt(static_cast<double>(n_steps)));
}

namespace {

FloatMap box_blur(const FloatMap& map, int length, BlurAxis axis) {
  if (length <= 1) return map;
  const int lo = -(length - 1) / 2;
  const int hi = lo + length - 1;
  FloatMap out(map.width(), map.height());
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      double acc = 0.0;
      for (int k = lo; k <= hi; ++k) {
        if (axis == BlurAxis::Horizontal) {
          acc += map(std::clamp(x + k, 0, map.width() - 1), y);
        } else {
          acc += map(x, std::clamp(y + k, 0, map.height() - 1));
        }
      }
      out(x, y) = acc / length;
    }
  }
  return out;
}

void add_noise(FloatMap& map, double sigma, SceneRng& rng) {
  if (sigma <= 0.0) return;
  for (double& v : map.values()) v += sigma * rng.normal();
}

// Points on either side of a 4-neighbour absolute-phase jump above pi/2,
// dilated along the blur axis by the blur length.
Mask discontinuity_points(const FloatMap& phase, const Mask& lit, const SceneSpec& spec) {
  Mask jump(phase.width(), phase.height(), 0);
  for (int y = 0; y < phase.height(); ++y) {
    for (int x = 0; x < phase.width(); ++x) {
      const Pixel nbrs[2] = {{x + 1, y}, {x, y + 1}};
      for (auto [nx, ny] : nbrs) {
        if (!phase.contains(nx, ny) || !lit(x, y) || !lit(nx, ny)) continue;
        if (std::abs(phase(x, y) - phase(nx, ny)) > kDiscontinuityJump) {
          jump(x, y) = 1;
          jump(nx, ny) = 1;
        }
      }
    }
  }
  if (spec.blur_length <= 1) return jump;
  Mask grown = jump;
  const int reach = spec.blur_length;
  for (int y = 0; y < phase.height(); ++y) {
    for (int x = 0; x < phase.width(); ++x) {
      if (!jump(x, y)) continue;
      for (int k = -reach; k <= reach; ++k) {
        const int nx = spec.blur_axis == BlurAxis::Horizontal ? x + k : x;
        const int ny = spec.blur_axis == BlurAxis::Horizontal ? y : y + k;
        if (grown.contains(nx, ny)) grown(nx, ny) = 1;
      }
    }
  }
  return grown;
}

}  // namespace

SceneTruth generate_scene(const SceneSpec& spec) {
  spec.validate();
  const int w = spec.width;
  const int h = spec.height;
  const FloatMap carrier = scene_carrier(spec);
  const FloatMap primitives = primitive_phase(spec);

  FloatMap phase(w, h);
  for (std::size_t i = 0; i < phase.size(); ++i) phase[i] = carrier[i] + primitives[i];

  const double code_limit = kTwoPi * spec.code_fringes() - kPi;
  FloatMap background(w, h);
  FloatMap modulation(w, h);
  Mask lit(w, h, 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double reflectivity = 1.0;
      for (const auto& p : spec.patches) {
        if (p.rect.contains(x, y)) reflectivity = p.factor;
      }
      bool shadowed = false;
      for (const auto& s : spec.shadows) shadowed = shadowed || s.contains(x + 0.5, y + 0.5);
      const double phi = phase(x, y);
      const bool in_range = phi >= -kPi && phi < code_limit;
      lit(x, y) = !shadowed && in_range ? 1 : 0;
      background(x, y) = spec.background * reflectivity * (shadowed ? 0.2 : 1.0);
      modulation(x, y) = lit(x, y) ? spec.modulation * reflectivity : 0.0;
    }
  }

  SceneRng rng(spec.seed);
  const FringeStack clean = synthesize_fringes(phase, background, modulation, {spec.n_steps});
  std::vector<FloatMap> blurred;
  for (const auto& f : clean.frames()) blurred.push_back(box_blur(f, spec.blur_length, spec.blur_axis));
  // Noise-free decode of the degraded stack: modulation for the background
  // test, and the deterministic phase bias that blur across shadow edges or
  // steps introduces.
  DecodedPhase expected = decode_all(FringeStack(blurred));
  const FloatMap expected_modulation = std::move(expected.modulation);

  std::vector<FloatMap> noisy = blurred;
  for (auto& f : noisy) add_noise(f, spec.noise_sigma, rng);
  FringeStack stack(std::move(noisy));

  GraycodeSet gray = render_graycode(phase, spec.code_fringes(), background, modulation);
  for (auto& code : gray.codes) {
    code = box_blur(code, spec.blur_length, spec.blur_axis);
    add_noise(code, spec.noise_sigma, rng);
  }
  gray.reference = decode_background(stack);

  const Mask jumps = discontinuity_points(phase, lit, spec);
  LabelMap labels(w, h, Label::Background);
  FloatMap depth(w, h);
  OrderMap order(w, h, 0);
  for (std::size_t i = 0; i < phase.size(); ++i) {
    const double m = expected_modulation[i];
    order[i] = static_cast<std::int32_t>(std::lround((phase[i] - wrap(phase[i])) / kTwoPi));
    if (m <= 2.0) {
      labels[i] = Label::Background;
    } else if (predicted_phase_sigma(spec.noise_sigma, m, spec.n_steps) > kUnreliablePhaseSigma || jumps[i] ||
               !expected.phase.valid(i) || std::abs(wrap(expected.phase[i] - phase[i])) > kUnreliablePhaseSigma) {
      labels[i] = Label::Unreliable;
    } else {
      labels[i] = Label::Reliable;
    }
    if (labels[i] == Label::Background) {
      depth.invalidate(i);
    } else {
      depth[i] = spec.depth_base + spec.depth_per_radian * primitives[i];
    }
  }

  return {std::move(phase), std::move(order), std::move(labels), std::move(depth), expected_modulation,
          std::move(stack), std::move(gray)};
}

SuiteKind parse_suite_kind(const std::string& name) {
  if (name == "simple") return SuiteKind::Simple;
  if (name == "reflectivity") return SuiteKind::Reflectivity;
  if (name == "blur") return SuiteKind::Blur;
  if (name == "discontinuity") return SuiteKind::Discontinuity;
  if (name == "complex") return SuiteKind::Complex;
  throw std::invalid_argument("unknown suite: " + name);
}

const char* suite_kind_name(SuiteKind kind) {
  switch (kind) {
    case SuiteKind::Simple:
      return "simple";
    case SuiteKind::Reflectivity:
      return "reflectivity";
    case SuiteKind::Blur:
      return "blur";
    case SuiteKind::Discontinuity:
      return "discontinuity";
    case SuiteKind::Complex:
      return "complex";
  }
  return "?";
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Smooth background surface shared by every category. Gradients stay well
// below pi per pixel and the primitive phase stays inside the order margin.
void add_smooth_surface(SceneSpec& spec, SceneRng& rng) {
  const double scale = std::min(spec.width, spec.height) / 256.0;
  spec.tilts.push_back({rng.uniform(-0.012, 0.012) / scale, rng.uniform(-0.012, 0.012) / scale});
  const int bumps = rng.uniform_int(1, 3);
  for (int b = 0; b < bumps; ++b) {
    Bump bump;
    bump.cx = rng.uniform(0.25, 0.75) * spec.width;
    bump.cy = rng.uniform(0.25, 0.75) * spec.height;
    bump.sigma = rng.uniform(15.0, 35.0) * scale;
    const double max_amp = 0.45 * bump.sigma;  // peak slope 0.45 * 0.607 rad/px
    bump.amplitude = rng.uniform(-1.0, 1.0) * std::min(4.0, max_amp);
    spec.bumps.push_back(bump);
  }
}

Rect random_rect(SceneRng& rng, const SceneSpec& spec, int min_size, int max_size) {
  const int rw = rng.uniform_int(min_size, max_size);
  const int rh = rng.uniform_int(min_size, max_size);
  const int x0 = rng.uniform_int(spec.width / 8, spec.width - spec.width / 8 - rw);
  const int y0 = rng.uniform_int(spec.height / 8, spec.height - spec.height / 8 - rh);
  return {x0, y0, x0 + rw, y0 + rh};
}

template <class Item>
bool overlaps_any(const Rect& r, const std::vector<Item>& items) {
  return std::any_of(items.begin(), items.end(), [&](const Item& it) { return it.rect.overlaps(r); });
}

void add_patches(SceneSpec& spec, SceneRng& rng) {
  const int scale = std::min(spec.width, spec.height);
  const int count = rng.uniform_int(1, 3);
  for (int attempt = 0; attempt < 50 && static_cast<int>(spec.patches.size()) < count; ++attempt) {
    Rect r = random_rect(rng, spec, scale / 9, scale / 3);
    if (overlaps_any(r, spec.patches)) continue;
    spec.patches.push_back({r, rng.uniform(0.02, 0.25)});
  }
}

void add_blur(SceneSpec& spec, SceneRng& rng) {
  spec.blur_length = 2 * rng.uniform_int(1, 4) + 1;
  spec.blur_axis = rng.uniform() < 0.5 ? BlurAxis::Horizontal : BlurAxis::Vertical;
}

void add_steps(SceneSpec& spec, SceneRng& rng) {
  const int scale = std::min(spec.width, spec.height);
  const int count = rng.uniform_int(1, 2);
  for (int attempt = 0; attempt < 50 && static_cast<int>(spec.steps.size()) < count; ++attempt) {
    Rect r = random_rect(rng, spec, scale / 6, scale * 2 / 5);
    if (overlaps_any(r, spec.steps)) continue;
    const double magnitude = rng.uniform(2.0, 9.0);
    spec.steps.push_back({r, rng.uniform() < 0.5 ? -magnitude : magnitude});
  }
}

void add_shadow(SceneSpec& spec, SceneRng& rng) {
  const double scale = std::min(spec.width, spec.height) / 256.0;
  const double cx = rng.uniform(0.2, 0.8) * spec.width;
  const double cy = rng.uniform(0.2, 0.8) * spec.height;
  const int corners = rng.uniform_int(3, 5);
  ShadowPolygon poly;
  for (int c = 0; c < corners; ++c) {
    const double angle = kTwoPi * (c + rng.uniform(0.0, 0.6)) / corners;
    const double radius = rng.uniform(12.0, 32.0) * scale;
    poly.vertices.push_back({cx + radius * std::cos(angle), cy + radius * std::sin(angle)});
  }
  spec.shadows.push_back(std::move(poly));
}

}  // namespace

std::vector<SceneSpec> scene_suite(SuiteKind kind, int count, std::uint64_t master_seed, int width, int height) {
  if (count < 1) throw std::invalid_argument("scene_suite: count must be >= 1");
  SceneRng rng(splitmix64(master_seed ^ (static_cast<std::uint64_t>(kind) + 1) * 0x632BE59BD9B4E019ULL));
  std::vector<SceneSpec> specs;
  for (int n = 0; n < count; ++n) {
    SceneSpec spec;
    spec.width = width;
    spec.height = height;
    spec.seed = splitmix64(master_seed + 0x1000003ULL * static_cast<std::uint64_t>(n) +
                           (static_cast<std::uint64_t>(kind) << 40));
    add_smooth_surface(spec, rng);
    switch (kind) {
      case SuiteKind::Simple:
        break;
      case SuiteKind::Reflectivity:
        add_patches(spec, rng);
        spec.noise_sigma = rng.uniform(1.0, 3.0);
        break;
      case SuiteKind::Blur:
        add_blur(spec, rng);
        spec.noise_sigma = rng.uniform(0.5, 2.0);
        break;
      case SuiteKind::Discontinuity:
        add_steps(spec, rng);
        spec.noise_sigma = rng.uniform(0.5, 2.0);
        break;
      case SuiteKind::Complex: {
        // At least two of the four structural degradations, always with noise.
        int kinds[4] = {0, 1, 2, 3};
        for (int i = 3; i > 0; --i) std::swap(kinds[i], kinds[rng.uniform_int(0, i)]);
        const int chosen = rng.uniform_int(2, 3);
        for (int i = 0; i < chosen; ++i) {
          switch (kinds[i]) {
            case 0:
              add_patches(spec, rng);
              break;
            case 1:
              add_blur(spec, rng);
              break;
            case 2:
              add_steps(spec, rng);
              break;
            default:
              add_shadow(spec, rng);
              break;
          }
        }
        spec.noise_sigma = rng.uniform(1.0, 3.0);
        break;
      }
    }
    spec.validate();
    specs.push_back(std::move(spec));
  }
  return specs;
}

void save_scene(const std::filesystem::path& dir, const SceneSpec& spec, const SceneTruth& truth) {
  std::filesystem::create_directories(dir);
  const std::string text = format_scene_spec(spec);
  write_file_atomic(dir / "spec.txt", Bytes(text.begin(), text.end()));
  save_stack(dir / "stack", truth.stack);
  save_graycode(dir / "gray", truth.graycode);
  save_fpm(dir / "phi_gt.fpm", truth.phase);
  save_order_map(dir / "k_gt.k16", truth.order);
  save_labelmap(dir / "labels_gt.pgm", truth.labels);
  save_fpm(dir / "depth_gt.fpm", truth.depth);
  save_fpm(dir / "mod_gt.fpm", truth.expected_modulation);
}

LoadedScene load_scene(const std::filesystem::path& dir) {
  const Bytes text = read_file(dir / "spec.txt");
  SceneSpec spec = parse_scene_spec(std::string(text.begin(), text.end()));
  FringeStack stack = load_stack(dir / "stack");
  FloatMap reference = decode_background(stack);
  SceneTruth truth{load_fpm(dir / "phi_gt.fpm"),
                   load_order_map(dir / "k_gt.k16"),
                   load_labelmap(dir / "labels_gt.pgm"),
                   load_fpm(dir / "depth_gt.fpm"),
                   load_fpm(dir / "mod_gt.fpm"),
                   std::move(stack),
                   load_graycode(dir / "gray", spec.code_fringes(), std::move(reference))};
  if (truth.phase.width() != spec.width || truth.phase.height() != spec.height ||
      !truth.phase.same_shape(truth.labels) || !truth.phase.same_shape(truth.depth) ||
      truth.stack.width() != spec.width || truth.stack.height() != spec.height) {
    throw DecodeError(DecodeError::Kind::LengthMismatch, "scene " + dir.string() + ": inconsistent map dimensions");
  }
  return {std::move(spec), std::move(truth)};
}

}  // namespace fpp
