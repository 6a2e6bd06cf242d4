#include "fpp/phase_decode.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace fpp {

double wrap(double x) {
  if (!std::isfinite(x)) throw std::domain_error("wrap: non-finite phase");
  double r = x - kTwoPi * std::round(x / kTwoPi);
  if (r <= -kPi) r += kTwoPi;
  if (r > kPi) r -= kTwoPi;
  return r;
}

int order_step(double from, double to) {
  double d = to - from;
  return static_cast<int>(std::lround((wrap(d) - d) / kTwoPi));
}

FringeStack synthesize_fringes(const FloatMap& phase, const FloatMap& background, const FloatMap& modulation,
                               PhaseShiftParams params) {
  if (params.n_steps < 3) throw std::invalid_argument("synthesize_fringes: need at least 3 steps");
  if (!phase.same_shape(background) || !phase.same_shape(modulation)) {
    throw std::invalid_argument("synthesize_fringes: dimension mismatch");
  }
  const int n_steps = params.n_steps;
  std::vector<FloatMap> frames(static_cast<std::size_t>(n_steps), FloatMap(phase.width(), phase.height()));
  for (std::size_t i = 0; i < phase.size(); ++i) {
    if (modulation[i] < 0.0) throw std::invalid_argument("synthesize_fringes: negative modulation");
    for (int n = 0; n < n_steps; ++n) {
      frames[static_cast<std::size_t>(n)][i] =
          background[i] + modulation[i] * std::cos(phase[i] + kTwoPi * n / n_steps);
    }
  }
  return FringeStack(std::move(frames));
}

namespace {

constexpr double kZeroModulation = 1e-12;

struct Quadrature {
  std::vector<double> sin_table;
  std::vector<double> cos_table;

  explicit Quadrature(int n_steps) {
    for (int n = 0; n < n_steps; ++n) {
      sin_table.push_back(std::sin(kTwoPi * n / n_steps));
      cos_table.push_back(std::cos(kTwoPi * n / n_steps));
    }
  }
};

}  // namespace

DecodedPhase decode_all(const FringeStack& stack) {
  const int w = stack.width();
  const int h = stack.height();
  const int n_steps = stack.n_steps();
  Quadrature q(n_steps);
  DecodedPhase out{FloatMap(w, h), FloatMap(w, h), FloatMap(w, h)};
  for (std::size_t i = 0; i < out.phase.size(); ++i) {
    double s = 0.0, c = 0.0, sum = 0.0;
    for (int n = 0; n < n_steps; ++n) {
      double v = stack.frame(n)[i];
      s += v * q.sin_table[static_cast<std::size_t>(n)];
      c += v * q.cos_table[static_cast<std::size_t>(n)];
      sum += v;
    }
    out.background[i] = sum / n_steps;
    out.modulation[i] = 2.0 / n_steps * std::hypot(s, c);
    if (std::abs(s) <= kZeroModulation && std::abs(c) <= kZeroModulation) {
      out.phase.invalidate(i);
      out.modulation[i] = 0.0;
    } else {
      double phi = std::atan2(-s, c);
      out.phase[i] = phi <= -kPi ? kPi : phi;
    }
  }
  return out;
}

FloatMap decode_wrapped(const FringeStack& stack) { return decode_all(stack).phase; }
FloatMap decode_background(const FringeStack& stack) { return decode_all(stack).background; }
FloatMap decode_modulation(const FringeStack& stack) { return decode_all(stack).modulation; }

FloatMap linear_carrier(int width, int height, double num_fringes, FringeDirection direction) {
  FloatMap out(width, height);
  const double extent = direction == FringeDirection::Vertical ? width : height;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double c = direction == FringeDirection::Vertical ? x : y;
      out(x, y) = kTwoPi * num_fringes * (c + 0.5) / extent - kPi;
    }
  }
  return out;
}

FloatMap gaussian_blur(const FloatMap& map, double sigma) {
  if (sigma < 0.0) throw std::invalid_argument("gaussian_blur: negative sigma");
  if (sigma == 0.0) return map;
  const int radius = static_cast<int>(std::ceil(4.0 * sigma));
  std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
  double total = 0.0;
  for (int k = -radius; k <= radius; ++k) {
    double v = std::exp(-0.5 * k * k / (sigma * sigma));
    kernel[static_cast<std::size_t>(k + radius)] = v;
    total += v;
  }
  for (double& v : kernel) v /= total;

  const int w = map.width();
  const int h = map.height();
  auto pass = [&](const FloatMap& src, bool horizontal) {
    FloatMap dst(w, h);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double acc = 0.0;
        for (int k = -radius; k <= radius; ++k) {
          int sx = horizontal ? std::clamp(x + k, 0, w - 1) : x;
          int sy = horizontal ? y : std::clamp(y + k, 0, h - 1);
          acc += kernel[static_cast<std::size_t>(k + radius)] * src(sx, sy);
        }
        dst(x, y) = acc;
      }
    }
    return dst;
  };
  return pass(pass(map, true), false);
}

FringeStack synthesize_binary_patterns(int width, int height, const BinaryPatternParams& params) {
  if (params.period < 4.0) throw std::invalid_argument("synthesize_binary_patterns: period must be >= 4");
  if (params.n_steps < 3) throw std::invalid_argument("synthesize_binary_patterns: need at least 3 steps");
  std::vector<FloatMap> frames;
  for (int n = 0; n < params.n_steps; ++n) {
    const double shift = params.period * n / params.n_steps;
    FloatMap frame(width, height);
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        double coord = params.direction == FringeDirection::Vertical ? x : y;
        bool bright = std::cos(kTwoPi * (coord + shift) / params.period) >= 0.0;
        frame(x, y) = bright ? params.high : params.low;
      }
    }
    frames.push_back(gaussian_blur(frame, params.defocus_sigma));
  }
  return FringeStack(std::move(frames));
}

}  // namespace fpp
