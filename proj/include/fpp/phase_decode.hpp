// N-step phase shifting: fringe synthesis and decode of wrapped phase,
// background intensity and modulation.
//
// Frame n of an N-step stack is  I_n = I' + I'' cos(Phi + 2 pi n / N).
// With S = sum I_n sin(2 pi n / N) and C = sum I_n cos(2 pi n / N) the decode
// returns  phi = atan2(-S, C),  I' = mean(I_n),  I'' = (2/N) sqrt(S^2 + C^2).
#pragma once

#include <numbers>

#include "fpp/formats.hpp"

namespace fpp {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Maps x into (-pi, pi], congruent to x modulo 2 pi. Throws on non-finite input.
double wrap(double x);

/// Integer n such that (to + 2 pi n) - from == wrap(to - from).
int order_step(double from, double to);

struct PhaseShiftParams {
  int n_steps = 4;
};

FringeStack synthesize_fringes(const FloatMap& phase, const FloatMap& background, const FloatMap& modulation,
                               PhaseShiftParams params);

/// Wrapped phase in (-pi, pi]. Points with S = C = 0 are marked invalid.
FloatMap decode_wrapped(const FringeStack& stack);
FloatMap decode_background(const FringeStack& stack);
FloatMap decode_modulation(const FringeStack& stack);

struct DecodedPhase {
  FloatMap phase;
  FloatMap background;
  FloatMap modulation;
};

/// All three decodes in one pass over the stack.
DecodedPhase decode_all(const FringeStack& stack);

struct BinaryPatternParams {
  double period = 42.0;  // pixels
  int n_steps = 14;
  double defocus_sigma = 7.0;  // pixels; 0 leaves the pattern binary
  double low = 0.0;
  double high = 255.0;
  FringeDirection direction = FringeDirection::Vertical;
};

/// Phase-shifted square waves of 50% duty, each step shifted by period/N
/// pixels, then blurred by a Gaussian defocus kernel. The fundamental matches
/// the carrier 2 pi * coordinate / period under the cosine convention above.
FringeStack synthesize_binary_patterns(int width, int height, const BinaryPatternParams& params);

/// Linear carrier of num_fringes periods across the image along the fringe
/// axis, sampled at pixel centres and offset by -pi:
///   Phi = 2 pi * num_fringes * (c + 0.5) / extent - pi.
/// Every sample lies in [-pi, 2 pi num_fringes - pi), so its fringe order
/// under the (-pi, pi] wrap is the fringe index floor(num_fringes (c + 0.5) / extent).
FloatMap linear_carrier(int width, int height, double num_fringes, FringeDirection direction);

/// Separable Gaussian blur with replicated borders; sigma 0 returns the input.
FloatMap gaussian_blur(const FloatMap& map, double sigma);

}  // namespace fpp
