#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "fpp/formats.hpp"

namespace fpp::test {

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::path(FPP_TEST_TMPDIR) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline FloatMap random_map(std::mt19937_64& rng, int w, int h, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  FloatMap m(w, h);
  for (double& v : m.values()) v = u(rng);
  return m;
}

inline Bytes bytes_of(const std::string& s) { return Bytes(s.begin(), s.end()); }

}  // namespace fpp::test
