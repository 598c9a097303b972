#pragma once

#include "hadal/scenario.hpp"

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

namespace hadal::test {

inline std::filesystem::path scenario_dir() { return HADAL_SCENARIO_DIR; }

inline ScenarioConfig shipped_scenario() { return load_scenario_file(scenario_dir()); }

/// Fresh scratch directory under the build tree, emptied on creation.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::path(HADAL_TEST_TMP) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace hadal::test
