#pragma once

#include <filesystem>
#include <random>

#include "geodamage/io.hpp"

namespace geodamage::testing {

inline std::filesystem::path config_dir() { return std::filesystem::path(GEODAMAGE_SOURCE_DIR) / "configs"; }

inline RunConfig benchmark_config() { return load_config(config_dir() / "benchmark.cfg"); }

inline MaterialLaw unit_law(ConstraintSet k = ConstraintSet::ball(1.0)) {
  MaterialLaw law;
  law.hooke = {1.0, 1.0};
  law.hardening = {HardeningKind::softening, 0.25, 0.05};
  law.damage = {DamageKind::linear, 0.002};
  law.constraint = k;
  return law;
}

inline LoadProgram shear_load(double T = 1.0) {
  LoadProgram load;
  load.G << 0.0, 0.5, 0.5, -0.3;
  load.T = T;
  return load;
}

inline SymTensor2 random_tensor(std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  return {{n(rng), n(rng), n(rng)}};
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("geodamage_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace geodamage::testing
