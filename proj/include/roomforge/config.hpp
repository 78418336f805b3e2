#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace roomforge {

// Run parameters. Defaults are the published experiment settings.
struct PipelineConfig {
  double temperature = 0.4;
  double novelty_fraction = 0.10;
  int gen_per_round = 100;
  int repair_per_round = 10;
  int stage1_epochs = 5;
  int stage2_epochs = 2;
  int stage2_rounds = 5;
  int stage1_target_new = 60;
  std::uint64_t seed = 0;

  void check() const {
    if (temperature < 0.0) throw std::invalid_argument("temperature must be >= 0");
    if (!(novelty_fraction > 0.0 && novelty_fraction <= 1.0)) {
      throw std::invalid_argument("novelty fraction must be in (0, 1]");
    }
    if (gen_per_round <= 0 || repair_per_round <= 0 || stage1_epochs <= 0 || stage2_epochs <= 0 ||
        stage2_rounds <= 0 || stage1_target_new <= 0) {
      throw std::invalid_argument("pipeline counts must be positive");
    }
  }
};

}  // namespace roomforge
