#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ruleclip::agents {

struct GradCheckItem {
  std::string name;
  double max_relative_error = 0.0;
  std::size_t entries = 0;
  bool passed = false;
};

struct GradCheckReport {
  double tolerance = 1e-4;
  double perturbation = 1e-6;
  std::vector<GradCheckItem> items;

  bool passed() const;
};

// Compares every analytic gradient used in training (network backward,
// critic TD loss, classical and penalised actor losses) against central
// finite differences on `trials` random small networks and batches.
GradCheckReport run_gradcheck(std::uint64_t seed, int trials = 20, double tolerance = 1e-4,
                              double perturbation = 1e-6);

}  // namespace ruleclip::agents
