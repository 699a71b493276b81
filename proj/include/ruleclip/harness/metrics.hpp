#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace ruleclip::harness {

struct EpochMetrics {
  int epoch = 0;
  double mean_test_reward = 0.0;
  double violation_kh = 0.0;     // mean per evaluation episode
  double energy_kwh = 0.0;       // mean per evaluation episode
  double saturation_frac = 0.0;  // training steps of the epoch whose action was clipped
  double actor_loss = 0.0;
  double critic_loss = 0.0;
  double wall_ms = 0.0;
};

struct RunMetrics {
  std::vector<EpochMetrics> rows;
  double threshold = 0.0;  // baseline thermostat reward on the evaluation set
  std::optional<double> best_test_reward;
  std::optional<int> best_epoch;
  std::optional<int> epochs_to_threshold;

  // Appends a row and refreshes the summary fields.
  void add(const EpochMetrics& row);
};

inline constexpr const char* kMetricsHeader =
    "epoch,mean_test_reward,violation_kh,energy_kwh,saturation_frac,actor_loss,critic_loss,wall_ms";

// Appends rows to a CSV and flushes after each, so interrupted runs leave a
// valid prefix.
class MetricsWriter {
 public:
  explicit MetricsWriter(const std::filesystem::path& path);
  void write(const EpochMetrics& row);

 private:
  std::ofstream os_;
};

std::string format_row(const EpochMetrics& row);
std::vector<EpochMetrics> read_metrics_csv(const std::filesystem::path& path);

}  // namespace ruleclip::harness
