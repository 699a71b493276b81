#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ruleclip/harness/metrics.hpp"
#include "ruleclip/harness/run_config.hpp"

namespace ruleclip::harness {

// What compare() needs from a finished run.
struct RunRecord {
  std::string label;
  std::string variant;
  std::uint64_t seed = 0;
  int eval_every = 1;
  double threshold = 0.0;
  std::vector<EpochMetrics> rows;
  std::optional<int> epochs_to_threshold;
  std::optional<double> best_test_reward;
};

struct LabelSummary {
  std::string label;
  std::string variant;
  std::vector<const RunRecord*> runs;
  std::size_t converged = 0;
  std::optional<double> median_epochs_to_threshold;  // over converged runs only
  std::optional<double> speedup_vs_classical;        // classical median / this median
  std::optional<double> best_reward;
};

struct ComparisonReport {
  std::vector<RunRecord> runs;
  std::vector<LabelSummary> labels;  // sorted by label
  std::optional<double> classical_median;

  std::string to_json() const;
  // Writes report.json and curves/<label>.csv (epoch, one reward column per seed, mean).
  std::vector<std::filesystem::path> write(const std::filesystem::path& directory) const;
};

// Median of a non-empty list (mean of the two middle values for even sizes).
double median(std::vector<double> values);

// Aggregates runs by label. Throws UsageError with fewer than two runs or
// when evaluation cadences differ.
ComparisonReport build_report(std::vector<RunRecord> runs);

// Trains every (config, seed) pair, at most `workers` at a time, writing each
// run under its own directory, then aggregates.
ComparisonReport compare(const std::vector<RunConfig>& configs, int workers);

}  // namespace ruleclip::harness
