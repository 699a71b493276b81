#include "ruleclip/harness/metrics.hpp"

#include <cstdio>
#include <sstream>

#include "ruleclip/error.hpp"

namespace ruleclip::harness {

void RunMetrics::add(const EpochMetrics& row) {
  rows.push_back(row);
  if (!best_test_reward || row.mean_test_reward > *best_test_reward) {
    best_test_reward = row.mean_test_reward;
    best_epoch = row.epoch;
  }
  if (!epochs_to_threshold && row.mean_test_reward >= threshold) epochs_to_threshold = row.epoch;
}

std::string format_row(const EpochMetrics& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g", r.epoch, r.mean_test_reward,
                r.violation_kh, r.energy_kwh, r.saturation_frac, r.actor_loss, r.critic_loss, r.wall_ms);
  return buf;
}

MetricsWriter::MetricsWriter(const std::filesystem::path& path) : os_(path) {
  if (!os_) throw IoError("cannot open " + path.string() + " for writing");
  os_ << kMetricsHeader << '\n';
  os_.flush();
}

void MetricsWriter::write(const EpochMetrics& row) {
  os_ << format_row(row) << '\n';
  os_.flush();
  if (!os_) throw IoError("failed writing metrics row");
}

std::vector<EpochMetrics> read_metrics_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open metrics file " + path.string());
  std::string line;
  if (!std::getline(is, line) || line != kMetricsHeader) throw IoError(path.string() + ": unexpected metrics header");
  std::vector<EpochMetrics> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    EpochMetrics r;
    if (std::sscanf(line.c_str(), "%d,%lf,%lf,%lf,%lf,%lf,%lf,%lf", &r.epoch, &r.mean_test_reward, &r.violation_kh,
                    &r.energy_kwh, &r.saturation_frac, &r.actor_loss, &r.critic_loss, &r.wall_ms) != 8)
      throw IoError(path.string() + ": malformed row '" + line + "'");
    rows.push_back(r);
  }
  return rows;
}

}  // namespace ruleclip::harness
