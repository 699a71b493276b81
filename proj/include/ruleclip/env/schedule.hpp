#pragma once

#include <string>
#include <utility>
#include <vector>

namespace ruleclip::env {

// Daily comfort band active on [start, end) minutes of the day; a segment
// with end <= start wraps past midnight.
struct ComfortSegment {
  int start_minute = 0;
  int end_minute = 0;
  double lower = 21.0;
  double upper = 25.0;
};

// Piecewise-constant daily comfort bounds. The segments must cover the day
// exactly once.
class ComfortSchedule {
 public:
  ComfortSchedule() : ComfortSchedule(default_segments()) {}
  explicit ComfortSchedule(std::vector<ComfortSegment> segments);

  // Parses "HH:MM-HH:MM L U" segments separated by ';' or ','.
  static ComfortSchedule parse(const std::string& text);
  static std::vector<ComfortSegment> default_segments();  // 08-20h [19, 26], 20-08h [21, 25]
  static ComfortSchedule constant(double lower, double upper);

  std::pair<double, double> bounds_at(int minute_of_day) const;
  const std::vector<ComfortSegment>& segments() const noexcept { return segments_; }
  std::string to_string() const;

 private:
  std::vector<ComfortSegment> segments_;
  std::vector<int> owner_;  // segment index per minute of the day
};

// Alias used by the configuration layer.
inline std::pair<double, double> comfort_schedule(int minute_of_day, const ComfortSchedule& spec) {
  return spec.bounds_at(minute_of_day);
}

}  // namespace ruleclip::env
