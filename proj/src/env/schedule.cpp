#include "ruleclip/env/schedule.hpp"

#include <cstdio>
#include <regex>
#include <sstream>

#include "ruleclip/error.hpp"

namespace ruleclip::env {

namespace {
constexpr const char* kKey = "env.comfort_schedule";
}

ComfortSchedule::ComfortSchedule(std::vector<ComfortSegment> segments)
    : segments_(std::move(segments)), owner_(1440, -1) {
  if (segments_.empty()) throw ConfigError(kKey, "needs at least one segment");
  for (std::size_t s = 0; s < segments_.size(); ++s) {
    const auto& seg = segments_[s];
    if (seg.start_minute < 0 || seg.start_minute >= 1440 || seg.end_minute < 0 || seg.end_minute > 1440)
      throw ConfigError(kKey, "segment times must lie within the day");
    if (!(seg.lower <= seg.upper)) throw ConfigError(kKey, "segment lower bound exceeds upper bound");
    int m = seg.start_minute;
    const int end = seg.end_minute % 1440;
    do {
      if (owner_[m] != -1) throw ConfigError(kKey, "segments overlap at minute " + std::to_string(m));
      owner_[m] = static_cast<int>(s);
      m = (m + 1) % 1440;
    } while (m != end);
  }
  for (int m = 0; m < 1440; ++m)
    if (owner_[m] == -1) throw ConfigError(kKey, "segments leave minute " + std::to_string(m) + " uncovered");
}

std::vector<ComfortSegment> ComfortSchedule::default_segments() {
  return {{8 * 60, 20 * 60, 19.0, 26.0}, {20 * 60, 8 * 60, 21.0, 25.0}};
}

ComfortSchedule ComfortSchedule::constant(double lower, double upper) {
  return ComfortSchedule({{0, 0, lower, upper}});
}

ComfortSchedule ComfortSchedule::parse(const std::string& text) {
  static const std::regex segment_re(
      R"(\s*(\d{1,2}):(\d{2})\s*-\s*(\d{1,2}):(\d{2})\s+([-+0-9.eE]+)\s+([-+0-9.eE]+)\s*)");
  std::vector<ComfortSegment> segments;
  std::string piece;
  std::string normalized = text;
  for (char& c : normalized)
    if (c == ',') c = ';';
  std::istringstream is(normalized);
  while (std::getline(is, piece, ';')) {
    if (piece.find_first_not_of(" \t") == std::string::npos) continue;
    std::smatch m;
    if (!std::regex_match(piece, m, segment_re)) throw ConfigError(kKey, "cannot parse segment '" + piece + "'");
    auto minutes = [&](int h, int mi) {
      const int hh = std::stoi(m[h].str()), mm = std::stoi(m[mi].str());
      if (hh > 24 || mm > 59 || (hh == 24 && mm != 0)) throw ConfigError(kKey, "invalid time in '" + piece + "'");
      return hh * 60 + mm;
    };
    ComfortSegment seg;
    seg.start_minute = minutes(1, 2) % 1440;
    seg.end_minute = minutes(3, 4) % 1440;
    try {
      seg.lower = std::stod(m[5].str());
      seg.upper = std::stod(m[6].str());
    } catch (const std::exception&) {
      throw ConfigError(kKey, "invalid bound in '" + piece + "'");
    }
    segments.push_back(seg);
  }
  return ComfortSchedule(std::move(segments));
}

std::pair<double, double> ComfortSchedule::bounds_at(int minute_of_day) const {
  const int m = ((minute_of_day % 1440) + 1440) % 1440;
  const auto& seg = segments_[static_cast<std::size_t>(owner_[m])];
  return {seg.lower, seg.upper};
}

std::string ComfortSchedule::to_string() const {
  std::ostringstream os;
  for (std::size_t s = 0; s < segments_.size(); ++s) {
    const auto& seg = segments_[s];
    char buf[32];
    std::snprintf(buf, sizeof buf, "%02d:%02d-%02d:%02d", seg.start_minute / 60, seg.start_minute % 60,
                  seg.end_minute / 60, seg.end_minute % 60);
    if (s) os << "; ";
    os << buf << ' ' << seg.lower << ' ' << seg.upper;
  }
  return os.str();
}

}  // namespace ruleclip::env
