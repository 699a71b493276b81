#include "ruleclip/rules/rules.hpp"

#include <algorithm>
#include <string>

#include "ruleclip/error.hpp"

namespace ruleclip::rules {

void ComfortRuleConfig::validate() const {
  if (!(margin >= 0.0)) throw ConfigError("rule.m", "must be >= 0");
  if (!(saturation_margin > margin)) throw ConfigError("rule.n", "must be strictly greater than rule.m");
}

double clip(double x, double lo, double hi) {
  if (lo > hi) throw UsageError("clip: lower bound exceeds upper bound");
  return std::min(std::max(x, lo), hi);
}

std::vector<double> clip(std::span<const double> x, std::span<const double> lo, std::span<const double> hi) {
  if (x.size() != lo.size() || x.size() != hi.size()) throw UsageError("clip: dimension mismatch");
  std::vector<double> out(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = clip(x[k], lo[k], hi[k]);
  return out;
}

ActionBounds comfort_bounds(double temperature, double lower, double upper, const ComfortRuleConfig& cfg) {
  const double m = cfg.margin, width = cfg.saturation_margin - cfg.margin;
  const double below = clip(((lower - m) - temperature) / width, 0.0, 1.0);
  const double above = clip((temperature - (upper + m)) / width, 0.0, 1.0);
  return {{below * below * 2.0 - 1.0}, {1.0 - 2.0 * above * above}};
}

ConstrainedAction constrain_action(std::span<const double> raw, const ActionBounds& bounds) {
  ConstrainedAction out;
  out.applied = clip(raw, bounds.min, bounds.max);
  out.saturated.resize(raw.size());
  for (std::size_t k = 0; k < raw.size(); ++k) out.saturated[k] = out.applied[k] != raw[k];
  return out;
}

bool bounds_ordered(const ActionBounds& bounds, const ActionSpace& space) {
  if (bounds.min.size() != space.dimension() || bounds.max.size() != space.dimension()) return false;
  for (std::size_t k = 0; k < space.dimension(); ++k) {
    if (!(space.low[k] <= bounds.min[k] && bounds.min[k] <= bounds.max[k] && bounds.max[k] <= space.up[k]))
      return false;
  }
  return true;
}

ActionBounds GlobalBoundsRule::bounds(std::span<const double>) const { return {space_.low, space_.up}; }

ComfortRule::ComfortRule(ComfortRuleConfig cfg) : cfg_(cfg) { cfg_.validate(); }

ActionBounds ComfortRule::bounds(std::span<const double> context) const {
  if (context.size() < 3) throw UsageError("ComfortRule: context must be {T, L, U}");
  return comfort_bounds(context[0], context[1], context[2], cfg_);
}

}  // namespace ruleclip::rules
