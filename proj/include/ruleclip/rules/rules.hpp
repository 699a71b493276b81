#pragma once

#include <span>
#include <vector>

namespace ruleclip::rules {

// Global box [low, up] of the environment's action space.
struct ActionSpace {
  std::vector<double> low;
  std::vector<double> up;

  std::size_t dimension() const noexcept { return low.size(); }
  static ActionSpace symmetric_unit(std::size_t dimension) {
    return {std::vector<double>(dimension, -1.0), std::vector<double>(dimension, 1.0)};
  }
};

// State-dependent admissible box C(s) = [min, max], nested in the action space.
struct ActionBounds {
  std::vector<double> min;
  std::vector<double> max;

  std::size_t dimension() const noexcept { return min.size(); }
  friend bool operator==(const ActionBounds&, const ActionBounds&) = default;
};

// Comfort rule margins in degrees Celsius: the rule starts pushing the action
// once the temperature leaves the band by more than margin and reaches full
// saturation at saturation_margin.
struct ComfortRuleConfig {
  double margin = 0.0;             // m
  double saturation_margin = 0.5;  // n

  // Throws ConfigError unless 0 <= m < n.
  void validate() const;
};

// Elementwise median(lo, x, hi). Throws UsageError if lo > hi anywhere.
std::vector<double> clip(std::span<const double> x, std::span<const double> lo, std::span<const double> hi);
double clip(double x, double lo, double hi);

// Quadratic comfort bounds for a one-dimensional heating/cooling action in [-1, 1].
ActionBounds comfort_bounds(double temperature, double lower, double upper, const ComfortRuleConfig& cfg);

struct ConstrainedAction {
  std::vector<double> applied;
  std::vector<bool> saturated;  // applied != raw; landing exactly on a bound is not saturation
};

ConstrainedAction constrain_action(std::span<const double> raw, const ActionBounds& bounds);

// Checks low <= min <= max <= up elementwise.
bool bounds_ordered(const ActionBounds& bounds, const ActionSpace& space);

// Maps a rule context (problem-specific physical features of the current
// state) to admissible bounds. Implementations must be pure.
class RuleProvider {
 public:
  virtual ~RuleProvider() = default;
  virtual ActionBounds bounds(std::span<const double> context) const = 0;
};

// No prior knowledge: every state gets the full action space.
class GlobalBoundsRule final : public RuleProvider {
 public:
  explicit GlobalBoundsRule(ActionSpace space) : space_(std::move(space)) {}
  ActionBounds bounds(std::span<const double> context) const override;

 private:
  ActionSpace space_;
};

// Thermal comfort rule. Context layout: {temperature, lower bound, upper bound}.
class ComfortRule final : public RuleProvider {
 public:
  explicit ComfortRule(ComfortRuleConfig cfg);
  ActionBounds bounds(std::span<const double> context) const override;
  const ComfortRuleConfig& config() const noexcept { return cfg_; }

 private:
  ComfortRuleConfig cfg_;
};

}  // namespace ruleclip::rules
