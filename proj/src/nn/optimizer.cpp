#include "ruleclip/nn/optimizer.hpp"

#include <cmath>
#include <string>

#include "ruleclip/error.hpp"

namespace ruleclip::nn {

void apply_update(Network& net, const GradientBuffer& grads, OptimizerState& opt) {
  const std::size_t count = net.parameter_count();
  if (grads.size() != count || opt.first_moment.size() != count || opt.second_moment.size() != count)
    throw UsageError("apply_update: gradient/optimizer shape does not match network");
  for (std::size_t k = 0; k < count; ++k)
    if (!std::isfinite(grads.values[k]))
      throw NumericError("apply_update: non-finite gradient at parameter " + std::to_string(k));

  const auto& c = opt.config;
  ++opt.step;
  const double t = static_cast<double>(opt.step);
  const double correction1 = 1.0 - std::pow(c.beta1, t);
  const double correction2 = 1.0 - std::pow(c.beta2, t);
  auto p = net.parameters();
  for (std::size_t k = 0; k < count; ++k) {
    const double g = grads.values[k];
    double& m = opt.first_moment[k];
    double& v = opt.second_moment[k];
    m = c.beta1 * m + (1.0 - c.beta1) * g;
    v = c.beta2 * v + (1.0 - c.beta2) * g * g;
    if (m == 0.0) continue;
    const double m_hat = m / correction1;
    const double v_hat = v / correction2;
    p[k] -= c.learning_rate * m_hat / (std::sqrt(v_hat) + c.epsilon);
  }
  if (!net.all_finite()) throw NumericError("apply_update: parameters became non-finite");
}

}  // namespace ruleclip::nn
