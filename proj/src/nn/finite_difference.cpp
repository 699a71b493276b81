#include "ruleclip/nn/finite_difference.hpp"

#include <algorithm>
#include <cmath>

#include "ruleclip/error.hpp"

namespace ruleclip::nn {

GradientBuffer finite_difference_gradient(const Network& net, const ScalarLoss& loss, double perturbation) {
  if (!(perturbation > 0.0)) throw UsageError("finite_difference_gradient: perturbation must be positive");
  Network probe = net;
  GradientBuffer grad(net.parameter_count());
  auto p = probe.parameters();
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double original = p[k];
    p[k] = original + perturbation;
    const double up = loss(probe);
    p[k] = original - perturbation;
    const double down = loss(probe);
    p[k] = original;
    grad.values[k] = (up - down) / (2.0 * perturbation);
  }
  return grad;
}

double relative_error(double a, double b, double floor) {
  const double scale = std::max({std::abs(a), std::abs(b), floor});
  return std::abs(a - b) / scale;
}

}  // namespace ruleclip::nn
