#pragma once

#include <functional>

#include "ruleclip/nn/network.hpp"

namespace ruleclip::nn {

using ScalarLoss = std::function<double(const Network&)>;

// Central-difference estimate of d loss / d parameter for every parameter of
// net. Only evaluates loss; independent of backward().
GradientBuffer finite_difference_gradient(const Network& net, const ScalarLoss& loss, double perturbation);

// |a - b| / max(|a|, |b|, floor). The floor keeps entries that are zero up to
// rounding from reporting huge relative errors.
double relative_error(double a, double b, double floor = 1e-3);

}  // namespace ruleclip::nn
