#pragma once

#include <cstdint>
#include <span>

#include "ruleclip/nn/matrix.hpp"

namespace ruleclip::nn {

enum class Activation : std::uint8_t { relu = 0, tanh = 1, identity = 2 };

const char* to_string(Activation a);

namespace kernels {

// Dense layer kernels on features x batch matrices. Weights are out x in,
// row-major. Every output element is accumulated in a fixed order that does
// not depend on the thread count, so the OpenMP kernels return the same bits
// as the serial reference below for any number of threads.

// z = W x + b (bias broadcast over columns). z is resized.
void affine_forward(std::span<const double> w, std::span<const double> b, const Matrix& x, Matrix& z);

// dx = W^T dz. dx is resized to in x batch.
void affine_backward_input(std::span<const double> w, std::size_t inputs, const Matrix& dz, Matrix& dx);

// dw += dz x^T, db += row sums of dz.
void affine_backward_params(const Matrix& dz, const Matrix& x, std::span<double> dw, std::span<double> db);

// post = f(pre)
void activate(Activation act, const Matrix& pre, Matrix& post);

// grad <- grad * f'(pre), using post where cheaper (tanh).
void activate_backward(Activation act, const Matrix& pre, const Matrix& post, Matrix& grad);

// Minimum multiply-add count before a kernel forks a parallel region.
inline constexpr std::size_t kParallelWork = 1 << 15;

namespace reference {

void affine_forward(std::span<const double> w, std::span<const double> b, const Matrix& x, Matrix& z);
void affine_backward_input(std::span<const double> w, std::size_t inputs, const Matrix& dz, Matrix& dx);
void affine_backward_params(const Matrix& dz, const Matrix& x, std::span<double> dw, std::span<double> db);
void activate(Activation act, const Matrix& pre, Matrix& post);
void activate_backward(Activation act, const Matrix& pre, const Matrix& post, Matrix& grad);

}  // namespace reference
}  // namespace kernels
}  // namespace ruleclip::nn
