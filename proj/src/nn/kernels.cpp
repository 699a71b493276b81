#include "ruleclip/nn/kernels.hpp"

#include <cmath>

#include "ruleclip/error.hpp"

namespace ruleclip::nn {

const char* to_string(Activation a) {
  switch (a) {
    case Activation::relu: return "relu";
    case Activation::tanh: return "tanh";
    case Activation::identity: return "identity";
  }
  return "unknown";
}

namespace kernels {
namespace {

void check_affine(std::size_t w_size, std::size_t b_size, std::size_t inputs) {
  if (b_size == 0 || w_size != b_size * inputs) throw UsageError("affine: weight/bias shape mismatch");
}

}  // namespace

void affine_forward(std::span<const double> w, std::span<const double> b, const Matrix& x, Matrix& z) {
  const std::size_t in = x.rows(), out = b.size(), batch = x.cols();
  check_affine(w.size(), out, in);
  // Below the threshold even an inactive parallel region costs a runtime call;
  // the serial twin accumulates in the same order.
  if (out * in * batch < kParallelWork) return reference::affine_forward(w, b, x, z);
  z.resize(out, batch);
  const double* xd = x.data();
  double* zd = z.data();
#pragma omp parallel for schedule(static)
  for (std::size_t o = 0; o < out; ++o) {
    double* zr = zd + o * batch;
    const double* wr = w.data() + o * in;
    if (batch < 8) {  // narrow batch: per-element dot products stay in registers
      for (std::size_t n = 0; n < batch; ++n) {
        double acc = b[o];
        for (std::size_t i = 0; i < in; ++i) acc += wr[i] * xd[i * batch + n];
        zr[n] = acc;
      }
      continue;
    }
    for (std::size_t n = 0; n < batch; ++n) zr[n] = b[o];
    for (std::size_t i = 0; i < in; ++i) {
      const double wi = wr[i];
      const double* xr = xd + i * batch;
      for (std::size_t n = 0; n < batch; ++n) zr[n] += wi * xr[n];
    }
  }
}

void affine_backward_input(std::span<const double> w, std::size_t inputs, const Matrix& dz, Matrix& dx) {
  const std::size_t out = dz.rows(), batch = dz.cols();
  check_affine(w.size(), out, inputs);
  if (out * inputs * batch < kParallelWork) return reference::affine_backward_input(w, inputs, dz, dx);
  dx.resize(inputs, batch);
  const double* dzd = dz.data();
  double* dxd = dx.data();
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < inputs; ++i) {
    double* dxr = dxd + i * batch;
    if (batch < 8) {
      for (std::size_t n = 0; n < batch; ++n) {
        double acc = 0.0;
        for (std::size_t o = 0; o < out; ++o) acc += w[o * inputs + i] * dzd[o * batch + n];
        dxr[n] = acc;
      }
      continue;
    }
    for (std::size_t o = 0; o < out; ++o) {
      const double wi = w[o * inputs + i];
      const double* dzr = dzd + o * batch;
      for (std::size_t n = 0; n < batch; ++n) dxr[n] += wi * dzr[n];
    }
  }
}

void affine_backward_params(const Matrix& dz, const Matrix& x, std::span<double> dw, std::span<double> db) {
  const std::size_t out = dz.rows(), in = x.rows(), batch = dz.cols();
  if (x.cols() != batch) throw UsageError("affine_backward_params: batch mismatch");
  check_affine(dw.size(), db.size(), in);
  if (db.size() != out) throw UsageError("affine_backward_params: output width mismatch");
  if (out * in * batch < kParallelWork) return reference::affine_backward_params(dz, x, dw, db);
  const Matrix xt = x.transposed();
  const double* xtd = xt.data();
#pragma omp parallel for schedule(static)
  for (std::size_t o = 0; o < out; ++o) {
    const auto dzr = dz.row(o);
    double* dwr = dw.data() + o * in;
    double bias_acc = db[o];
    for (std::size_t n = 0; n < batch; ++n) {
      const double d = dzr[n];
      bias_acc += d;
      const double* xr = xtd + n * in;
      for (std::size_t i = 0; i < in; ++i) dwr[i] += d * xr[i];
    }
    db[o] = bias_acc;
  }
}

void activate(Activation act, const Matrix& pre, Matrix& post) {
  post.resize(pre.rows(), pre.cols());
  const std::size_t count = pre.size();
  const double* p = pre.data();
  double* q = post.data();
  switch (act) {
    case Activation::relu:
      for (std::size_t k = 0; k < count; ++k) q[k] = p[k] > 0.0 ? p[k] : 0.0;
      break;
    case Activation::tanh:
      if (count < kParallelWork / 16) {
        for (std::size_t k = 0; k < count; ++k) q[k] = std::tanh(p[k]);
        break;
      }
#pragma omp parallel for schedule(static)
      for (std::size_t k = 0; k < count; ++k) q[k] = std::tanh(p[k]);
      break;
    case Activation::identity:
      for (std::size_t k = 0; k < count; ++k) q[k] = p[k];
      break;
  }
}

void activate_backward(Activation act, const Matrix& pre, const Matrix& post, Matrix& grad) {
  if (grad.rows() != pre.rows() || grad.cols() != pre.cols()) throw UsageError("activate_backward: shape mismatch");
  const std::size_t count = grad.size();
  double* g = grad.data();
  switch (act) {
    case Activation::relu: {
      const double* p = pre.data();
      for (std::size_t k = 0; k < count; ++k) g[k] = p[k] > 0.0 ? g[k] : 0.0;
      break;
    }
    case Activation::tanh: {
      const double* q = post.data();
      for (std::size_t k = 0; k < count; ++k) g[k] *= 1.0 - q[k] * q[k];
      break;
    }
    case Activation::identity:
      break;
  }
}

namespace reference {

void affine_forward(std::span<const double> w, std::span<const double> b, const Matrix& x, Matrix& z) {
  const std::size_t in = x.rows(), out = b.size(), batch = x.cols();
  check_affine(w.size(), out, in);
  z.resize(out, batch);
  for (std::size_t o = 0; o < out; ++o)
    for (std::size_t n = 0; n < batch; ++n) {
      double acc = b[o];
      for (std::size_t i = 0; i < in; ++i) acc += w[o * in + i] * x(i, n);
      z(o, n) = acc;
    }
}

void affine_backward_input(std::span<const double> w, std::size_t inputs, const Matrix& dz, Matrix& dx) {
  const std::size_t out = dz.rows(), batch = dz.cols();
  check_affine(w.size(), out, inputs);
  dx.resize(inputs, batch);
  for (std::size_t i = 0; i < inputs; ++i)
    for (std::size_t n = 0; n < batch; ++n) {
      double acc = 0.0;
      for (std::size_t o = 0; o < out; ++o) acc += w[o * inputs + i] * dz(o, n);
      dx(i, n) = acc;
    }
}

void affine_backward_params(const Matrix& dz, const Matrix& x, std::span<double> dw, std::span<double> db) {
  const std::size_t out = dz.rows(), in = x.rows(), batch = dz.cols();
  if (x.cols() != batch) throw UsageError("affine_backward_params: batch mismatch");
  check_affine(dw.size(), db.size(), in);
  for (std::size_t o = 0; o < out; ++o) {
    for (std::size_t i = 0; i < in; ++i) {
      double acc = dw[o * in + i];
      for (std::size_t n = 0; n < batch; ++n) acc += dz(o, n) * x(i, n);
      dw[o * in + i] = acc;
    }
    double acc = db[o];
    for (std::size_t n = 0; n < batch; ++n) acc += dz(o, n);
    db[o] = acc;
  }
}

void activate(Activation act, const Matrix& pre, Matrix& post) {
  post.resize(pre.rows(), pre.cols());
  for (std::size_t r = 0; r < pre.rows(); ++r)
    for (std::size_t c = 0; c < pre.cols(); ++c) {
      const double v = pre(r, c);
      switch (act) {
        case Activation::relu: post(r, c) = v > 0.0 ? v : 0.0; break;
        case Activation::tanh: post(r, c) = std::tanh(v); break;
        case Activation::identity: post(r, c) = v; break;
      }
    }
}

void activate_backward(Activation act, const Matrix& pre, const Matrix& post, Matrix& grad) {
  for (std::size_t r = 0; r < grad.rows(); ++r)
    for (std::size_t c = 0; c < grad.cols(); ++c) {
      switch (act) {
        case Activation::relu:
          if (!(pre(r, c) > 0.0)) grad(r, c) = 0.0;
          break;
        case Activation::tanh: grad(r, c) *= 1.0 - post(r, c) * post(r, c); break;
        case Activation::identity: break;
      }
    }
}

}  // namespace reference
}  // namespace kernels
}  // namespace ruleclip::nn
