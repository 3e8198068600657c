#pragma once

#include "cald/tensor.hpp"

namespace cald {

// Elementwise binary ops. b may match a's shape exactly, be a scalar, or be a
// per-channel vector [C] broadcast against a [N,C,H,W].
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor div(const Tensor& a, const Tensor& b);
Tensor add(const Tensor& a, float s);
Tensor sub(const Tensor& a, float s);
Tensor mul(const Tensor& a, float s);

Tensor exp(const Tensor& x);
Tensor log(const Tensor& x);
Tensor sqrt(const Tensor& x);
Tensor abs(const Tensor& x);
Tensor clampmin(const Tensor& x, float floor);
Tensor softplus(const Tensor& x);
// Standard normal CDF, differentiable; tail evaluation goes through erfc.
Tensor phi(const Tensor& x);
Tensor leaky_relu(const Tensor& x, float slope = 0.01f);

// x [N,Ci,H,W], w [Co,Ci,k,k], bias [Co] or undefined; zero padding.
Tensor conv2d(const Tensor& x, const Tensor& w, const Tensor& bias, int stride, int pad);
// x [N,Ci,Hi,Wi], w [Ci,Co,k,k]; exact adjoint of conv2d with the same w.
Tensor conv2d_transpose(const Tensor& x, const Tensor& w, const Tensor& bias, int stride, int pad,
                        int out_pad);
Tensor maxpool2d(const Tensor& x, int k, int stride);
Tensor concat_channels(const Tensor& a, const Tensor& b);
Tensor slice_channels(const Tensor& x, int64_t start, int64_t count);
Tensor pad_replicate(const Tensor& x, int top, int bottom, int left, int right);
Tensor crop(const Tensor& x, int top, int left, int64_t h, int64_t w);

// Scalar sum of all elements (f64 accumulation).
Tensor sum(const Tensor& x);

// Half-away-from-zero rounding; plain tensor out, never recorded on the tape.
Tensor round_half_away(const Tensor& x);

// Clamp to [0,1]; plain tensor out, never recorded on the tape.
Tensor clamp01_plain(const Tensor& x);

}  // namespace cald
