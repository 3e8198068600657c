#pragma once

#include <cstdint>

namespace cald::kernels {

// Parallel dispatch is process-wide; CALD_SERIAL_KERNELS=1 starts it off.
bool parallel_enabled();
void set_parallel(bool on);

// Geometry of a forward convolution y[N,Co,Ho,Wo] = w[Co,Ci,k,k] * x[N,Ci,H,W].
// The transposed convolution reuses the same kernels with input/output roles
// swapped, so every field refers to the *convolution* view.
struct ConvGeom {
    int64_t n = 1;
    int64_t ci = 0, h = 0, w = 0;
    int64_t co = 0, k = 0;
    int64_t stride = 1, pad = 0;
    int64_t ho = 0, wo = 0;
};

// out = conv(x, wgt) + bias (bias may be null). Accumulation order per output
// element is fixed (ci, kh, kw), identical in serial and OpenMP variants.
void conv2d_forward_serial(const float* x, const float* wgt, const float* bias, float* out,
                           const ConvGeom& g);
void conv2d_forward_omp(const float* x, const float* wgt, const float* bias, float* out,
                        const ConvGeom& g);
void conv2d_forward(const float* x, const float* wgt, const float* bias, float* out,
                    const ConvGeom& g);

// gx[N,Ci,H,W] += is NOT used: gx is fully written (gather form).
void conv2d_backward_input_serial(const float* gy, const float* wgt, float* gx, const ConvGeom& g);
void conv2d_backward_input_omp(const float* gy, const float* wgt, float* gx, const ConvGeom& g);
void conv2d_backward_input(const float* gy, const float* wgt, float* gx, const ConvGeom& g);

void conv2d_backward_weight_serial(const float* gy, const float* x, float* gw, const ConvGeom& g);
void conv2d_backward_weight_omp(const float* gy, const float* x, float* gw, const ConvGeom& g);
void conv2d_backward_weight(const float* gy, const float* x, float* gw, const ConvGeom& g);

void conv2d_backward_bias(const float* gy, float* gb, int64_t n, int64_t co, int64_t ho, int64_t wo);

}  // namespace cald::kernels
