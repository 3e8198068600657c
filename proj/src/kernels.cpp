#include "cald/kernels.hpp"

#include <atomic>
#include <cstdlib>

namespace cald::kernels {

namespace {

bool initial_parallel() {
    const char* env = std::getenv("CALD_SERIAL_KERNELS");
    return !(env && env[0] == '1');
}

std::atomic<bool> g_parallel{initial_parallel()};

inline int64_t ceil_div_pos(int64_t a, int64_t b) { return a <= 0 ? 0 : (a + b - 1) / b; }

}  // namespace

bool parallel_enabled() { return g_parallel.load(std::memory_order_relaxed); }
void set_parallel(bool on) { g_parallel.store(on, std::memory_order_relaxed); }

// ---------------------------------------------------------------------------
// Serial reference kernels. Naive per-element gathers, kept for testing and
// benchmarking against the OpenMP versions. Accumulation order per output
// element is (ci, kh, kw) in all variants.
// ---------------------------------------------------------------------------

void conv2d_forward_serial(const float* x, const float* wgt, const float* bias, float* out,
                           const ConvGeom& g) {
    for (int64_t n = 0; n < g.n; ++n)
        for (int64_t co = 0; co < g.co; ++co)
            for (int64_t ho = 0; ho < g.ho; ++ho)
                for (int64_t wo = 0; wo < g.wo; ++wo) {
                    float acc = bias ? bias[co] : 0.0f;
                    for (int64_t ci = 0; ci < g.ci; ++ci)
                        for (int64_t kh = 0; kh < g.k; ++kh) {
                            const int64_t hi = ho * g.stride + kh - g.pad;
                            if (hi < 0 || hi >= g.h) continue;
                            for (int64_t kw = 0; kw < g.k; ++kw) {
                                const int64_t wi = wo * g.stride + kw - g.pad;
                                if (wi < 0 || wi >= g.w) continue;
                                acc += x[((n * g.ci + ci) * g.h + hi) * g.w + wi] *
                                       wgt[((co * g.ci + ci) * g.k + kh) * g.k + kw];
                            }
                        }
                    out[((n * g.co + co) * g.ho + ho) * g.wo + wo] = acc;
                }
}

void conv2d_backward_input_serial(const float* gy, const float* wgt, float* gx, const ConvGeom& g) {
    for (int64_t n = 0; n < g.n; ++n)
        for (int64_t ci = 0; ci < g.ci; ++ci)
            for (int64_t hi = 0; hi < g.h; ++hi)
                for (int64_t wi = 0; wi < g.w; ++wi) {
                    float acc = 0.0f;
                    for (int64_t co = 0; co < g.co; ++co)
                        for (int64_t kh = 0; kh < g.k; ++kh) {
                            const int64_t th = hi + g.pad - kh;
                            if (th < 0 || th % g.stride != 0) continue;
                            const int64_t ho = th / g.stride;
                            if (ho >= g.ho) continue;
                            for (int64_t kw = 0; kw < g.k; ++kw) {
                                const int64_t tw = wi + g.pad - kw;
                                if (tw < 0 || tw % g.stride != 0) continue;
                                const int64_t wo = tw / g.stride;
                                if (wo >= g.wo) continue;
                                acc += gy[((n * g.co + co) * g.ho + ho) * g.wo + wo] *
                                       wgt[((co * g.ci + ci) * g.k + kh) * g.k + kw];
                            }
                        }
                    gx[((n * g.ci + ci) * g.h + hi) * g.w + wi] = acc;
                }
}

void conv2d_backward_weight_serial(const float* gy, const float* x, float* gw, const ConvGeom& g) {
    for (int64_t co = 0; co < g.co; ++co)
        for (int64_t ci = 0; ci < g.ci; ++ci)
            for (int64_t kh = 0; kh < g.k; ++kh)
                for (int64_t kw = 0; kw < g.k; ++kw) {
                    double acc = 0.0;
                    for (int64_t n = 0; n < g.n; ++n)
                        for (int64_t ho = 0; ho < g.ho; ++ho) {
                            const int64_t hi = ho * g.stride + kh - g.pad;
                            if (hi < 0 || hi >= g.h) continue;
                            for (int64_t wo = 0; wo < g.wo; ++wo) {
                                const int64_t wi = wo * g.stride + kw - g.pad;
                                if (wi < 0 || wi >= g.w) continue;
                                acc += static_cast<double>(gy[((n * g.co + co) * g.ho + ho) * g.wo + wo]) *
                                       x[((n * g.ci + ci) * g.h + hi) * g.w + wi];
                            }
                        }
                    gw[((co * g.ci + ci) * g.k + kh) * g.k + kw] = static_cast<float>(acc);
                }
}

// ---------------------------------------------------------------------------
// OpenMP kernels. Row-oriented so the innermost loop runs over contiguous
// output elements; parallelism is over independent output rows, which keeps
// every per-element accumulation order identical to the serial reference.
// ---------------------------------------------------------------------------

void conv2d_forward_omp(const float* x, const float* wgt, const float* bias, float* out,
                        const ConvGeom& g) {
    const int64_t rows = g.n * g.co * g.ho;
#pragma omp parallel for schedule(static)
    for (int64_t row = 0; row < rows; ++row) {
        const int64_t n = row / (g.co * g.ho);
        const int64_t co = (row / g.ho) % g.co;
        const int64_t ho = row % g.ho;
        float* orow = out + row * g.wo;
        const float bv = bias ? bias[co] : 0.0f;
        for (int64_t wo = 0; wo < g.wo; ++wo) orow[wo] = bv;
        for (int64_t ci = 0; ci < g.ci; ++ci) {
            const float* xplane = x + (n * g.ci + ci) * g.h * g.w;
            const float* wrow0 = wgt + (co * g.ci + ci) * g.k * g.k;
            for (int64_t kh = 0; kh < g.k; ++kh) {
                const int64_t hi = ho * g.stride + kh - g.pad;
                if (hi < 0 || hi >= g.h) continue;
                const float* xrow = xplane + hi * g.w;
                const float* wrow = wrow0 + kh * g.k;
                for (int64_t kw = 0; kw < g.k; ++kw) {
                    const float wv = wrow[kw];
                    const int64_t lo = ceil_div_pos(g.pad - kw, g.stride);
                    int64_t hi_wo = g.wo - 1;
                    const int64_t max_wi = g.w - 1 - kw + g.pad;
                    if (max_wi < 0) continue;
                    if (max_wi / g.stride < hi_wo) hi_wo = max_wi / g.stride;
                    const float* xoff = xrow + kw - g.pad;
                    for (int64_t wo = lo; wo <= hi_wo; ++wo) orow[wo] += wv * xoff[wo * g.stride];
                }
            }
        }
    }
}

void conv2d_backward_input_omp(const float* gy, const float* wgt, float* gx, const ConvGeom& g) {
    const int64_t rows = g.n * g.ci * g.h;
#pragma omp parallel for schedule(static)
    for (int64_t row = 0; row < rows; ++row) {
        const int64_t n = row / (g.ci * g.h);
        const int64_t ci = (row / g.h) % g.ci;
        const int64_t hi = row % g.h;
        float* grow = gx + row * g.w;
        for (int64_t wi = 0; wi < g.w; ++wi) grow[wi] = 0.0f;
        for (int64_t co = 0; co < g.co; ++co) {
            const float* gyplane = gy + (n * g.co + co) * g.ho * g.wo;
            const float* wrow0 = wgt + (co * g.ci + ci) * g.k * g.k;
            for (int64_t kh = 0; kh < g.k; ++kh) {
                const int64_t th = hi + g.pad - kh;
                if (th < 0 || th % g.stride != 0) continue;
                const int64_t ho = th / g.stride;
                if (ho >= g.ho) continue;
                const float* gyrow = gyplane + ho * g.wo;
                const float* wrow = wrow0 + kh * g.k;
                for (int64_t kw = 0; kw < g.k; ++kw) {
                    const float wv = wrow[kw];
                    const int64_t lo = ceil_div_pos(g.pad - kw, g.stride);
                    int64_t hi_wo = g.wo - 1;
                    const int64_t max_wi = g.w - 1 - kw + g.pad;
                    if (max_wi < 0) continue;
                    if (max_wi / g.stride < hi_wo) hi_wo = max_wi / g.stride;
                    float* goff = grow + kw - g.pad;
                    for (int64_t wo = lo; wo <= hi_wo; ++wo) goff[wo * g.stride] += wv * gyrow[wo];
                }
            }
        }
    }
}

void conv2d_backward_weight_omp(const float* gy, const float* x, float* gw, const ConvGeom& g) {
    const int64_t pairs = g.co * g.ci;
#pragma omp parallel for schedule(static)
    for (int64_t pair = 0; pair < pairs; ++pair) {
        const int64_t co = pair / g.ci;
        const int64_t ci = pair % g.ci;
        for (int64_t kh = 0; kh < g.k; ++kh)
            for (int64_t kw = 0; kw < g.k; ++kw) {
                double acc = 0.0;
                for (int64_t n = 0; n < g.n; ++n) {
                    const float* gyplane = gy + (n * g.co + co) * g.ho * g.wo;
                    const float* xplane = x + (n * g.ci + ci) * g.h * g.w;
                    for (int64_t ho = 0; ho < g.ho; ++ho) {
                        const int64_t hi = ho * g.stride + kh - g.pad;
                        if (hi < 0 || hi >= g.h) continue;
                        const float* gyrow = gyplane + ho * g.wo;
                        const float* xoff = xplane + hi * g.w + kw - g.pad;
                        const int64_t lo = ceil_div_pos(g.pad - kw, g.stride);
                        int64_t hi_wo = g.wo - 1;
                        const int64_t max_wi = g.w - 1 - kw + g.pad;
                        if (max_wi < 0) continue;
                        if (max_wi / g.stride < hi_wo) hi_wo = max_wi / g.stride;
                        for (int64_t wo = lo; wo <= hi_wo; ++wo)
                            acc += static_cast<double>(gyrow[wo]) * xoff[wo * g.stride];
                    }
                }
                gw[(pair * g.k + kh) * g.k + kw] = static_cast<float>(acc);
            }
    }
}

void conv2d_backward_bias(const float* gy, float* gb, int64_t n, int64_t co, int64_t ho, int64_t wo) {
    const int64_t plane = ho * wo;
    for (int64_t c = 0; c < co; ++c) {
        double acc = 0.0;
        for (int64_t b = 0; b < n; ++b) {
            const float* p = gy + (b * co + c) * plane;
            for (int64_t i = 0; i < plane; ++i) acc += static_cast<double>(p[i]);
        }
        gb[c] = static_cast<float>(acc);
    }
}

void conv2d_forward(const float* x, const float* wgt, const float* bias, float* out,
                    const ConvGeom& g) {
    if (parallel_enabled())
        conv2d_forward_omp(x, wgt, bias, out, g);
    else
        conv2d_forward_serial(x, wgt, bias, out, g);
}

void conv2d_backward_input(const float* gy, const float* wgt, float* gx, const ConvGeom& g) {
    if (parallel_enabled())
        conv2d_backward_input_omp(gy, wgt, gx, g);
    else
        conv2d_backward_input_serial(gy, wgt, gx, g);
}

void conv2d_backward_weight(const float* gy, const float* x, float* gw, const ConvGeom& g) {
    if (parallel_enabled())
        conv2d_backward_weight_omp(gy, x, gw, g);
    else
        conv2d_backward_weight_serial(gy, x, gw, g);
}

}  // namespace cald::kernels
