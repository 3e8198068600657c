#include "cald/ops.hpp"

#include <cmath>
#include <cstring>

#include "cald/kernels.hpp"

namespace cald {

namespace {

enum class Bcast { same, scalar, channel };

Bcast bcast_mode(const Tensor& a, const Tensor& b, const char* name) {
    if (a.shape() == b.shape()) return Bcast::same;
    if (b.numel() == 1) return Bcast::scalar;
    if (b.ndim() == 1 && a.ndim() == 4 && b.dim(0) == a.dim(1)) return Bcast::channel;
    throw std::invalid_argument(std::string(name) + ": shape mismatch " + shape_str(a.shape()) +
                                " vs " + shape_str(b.shape()));
}

// Maps a's flat index to b's under the broadcast mode.
struct BcastIndex {
    Bcast mode;
    int64_t c = 1, plane = 1;
    int64_t operator()(int64_t i) const {
        switch (mode) {
            case Bcast::same: return i;
            case Bcast::scalar: return 0;
            default: return (i / plane) % c;
        }
    }
};

BcastIndex bcast_index(const Tensor& a, Bcast mode) {
    BcastIndex bi{mode};
    if (mode == Bcast::channel) {
        bi.c = a.dim(1);
        bi.plane = a.dim(2) * a.dim(3);
    }
    return bi;
}

// go scaled by dB/db, reduced into b's slot (f64 per broadcast slot).
template <class Fn>
void reduce_into(GradMap& gm, const Tensor& b, const BcastIndex& bi, int64_t n, Fn contrib) {
    auto& gb = gm.slot(b);
    if (bi.mode == Bcast::same) {
        for (int64_t i = 0; i < n; ++i) gb[static_cast<size_t>(i)] += contrib(i);
    } else {
        std::vector<double> acc(gb.size(), 0.0);
        for (int64_t i = 0; i < n; ++i) acc[static_cast<size_t>(bi(i))] += contrib(i);
        for (size_t j = 0; j < gb.size(); ++j) gb[j] += static_cast<float>(acc[j]);
    }
}

template <class F, class Dfdx>
Tensor unary_op(const char* name, const Tensor& x, F f, Dfdx dfdx) {
    const int64_t n = x.numel();
    std::vector<float> v(static_cast<size_t>(n));
    const float* xd = x.data();
    for (int64_t i = 0; i < n; ++i) v[static_cast<size_t>(i)] = f(xd[i]);
    return make_op_output(name, x.shape(), std::move(v), {x},
                          [x, dfdx, n](const std::vector<float>& go, GradMap& gm) {
                              auto& gx = gm.slot(x);
                              const float* xd = x.data();
                              for (int64_t i = 0; i < n; ++i)
                                  gx[static_cast<size_t>(i)] += go[static_cast<size_t>(i)] * dfdx(xd[i]);
                          });
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
    const Bcast mode = bcast_mode(a, b, "add");
    const BcastIndex bi = bcast_index(a, mode);
    const int64_t n = a.numel();
    std::vector<float> v(static_cast<size_t>(n));
    const float *ad = a.data(), *bd = b.data();
    for (int64_t i = 0; i < n; ++i) v[static_cast<size_t>(i)] = ad[i] + bd[bi(i)];
    return make_op_output("add", a.shape(), std::move(v), {a, b},
                          [a, b, bi, n](const std::vector<float>& go, GradMap& gm) {
                              auto& ga = gm.slot(a);
                              for (int64_t i = 0; i < n; ++i)
                                  ga[static_cast<size_t>(i)] += go[static_cast<size_t>(i)];
                              reduce_into(gm, b, bi, n, [&](int64_t i) {
                                  return static_cast<double>(go[static_cast<size_t>(i)]);
                              });
                          });
}

Tensor sub(const Tensor& a, const Tensor& b) {
    const Bcast mode = bcast_mode(a, b, "sub");
    const BcastIndex bi = bcast_index(a, mode);
    const int64_t n = a.numel();
    std::vector<float> v(static_cast<size_t>(n));
    const float *ad = a.data(), *bd = b.data();
    for (int64_t i = 0; i < n; ++i) v[static_cast<size_t>(i)] = ad[i] - bd[bi(i)];
    return make_op_output("sub", a.shape(), std::move(v), {a, b},
                          [a, b, bi, n](const std::vector<float>& go, GradMap& gm) {
                              auto& ga = gm.slot(a);
                              for (int64_t i = 0; i < n; ++i)
                                  ga[static_cast<size_t>(i)] += go[static_cast<size_t>(i)];
                              reduce_into(gm, b, bi, n, [&](int64_t i) {
                                  return -static_cast<double>(go[static_cast<size_t>(i)]);
                              });
                          });
}

Tensor mul(const Tensor& a, const Tensor& b) {
    const Bcast mode = bcast_mode(a, b, "mul");
    const BcastIndex bi = bcast_index(a, mode);
    const int64_t n = a.numel();
    std::vector<float> v(static_cast<size_t>(n));
    const float *ad = a.data(), *bd = b.data();
    for (int64_t i = 0; i < n; ++i) v[static_cast<size_t>(i)] = ad[i] * bd[bi(i)];
    return make_op_output("mul", a.shape(), std::move(v), {a, b},
                          [a, b, bi, n](const std::vector<float>& go, GradMap& gm) {
                              const float *ad = a.data(), *bd = b.data();
                              auto& ga = gm.slot(a);
                              for (int64_t i = 0; i < n; ++i)
                                  ga[static_cast<size_t>(i)] += go[static_cast<size_t>(i)] * bd[bi(i)];
                              reduce_into(gm, b, bi, n, [&](int64_t i) {
                                  return static_cast<double>(go[static_cast<size_t>(i)]) * ad[i];
                              });
                          });
}

Tensor div(const Tensor& a, const Tensor& b) {
    const Bcast mode = bcast_mode(a, b, "div");
    const BcastIndex bi = bcast_index(a, mode);
    const int64_t n = a.numel();
    std::vector<float> v(static_cast<size_t>(n));
    const float *ad = a.data(), *bd = b.data();
    for (int64_t i = 0; i < n; ++i) v[static_cast<size_t>(i)] = ad[i] / bd[bi(i)];
    return make_op_output("div", a.shape(), std::move(v), {a, b},
                          [a, b, bi, n](const std::vector<float>& go, GradMap& gm) {
                              const float *ad = a.data(), *bd = b.data();
                              auto& ga = gm.slot(a);
                              for (int64_t i = 0; i < n; ++i)
                                  ga[static_cast<size_t>(i)] += go[static_cast<size_t>(i)] / bd[bi(i)];
                              reduce_into(gm, b, bi, n, [&](int64_t i) {
                                  const double bv = bd[bi(i)];
                                  return -static_cast<double>(go[static_cast<size_t>(i)]) * ad[i] / (bv * bv);
                              });
                          });
}

Tensor add(const Tensor& a, float s) { return add(a, Tensor::scalar(s)); }
Tensor sub(const Tensor& a, float s) { return sub(a, Tensor::scalar(s)); }
Tensor mul(const Tensor& a, float s) { return mul(a, Tensor::scalar(s)); }

Tensor exp(const Tensor& x) {
    return unary_op(
        "exp", x, [](float v) { return std::exp(v); }, [](float v) { return std::exp(v); });
}

Tensor log(const Tensor& x) {
    return unary_op(
        "log", x, [](float v) { return std::log(v); }, [](float v) { return 1.0f / v; });
}

Tensor sqrt(const Tensor& x) {
    return unary_op(
        "sqrt", x, [](float v) { return std::sqrt(v); },
        [](float v) { return 0.5f / std::sqrt(v); });
}

Tensor abs(const Tensor& x) {
    return unary_op(
        "abs", x, [](float v) { return std::fabs(v); },
        [](float v) { return v > 0.0f ? 1.0f : (v < 0.0f ? -1.0f : 0.0f); });
}

Tensor clampmin(const Tensor& x, float floor) {
    return unary_op(
        "clampmin", x, [floor](float v) { return v > floor ? v : floor; },
        [floor](float v) { return v > floor ? 1.0f : 0.0f; });
}

Tensor softplus(const Tensor& x) {
    auto f = [](float v) -> float {
        const double d = v;
        if (d > 20.0) return v;
        if (d < -20.0) return static_cast<float>(std::exp(d));
        return static_cast<float>(std::log1p(std::exp(d)));
    };
    auto g = [](float v) -> float { return static_cast<float>(1.0 / (1.0 + std::exp(-static_cast<double>(v)))); };
    return unary_op("softplus", x, f, g);
}

Tensor phi(const Tensor& x) {
    auto f = [](float v) -> float {
        return static_cast<float>(0.5 * std::erfc(-static_cast<double>(v) * M_SQRT1_2));
    };
    auto g = [](float v) -> float {
        const double d = v;
        return static_cast<float>(std::exp(-0.5 * d * d) * 0.3989422804014327);
    };
    return unary_op("phi", x, f, g);
}

Tensor leaky_relu(const Tensor& x, float slope) {
    return unary_op(
        "leaky_relu", x, [slope](float v) { return v >= 0.0f ? v : slope * v; },
        [slope](float v) { return v > 0.0f ? 1.0f : (v < 0.0f ? slope : 0.0f); });
}

namespace {

kernels::ConvGeom conv_geom(const Tensor& x, const Tensor& w, int stride, int pad) {
    CALD_REQUIRE(x.ndim() == 4 && w.ndim() == 4, "conv2d expects 4-D activation and weight");
    CALD_REQUIRE(stride >= 1 && pad >= 0, "conv2d: invalid stride/pad");
    CALD_REQUIRE(w.dim(2) == w.dim(3), "conv2d: kernel must be square");
    CALD_REQUIRE(x.dim(1) == w.dim(1), "conv2d: channel mismatch, input " + shape_str(x.shape()) +
                                           " weight " + shape_str(w.shape()));
    kernels::ConvGeom g;
    g.n = x.dim(0);
    g.ci = x.dim(1);
    g.h = x.dim(2);
    g.w = x.dim(3);
    g.co = w.dim(0);
    g.k = w.dim(2);
    g.stride = stride;
    g.pad = pad;
    CALD_REQUIRE(g.h + 2 * g.pad >= g.k && g.w + 2 * g.pad >= g.k,
                 "conv2d: kernel larger than padded input");
    g.ho = (g.h + 2 * g.pad - g.k) / g.stride + 1;
    g.wo = (g.w + 2 * g.pad - g.k) / g.stride + 1;
    return g;
}

void add_into(std::vector<float>& dst, const std::vector<float>& src) {
    for (size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

}  // namespace

Tensor conv2d(const Tensor& x, const Tensor& w, const Tensor& bias, int stride, int pad) {
    const kernels::ConvGeom g = conv_geom(x, w, stride, pad);
    if (bias.defined())
        CALD_REQUIRE(bias.ndim() == 1 && bias.dim(0) == g.co, "conv2d: bias shape mismatch");
    std::vector<float> v(static_cast<size_t>(g.n * g.co * g.ho * g.wo));
    kernels::conv2d_forward(x.data(), w.data(), bias.defined() ? bias.data() : nullptr, v.data(), g);
    std::vector<Tensor> inputs = {x, w};
    if (bias.defined()) inputs.push_back(bias);
    return make_op_output(
        "conv2d", {g.n, g.co, g.ho, g.wo}, std::move(v), std::move(inputs),
        [x, w, bias, g](const std::vector<float>& go, GradMap& gm) {
            std::vector<float> tmp(static_cast<size_t>(x.numel()));
            kernels::conv2d_backward_input(go.data(), w.data(), tmp.data(), g);
            add_into(gm.slot(x), tmp);
            tmp.assign(static_cast<size_t>(w.numel()), 0.0f);
            kernels::conv2d_backward_weight(go.data(), x.data(), tmp.data(), g);
            add_into(gm.slot(w), tmp);
            if (bias.defined()) {
                tmp.assign(static_cast<size_t>(bias.numel()), 0.0f);
                kernels::conv2d_backward_bias(go.data(), tmp.data(), g.n, g.co, g.ho, g.wo);
                add_into(gm.slot(bias), tmp);
            }
        });
}

Tensor conv2d_transpose(const Tensor& x, const Tensor& w, const Tensor& bias, int stride, int pad,
                        int out_pad) {
    CALD_REQUIRE(x.ndim() == 4 && w.ndim() == 4, "conv2d_transpose expects 4-D tensors");
    CALD_REQUIRE(stride >= 1 && pad >= 0 && out_pad >= 0 && out_pad < stride,
                 "conv2d_transpose: invalid stride/pad/out_pad");
    CALD_REQUIRE(w.dim(2) == w.dim(3), "conv2d_transpose: kernel must be square");
    CALD_REQUIRE(x.dim(1) == w.dim(0), "conv2d_transpose: channel mismatch, input " +
                                           shape_str(x.shape()) + " weight " + shape_str(w.shape()));
    // Geometry of the convolution this op is the adjoint of.
    kernels::ConvGeom g;
    g.n = x.dim(0);
    g.co = x.dim(1);
    g.ho = x.dim(2);
    g.wo = x.dim(3);
    g.ci = w.dim(1);
    g.k = w.dim(2);
    g.stride = stride;
    g.pad = pad;
    g.h = (g.ho - 1) * stride - 2 * pad + g.k + out_pad;
    g.w = (g.wo - 1) * stride - 2 * pad + g.k + out_pad;
    CALD_REQUIRE(g.h >= 1 && g.w >= 1, "conv2d_transpose: output extent would be empty");
    if (bias.defined())
        CALD_REQUIRE(bias.ndim() == 1 && bias.dim(0) == g.ci, "conv2d_transpose: bias shape mismatch");

    std::vector<float> v(static_cast<size_t>(g.n * g.ci * g.h * g.w));
    kernels::conv2d_backward_input(x.data(), w.data(), v.data(), g);
    if (bias.defined()) {
        const float* bd = bias.data();
        const int64_t plane = g.h * g.w;
        for (int64_t n = 0; n < g.n; ++n)
            for (int64_t c = 0; c < g.ci; ++c) {
                float* p = v.data() + (n * g.ci + c) * plane;
                for (int64_t i = 0; i < plane; ++i) p[i] += bd[c];
            }
    }
    std::vector<Tensor> inputs = {x, w};
    if (bias.defined()) inputs.push_back(bias);
    return make_op_output(
        "conv2d_transpose", {g.n, g.ci, g.h, g.w}, std::move(v), std::move(inputs),
        [x, w, bias, g](const std::vector<float>& go, GradMap& gm) {
            std::vector<float> tmp(static_cast<size_t>(x.numel()));
            kernels::conv2d_forward(go.data(), w.data(), nullptr, tmp.data(), g);
            add_into(gm.slot(x), tmp);
            tmp.assign(static_cast<size_t>(w.numel()), 0.0f);
            kernels::conv2d_backward_weight(x.data(), go.data(), tmp.data(), g);
            add_into(gm.slot(w), tmp);
            if (bias.defined()) {
                tmp.assign(static_cast<size_t>(bias.numel()), 0.0f);
                kernels::conv2d_backward_bias(go.data(), tmp.data(), g.n, g.ci, g.h, g.w);
                add_into(gm.slot(bias), tmp);
            }
        });
}

Tensor maxpool2d(const Tensor& x, int k, int stride) {
    CALD_REQUIRE(x.ndim() == 4, "maxpool2d expects a 4-D tensor");
    CALD_REQUIRE(k >= 1 && stride >= 1, "maxpool2d: invalid window");
    const int64_t n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
    CALD_REQUIRE(h >= k && w >= k, "maxpool2d: window larger than input " + shape_str(x.shape()));
    const int64_t ho = (h - k) / stride + 1;
    const int64_t wo = (w - k) / stride + 1;
    std::vector<float> v(static_cast<size_t>(n * c * ho * wo));
    auto idx = std::make_shared<std::vector<int64_t>>(v.size());
    const float* xd = x.data();
    int64_t o = 0;
    for (int64_t b = 0; b < n; ++b)
        for (int64_t ch = 0; ch < c; ++ch) {
            const float* plane = xd + (b * c + ch) * h * w;
            for (int64_t i = 0; i < ho; ++i)
                for (int64_t j = 0; j < wo; ++j, ++o) {
                    float best = plane[i * stride * w + j * stride];
                    int64_t best_at = i * stride * w + j * stride;
                    for (int64_t di = 0; di < k; ++di)
                        for (int64_t dj = 0; dj < k; ++dj) {
                            const int64_t at = (i * stride + di) * w + (j * stride + dj);
                            if (plane[at] > best) {
                                best = plane[at];
                                best_at = at;
                            }
                        }
                    v[static_cast<size_t>(o)] = best;
                    (*idx)[static_cast<size_t>(o)] = (b * c + ch) * h * w + best_at;
                }
        }
    return make_op_output("maxpool2d", {n, c, ho, wo}, std::move(v), {x},
                          [x, idx](const std::vector<float>& go, GradMap& gm) {
                              auto& gx = gm.slot(x);
                              for (size_t i = 0; i < go.size(); ++i)
                                  gx[static_cast<size_t>((*idx)[i])] += go[i];
                          });
}

Tensor concat_channels(const Tensor& a, const Tensor& b) {
    CALD_REQUIRE(a.ndim() == 4 && b.ndim() == 4, "concat_channels expects 4-D tensors");
    CALD_REQUIRE(a.dim(0) == b.dim(0) && a.dim(2) == b.dim(2) && a.dim(3) == b.dim(3),
                 "concat_channels: spatial mismatch " + shape_str(a.shape()) + " vs " +
                     shape_str(b.shape()));
    const int64_t n = a.dim(0), ca = a.dim(1), cb = b.dim(1), h = a.dim(2), w = a.dim(3);
    const int64_t plane = h * w;
    std::vector<float> v(static_cast<size_t>(n * (ca + cb) * plane));
    for (int64_t bn = 0; bn < n; ++bn) {
        std::memcpy(v.data() + bn * (ca + cb) * plane, a.data() + bn * ca * plane,
                    static_cast<size_t>(ca * plane) * sizeof(float));
        std::memcpy(v.data() + (bn * (ca + cb) + ca) * plane, b.data() + bn * cb * plane,
                    static_cast<size_t>(cb * plane) * sizeof(float));
    }
    return make_op_output("concat_channels", {n, ca + cb, h, w}, std::move(v), {a, b},
                          [a, b, n, ca, cb, plane](const std::vector<float>& go, GradMap& gm) {
                              auto& ga = gm.slot(a);
                              auto& gb = gm.slot(b);
                              for (int64_t bn = 0; bn < n; ++bn) {
                                  const float* src = go.data() + bn * (ca + cb) * plane;
                                  float* pa = ga.data() + bn * ca * plane;
                                  for (int64_t i = 0; i < ca * plane; ++i) pa[i] += src[i];
                                  float* pb = gb.data() + bn * cb * plane;
                                  for (int64_t i = 0; i < cb * plane; ++i) pb[i] += src[ca * plane + i];
                              }
                          });
}

Tensor slice_channels(const Tensor& x, int64_t start, int64_t count) {
    CALD_REQUIRE(x.ndim() == 4, "slice_channels expects a 4-D tensor");
    const int64_t n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
    CALD_REQUIRE(start >= 0 && count >= 1 && start + count <= c,
                 "slice_channels: range outside " + shape_str(x.shape()));
    const int64_t plane = h * w;
    std::vector<float> v(static_cast<size_t>(n * count * plane));
    for (int64_t bn = 0; bn < n; ++bn)
        std::memcpy(v.data() + bn * count * plane, x.data() + (bn * c + start) * plane,
                    static_cast<size_t>(count * plane) * sizeof(float));
    return make_op_output("slice_channels", {n, count, h, w}, std::move(v), {x},
                          [x, start, count, n, c, plane](const std::vector<float>& go, GradMap& gm) {
                              auto& gx = gm.slot(x);
                              for (int64_t bn = 0; bn < n; ++bn) {
                                  const float* src = go.data() + bn * count * plane;
                                  float* dst = gx.data() + (bn * c + start) * plane;
                                  for (int64_t i = 0; i < count * plane; ++i) dst[i] += src[i];
                              }
                          });
}

namespace {
inline int64_t clamp64(int64_t v, int64_t lo, int64_t hi) { return v < lo ? lo : (v > hi ? hi : v); }
}

Tensor pad_replicate(const Tensor& x, int top, int bottom, int left, int right) {
    CALD_REQUIRE(x.ndim() == 4, "pad_replicate expects a 4-D tensor");
    CALD_REQUIRE(top >= 0 && bottom >= 0 && left >= 0 && right >= 0, "pad_replicate: negative pad");
    const int64_t n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
    const int64_t oh = h + top + bottom, ow = w + left + right;
    std::vector<float> v(static_cast<size_t>(n * c * oh * ow));
    const float* xd = x.data();
    for (int64_t p = 0; p < n * c; ++p) {
        const float* src = xd + p * h * w;
        float* dst = v.data() + p * oh * ow;
        for (int64_t i = 0; i < oh; ++i) {
            const int64_t si = clamp64(i - top, 0, h - 1);
            for (int64_t j = 0; j < ow; ++j) dst[i * ow + j] = src[si * w + clamp64(j - left, 0, w - 1)];
        }
    }
    return make_op_output("pad_replicate", {n, c, oh, ow}, std::move(v), {x},
                          [x, top, left, n, c, h, w, oh, ow](const std::vector<float>& go, GradMap& gm) {
                              auto& gx = gm.slot(x);
                              for (int64_t p = 0; p < n * c; ++p) {
                                  const float* src = go.data() + p * oh * ow;
                                  float* dst = gx.data() + p * h * w;
                                  for (int64_t i = 0; i < oh; ++i) {
                                      const int64_t si = clamp64(i - top, 0, h - 1);
                                      for (int64_t j = 0; j < ow; ++j)
                                          dst[si * w + clamp64(j - left, 0, w - 1)] += src[i * ow + j];
                                  }
                              }
                          });
}

Tensor crop(const Tensor& x, int top, int left, int64_t h, int64_t w) {
    CALD_REQUIRE(x.ndim() == 4, "crop expects a 4-D tensor");
    const int64_t n = x.dim(0), c = x.dim(1), ih = x.dim(2), iw = x.dim(3);
    CALD_REQUIRE(top >= 0 && left >= 0 && h >= 1 && w >= 1 && top + h <= ih && left + w <= iw,
                 "crop: region outside input " + shape_str(x.shape()));
    std::vector<float> v(static_cast<size_t>(n * c * h * w));
    const float* xd = x.data();
    for (int64_t p = 0; p < n * c; ++p)
        for (int64_t i = 0; i < h; ++i)
            std::memcpy(v.data() + (p * h + i) * w, xd + (p * ih + top + i) * iw + left,
                        static_cast<size_t>(w) * sizeof(float));
    return make_op_output("crop", {n, c, h, w}, std::move(v), {x},
                          [x, top, left, n, c, ih, iw, h, w](const std::vector<float>& go, GradMap& gm) {
                              auto& gx = gm.slot(x);
                              for (int64_t p = 0; p < n * c; ++p)
                                  for (int64_t i = 0; i < h; ++i) {
                                      const float* src = go.data() + (p * h + i) * w;
                                      float* dst = gx.data() + (p * ih + top + i) * iw + left;
                                      for (int64_t j = 0; j < w; ++j) dst[j] += src[j];
                                  }
                          });
}

Tensor sum(const Tensor& x) {
    double acc = 0.0;
    for (float v : x.values()) acc += static_cast<double>(v);
    const int64_t n = x.numel();
    return make_op_output("sum", {1}, {static_cast<float>(acc)}, {x},
                          [x, n](const std::vector<float>& go, GradMap& gm) {
                              auto& gx = gm.slot(x);
                              for (int64_t i = 0; i < n; ++i) gx[static_cast<size_t>(i)] += go[0];
                          });
}

Tensor round_half_away(const Tensor& x) {
    std::vector<float> v(static_cast<size_t>(x.numel()));
    const float* xd = x.data();
    for (size_t i = 0; i < v.size(); ++i) {
        CALD_REQUIRE(std::isfinite(xd[i]), "round: non-finite input");
        v[i] = std::round(xd[i]);  // std::round ties away from zero
    }
    return Tensor::from(x.shape(), std::move(v));
}

Tensor clamp01_plain(const Tensor& x) {
    std::vector<float> v(static_cast<size_t>(x.numel()));
    const float* xd = x.data();
    for (size_t i = 0; i < v.size(); ++i) v[i] = xd[i] < 0.0f ? 0.0f : (xd[i] > 1.0f ? 1.0f : xd[i]);
    return Tensor::from(x.shape(), std::move(v));
}

}  // namespace cald
