#pragma once

#include <string>
#include <vector>

#include "cald/ops.hpp"
#include "cald/rng.hpp"
#include "cald/tensor.hpp"

namespace cald {

// Named parameter registry; order is fixed by construction and shared by the
// optimizer and the checkpoint writer.
struct ParamList {
    std::vector<std::pair<std::string, Tensor>> items;
    void add(std::string name, const Tensor& t) { items.emplace_back(std::move(name), t); }
    size_t size() const { return items.size(); }
};

// Fan-in scaled uniform init, |w| <= sqrt(6 / fan_in); biases zero.
Tensor conv_weight_init(int64_t co, int64_t ci, int64_t k, Rng& rng);

struct Conv2dLayer {
    Tensor w, b;
    int stride = 1, pad = 0;

    static Conv2dLayer make(int64_t ci, int64_t co, int64_t k, int stride, int pad, Rng& rng);
    Tensor operator()(const Tensor& x) const { return conv2d(x, w, b, stride, pad); }
    void collect(const std::string& prefix, ParamList& out) const;
};

struct Deconv2dLayer {
    Tensor w, b;  // [ci, co, k, k]
    int stride = 1, pad = 0, out_pad = 0;

    static Deconv2dLayer make(int64_t ci, int64_t co, int64_t k, int stride, int pad, int out_pad,
                              Rng& rng);
    Tensor operator()(const Tensor& x) const { return conv2d_transpose(x, w, b, stride, pad, out_pad); }
    void collect(const std::string& prefix, ParamList& out) const;
};

// Generalized divisive normalization with exponents (2, 1/2):
//   gdn:  y_i = x_i / sqrt(beta_i + sum_j gamma_ij x_j^2)
//   igdn: y_i = x_i * sqrt(beta_i + sum_j gamma_ij x_j^2)
// Nonnegativity is by reparameterization: beta = b^2 + beta_min, gamma = g^2,
// so no projection is needed after gradient steps.
struct GdnLayer {
    static constexpr float kBetaMin = 1e-6f;
    Tensor b_param;  // [C]
    Tensor g_param;  // [C, C, 1, 1]
    bool inverse = false;

    static GdnLayer make(int64_t channels, bool inverse);
    Tensor operator()(const Tensor& x) const;
    Tensor effective_beta() const { return add(mul(b_param, b_param), kBetaMin); }
    Tensor effective_gamma() const { return mul(g_param, g_param); }
    void collect(const std::string& prefix, ParamList& out) const;
};

Tensor gdn(const Tensor& x, const GdnLayer& p);
Tensor igdn(const Tensor& x, const GdnLayer& p);

}  // namespace cald
