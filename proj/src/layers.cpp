#include "cald/layers.hpp"

#include <cmath>

namespace cald {

Tensor conv_weight_init(int64_t co, int64_t ci, int64_t k, Rng& rng) {
    const float bound = std::sqrt(6.0f / static_cast<float>(ci * k * k));
    std::vector<float> w(static_cast<size_t>(co * ci * k * k));
    for (auto& v : w) v = rng.uniform(-bound, bound);
    Tensor t = Tensor::from({co, ci, k, k}, std::move(w));
    t.set_requires_grad(true);
    return t;
}

Conv2dLayer Conv2dLayer::make(int64_t ci, int64_t co, int64_t k, int stride, int pad, Rng& rng) {
    Conv2dLayer l;
    l.w = conv_weight_init(co, ci, k, rng);
    l.b = Tensor::zeros({co});
    l.b.set_requires_grad(true);
    l.stride = stride;
    l.pad = pad;
    return l;
}

void Conv2dLayer::collect(const std::string& prefix, ParamList& out) const {
    out.add(prefix + ".w", w);
    out.add(prefix + ".b", b);
}

Deconv2dLayer Deconv2dLayer::make(int64_t ci, int64_t co, int64_t k, int stride, int pad, int out_pad,
                                  Rng& rng) {
    Deconv2dLayer l;
    // Weight layout [ci, co, k, k]; init scale from the input fan.
    const float bound = std::sqrt(6.0f / static_cast<float>(ci * k * k));
    std::vector<float> w(static_cast<size_t>(ci * co * k * k));
    for (auto& v : w) v = rng.uniform(-bound, bound);
    l.w = Tensor::from({ci, co, k, k}, std::move(w));
    l.w.set_requires_grad(true);
    l.b = Tensor::zeros({co});
    l.b.set_requires_grad(true);
    l.stride = stride;
    l.pad = pad;
    l.out_pad = out_pad;
    return l;
}

void Deconv2dLayer::collect(const std::string& prefix, ParamList& out) const {
    out.add(prefix + ".w", w);
    out.add(prefix + ".b", b);
}

GdnLayer GdnLayer::make(int64_t channels, bool inverse) {
    GdnLayer l;
    l.inverse = inverse;
    // beta = 1 at init; gamma = 0.1 on the diagonal. Off-diagonal g starts at
    // 1e-3 rather than 0 so gamma = g^2 keeps a live gradient there.
    l.b_param = Tensor::full({channels}, std::sqrt(1.0f - kBetaMin));
    l.b_param.set_requires_grad(true);
    std::vector<float> g(static_cast<size_t>(channels * channels), 1e-3f);
    for (int64_t c = 0; c < channels; ++c)
        g[static_cast<size_t>(c * channels + c)] = std::sqrt(0.1f);
    l.g_param = Tensor::from({channels, channels, 1, 1}, std::move(g));
    l.g_param.set_requires_grad(true);
    return l;
}

Tensor GdnLayer::operator()(const Tensor& x) const { return inverse ? igdn(x, *this) : gdn(x, *this); }

void GdnLayer::collect(const std::string& prefix, ParamList& out) const {
    out.add(prefix + ".b", b_param);
    out.add(prefix + ".g", g_param);
}

namespace {
Tensor gdn_norm(const Tensor& x, const GdnLayer& p) {
    CALD_REQUIRE(x.ndim() == 4 && x.dim(1) == p.b_param.dim(0),
                 "gdn: channel mismatch, input " + shape_str(x.shape()));
    // beta_i + sum_j gamma_ij x_j^2 as a 1x1 convolution with beta as bias.
    return sqrt(conv2d(mul(x, x), p.effective_gamma(), p.effective_beta(), 1, 0));
}
}  // namespace

Tensor gdn(const Tensor& x, const GdnLayer& p) { return div(x, gdn_norm(x, p)); }

Tensor igdn(const Tensor& x, const GdnLayer& p) { return mul(x, gdn_norm(x, p)); }

}  // namespace cald
