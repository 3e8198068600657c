#pragma once

#include <cstdint>
#include <vector>

#include "cald/ops.hpp"
#include "cald/range_coder.hpp"
#include "cald/rng.hpp"
#include "cald/tensor.hpp"

namespace cald {

// Coding constants for the conditional Gaussian model of the latents.
struct GaussianConditional {
    static constexpr float kSigmaFloor = 0.11f;
    static constexpr int kPrecision = 16;
    static constexpr double kTailMass = 1e-9;
};

// Per-channel logistic density for the hyperprior: location loc[c], scale
// softplus(raw_scale[c]) floored at kScaleFloor. Both are learned.
struct FactorizedPrior {
    static constexpr float kScaleFloor = 1e-3f;
    Tensor loc;        // [C]
    Tensor raw_scale;  // [C]

    static FactorizedPrior make(int64_t channels);
    Tensor scale() const { return clampmin(softplus(raw_scale), kScaleFloor); }
    void collect(const std::string& prefix, struct ParamList& out) const;
};

// Training-mode quantization proxy: y + u, u ~ U(-0.5, 0.5) i.i.d. from the
// seed; the gradient passes through unchanged.
Tensor quantize_noise(const Tensor& y, uint64_t seed);

// Hard quantization, mean-shifted: symbols = round(y - mu), yhat = symbols + mu.
struct Quantized {
    Tensor yhat;
    std::vector<int32_t> symbols;
};
Quantized quantize_round(const Tensor& y, const Tensor& mu);

// Elementwise bit cost -log2(Phi((v+.5-mu)/sigma) - Phi((v-.5-mu)/sigma)),
// differentiable w.r.t. all three. sigma must already be floored.
Tensor gaussian_bits(const Tensor& v, const Tensor& mu, const Tensor& sigma);

// Elementwise bit cost under the per-channel logistic CDF; v is [N,C,H,W].
Tensor factorized_bits(const Tensor& v, const FactorizedPrior& prior);

// Quantized CDF over integer symbols [vmin, vmax] plus a trailing escape bin.
// cum has bins+2 entries, strictly increasing, cum.back() == 1<<16.
struct CdfTable {
    int32_t vmin = 0, vmax = 0;
    std::vector<uint32_t> cum;

    int32_t bins() const { return vmax - vmin + 1; }
    uint32_t escape_index() const { return static_cast<uint32_t>(bins()); }
};

CdfTable build_cdf_gaussian(float mu_residual, float sigma, int32_t vmin, int32_t vmax);
CdfTable build_cdf_factorized(float loc, float scale, int32_t vmin, int32_t vmax);

// Symbol transport over the range coder; out-of-range symbols go through the
// escape bin followed by 32 raw bits.
void encode_symbol(RangeEncoder& enc, const CdfTable& cdf, int32_t symbol);
int32_t decode_symbol(RangeDecoder& dec, const CdfTable& cdf);

}  // namespace cald
