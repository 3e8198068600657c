#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cald/entropy.hpp"
#include "cald/layers.hpp"
#include "cald/tensor.hpp"

namespace cald {

// K quality levels sharing one model: lambdas descending with the deployment
// target first, and the channel width g(lambda) for each.
struct QualityLevelSet {
    std::vector<float> lambdas;
    std::vector<int> widths;

    int levels() const { return static_cast<int>(lambdas.size()); }
    float target_lambda() const { return lambdas.at(0); }

    // Widths {M, ceil(3M/4), ceil(M/2)} over K levels; lambdas halve per level.
    static QualityLevelSet standard(float target_lambda, int latent_channels, int k);
    static QualityLevelSet single(float lambda, int latent_channels);
    void validate(int latent_channels) const;
};

struct ModelConfig {
    int latent_channels = 32;  // M
    int hyper_channels = 32;   // N
    int char_channels = 24;    // C, characteristic extractor width
    bool caft = true;
    bool mean_shift = true;
    QualityLevelSet levels = QualityLevelSet::single(1024.0f, 32);
    uint64_t seed = 1;

    void validate() const;
    // One byte identifying the deployment lambda; streams record it so a
    // decode with the wrong model fails fast.
    uint8_t lambda_id() const;
};

struct EntropyParams {
    Tensor mu;     // [N,M,h,w]
    Tensor sigma;  // same, softplus-ed and floored
};

// One CAFT stage: concat(c, f) -> two mixing convs -> SFT branches predicting
// (gamma, beta) for f, plus an upsampler producing the next-level condition.
// The SFT output convs start at zero weight with bias (1, 0), so a fresh layer
// is exactly the identity on f.
struct CaftLayer {
    Conv2dLayer mix1, mix2;
    Conv2dLayer gamma1, gamma2;
    Conv2dLayer beta1, beta2;
    Deconv2dLayer upsample;
    bool has_upsample = true;

    static CaftLayer make(int64_t feature_ch, int64_t char_ch, bool has_upsample, Rng& rng);
    // Returns (f_adapted, c_next); c_next is undefined on the last level.
    std::pair<Tensor, Tensor> apply(const Tensor& f, const Tensor& c) const;
    void collect(const std::string& prefix, ParamList& out) const;
};

class CodecModel {
public:
    explicit CodecModel(ModelConfig cfg);

    // x [N,3,H,W] with H, W multiples of 64 -> y [N,M,H/16,W/16].
    Tensor analyze(const Tensor& x) const;
    // y -> z [N,N_ch,H/64,W/64].
    Tensor hyper_analyze(const Tensor& y) const;
    // zhat -> (mu, sigma) at latent resolution.
    EntropyParams entropy_parameters(const Tensor& zhat) const;
    // zhat -> c1 at the first IGDN output resolution (latent x2).
    Tensor extract_characteristics(const Tensor& zhat) const;
    // yhat (+ c1 when CAFT is enabled) -> image, unclamped.
    Tensor synthesize(const Tensor& yhat, const Tensor& c1) const;

    const ModelConfig& config() const { return cfg_; }
    const FactorizedPrior& prior() const { return prior_; }
    ParamList parameters() const;
    const CaftLayer& caft_layer(int level) const { return caft_.at(static_cast<size_t>(level)); }

private:
    ModelConfig cfg_;

    Conv2dLayer enc1_, enc2_, enc3_, enc4_;
    GdnLayer enc_gdn1_, enc_gdn2_, enc_gdn3_;

    Conv2dLayer hyp1_, hyp2_, hyp3_;

    Deconv2dLayer ep1_, ep2_;
    Conv2dLayer ep3_;

    Deconv2dLayer chr1_, chr2_, chr3_;

    Deconv2dLayer dec1_, dec2_, dec3_, dec4_;
    GdnLayer dec_igdn1_, dec_igdn2_, dec_igdn3_;

    std::vector<CaftLayer> caft_;
    FactorizedPrior prior_;
};

}  // namespace cald
