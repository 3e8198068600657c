#include "cald/model.hpp"

#include <cmath>
#include <cstring>
#include <tuple>

namespace cald {

QualityLevelSet QualityLevelSet::standard(float target_lambda, int latent_channels, int k) {
    CALD_REQUIRE(k >= 1 && k <= 4, "quality levels: K must be in [1,4]");
    QualityLevelSet q;
    float lam = target_lambda;
    for (int i = 0; i < k; ++i) {
        q.lambdas.push_back(lam);
        lam *= 0.5f;
    }
    q.widths.push_back(latent_channels);
    if (k >= 2) q.widths.push_back((3 * latent_channels + 3) / 4);
    if (k >= 3) q.widths.push_back((latent_channels + 1) / 2);
    if (k >= 4) q.widths.push_back((latent_channels + 3) / 4);
    q.validate(latent_channels);
    return q;
}

QualityLevelSet QualityLevelSet::single(float lambda, int latent_channels) {
    QualityLevelSet q;
    q.lambdas = {lambda};
    q.widths = {latent_channels};
    return q;
}

void QualityLevelSet::validate(int latent_channels) const {
    CALD_REQUIRE(!lambdas.empty() && lambdas.size() == widths.size(),
                 "quality levels: lambdas/widths size mismatch");
    CALD_REQUIRE(widths[0] == latent_channels, "quality levels: top width must equal M");
    for (size_t i = 0; i < lambdas.size(); ++i) {
        CALD_REQUIRE(lambdas[i] > 0.0f, "quality levels: lambda must be positive");
        CALD_REQUIRE(widths[i] >= 1 && widths[i] <= latent_channels,
                     "quality levels: width out of range");
        if (i > 0) {
            CALD_REQUIRE(lambdas[i] < lambdas[i - 1], "quality levels: lambdas must descend");
            CALD_REQUIRE(widths[i] < widths[i - 1], "quality levels: widths must descend with lambda");
        }
    }
}

void ModelConfig::validate() const {
    CALD_REQUIRE(latent_channels >= 1 && hyper_channels >= 1 && char_channels >= 1,
                 "model config: channel counts must be positive");
    levels.validate(latent_channels);
    // Level masks index latent channels and are maxpooled onto the hyperprior;
    // that mapping is only defined when the channel counts agree.
    if (levels.levels() > 1)
        CALD_REQUIRE(hyper_channels == latent_channels,
                     "model config: channel masking requires N == M");
}

uint8_t ModelConfig::lambda_id() const {
    const float lam = levels.target_lambda();
    uint8_t bytes[sizeof(float)];
    std::memcpy(bytes, &lam, sizeof(float));
    return static_cast<uint8_t>(fnv1a32({bytes, sizeof(float)}) & 0xFF);
}

CaftLayer CaftLayer::make(int64_t feature_ch, int64_t char_ch, bool has_upsample, Rng& rng) {
    CaftLayer l;
    l.mix1 = Conv2dLayer::make(char_ch + feature_ch, char_ch, 3, 1, 1, rng);
    l.mix2 = Conv2dLayer::make(char_ch, char_ch, 3, 1, 1, rng);
    l.gamma1 = Conv2dLayer::make(char_ch, char_ch, 3, 1, 1, rng);
    l.gamma2 = Conv2dLayer::make(char_ch, feature_ch, 3, 1, 1, rng);
    l.beta1 = Conv2dLayer::make(char_ch, char_ch, 3, 1, 1, rng);
    l.beta2 = Conv2dLayer::make(char_ch, feature_ch, 3, 1, 1, rng);
    // Identity start: gamma == 1 and beta == 0 until training moves them.
    l.gamma2.w = Tensor::zeros(l.gamma2.w.shape());
    l.gamma2.w.set_requires_grad(true);
    l.gamma2.b = Tensor::full({feature_ch}, 1.0f);
    l.gamma2.b.set_requires_grad(true);
    l.beta2.w = Tensor::zeros(l.beta2.w.shape());
    l.beta2.w.set_requires_grad(true);
    l.has_upsample = has_upsample;
    if (has_upsample) l.upsample = Deconv2dLayer::make(char_ch, char_ch, 5, 2, 2, 1, rng);
    return l;
}

std::pair<Tensor, Tensor> CaftLayer::apply(const Tensor& f, const Tensor& c) const {
    CALD_REQUIRE(f.dim(2) == c.dim(2) && f.dim(3) == c.dim(3),
                 "caft: feature/condition misalignment " + shape_str(f.shape()) + " vs " +
                     shape_str(c.shape()));
    Tensor mixed = leaky_relu(mix2(leaky_relu(mix1(concat_channels(c, f)))));
    Tensor gamma = gamma2(leaky_relu(gamma1(mixed)));
    Tensor beta = beta2(leaky_relu(beta1(mixed)));
    Tensor adapted = add(mul(f, gamma), beta);
    Tensor next;
    if (has_upsample) next = leaky_relu(upsample(mixed));
    return {adapted, next};
}

void CaftLayer::collect(const std::string& prefix, ParamList& out) const {
    mix1.collect(prefix + ".mix1", out);
    mix2.collect(prefix + ".mix2", out);
    gamma1.collect(prefix + ".gamma1", out);
    gamma2.collect(prefix + ".gamma2", out);
    beta1.collect(prefix + ".beta1", out);
    beta2.collect(prefix + ".beta2", out);
    if (has_upsample) upsample.collect(prefix + ".up", out);
}

CodecModel::CodecModel(ModelConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    const int64_t m = cfg_.latent_channels;
    const int64_t n = cfg_.hyper_channels;
    const int64_t c = cfg_.char_channels;
    Rng rng(cfg_.seed);

    enc1_ = Conv2dLayer::make(3, n, 5, 2, 2, rng);
    enc_gdn1_ = GdnLayer::make(n, false);
    enc2_ = Conv2dLayer::make(n, n, 5, 2, 2, rng);
    enc_gdn2_ = GdnLayer::make(n, false);
    enc3_ = Conv2dLayer::make(n, n, 5, 2, 2, rng);
    enc_gdn3_ = GdnLayer::make(n, false);
    enc4_ = Conv2dLayer::make(n, m, 5, 2, 2, rng);

    hyp1_ = Conv2dLayer::make(m, n, 3, 1, 1, rng);
    hyp2_ = Conv2dLayer::make(n, n, 5, 2, 2, rng);
    hyp3_ = Conv2dLayer::make(n, n, 5, 2, 2, rng);

    ep1_ = Deconv2dLayer::make(n, n, 5, 2, 2, 1, rng);
    ep2_ = Deconv2dLayer::make(n, n, 5, 2, 2, 1, rng);
    ep3_ = Conv2dLayer::make(n, 2 * m, 3, 1, 1, rng);

    chr1_ = Deconv2dLayer::make(n, c, 5, 2, 2, 1, rng);
    chr2_ = Deconv2dLayer::make(c, c, 5, 2, 2, 1, rng);
    chr3_ = Deconv2dLayer::make(c, c, 5, 2, 2, 1, rng);

    dec1_ = Deconv2dLayer::make(m, n, 5, 2, 2, 1, rng);
    dec_igdn1_ = GdnLayer::make(n, true);
    dec2_ = Deconv2dLayer::make(n, n, 5, 2, 2, 1, rng);
    dec_igdn2_ = GdnLayer::make(n, true);
    dec3_ = Deconv2dLayer::make(n, n, 5, 2, 2, 1, rng);
    dec_igdn3_ = GdnLayer::make(n, true);
    dec4_ = Deconv2dLayer::make(n, 3, 5, 2, 2, 1, rng);

    for (int level = 0; level < 3; ++level)
        caft_.push_back(CaftLayer::make(n, c, level < 2, rng));

    prior_ = FactorizedPrior::make(n);
}

Tensor CodecModel::analyze(const Tensor& x) const {
    CALD_REQUIRE(x.ndim() == 4 && x.dim(1) == 3, "analyze: expected [N,3,H,W], got " + shape_str(x.shape()));
    CALD_REQUIRE(x.dim(2) % 64 == 0 && x.dim(3) % 64 == 0,
                 "analyze: spatial dims must be multiples of 64, got " + shape_str(x.shape()));
    Tensor t = enc_gdn1_(enc1_(x));
    t = enc_gdn2_(enc2_(t));
    t = enc_gdn3_(enc3_(t));
    return enc4_(t);
}

Tensor CodecModel::hyper_analyze(const Tensor& y) const {
    Tensor t = leaky_relu(hyp1_(y));
    t = leaky_relu(hyp2_(t));
    return hyp3_(t);
}

EntropyParams CodecModel::entropy_parameters(const Tensor& zhat) const {
    Tensor t = leaky_relu(ep1_(zhat));
    t = leaky_relu(ep2_(t));
    Tensor raw = ep3_(t);
    const int64_t m = cfg_.latent_channels;
    EntropyParams p;
    p.mu = slice_channels(raw, 0, m);
    p.sigma = clampmin(softplus(slice_channels(raw, m, m)), GaussianConditional::kSigmaFloor);
    return p;
}

Tensor CodecModel::extract_characteristics(const Tensor& zhat) const {
    Tensor t = leaky_relu(chr1_(zhat));
    t = leaky_relu(chr2_(t));
    return chr3_(t);
}

Tensor CodecModel::synthesize(const Tensor& yhat, const Tensor& c1) const {
    CALD_REQUIRE(yhat.ndim() == 4 && yhat.dim(1) == cfg_.latent_channels,
                 "synthesize: bad latent shape " + shape_str(yhat.shape()));
    if (cfg_.caft)
        CALD_REQUIRE(c1.defined(), "synthesize: CAFT model requires characteristic input");
    Tensor f = dec_igdn1_(dec1_(yhat));
    Tensor c = c1;
    if (cfg_.caft) std::tie(f, c) = caft_[0].apply(f, c);
    f = dec_igdn2_(dec2_(f));
    if (cfg_.caft) std::tie(f, c) = caft_[1].apply(f, c);
    f = dec_igdn3_(dec3_(f));
    if (cfg_.caft) std::tie(f, c) = caft_[2].apply(f, c);
    return dec4_(f);
}

ParamList CodecModel::parameters() const {
    ParamList out;
    enc1_.collect("enc1", out);
    enc_gdn1_.collect("enc_gdn1", out);
    enc2_.collect("enc2", out);
    enc_gdn2_.collect("enc_gdn2", out);
    enc3_.collect("enc3", out);
    enc_gdn3_.collect("enc_gdn3", out);
    enc4_.collect("enc4", out);
    hyp1_.collect("hyp1", out);
    hyp2_.collect("hyp2", out);
    hyp3_.collect("hyp3", out);
    ep1_.collect("ep1", out);
    ep2_.collect("ep2", out);
    ep3_.collect("ep3", out);
    chr1_.collect("chr1", out);
    chr2_.collect("chr2", out);
    chr3_.collect("chr3", out);
    dec1_.collect("dec1", out);
    dec_igdn1_.collect("dec_igdn1", out);
    dec2_.collect("dec2", out);
    dec_igdn2_.collect("dec_igdn2", out);
    dec3_.collect("dec3", out);
    dec_igdn3_.collect("dec_igdn3", out);
    dec4_.collect("dec4", out);
    for (size_t i = 0; i < caft_.size(); ++i) caft_[i].collect("caft" + std::to_string(i + 1), out);
    prior_.collect("prior", out);
    return out;
}

}  // namespace cald
