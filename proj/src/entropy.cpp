#include "cald/entropy.hpp"

#include <algorithm>
#include <cmath>

#include "cald/layers.hpp"

namespace cald {

FactorizedPrior FactorizedPrior::make(int64_t channels) {
    FactorizedPrior p;
    p.loc = Tensor::zeros({channels});
    p.loc.set_requires_grad(true);
    // softplus(0.5413) ~= 1, so scales start near 1.
    p.raw_scale = Tensor::full({channels}, 0.5413f);
    p.raw_scale.set_requires_grad(true);
    return p;
}

void FactorizedPrior::collect(const std::string& prefix, ParamList& out) const {
    out.add(prefix + ".loc", loc);
    out.add(prefix + ".scale", raw_scale);
}

Tensor quantize_noise(const Tensor& y, uint64_t seed) {
    Rng rng(seed);
    std::vector<float> noise(static_cast<size_t>(y.numel()));
    for (auto& v : noise) v = rng.uniform(-0.5f, 0.5f);
    return add(y, Tensor::from(y.shape(), std::move(noise)));
}

Quantized quantize_round(const Tensor& y, const Tensor& mu) {
    CALD_REQUIRE(y.shape() == mu.shape(), "quantize_round: shape mismatch " + shape_str(y.shape()) +
                                              " vs " + shape_str(mu.shape()));
    const int64_t n = y.numel();
    Quantized q;
    q.symbols.resize(static_cast<size_t>(n));
    std::vector<float> yhat(static_cast<size_t>(n));
    const float *yd = y.data(), *md = mu.data();
    for (int64_t i = 0; i < n; ++i) {
        const float r = yd[i] - md[i];
        CALD_REQUIRE(std::isfinite(r), "quantize_round: non-finite input");
        const float s = std::round(r);
        q.symbols[static_cast<size_t>(i)] = static_cast<int32_t>(s);
        yhat[static_cast<size_t>(i)] = s + md[i];
    }
    q.yhat = Tensor::from(y.shape(), std::move(yhat));
    return q;
}

namespace {
constexpr float kInvLn2 = 1.4426950408889634f;
constexpr float kProbFloor = 1e-9f;  // tail mass keeps bit costs finite

// p = Phi((0.5 - |v-mu|)/sigma) - Phi((-0.5 - |v-mu|)/sigma); mirroring keeps
// both CDF evaluations on the accurate erfc side for far-tail symbols.
Tensor interval_prob(const Tensor& v, const Tensor& mu, const Tensor& sigma) {
    Tensor t = abs(sub(v, mu));
    Tensor upper = phi(div(sub(mul(t, -1.0f), -0.5f), sigma));
    Tensor lower = phi(div(sub(mul(t, -1.0f), 0.5f), sigma));
    return sub(upper, lower);
}

Tensor bits_from_prob(const Tensor& p) { return mul(log(clampmin(p, kProbFloor)), -kInvLn2); }
}  // namespace

Tensor gaussian_bits(const Tensor& v, const Tensor& mu, const Tensor& sigma) {
    return bits_from_prob(interval_prob(v, mu, sigma));
}

Tensor factorized_bits(const Tensor& v, const FactorizedPrior& prior) {
    CALD_REQUIRE(v.ndim() == 4 && v.dim(1) == prior.loc.dim(0),
                 "factorized_bits: channel mismatch for " + shape_str(v.shape()));
    // Logistic CDF F(x) = sigmoid((x - loc)/scale); F(v+.5) - F(v-.5) computed
    // on |v - loc| for tail stability, as in the Gaussian case.
    Tensor t = abs(sub(v, prior.loc));
    Tensor s = prior.scale();
    auto sigmoid = [](const Tensor& x) { return div(Tensor::full(x.shape(), 1.0f), add(exp(mul(x, -1.0f)), 1.0f)); };
    Tensor upper = sigmoid(div(sub(mul(t, -1.0f), -0.5f), s));
    Tensor lower = sigmoid(div(sub(mul(t, -1.0f), 0.5f), s));
    return bits_from_prob(sub(upper, lower));
}

namespace {

// Normal interval probability in f64 for table building.
double gauss_prob(double v, double mu, double sigma) {
    const double t = std::fabs(v - mu);
    const double hi = 0.5 * std::erfc(-((0.5 - t) / sigma) * M_SQRT1_2);
    const double lo = 0.5 * std::erfc(-((-0.5 - t) / sigma) * M_SQRT1_2);
    return hi - lo;
}

double logistic_prob(double v, double loc, double scale) {
    const double t = std::fabs(v - loc);
    const double hi = 1.0 / (1.0 + std::exp(-(0.5 - t) / scale));
    const double lo = 1.0 / (1.0 + std::exp(-(-0.5 - t) / scale));
    return hi - lo;
}

// Quantizes a probability vector to integer frequencies summing to 1<<16 with
// every bin >= 1. Deficit/surplus is settled against the largest bins.
CdfTable quantize_cdf(int32_t vmin, int32_t vmax, std::vector<double> probs) {
    constexpr int64_t kTotal = 1ll << GaussianConditional::kPrecision;
    const size_t nbins = probs.size();
    CALD_ASSERT(nbins >= 1 && static_cast<int64_t>(nbins) <= kTotal, "cdf: bin count out of range");
    double psum = 0.0;
    for (double& p : probs) {
        if (!(p > 0.0)) p = 0.0;
        psum += p;
    }
    if (psum <= 0.0) {
        psum = static_cast<double>(nbins);
        std::fill(probs.begin(), probs.end(), 1.0);
    }
    std::vector<int64_t> freq(nbins);
    int64_t total = 0;
    for (size_t i = 0; i < nbins; ++i) {
        freq[i] = std::max<int64_t>(1, std::llround(probs[i] / psum * static_cast<double>(kTotal)));
        total += freq[i];
    }
    while (total != kTotal) {
        size_t best = 0;
        for (size_t i = 1; i < nbins; ++i)
            if (freq[i] > freq[best]) best = i;
        if (total < kTotal) {
            freq[best] += kTotal - total;
            total = kTotal;
        } else {
            const int64_t take = std::min(total - kTotal, freq[best] - 1);
            CALD_ASSERT(take > 0, "cdf: cannot settle frequency total");
            freq[best] -= take;
            total -= take;
        }
    }
    CdfTable cdf;
    cdf.vmin = vmin;
    cdf.vmax = vmax;
    cdf.cum.resize(nbins + 1);
    cdf.cum[0] = 0;
    for (size_t i = 0; i < nbins; ++i) cdf.cum[i + 1] = cdf.cum[i] + static_cast<uint32_t>(freq[i]);
    return cdf;
}

}  // namespace

CdfTable build_cdf_gaussian(float mu_residual, float sigma, int32_t vmin, int32_t vmax) {
    CALD_REQUIRE(vmin <= vmax, "build_cdf: empty symbol range");
    const double s = std::max<double>(sigma, GaussianConditional::kSigmaFloor);
    std::vector<double> probs(static_cast<size_t>(vmax - vmin + 1) + 1);
    for (int32_t v = vmin; v <= vmax; ++v)
        probs[static_cast<size_t>(v - vmin)] = gauss_prob(v, mu_residual, s);
    probs.back() = GaussianConditional::kTailMass;
    return quantize_cdf(vmin, vmax, std::move(probs));
}

CdfTable build_cdf_factorized(float loc, float scale, int32_t vmin, int32_t vmax) {
    CALD_REQUIRE(vmin <= vmax, "build_cdf: empty symbol range");
    const double s = std::max<double>(scale, FactorizedPrior::kScaleFloor);
    std::vector<double> probs(static_cast<size_t>(vmax - vmin + 1) + 1);
    for (int32_t v = vmin; v <= vmax; ++v)
        probs[static_cast<size_t>(v - vmin)] = logistic_prob(v, loc, s);
    probs.back() = GaussianConditional::kTailMass;
    return quantize_cdf(vmin, vmax, std::move(probs));
}

void encode_symbol(RangeEncoder& enc, const CdfTable& cdf, int32_t symbol) {
    uint32_t bin;
    if (symbol < cdf.vmin || symbol > cdf.vmax)
        bin = cdf.escape_index();
    else
        bin = static_cast<uint32_t>(symbol - cdf.vmin);
    enc.encode(cdf.cum[bin], cdf.cum[bin + 1] - cdf.cum[bin]);
    if (bin == cdf.escape_index()) enc.encode_raw(static_cast<uint32_t>(symbol), 32);
}

int32_t decode_symbol(RangeDecoder& dec, const CdfTable& cdf) {
    const uint32_t target = dec.decode_cum();
    // cum is strictly increasing; binary search for the bin containing target.
    const auto it = std::upper_bound(cdf.cum.begin(), cdf.cum.end(), target);
    const uint32_t bin = static_cast<uint32_t>(it - cdf.cum.begin()) - 1;
    dec.decode_update(cdf.cum[bin], cdf.cum[bin + 1] - cdf.cum[bin]);
    if (bin == cdf.escape_index()) return static_cast<int32_t>(dec.decode_raw(32));
    return cdf.vmin + static_cast<int32_t>(bin);
}

}  // namespace cald
