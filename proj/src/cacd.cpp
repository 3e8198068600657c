#include "cald/cacd.hpp"

#include <cmath>
#include <limits>

namespace cald {

Tensor make_level_mask(int width, int latent_channels, int64_t lh, int64_t lw) {
    CALD_REQUIRE(width >= 1 && width <= latent_channels,
                 "level mask: width " + std::to_string(width) + " out of range [1," +
                     std::to_string(latent_channels) + "]");
    std::vector<float> m(static_cast<size_t>(latent_channels * lh * lw), 0.0f);
    std::fill(m.begin(), m.begin() + static_cast<size_t>(width * lh * lw), 1.0f);
    return Tensor::from({1, latent_channels, lh, lw}, std::move(m));
}

Tensor hyper_mask(const Tensor& latent_mask) { return maxpool2d(latent_mask, 4, 4); }

std::pair<Tensor, Tensor> apply_masks(const Tensor& yhat, const Tensor& zhat, const Tensor& mask) {
    CALD_REQUIRE(yhat.dim(1) == mask.dim(1) && yhat.dim(2) == mask.dim(2) &&
                     yhat.dim(3) == mask.dim(3),
                 "apply_masks: mask " + shape_str(mask.shape()) + " does not match latents " +
                     shape_str(yhat.shape()));
    Tensor mz = hyper_mask(mask);
    CALD_REQUIRE(zhat.dim(1) == mz.dim(1) && zhat.dim(2) == mz.dim(2) && zhat.dim(3) == mz.dim(3),
                 "apply_masks: hyper mask does not match hyperprior " + shape_str(zhat.shape()));
    return {mul(yhat, mask), mul(zhat, mz)};
}

namespace {

Tensor tile_batch(const Tensor& mask, int64_t batch) {
    if (batch == 1) return mask;
    const int64_t per = mask.numel();
    std::vector<float> m(static_cast<size_t>(per * batch));
    for (int64_t b = 0; b < batch; ++b)
        std::copy(mask.data(), mask.data() + per, m.begin() + b * per);
    return Tensor::from({batch, mask.dim(1), mask.dim(2), mask.dim(3)}, std::move(m));
}

double block_psnr(const Tensor& a, const Tensor& b, int64_t r0, int64_t c0, int64_t bs) {
    const int64_t h = a.dim(2), w = a.dim(3);
    const float *ad = a.data(), *bd = b.data();
    double sse = 0.0;
    for (int64_t ch = 0; ch < 3; ++ch)
        for (int64_t i = r0; i < r0 + bs; ++i)
            for (int64_t j = c0; j < c0 + bs; ++j) {
                const double d = static_cast<double>(ad[(ch * h + i) * w + j]) - bd[(ch * h + i) * w + j];
                sse += d * d;
            }
    const double mse255 = sse / static_cast<double>(3 * bs * bs) * 65025.0;
    if (mse255 <= 0.0) return 100.0;
    return std::min(100.0, 10.0 * std::log10(65025.0 / mse255));
}

}  // namespace

Tensor mrdo_loss(const Tensor& x, const CodecModel& model, const QualityLevelSet& levels,
                 uint64_t seed, std::vector<MrdoLevelStats>* stats) {
    const ModelConfig& cfg = model.config();
    levels.validate(cfg.latent_channels);
    const int64_t batch = x.dim(0);
    const double pixels = static_cast<double>(batch * x.dim(2) * x.dim(3));

    Tensor y = model.analyze(x);
    Tensor z = model.hyper_analyze(y);
    Tensor y_noisy = quantize_noise(y, Rng::derive(seed, 0x79, 0).next_u64());
    Tensor z_noisy = quantize_noise(z, Rng::derive(seed, 0x7a, 0).next_u64());

    if (stats) stats->clear();
    Tensor loss;
    for (int l = 0; l < levels.levels(); ++l) {
        const int width = levels.widths[static_cast<size_t>(l)];
        const float lambda = levels.lambdas[static_cast<size_t>(l)];

        Tensor yl = y_noisy, zl = z_noisy, bits_y, bits_z;
        if (width < cfg.latent_channels) {
            Tensor m = tile_batch(make_level_mask(width, cfg.latent_channels, y.dim(2), y.dim(3)), batch);
            Tensor mz = hyper_mask(m);
            yl = mul(y_noisy, m);
            zl = mul(z_noisy, mz);
            EntropyParams ep = model.entropy_parameters(zl);
            bits_y = mul(gaussian_bits(y_noisy, ep.mu, ep.sigma), m);
            bits_z = mul(factorized_bits(z_noisy, model.prior()), mz);
        } else {
            EntropyParams ep = model.entropy_parameters(zl);
            bits_y = gaussian_bits(y_noisy, ep.mu, ep.sigma);
            bits_z = factorized_bits(z_noisy, model.prior());
        }
        Tensor rate_bpp = mul(add(sum(bits_y), sum(bits_z)), static_cast<float>(1.0 / pixels));

        Tensor c1;
        if (cfg.caft) c1 = model.extract_characteristics(zl);
        Tensor xhat = model.synthesize(yl, c1);
        Tensor diff = sub(x, xhat);
        Tensor mse01 = mul(sum(mul(diff, diff)), static_cast<float>(1.0 / static_cast<double>(x.numel())));

        Tensor term = add(rate_bpp, mul(mse01, lambda));
        loss = loss.defined() ? add(loss, term) : term;

        if (stats) {
            MrdoLevelStats s;
            s.lambda = lambda;
            s.width = width;
            s.rate_bpp = rate_bpp.item();
            s.mse255 = static_cast<double>(mse01.item()) * 65025.0;
            s.psnr = s.mse255 > 0 ? std::min(100.0, 10.0 * std::log10(65025.0 / s.mse255)) : 100.0;
            stats->push_back(s);
        }
    }
    return loss;
}

double rd_objective(double rate_bits, double sse01, float lambda) {
    return rate_bits + static_cast<double>(lambda) / 3.0 * sse01;
}

AllocationMatrix choose_allocation(const std::vector<RdMaps>& maps, int64_t lh, int64_t lw,
                                   float lambda) {
    CALD_REQUIRE(!maps.empty(), "choose_allocation: no levels");
    const size_t n = static_cast<size_t>(lh * lw);
    for (const RdMaps& m : maps)
        CALD_REQUIRE(m.rate_bits.size() == n && m.sse01.size() == n,
                     "choose_allocation: map size mismatch");
    AllocationMatrix alloc;
    alloc.h = lh;
    alloc.w = lw;
    alloc.level.resize(n, 0);
    for (size_t i = 0; i < n; ++i) {
        int best = 0;
        double best_j = rd_objective(maps[0].rate_bits[i], maps[0].sse01[i], lambda);
        for (size_t k = 1; k < maps.size(); ++k) {
            const double j = rd_objective(maps[k].rate_bits[i], maps[k].sse01[i], lambda);
            // <= so that ties fall to the larger index, i.e. the smaller width
            if (j <= best_j) {
                best = static_cast<int>(k);
                best_j = j;
            }
        }
        alloc.level[i] = static_cast<uint8_t>(best);
    }
    return alloc;
}

Tensor mask_from_allocation(const AllocationMatrix& alloc, const QualityLevelSet& levels,
                            int latent_channels) {
    std::vector<float> m(static_cast<size_t>(latent_channels * alloc.h * alloc.w), 0.0f);
    const int64_t plane = alloc.h * alloc.w;
    for (int64_t i = 0; i < plane; ++i) {
        const int width = levels.widths.at(alloc.level[static_cast<size_t>(i)]);
        for (int c = 0; c < width; ++c) m[static_cast<size_t>(c * plane + i)] = 1.0f;
    }
    return Tensor::from({1, latent_channels, alloc.h, alloc.w}, std::move(m));
}

EtaInput uniform_coding_pass(const Tensor& xpad, const CodecModel& model, int width) {
    NoGradGuard ng;
    const ModelConfig& cfg = model.config();
    CALD_REQUIRE(xpad.dim(0) == 1, "uniform_coding_pass: batch must be 1");

    Tensor y = model.analyze(xpad);
    Tensor z = model.hyper_analyze(y);
    Tensor zhat = round_half_away(z);
    const int64_t lh = y.dim(2), lw = y.dim(3);

    Tensor m, mz, zl = zhat;
    if (width < cfg.latent_channels) {
        m = make_level_mask(width, cfg.latent_channels, lh, lw);
        mz = hyper_mask(m);
        zl = mul(zhat, mz);
    }
    EntropyParams ep = model.entropy_parameters(zl);

    Quantized q = cfg.mean_shift ? quantize_round(y, ep.mu)
                                 : quantize_round(y, Tensor::zeros(y.shape()));
    Tensor yhat = m.defined() ? mul(q.yhat, m) : q.yhat;

    std::vector<float> sym_f(q.symbols.size());
    for (size_t i = 0; i < sym_f.size(); ++i) sym_f[i] = static_cast<float>(q.symbols[i]);
    Tensor symbols = Tensor::from(y.shape(), std::move(sym_f));
    Tensor bits = cfg.mean_shift ? gaussian_bits(symbols, Tensor::zeros(y.shape()), ep.sigma)
                                 : gaussian_bits(symbols, ep.mu, ep.sigma);

    EtaInput out;
    out.lh = lh;
    out.lw = lw;
    out.y_bits_loc.assign(static_cast<size_t>(lh * lw), 0.0);
    const float* bd = bits.data();
    const int64_t plane = lh * lw;
    for (int c = 0; c < width; ++c)
        for (int64_t i = 0; i < plane; ++i)
            out.y_bits_loc[static_cast<size_t>(i)] += static_cast<double>(bd[c * plane + i]);

    Tensor zbits = factorized_bits(zhat, model.prior());
    if (mz.defined()) zbits = mul(zbits, mz);
    out.z_bits = sum_f64(zbits);

    Tensor c1;
    if (cfg.caft) c1 = model.extract_characteristics(zl);
    out.recon = clamp01_plain(model.synthesize(yhat, c1));
    return out;
}

SelectionResult select_allocation(const Tensor& x, const CodecModel& model,
                                  const QualityLevelSet& levels) {
    const ModelConfig& cfg = model.config();
    levels.validate(cfg.latent_channels);
    CALD_REQUIRE(x.ndim() == 4 && x.dim(0) == 1, "select_allocation: expects a single image");
    CALD_REQUIRE(x.dim(2) % 64 == 0 && x.dim(3) % 64 == 0,
                 "select_allocation: image must be padded to multiples of 64");

    const int k = levels.levels();
    SelectionResult res;
    res.per_level.resize(static_cast<size_t>(k));
    int64_t lh = 0, lw = 0;
    for (int l = 0; l < k; ++l) {
        EtaInput pass = uniform_coding_pass(x, model, levels.widths[static_cast<size_t>(l)]);
        lh = pass.lh;
        lw = pass.lw;
        RdMaps& maps = res.per_level[static_cast<size_t>(l)];
        maps.rate_bits = std::move(pass.y_bits_loc);
        maps.sse01.assign(static_cast<size_t>(lh * lw), 0.0);
        const float *xd = x.data(), *rd = pass.recon.data();
        const int64_t h = x.dim(2), w = x.dim(3);
        for (int64_t r = 0; r < lh; ++r)
            for (int64_t c = 0; c < lw; ++c) {
                double sse = 0.0;
                for (int64_t ch = 0; ch < 3; ++ch)
                    for (int64_t i = r * 16; i < (r + 1) * 16; ++i)
                        for (int64_t j = c * 16; j < (c + 1) * 16; ++j) {
                            const double d = static_cast<double>(xd[(ch * h + i) * w + j]) -
                                             rd[(ch * h + i) * w + j];
                            sse += d * d;
                        }
                maps.sse01[static_cast<size_t>(r * lw + c)] = sse;
            }
    }

    const float lambda = levels.target_lambda();
    res.alloc = choose_allocation(res.per_level, lh, lw, lambda);
    res.mask = mask_from_allocation(res.alloc, levels, cfg.latent_channels);

    res.uniform_objective.assign(static_cast<size_t>(k), 0.0);
    for (int l = 0; l < k; ++l)
        for (int64_t i = 0; i < lh * lw; ++i)
            res.uniform_objective[static_cast<size_t>(l)] += rd_objective(
                res.per_level[static_cast<size_t>(l)].rate_bits[static_cast<size_t>(i)],
                res.per_level[static_cast<size_t>(l)].sse01[static_cast<size_t>(i)], lambda);
    res.objective = 0.0;
    for (int64_t i = 0; i < lh * lw; ++i) {
        const int l = res.alloc.level[static_cast<size_t>(i)];
        res.objective += rd_objective(res.per_level[static_cast<size_t>(l)].rate_bits[static_cast<size_t>(i)],
                                      res.per_level[static_cast<size_t>(l)].sse01[static_cast<size_t>(i)],
                                      lambda);
    }
    return res;
}

EtaMap bit_conversion_ratio(const Tensor& xpad, const EtaInput& low, const EtaInput& high,
                            int block) {
    CALD_REQUIRE(block >= 16 && block % 16 == 0, "bit_conversion_ratio: block must be a multiple of 16");
    const int64_t h = xpad.dim(2), w = xpad.dim(3);
    CALD_REQUIRE(h % block == 0 && w % block == 0,
                 "bit_conversion_ratio: image dims must be multiples of the block size");
    CALD_REQUIRE(low.lh == high.lh && low.lw == high.lw && low.recon.shape() == high.recon.shape(),
                 "bit_conversion_ratio: mismatched inputs");
    CALD_REQUIRE(low.recon.dim(2) == h && low.recon.dim(3) == w,
                 "bit_conversion_ratio: reconstruction dims mismatch");

    EtaMap out;
    out.bh = h / block;
    out.bw = w / block;
    const int64_t nblocks = out.bh * out.bw;
    out.eta.resize(static_cast<size_t>(nblocks));
    out.psnr_low.resize(static_cast<size_t>(nblocks));
    out.psnr_high.resize(static_cast<size_t>(nblocks));
    out.rate_low.resize(static_cast<size_t>(nblocks));
    out.rate_high.resize(static_cast<size_t>(nblocks));

    const int locs_per_side = block / 16;
    auto block_rate = [&](const EtaInput& in, int64_t br, int64_t bc) {
        double bits = in.z_bits / static_cast<double>(nblocks);
        for (int64_t r = br * locs_per_side; r < (br + 1) * locs_per_side; ++r)
            for (int64_t c = bc * locs_per_side; c < (bc + 1) * locs_per_side; ++c)
                bits += in.y_bits_loc[static_cast<size_t>(r * in.lw + c)];
        return bits / static_cast<double>(block * block);
    };

    for (int64_t br = 0; br < out.bh; ++br)
        for (int64_t bc = 0; bc < out.bw; ++bc) {
            const size_t i = static_cast<size_t>(br * out.bw + bc);
            out.psnr_low[i] = block_psnr(xpad, low.recon, br * block, bc * block, block);
            out.psnr_high[i] = block_psnr(xpad, high.recon, br * block, bc * block, block);
            out.rate_low[i] = block_rate(low, br, bc);
            out.rate_high[i] = block_rate(high, br, bc);
            const double dr = out.rate_high[i] - out.rate_low[i];
            if (std::fabs(dr) < 1e-6)
                out.eta[i] = std::numeric_limits<float>::quiet_NaN();
            else
                out.eta[i] = static_cast<float>((out.psnr_high[i] - out.psnr_low[i]) / dr);
        }
    return out;
}

}  // namespace cald
