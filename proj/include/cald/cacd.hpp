#pragma once

#include <cstdint>
#include <vector>

#include "cald/model.hpp"
#include "cald/tensor.hpp"

namespace cald {

// Level mask: ones on channels [0, width), zeros above, spatially constant.
Tensor make_level_mask(int width, int latent_channels, int64_t lh, int64_t lw);

// Hyperprior mask: a hyper cell keeps a channel iff any covered latent
// location keeps it (spatial 4x4 max).
Tensor hyper_mask(const Tensor& latent_mask);

// (yhat * m, zhat * Maxpool(m)).
std::pair<Tensor, Tensor> apply_masks(const Tensor& yhat, const Tensor& zhat, const Tensor& mask);

struct MrdoLevelStats {
    float lambda = 0;
    int width = 0;
    double rate_bpp = 0;
    double mse255 = 0;
    double psnr = 0;
};

// Eq-style multi rate-distortion objective: sum over levels of
// bpp + lambda * MSE([0,1] pixels), each level coded and decoded through its
// own masked latents. With K == 1 at full width this is exactly the single
// rate-distortion loss.
Tensor mrdo_loss(const Tensor& x, const CodecModel& model, const QualityLevelSet& levels,
                 uint64_t seed, std::vector<MrdoLevelStats>* stats = nullptr);

struct AllocationMatrix {
    int64_t h = 0, w = 0;
    std::vector<uint8_t> level;  // row-major level index per latent location

    uint8_t at(int64_t r, int64_t c) const { return level[static_cast<size_t>(r * w + c)]; }
    int64_t size() const { return h * w; }
};

// Independence-approximated per-location costs for one quality level.
struct RdMaps {
    std::vector<double> rate_bits;  // latent-grid bits of the kept yhat symbols
    std::vector<double> sse01;      // SSE of the aligned 16x16 pixel block, [0,1] scale
};

// Per-location objective r + (lambda/3) * sse (the per-pixel loss summed over
// a block; /3 because MSE averages over the three color channels while bpp
// does not).
double rd_objective(double rate_bits, double sse01, float lambda);

// argmin_k of the per-location objective; ties resolve to the smaller width.
AllocationMatrix choose_allocation(const std::vector<RdMaps>& maps, int64_t lh, int64_t lw,
                                   float lambda);

Tensor mask_from_allocation(const AllocationMatrix& alloc, const QualityLevelSet& levels,
                            int latent_channels);

struct SelectionResult {
    AllocationMatrix alloc;
    Tensor mask;                      // the assembled adaptation mask
    std::vector<RdMaps> per_level;    // diagnostics, one per quality level
    double objective = 0;             // sum of chosen per-location objectives
    std::vector<double> uniform_objective;  // same sum under each uniform level
};

// Block-based RD selection: a full uniform encode/decode per level yields the
// (rate, distortion) maps, then each latent location takes the level with the
// smallest objective. x must be padded to multiples of 64.
SelectionResult select_allocation(const Tensor& x, const CodecModel& model,
                                  const QualityLevelSet& levels);

// One side of a bit-conversion-ratio comparison.
struct EtaInput {
    Tensor recon;                    // clamped reconstruction at padded dims
    std::vector<double> y_bits_loc;  // latent-grid bits
    double z_bits = 0;
    int64_t lh = 0, lw = 0;
};

// Uniform coding pass at a fixed channel width (also used for two-model
// comparisons with width == M).
EtaInput uniform_coding_pass(const Tensor& xpad, const CodecModel& model, int width);

struct EtaMap {
    int64_t bh = 0, bw = 0;
    std::vector<float> eta;  // dB per bpp; NaN where the rate delta vanishes
    std::vector<double> psnr_low, psnr_high;  // per block
    std::vector<double> rate_low, rate_high;  // per block, bpp
};

// Per-block (PSNR_high - PSNR_low) / (R_high - R_low) on the padded grid;
// block must be a multiple of 16. Blocks with |dR| < 1e-6 bpp get a NaN
// sentinel; negative ratios are preserved.
EtaMap bit_conversion_ratio(const Tensor& xpad, const EtaInput& low, const EtaInput& high,
                            int block = 16);

}  // namespace cald
