#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cald/common.hpp"

namespace cald {

// Carry-less renormalizing range coder, byte-aligned output. Frequencies are
// 16-bit fixed point: every encode/decode works on a CDF slice with total
// 1 << 16. Encode followed by decode with the identical CDF sequence is
// bit-exact.
class RangeEncoder {
public:
    static constexpr uint32_t kTotBits = 16;

    // cum/freq in [0, 1<<16], freq >= 1, cum + freq <= 1<<16.
    void encode(uint32_t cum, uint32_t freq);
    // Bypass mode: nbits raw bits, MSB first.
    void encode_raw(uint32_t value, int nbits);
    std::vector<uint8_t> finish();

    size_t size_bytes() const { return out_.size(); }

private:
    void renormalize();
    uint64_t low_ = 0;
    uint32_t range_ = 0xFFFFFFFFu;
    std::vector<uint8_t> out_;
};

class RangeDecoder {
public:
    explicit RangeDecoder(std::span<const uint8_t> bytes);

    // Scaled cumulative position of the next symbol; caller locates the bin
    // and confirms with decode_update(cum, freq) of that bin.
    uint32_t decode_cum();
    void decode_update(uint32_t cum, uint32_t freq);
    uint32_t decode_raw(int nbits);

    size_t consumed() const { return pos_; }

private:
    uint8_t next_byte();
    void renormalize();
    std::span<const uint8_t> in_;
    size_t pos_ = 0;
    uint64_t low_ = 0;
    uint64_t code_ = 0;
    uint32_t range_ = 0xFFFFFFFFu;
};

}  // namespace cald
