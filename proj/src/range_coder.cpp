#include "cald/range_coder.hpp"

namespace cald {

namespace {
constexpr uint64_t kTop = 1ull << 24;
constexpr uint64_t kBot = 1ull << 16;
constexpr uint64_t kMask32 = 0xFFFFFFFFull;
}  // namespace

void RangeEncoder::renormalize() {
    // Emit settled top bytes; when low straddles a byte boundary with a small
    // range, shrink the range up to the boundary instead of carrying.
    while (((low_ ^ (low_ + range_)) < kTop) ||
           (range_ < kBot && ((range_ = static_cast<uint32_t>((kBot - (low_ & (kBot - 1))) & (kBot - 1))), true))) {
        out_.push_back(static_cast<uint8_t>(low_ >> 24));
        low_ = (low_ << 8) & kMask32;
        range_ <<= 8;
    }
}

void RangeEncoder::encode(uint32_t cum, uint32_t freq) {
    CALD_ASSERT(freq >= 1 && cum + freq <= (1u << kTotBits), "range encoder: bad cdf slice");
    const uint32_t r = range_ >> kTotBits;
    low_ = (low_ + static_cast<uint64_t>(r) * cum);
    range_ = r * freq;
    renormalize();
}

void RangeEncoder::encode_raw(uint32_t value, int nbits) {
    for (int i = nbits - 1; i >= 0; --i) {
        const uint32_t bit = (value >> i) & 1u;
        const uint32_t r = range_ >> 1;
        if (bit) low_ += r;
        range_ = r;
        renormalize();
    }
}

std::vector<uint8_t> RangeEncoder::finish() {
    for (int i = 0; i < 4; ++i) {
        out_.push_back(static_cast<uint8_t>(low_ >> 24));
        low_ = (low_ << 8) & kMask32;
    }
    return std::move(out_);
}

RangeDecoder::RangeDecoder(std::span<const uint8_t> bytes) : in_(bytes) {
    for (int i = 0; i < 4; ++i) code_ = (code_ << 8) | next_byte();
}

uint8_t RangeDecoder::next_byte() {
    if (pos_ >= in_.size())
        throw io_error("range decoder: payload exhausted at offset " + std::to_string(pos_));
    return in_[pos_++];
}

void RangeDecoder::renormalize() {
    while (((low_ ^ (low_ + range_)) < kTop) ||
           (range_ < kBot && ((range_ = static_cast<uint32_t>((kBot - (low_ & (kBot - 1))) & (kBot - 1))), true))) {
        code_ = ((code_ << 8) | next_byte()) & kMask32;
        low_ = (low_ << 8) & kMask32;
        range_ <<= 8;
    }
}

uint32_t RangeDecoder::decode_cum() {
    const uint32_t r = range_ >> RangeEncoder::kTotBits;
    uint32_t cum = static_cast<uint32_t>((code_ - low_) / r);
    const uint32_t max_cum = (1u << RangeEncoder::kTotBits) - 1;
    return cum > max_cum ? max_cum : cum;
}

void RangeDecoder::decode_update(uint32_t cum, uint32_t freq) {
    const uint32_t r = range_ >> RangeEncoder::kTotBits;
    low_ = (low_ + static_cast<uint64_t>(r) * cum);
    range_ = r * freq;
    renormalize();
}

uint32_t RangeDecoder::decode_raw(int nbits) {
    uint32_t value = 0;
    for (int i = 0; i < nbits; ++i) {
        const uint32_t r = range_ >> 1;
        uint32_t bit = 0;
        if (code_ - low_ >= r) {
            bit = 1;
            low_ += r;
        }
        range_ = r;
        value = (value << 1) | bit;
        renormalize();
    }
    return value;
}

}  // namespace cald
