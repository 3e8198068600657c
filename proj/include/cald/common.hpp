#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>

namespace cald {

// Error taxonomy, mapped to CLI exit codes: usage errors are thrown as
// std::invalid_argument (exit 1), data/format problems as io_error (exit 2),
// broken internal invariants as internal_error (exit 3).
struct io_error : std::runtime_error {
    explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct internal_error : std::runtime_error {
    explicit internal_error(const std::string& msg) : std::runtime_error(msg) {}
};

#define CALD_REQUIRE(cond, msg)                                   \
    do {                                                          \
        if (!(cond)) throw std::invalid_argument(std::string(msg)); \
    } while (0)

#define CALD_ASSERT(cond, msg)                                      \
    do {                                                            \
        if (!(cond)) throw ::cald::internal_error(std::string(msg)); \
    } while (0)

// FNV-1a. Used for stream/header checksums and reconstruction hashes.
inline uint64_t fnv1a64(std::span<const uint8_t> bytes, uint64_t seed = 0xcbf29ce484222325ull) {
    uint64_t h = seed;
    for (uint8_t b : bytes) {
        h ^= b;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline uint32_t fnv1a32(std::span<const uint8_t> bytes) {
    uint32_t h = 0x811c9dc5u;
    for (uint8_t b : bytes) {
        h ^= b;
        h *= 0x01000193u;
    }
    return h;
}

inline uint64_t hash_floats(std::span<const float> v) {
    return fnv1a64({reinterpret_cast<const uint8_t*>(v.data()), v.size() * sizeof(float)});
}

}  // namespace cald
