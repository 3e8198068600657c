#pragma once

#include <cstdint>

namespace cald {

// splitmix64. Self-contained so that streams are reproducible independent of
// the standard library implementation.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    float uniform(float lo, float hi) {
        return lo + static_cast<float>(next_double() * (static_cast<double>(hi) - lo));
    }

    // uniform integer in [0, n)
    uint64_t next_below(uint64_t n) { return n ? next_u64() % n : 0; }

    // Derives an independent stream; used for stateless per-step randomness
    // (resume from checkpoint reproduces the same draws).
    static Rng derive(uint64_t seed, uint64_t stream, uint64_t step) {
        Rng mix(seed ^ (stream * 0x9e3779b97f4a7c15ull));
        mix.next_u64();
        Rng out(mix.next_u64() ^ (step * 0xd1342543de82ef95ull));
        out.next_u64();
        return out;
    }

private:
    uint64_t state_;
};

}  // namespace cald
