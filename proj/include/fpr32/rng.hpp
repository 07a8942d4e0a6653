// SPDX-License-Identifier: Apache-2.0
//
// SplitMix64: the fixed, platform-independent generator behind every seeded
// artifact in this project (pseudo-weights, fixture frames, randomized
// tests). Output sequences are part of the on-disk contract - do not change
// the constants.

#pragma once

#include <cstdint>

namespace fpr32 {

class SplitMix64 {
  public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ull;
        uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    uint32_t next32() { return static_cast<uint32_t>(next() >> 32); }

    uint8_t next_byte() { return static_cast<uint8_t>(next() >> 56); }

    // Uniform value in [0, n).
    uint64_t below(uint64_t n) { return next() % n; }

  private:
    uint64_t state_;
};

}  // namespace fpr32
