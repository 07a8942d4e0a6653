// SPDX-License-Identifier: Apache-2.0
//
// The image compressor: a 224x224 8-bit grayscale frame averages down to
// 28x28 over 8x8 blocks (each block sum fits 14 bits; the output pixel is
// its top 8 bits, i.e. floor(sum/64)), and the padded variant scatters the
// 28x28 result into a 32x32 image-memory layout whose width-2 border stays
// zero.

#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "fpr32/hex.hpp"
#include "fpr32/rng.hpp"

namespace fpr32 {

inline constexpr int kFrameSide = 224;
inline constexpr size_t kFramePixels = 50176;  // 224 * 224
inline constexpr int kCompressedSide = 28;
inline constexpr int kPaddedSide = 32;
inline constexpr size_t kImageMemWords = 1024;  // 32 * 32

struct GrayFrame {
    std::vector<uint8_t> pixels;  // row-major, exactly kFramePixels

    static GrayFrame from_bytes(std::vector<uint8_t> bytes) {
        if (bytes.size() != kFramePixels)
            throw std::invalid_argument("frame must be exactly 50176 bytes, got " +
                                        std::to_string(bytes.size()));
        return GrayFrame{std::move(bytes)};
    }
};

// Deterministic synthetic frame; the standard source of test fixtures.
inline GrayFrame fixture_frame(uint64_t seed) {
    GrayFrame f;
    f.pixels.resize(kFramePixels);
    SplitMix64 rng(seed);
    for (auto& p : f.pixels) p = rng.next_byte();
    return f;
}

// 8x8 block averaging; out[r][c] = floor(block sum / 64).
inline std::array<uint8_t, 784> compress(const GrayFrame& frame) {
    std::array<uint8_t, 784> out{};
    for (int r = 0; r < kCompressedSide; ++r) {
        for (int c = 0; c < kCompressedSide; ++c) {
            uint32_t sum = 0;  // <= 64 * 255, fits 14 bits
            for (int y = 0; y < 8; ++y)
                for (int x = 0; x < 8; ++x)
                    sum += frame.pixels[(r * 8 + y) * kFrameSide + (c * 8 + x)];
            out[r * kCompressedSide + c] = static_cast<uint8_t>(sum >> 6);
        }
    }
    return out;
}

// Maps a 28x28 index into the zero-padded 32x32 layout.
inline uint32_t pad_map(uint32_t idx28) {
    if (idx28 >= 784) throw std::out_of_range("pad_map index " + std::to_string(idx28));
    const uint32_t r = idx28 / kCompressedSide;
    const uint32_t c = idx28 % kCompressedSide;
    return (r + 2) * kPaddedSide + (c + 2);
}

// Compresses straight into the 1024-entry image-memory layout; the 240
// border entries are never written and stay zero.
inline std::array<uint8_t, kImageMemWords> compress_to_image_mem(const GrayFrame& frame) {
    std::array<uint8_t, kImageMemWords> image{};
    const auto small = compress(frame);
    for (uint32_t i = 0; i < 784; ++i) image[pad_map(i)] = small[i];
    return image;
}

// Frame ingestion: raw bytes or a 2-digit-data hex file (50176 lines).
inline GrayFrame frame_from_hex(std::string_view text) {
    std::vector<uint8_t> bytes(kFramePixels, 0);
    size_t count = 0;
    for (const auto& [addr, data] : parse_hex(text, 2)) {
        if (addr >= kFramePixels) throw HexError(0, "frame address out of range");
        bytes[addr] = static_cast<uint8_t>(data);
        ++count;
    }
    if (count != kFramePixels)
        throw std::invalid_argument("frame hex has " + std::to_string(count) +
                                    " pixels, expected 50176");
    return GrayFrame{std::move(bytes)};
}

}  // namespace fpr32
