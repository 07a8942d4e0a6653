// SPDX-License-Identifier: Apache-2.0
//
// Reference model of the bias-free LeNet-style network the firmware runs:
// conv 6x1x5x5 -> ReLU -> 2x2 average pool -> conv 16x6x5x5 -> ReLU -> pool
// -> fc 400x120 -> ReLU -> fc 120x84 -> ReLU -> fc 84x36 -> argmax.
//
// The pipeline is a template over an arithmetic backend. SoftBackend runs
// every operation through the bit-level float datapath in the canonical
// accumulation order (channel-major, kernel rows left to right, dot products
// left to right, pool cells a,b,c,d then x0.25) and is the bit-exact oracle
// for the firmware's data memory. NativeBackend runs the same pipeline on
// host single precision as an independent sanity reference.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "fpr32/float32.hpp"
#include "fpr32/hex.hpp"
#include "fpr32/imgproc.hpp"
#include "fpr32/rng.hpp"

namespace fpr32 {

struct Tensor {
    std::vector<uint32_t> dims;
    std::vector<uint32_t> data;  // FP bit patterns, row-major outermost-first

    size_t size() const { return data.size(); }
    friend bool operator==(const Tensor&, const Tensor&) = default;
};

inline Tensor make_tensor(std::vector<uint32_t> dims) {
    size_t n = 1;
    for (uint32_t d : dims) n *= d;
    return Tensor{std::move(dims), std::vector<uint32_t>(n, 0)};
}

// conv1, conv2, fc1, fc2, fc3 in flat ROM order. Fully-connected tensors are
// (out, in): each output neuron's weights are contiguous, matching the
// firmware's sequential ROM walk.
struct WeightBank {
    Tensor conv1 = make_tensor({6, 1, 5, 5});
    Tensor conv2 = make_tensor({16, 6, 5, 5});
    Tensor fc1 = make_tensor({120, 400});
    Tensor fc2 = make_tensor({84, 120});
    Tensor fc3 = make_tensor({36, 84});

    static constexpr size_t kTotalWords = 63654;

    std::vector<uint32_t> flat() const {
        std::vector<uint32_t> out;
        out.reserve(kTotalWords);
        for (const Tensor* t : {&conv1, &conv2, &fc1, &fc2, &fc3})
            out.insert(out.end(), t->data.begin(), t->data.end());
        return out;
    }

    static WeightBank from_flat(const std::vector<uint32_t>& words) {
        if (words.size() != kTotalWords)
            throw std::invalid_argument("weight bank needs exactly 63654 words, got " +
                                        std::to_string(words.size()));
        WeightBank w;
        size_t pos = 0;
        for (Tensor* t : {&w.conv1, &w.conv2, &w.fc1, &w.fc2, &w.fc3}) {
            std::copy(words.begin() + static_cast<long>(pos),
                      words.begin() + static_cast<long>(pos + t->size()), t->data.begin());
            pos += t->size();
        }
        return w;
    }
};

// Deterministic pseudo-weights, uniform in [-0.5, 0.5]: one SplitMix64 draw
// per weight in flat order, top 24 bits scaled by 2^-24 and recentered. Every
// value is exactly representable.
inline WeightBank gen_weights(uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<uint32_t> flat(WeightBank::kTotalWords);
    for (auto& w : flat) {
        const auto u = static_cast<uint32_t>(rng.next() >> 40);
        w = fp_from_float(static_cast<float>(u) * 0x1p-24f - 0.5f);
    }
    return WeightBank::from_flat(flat);
}

struct PredictionTrace {
    Tensor input;   // (32, 32)
    Tensor conv1;   // (6, 28, 28), post-ReLU
    Tensor pool1;   // (6, 14, 14)
    Tensor conv2;   // (16, 10, 10), post-ReLU
    Tensor pool2;   // (16, 5, 5)
    Tensor fc1;     // (120), post-ReLU
    Tensor fc2;     // (84), post-ReLU
    Tensor scores;  // (36)
    int predicted = 0;
    uint8_t ascii = '0';
};

// '0'..'9' then 'A'..'Z'.
inline uint8_t class_ascii(int index) {
    return static_cast<uint8_t>(index < 10 ? 0x30 + index : 0x37 + index);
}

struct SoftBackend {
    static uint32_t add(uint32_t a, uint32_t b) { return fp_add_bits(a, b); }
    static uint32_t mul(uint32_t a, uint32_t b) { return fp_mul_bits(a, b); }
    static uint32_t from_int(int v) { return itf_bits(v); }
    static uint32_t relu(uint32_t x) {
        return fp_flags_of(x).neg ? kFpPosZero : x;  // mirrors the branch on N
    }
    static bool greater(uint32_t a, uint32_t b) {
        const FpValue d = fp_sub(a, b);  // the firmware compares via SUBF flags
        return !d.flags.zr && !d.flags.neg;
    }
};

struct NativeBackend {
    static uint32_t add(uint32_t a, uint32_t b) {
        return fp_from_float(fp_to_float(a) + fp_to_float(b));
    }
    static uint32_t mul(uint32_t a, uint32_t b) {
        return fp_from_float(fp_to_float(a) * fp_to_float(b));
    }
    static uint32_t from_int(int v) { return fp_from_float(static_cast<float>(v)); }
    static uint32_t relu(uint32_t x) {
        return fp_to_float(x) < 0.0f ? kFpPosZero : x;
    }
    static bool greater(uint32_t a, uint32_t b) { return fp_to_float(a) > fp_to_float(b); }
};

namespace cnn_detail {

// Valid 5x5 convolution with fused ReLU on store. Accumulation starts from
// +0 and runs input channels outermost, then kernel rows, then columns.
template <class B>
Tensor conv5x5_relu(const Tensor& in, const Tensor& kernels) {
    const uint32_t in_ch = in.dims[0];
    const uint32_t side = in.dims[1];
    const uint32_t out_ch = kernels.dims[0];
    const uint32_t out_side = side - 4;
    Tensor out = make_tensor({out_ch, out_side, out_side});

    size_t o = 0;
    for (uint32_t oc = 0; oc < out_ch; ++oc) {
        const uint32_t* kbase = &kernels.data[oc * in_ch * 25];
        for (uint32_t y = 0; y < out_side; ++y) {
            for (uint32_t x = 0; x < out_side; ++x) {
                uint32_t acc = kFpPosZero;
                const uint32_t* k = kbase;
                for (uint32_t ic = 0; ic < in_ch; ++ic) {
                    const uint32_t* img = &in.data[(ic * side + y) * side + x];
                    for (uint32_t ky = 0; ky < 5; ++ky) {
                        for (uint32_t kx = 0; kx < 5; ++kx)
                            acc = B::add(acc, B::mul(img[kx], k[kx]));
                        img += side;
                        k += 5;
                    }
                }
                out.data[o++] = B::relu(acc);
            }
        }
    }
    return out;
}

// 2x2 stride-2 average pool: ((a+b)+c)+d scaled by 0.25.
template <class B>
Tensor avg_pool2x2(const Tensor& in) {
    const uint32_t ch = in.dims[0];
    const uint32_t side = in.dims[1];
    const uint32_t half = side / 2;
    Tensor out = make_tensor({ch, half, half});

    size_t o = 0;
    for (uint32_t c = 0; c < ch; ++c) {
        for (uint32_t y = 0; y < half; ++y) {
            for (uint32_t x = 0; x < half; ++x) {
                const uint32_t* row = &in.data[(c * side + 2 * y) * side + 2 * x];
                uint32_t s = B::add(row[0], row[1]);
                s = B::add(s, row[side]);
                s = B::add(s, row[side + 1]);
                out.data[o++] = B::mul(kFpQuarter, s);
            }
        }
    }
    return out;
}

// Per-neuron dot products, left to right; optional ReLU on store.
template <class B>
Tensor fully_connected(const Tensor& weights, const Tensor& vec, bool relu) {
    const uint32_t out_n = weights.dims[0];
    const uint32_t in_n = weights.dims[1];
    Tensor out = make_tensor({out_n});
    for (uint32_t n = 0; n < out_n; ++n) {
        const uint32_t* w = &weights.data[n * in_n];
        uint32_t acc = kFpPosZero;
        for (uint32_t i = 0; i < in_n; ++i) acc = B::add(acc, B::mul(w[i], vec.data[i]));
        out.data[n] = relu ? B::relu(acc) : acc;
    }
    return out;
}

template <class B>
int argmax_first(const Tensor& scores) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(scores.size()); ++i)
        if (B::greater(scores.data[i], scores.data[best])) best = i;  // ties keep the first
    return best;
}

}  // namespace cnn_detail

template <class B>
PredictionTrace forward(const std::array<uint8_t, kImageMemWords>& image,
                        const WeightBank& w) {
    PredictionTrace t;
    t.input = make_tensor({kPaddedSide, kPaddedSide});
    for (size_t i = 0; i < kImageMemWords; ++i) t.input.data[i] = B::from_int(image[i]);

    Tensor in1 = t.input;
    in1.dims = {1, kPaddedSide, kPaddedSide};
    t.conv1 = cnn_detail::conv5x5_relu<B>(in1, w.conv1);
    t.pool1 = cnn_detail::avg_pool2x2<B>(t.conv1);
    t.conv2 = cnn_detail::conv5x5_relu<B>(t.pool1, w.conv2);
    t.pool2 = cnn_detail::avg_pool2x2<B>(t.conv2);

    Tensor flat = t.pool2;
    flat.dims = {static_cast<uint32_t>(t.pool2.size())};  // already (ch, y, x) contiguous
    t.fc1 = cnn_detail::fully_connected<B>(w.fc1, flat, true);
    t.fc2 = cnn_detail::fully_connected<B>(w.fc2, t.fc1, true);
    t.scores = cnn_detail::fully_connected<B>(w.fc3, t.fc2, false);

    t.predicted = cnn_detail::argmax_first<B>(t.scores);
    t.ascii = class_ascii(t.predicted);
    return t;
}

inline PredictionTrace forward_soft(const std::array<uint8_t, kImageMemWords>& image,
                                    const WeightBank& w) {
    return forward<SoftBackend>(image, w);
}

inline PredictionTrace forward_native(const std::array<uint8_t, kImageMemWords>& image,
                                      const WeightBank& w) {
    return forward<NativeBackend>(image, w);
}

// ---- hex codecs ----

inline std::string write_weight_hex(const WeightBank& w) { return emit_hex(w.flat()); }

inline WeightBank read_weight_hex(std::string_view text) {
    const auto pairs = parse_hex(text, 8);
    if (pairs.size() != WeightBank::kTotalWords)
        throw std::invalid_argument("weight hex has " + std::to_string(pairs.size()) +
                                    " lines, expected 63654");
    std::vector<uint32_t> flat(WeightBank::kTotalWords, 0);
    for (const auto& [addr, data] : pairs) {
        if (addr >= WeightBank::kTotalWords)
            throw std::invalid_argument("weight hex address out of range");
        flat[addr] = data;
    }
    return WeightBank::from_flat(flat);
}

inline std::string write_image_hex(const std::array<uint8_t, kImageMemWords>& image) {
    std::string out;
    out.reserve(kImageMemWords * 9);
    for (size_t i = 0; i < kImageMemWords; ++i)
        out += hex_line(static_cast<uint32_t>(i), image[i], 2);
    return out;
}

inline std::array<uint8_t, kImageMemWords> read_image_hex(std::string_view text) {
    const auto pairs = parse_hex(text, 2);
    if (pairs.size() != kImageMemWords)
        throw std::invalid_argument("image hex has " + std::to_string(pairs.size()) +
                                    " lines, expected 1024");
    std::array<uint8_t, kImageMemWords> image{};
    for (const auto& [addr, data] : pairs) {
        if (addr >= kImageMemWords) throw std::invalid_argument("image hex address out of range");
        image[addr] = static_cast<uint8_t>(data);
    }
    return image;
}

// ---- trace comparison and dumping ----

struct StageDiff {
    std::string stage;
    bool pass = true;
    size_t first_mismatch = 0;
    uint32_t a_bits = 0;
    uint32_t b_bits = 0;
};

struct TraceCompareReport {
    bool pass = true;
    std::vector<StageDiff> stages;

    std::string summary() const {
        std::string out;
        for (const auto& s : stages) {
            out += s.stage;
            if (s.pass) {
                out += ": ok\n";
            } else {
                char buf[64];
                std::snprintf(buf, sizeof buf, ": mismatch at %zu (%08x vs %08x)\n",
                              s.first_mismatch, s.a_bits, s.b_bits);
                out += buf;
            }
        }
        return out;
    }
};

struct ToleranceMode {
    double rel = 0.0;
    double abs = 0.0;
};

// mode == nullptr compares bit-exactly; otherwise elements pass when within
// the absolute tolerance or the relative tolerance of the larger magnitude.
inline TraceCompareReport compare_traces(const PredictionTrace& a, const PredictionTrace& b,
                                         const ToleranceMode* mode = nullptr) {
    TraceCompareReport report;
    const std::pair<const char*, const Tensor PredictionTrace::*> stages[] = {
        {"input", &PredictionTrace::input},   {"conv1", &PredictionTrace::conv1},
        {"pool1", &PredictionTrace::pool1},   {"conv2", &PredictionTrace::conv2},
        {"pool2", &PredictionTrace::pool2},   {"fc1", &PredictionTrace::fc1},
        {"fc2", &PredictionTrace::fc2},       {"scores", &PredictionTrace::scores},
    };
    for (const auto& [name, member] : stages) {
        const Tensor& ta = a.*member;
        const Tensor& tb = b.*member;
        StageDiff diff;
        diff.stage = name;
        if (ta.dims != tb.dims) throw std::invalid_argument("trace dims differ at " + diff.stage);
        for (size_t i = 0; i < ta.data.size(); ++i) {
            bool same;
            if (mode) {
                const double va = fp_to_float(ta.data[i]);
                const double vb = fp_to_float(tb.data[i]);
                const double d = std::abs(va - vb);
                const double mag = std::max(std::abs(va), std::abs(vb));
                same = d <= mode->abs || d <= mode->rel * mag;
            } else {
                same = ta.data[i] == tb.data[i];
            }
            if (!same) {
                diff.pass = false;
                diff.first_mismatch = i;
                diff.a_bits = ta.data[i];
                diff.b_bits = tb.data[i];
                report.pass = false;
                break;
            }
        }
        report.stages.push_back(std::move(diff));
    }
    return report;
}

// Line-oriented dump for cross-tool diffing: "stage flat-index value-hex".
inline std::string write_trace(const PredictionTrace& t) {
    std::string out;
    const std::pair<const char*, const Tensor*> stages[] = {
        {"input", &t.input}, {"conv1", &t.conv1}, {"pool1", &t.pool1}, {"conv2", &t.conv2},
        {"pool2", &t.pool2}, {"fc1", &t.fc1},     {"fc2", &t.fc2},     {"scores", &t.scores},
    };
    for (const auto& [name, tensor] : stages) {
        for (size_t i = 0; i < tensor->data.size(); ++i) {
            char buf[48];
            std::snprintf(buf, sizeof buf, "%s %zu %08x\n", name, i, tensor->data[i]);
            out += buf;
        }
    }
    return out;
}

}  // namespace fpr32
