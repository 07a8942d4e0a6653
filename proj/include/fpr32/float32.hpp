// SPDX-License-Identifier: Apache-2.0
//
// Bit-level software model of the CPU's single-precision floating-point
// datapath: add/sub on a 25-bit two's-complement adder with truncating
// alignment, multiply with a truncated 48-bit product, and the int<->float
// conversions. All operations are total over the full 2^32 input space and
// return the zr/neg/ov flags the EXT_ALU exports to the branch unit.

#pragma once

#include <bit>
#include <cstdint>

namespace fpr32 {

inline constexpr uint32_t kFpSignMask = 0x80000000u;
inline constexpr uint32_t kFpExpMask = 0x7F800000u;
inline constexpr uint32_t kFpMantMask = 0x007FFFFFu;
inline constexpr uint32_t kFpPosZero = 0x00000000u;
inline constexpr uint32_t kFpNegZero = 0x80000000u;
inline constexpr uint32_t kFpPosInf = 0x7F800000u;
inline constexpr uint32_t kFpNegInf = 0xFF800000u;
inline constexpr uint32_t kFpOne = 0x3F800000u;
inline constexpr uint32_t kFpQuarter = 0x3E800000u;
// Canonical quiet NaN; the only NaN this datapath ever produces.
inline constexpr uint32_t kFpQuietNan = 0x7FC00000u;

struct FpFlags {
    bool zr = false;
    bool neg = false;
    bool ov = false;  // wired to 0 for every FP operation

    friend bool operator==(const FpFlags&, const FpFlags&) = default;
};

struct FpValue {
    uint32_t bits = 0;
    FpFlags flags;
};

inline constexpr uint32_t fp_sign(uint32_t v) { return v >> 31; }
inline constexpr uint32_t fp_exp_field(uint32_t v) { return (v >> 23) & 0xFFu; }
inline constexpr uint32_t fp_mant_field(uint32_t v) { return v & kFpMantMask; }

inline constexpr bool fp_is_nan(uint32_t v) {
    return fp_exp_field(v) == 0xFF && fp_mant_field(v) != 0;
}
inline constexpr bool fp_is_inf(uint32_t v) {
    return fp_exp_field(v) == 0xFF && fp_mant_field(v) == 0;
}
inline constexpr bool fp_is_zero(uint32_t v) { return (v & ~kFpSignMask) == 0; }
inline constexpr bool fp_is_subnormal(uint32_t v) {
    return fp_exp_field(v) == 0 && fp_mant_field(v) != 0;
}

// zr and neg are pure functions of the result pattern: zr for either zero
// encoding, neg for any other negative pattern. neg and zr never co-assert.
inline constexpr FpFlags fp_flags_of(uint32_t bits) {
    FpFlags f;
    f.zr = fp_is_zero(bits);
    f.neg = !f.zr && fp_sign(bits) != 0;
    f.ov = false;
    return f;
}

namespace detail {

// 24-bit significand with the implicit bit materialized (0 for exp field 0).
inline constexpr uint32_t fp_sig24(uint32_t v) {
    return (fp_exp_field(v) ? 0x800000u : 0u) | fp_mant_field(v);
}

// Effective exponent: field value, except the subnormal range shares the
// scale of field 1. Using it keeps subnormal operands correctly aligned.
inline constexpr int fp_eff_exp(uint32_t v) {
    uint32_t e = fp_exp_field(v);
    return e ? static_cast<int>(e) : 1;
}

}  // namespace detail

// Floating-point add on the 25-bit two's-complement datapath:
//   (1) pick the larger exponent as the common exponent,
//   (2) extend both mantissas to 24 bits,
//   (3) right-shift the smaller one by the exponent difference, capped at 24
//       (shifted-out bits are discarded - no guard/round/sticky),
//   (4)-(5) add as 25-bit two's-complement values,
//   (6)-(7) renormalize: one right shift on internal overflow, left shifts
//       while the hidden bit is clear, denormalizing the exponent to 0 when
//       the left shifts run out,
//   (8) repack sign / exponent / low 23 bits.
// Specials: any NaN in -> canonical NaN; opposite infinities -> canonical
// NaN; infinity + finite -> that infinity; an exactly-zero sum -> +0.
inline uint32_t fp_add_bits(uint32_t a, uint32_t b) {
    if (fp_is_nan(a) || fp_is_nan(b)) return kFpQuietNan;
    if (fp_is_inf(a) || fp_is_inf(b)) {
        if (fp_is_inf(a) && fp_is_inf(b) && ((a ^ b) & kFpSignMask)) return kFpQuietNan;
        return fp_is_inf(a) ? a : b;
    }

    const int ea = detail::fp_eff_exp(a);
    const int eb = detail::fp_eff_exp(b);
    int64_t ma = detail::fp_sig24(a);
    int64_t mb = detail::fp_sig24(b);

    int common = ea;
    int diff = ea - eb;
    if (diff >= 0) {
        mb >>= (diff > 24 ? 24 : diff);
    } else {
        common = eb;
        diff = -diff;
        ma >>= (diff > 24 ? 24 : diff);
    }

    int64_t sum = (fp_sign(a) ? -ma : ma) + (fp_sign(b) ? -mb : mb);
    if (sum == 0) return kFpPosZero;

    const uint32_t sign = sum < 0 ? kFpSignMask : 0;
    uint32_t mag = static_cast<uint32_t>(sum < 0 ? -sum : sum);  // < 2^25

    if (mag >> 24) {
        mag >>= 1;
        ++common;
    } else {
        while (!(mag >> 23) && common > 1) {
            mag <<= 1;
            --common;
        }
    }
    if (common >= 255) return sign | kFpPosInf;

    const uint32_t exp_field = (mag >> 23) ? static_cast<uint32_t>(common) : 0u;
    return sign | (exp_field << 23) | (mag & kFpMantMask);
}

// Subtraction is addition with the second operand's sign flipped; a flipped
// NaN is still a NaN and canonicalizes the same way.
inline uint32_t fp_sub_bits(uint32_t a, uint32_t b) {
    return fp_add_bits(a, b ^ kFpSignMask);
}

// Multiply: XOR the signs, sum the exponents minus the 127 bias, multiply
// the 24-bit significands and truncate the 48-bit product. Results below
// the smallest normal flush to a signed zero; exponent 255 or more becomes
// a signed infinity. 0 * inf and NaN operands give the canonical NaN.
inline uint32_t fp_mul_bits(uint32_t a, uint32_t b) {
    if (fp_is_nan(a) || fp_is_nan(b)) return kFpQuietNan;
    const uint32_t sign = (a ^ b) & kFpSignMask;
    if (fp_is_inf(a) || fp_is_inf(b)) {
        if (fp_is_zero(a) || fp_is_zero(b)) return kFpQuietNan;
        return sign | kFpPosInf;
    }
    if (fp_is_zero(a) || fp_is_zero(b)) return sign;

    const uint64_t p =
        static_cast<uint64_t>(detail::fp_sig24(a)) * detail::fp_sig24(b);
    int e = detail::fp_eff_exp(a) + detail::fp_eff_exp(b) - 127;
    if (p == 0) return sign;  // unreachable: zero operands handled above

    const int top = 63 - std::countl_zero(p);
    e += top - 46;
    const uint32_t sig =
        top >= 23 ? static_cast<uint32_t>(p >> (top - 23))
                  : static_cast<uint32_t>(p) << (23 - top);

    if (e >= 255) return sign | kFpPosInf;
    if (e < 1) return sign;  // flush-to-zero on underflow
    return sign | (static_cast<uint32_t>(e) << 23) | (sig & kFpMantMask);
}

// Integer to float; exact for |i| <= 2^24, truncated toward zero beyond.
inline uint32_t itf_bits(int32_t i) {
    if (i == 0) return kFpPosZero;
    const uint32_t sign = i < 0 ? kFpSignMask : 0;
    const uint32_t mag =
        i < 0 ? static_cast<uint32_t>(-static_cast<int64_t>(i)) : static_cast<uint32_t>(i);
    const int top = 31 - std::countl_zero(mag);
    const uint32_t exp_field = static_cast<uint32_t>(127 + top);
    const uint32_t sig = top <= 23 ? mag << (23 - top) : mag >> (top - 23);
    return sign | (exp_field << 23) | (sig & kFpMantMask);
}

// Float to integer, truncating toward zero. Out-of-range magnitudes and
// infinities saturate to INT32_MAX / INT32_MIN; NaN converts to 0.
inline int32_t fti_bits(uint32_t v) {
    if (fp_is_nan(v)) return 0;
    const bool neg = fp_sign(v) != 0;
    const uint32_t e = fp_exp_field(v);
    if (fp_is_inf(v) || e >= 127 + 32)
        return neg ? INT32_MIN : INT32_MAX;
    if (e < 127) return 0;  // |v| < 1, including zeros and subnormals

    const int shift = static_cast<int>(e) - 127;
    const uint64_t sig = detail::fp_sig24(v);
    const uint64_t mag = shift <= 23 ? sig >> (23 - shift) : sig << (shift - 23);
    if (neg)
        return mag >= 0x80000000ull ? INT32_MIN : -static_cast<int32_t>(mag);
    return mag >= 0x80000000ull ? INT32_MAX : static_cast<int32_t>(mag);
}

inline FpValue fp_add(uint32_t a, uint32_t b) {
    const uint32_t r = fp_add_bits(a, b);
    return {r, fp_flags_of(r)};
}

inline FpValue fp_sub(uint32_t a, uint32_t b) {
    const uint32_t r = fp_sub_bits(a, b);
    return {r, fp_flags_of(r)};
}

inline FpValue fp_mul(uint32_t a, uint32_t b) {
    const uint32_t r = fp_mul_bits(a, b);
    return {r, fp_flags_of(r)};
}

inline float fp_to_float(uint32_t bits) { return std::bit_cast<float>(bits); }
inline uint32_t fp_from_float(float f) { return std::bit_cast<uint32_t>(f); }

}  // namespace fpr32
