// SPDX-License-Identifier: Apache-2.0
//
// Test-only oracles for the floating-point datapath. These lean on host
// IEEE-754 arithmetic and layer the datapath's documented decisions on top
// (canonical NaN, +0 for exactly-zero sums, multiply flush-to-zero and
// truncation). They deliberately do not share any code with the
// implementation under test.

#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>

#include "fpr32/float32.hpp"

namespace fpr32::testing {

inline float as_float(uint32_t bits) { return fp_to_float(bits); }
inline uint32_t as_bits(float f) { return fp_from_float(f); }

// Add oracle: models the truncating adder in exact double arithmetic rather
// than bit twiddling. Both operands are expressed in units of the larger
// operand's mantissa grid; the smaller one is truncated toward zero onto
// that grid (the alignment shift), the grid-unit sum is exact in a double,
// and an internally overflowing sum drops its low bit (the renormalizing
// right shift). Every surviving value is exactly one float.
inline uint32_t oracle_add(uint32_t a, uint32_t b) {
    const float fa = as_float(a);
    const float fb = as_float(b);
    if (std::isnan(fa) || std::isnan(fb)) return kFpQuietNan;
    if (std::isinf(fa) || std::isinf(fb)) {
        if (std::isinf(fa) && std::isinf(fb) && std::signbit(fa) != std::signbit(fb))
            return kFpQuietNan;
        return std::isinf(fa) ? a : b;
    }

    const int ea = fp_exp_field(a) ? static_cast<int>(fp_exp_field(a)) : 1;
    const int eb = fp_exp_field(b) ? static_cast<int>(fp_exp_field(b)) : 1;
    const double grid = std::ldexp(1.0, (ea > eb ? ea : eb) - 150);

    const double sum = std::trunc(static_cast<double>(fa) / grid) +
                       std::trunc(static_cast<double>(fb) / grid);
    if (sum == 0.0) return kFpPosZero;
    double units = sum;
    if (std::fabs(units) >= 0x1p24) units = std::trunc(units / 2.0) * 2.0;
    const double value = units * grid;
    if (std::fabs(value) >= 0x1p128)
        return (std::signbit(value) ? kFpSignMask : 0u) | kFpPosInf;
    return as_bits(static_cast<float>(value));
}

// Multiply oracle built on the exact double-precision product (24x24-bit
// significands always fit in a double): magnitudes below the smallest
// normal flush to a signed zero, 2^128 and above saturate to infinity,
// anything else is the exact product truncated toward zero to one float.
inline uint32_t oracle_mul(uint32_t a, uint32_t b) {
    if (fp_is_nan(a) || fp_is_nan(b)) return kFpQuietNan;
    const uint32_t sign = (a ^ b) & kFpSignMask;
    if (fp_is_inf(a) || fp_is_inf(b)) {
        if (fp_is_zero(a) || fp_is_zero(b)) return kFpQuietNan;
        return sign | kFpPosInf;
    }
    if (fp_is_zero(a) || fp_is_zero(b)) return sign;

    const double pd = static_cast<double>(as_float(a)) * static_cast<double>(as_float(b));
    const double mag = std::fabs(pd);
    if (mag < 0x1p-126) return sign;
    if (mag >= 0x1p+128) return sign | kFpPosInf;
    float f = static_cast<float>(pd);
    if (std::fabs(static_cast<double>(f)) > mag) f = std::nextafterf(f, 0.0f);
    return as_bits(f);
}

// Monotone mapping of float bit patterns onto a signed line, so that a
// difference of 1 means adjacent representable values (with +0 == -0 and
// infinity adjacent to the largest finite value).
inline int64_t ordered_key(uint32_t bits) {
    const int64_t mag = bits & 0x7FFFFFFF;
    return (bits & kFpSignMask) ? -mag : mag;
}

inline int64_t ulp_distance(uint32_t x, uint32_t y) {
    return std::llabs(ordered_key(x) - ordered_key(y));
}

// One unit of the larger operand's mantissa grid: 2^(max effective exponent
// - 150). This is the natural error unit of the truncating adder, whose
// alignment step discards bits of exactly this scale.
inline double input_grid(uint32_t a, uint32_t b) {
    const int ea = fp_exp_field(a) ? static_cast<int>(fp_exp_field(a)) : 1;
    const int eb = fp_exp_field(b) ? static_cast<int>(fp_exp_field(b)) : 1;
    return std::ldexp(1.0, (ea > eb ? ea : eb) - 150);
}

// Checks fp_add against host round-to-nearest: within 2 grid units in
// general; pairs that cancel below 2^-10 of the larger operand must keep the
// exact sign and stay within 1 grid unit.
inline bool add_within_bounds(uint32_t ours, uint32_t a, uint32_t b) {
    const float fa = as_float(a);
    const float fb = as_float(b);
    const float host = fa + fb;
    const double fours = static_cast<double>(as_float(ours));

    if (std::isinf(host)) {
        const uint32_t sign = as_bits(host) & kFpSignMask;
        return ours == (sign | kFpPosInf) || ours == (sign | 0x7F7FFFFFu);
    }

    const double exact = static_cast<double>(fa) + static_cast<double>(fb);
    const double amax = std::fmax(std::fabs(static_cast<double>(fa)),
                                  std::fabs(static_cast<double>(fb)));
    const double grid = input_grid(a, b);
    const double err = std::fabs(fours - static_cast<double>(host));

    if (std::fabs(exact) < std::ldexp(amax, -10)) {
        if (exact == 0.0) return ours == kFpPosZero;
        if (std::signbit(exact) != (fp_sign(ours) != 0)) return false;
        return err <= grid;
    }
    return err <= 2.0 * grid;
}

// Checks fp_mul against host round-to-nearest: one representable step at
// most, with the documented flush-to-zero and overflow edges allowed.
inline bool mul_within_bounds(uint32_t ours, uint32_t a, uint32_t b) {
    const float host = as_float(a) * as_float(b);
    const uint32_t host_bits = as_bits(host);
    if (fp_is_zero(ours))
        return std::fabs(static_cast<double>(host)) <= 0x1p-126;
    if (std::isinf(host)) {
        const uint32_t sign = host_bits & kFpSignMask;
        return ours == (sign | kFpPosInf) || ours == (sign | 0x7F7FFFFFu);
    }
    return ulp_distance(ours, host_bits) <= 1;
}

}  // namespace fpr32::testing
