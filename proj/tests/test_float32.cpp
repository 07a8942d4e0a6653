// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>

#include "fp_oracle.hpp"
#include "fpr32/float32.hpp"
#include "fpr32/rng.hpp"

namespace {

using namespace fpr32;
using namespace fpr32::testing;

#include "fp_special_table.inc"

uint32_t random_finite(SplitMix64& rng) {
    for (;;) {
        uint32_t v = rng.next32();
        if (fp_exp_field(v) != 0xFF) return v;
    }
}

TEST(FpAdd, SpecExamples) {
    auto r = fp_add(0x3F800000u, 0x3F800000u);  // 1.0 + 1.0
    EXPECT_EQ(r.bits, 0x40000000u);
    EXPECT_FALSE(r.flags.zr);
    EXPECT_FALSE(r.flags.neg);
    EXPECT_FALSE(r.flags.ov);

    EXPECT_EQ(fp_add_bits(kFpPosInf, kFpNegInf), kFpQuietNan);

    // (1 + 2^-23) - 1 cancels down to 2^-23, exponent 104.
    EXPECT_EQ(fp_add_bits(0x3F800001u, 0xBF800000u), 0x34000000u);
}

TEST(FpAdd, SpecialsAndEdges) {
    EXPECT_EQ(fp_add_bits(kFpQuietNan, kFpOne), kFpQuietNan);
    EXPECT_EQ(fp_add_bits(kFpOne, 0x7F800001u), kFpQuietNan);
    EXPECT_EQ(fp_add_bits(kFpPosInf, kFpOne), kFpPosInf);
    EXPECT_EQ(fp_add_bits(kFpNegInf, kFpNegInf), kFpNegInf);
    // Exactly-zero sums give +0, even for -0 + -0.
    EXPECT_EQ(fp_add_bits(kFpNegZero, kFpNegZero), kFpPosZero);
    EXPECT_EQ(fp_add_bits(kFpOne, kFpOne | kFpSignMask), kFpPosZero);
    // Overflow to infinity.
    EXPECT_EQ(fp_add_bits(0x7F7FFFFFu, 0x7F7FFFFFu), kFpPosInf);
    // Gradual underflow: smallest normal minus its half is subnormal.
    EXPECT_EQ(fp_add_bits(0x00800000u, 0x80400000u), 0x00400000u);
}

TEST(FpSub, SpecExamples) {
    EXPECT_EQ(fp_sub_bits(0x40000000u, 0x3F800000u), 0x3F800000u);

    auto zero = fp_sub(0x42F6E979u, 0x42F6E979u);
    EXPECT_EQ(zero.bits, kFpPosZero);
    EXPECT_TRUE(zero.flags.zr);
    EXPECT_FALSE(zero.flags.neg);

    auto neg = fp_sub(kFpPosZero, 0x3F800000u);
    EXPECT_EQ(neg.bits, 0xBF800000u);
    EXPECT_TRUE(neg.flags.neg);
    EXPECT_FALSE(neg.flags.zr);
}

TEST(FpMul, SpecExamples) {
    EXPECT_EQ(fp_mul_bits(0x40000000u, 0x3F000000u), 0x3F800000u);  // 2 * 0.5
    EXPECT_EQ(fp_mul_bits(0xC0000000u, kFpPosZero), kFpNegZero);    // -2 * +0
    EXPECT_EQ(fp_mul_bits(0x7F7FFFFFu, 0x40000000u), kFpPosInf);    // overflow
}

TEST(FpMul, SpecialsAndEdges) {
    EXPECT_EQ(fp_mul_bits(kFpPosInf, kFpPosZero), kFpQuietNan);
    EXPECT_EQ(fp_mul_bits(kFpNegZero, kFpNegInf), kFpQuietNan);
    EXPECT_EQ(fp_mul_bits(kFpQuietNan, kFpQuietNan), kFpQuietNan);
    EXPECT_EQ(fp_mul_bits(kFpNegInf, 0x40000000u), kFpNegInf);
    EXPECT_EQ(fp_mul_bits(kFpNegZero, kFpNegZero), kFpPosZero);
    // Underflow flushes to a signed zero.
    EXPECT_EQ(fp_mul_bits(0x00800000u, 0x3F000000u), kFpPosZero);
    EXPECT_EQ(fp_mul_bits(0x80800000u, 0x3F000000u), kFpNegZero);
    // Subnormal times large scales back into the normal range.
    EXPECT_EQ(fp_mul_bits(0x00000001u, 0x7F000000u),
              oracle_mul(0x00000001u, 0x7F000000u));
}

TEST(FpSpecialMatrix, MatchesFrozenTable) {
    for (int i = 0; i < 16; ++i) {
        for (int j = 0; j < 16; ++j) {
            const uint32_t a = kSpecialValues[i];
            const uint32_t b = kSpecialValues[j];
            EXPECT_EQ(fp_add_bits(a, b), kSpecialAddExpected[i * 16 + j])
                << std::hex << a << " + " << b;
            EXPECT_EQ(fp_mul_bits(a, b), kSpecialMulExpected[i * 16 + j])
                << std::hex << a << " * " << b;
        }
    }
}

TEST(FpSpecialMatrix, FrozenTableMatchesLiveOracle) {
    for (int i = 0; i < 16; ++i) {
        for (int j = 0; j < 16; ++j) {
            const uint32_t a = kSpecialValues[i];
            const uint32_t b = kSpecialValues[j];
            EXPECT_EQ(kSpecialAddExpected[i * 16 + j], oracle_add(a, b));
            EXPECT_EQ(kSpecialMulExpected[i * 16 + j], oracle_mul(a, b));
        }
    }
}

TEST(FpProperties, CommutativityOnRandomPairs) {
    SplitMix64 rng(0xC0FFEEull);
    for (int i = 0; i < 200000; ++i) {
        const uint32_t a = rng.next32();  // any pattern, NaN and inf included
        const uint32_t b = rng.next32();
        ASSERT_EQ(fp_add_bits(a, b), fp_add_bits(b, a)) << std::hex << a << " " << b;
        ASSERT_EQ(fp_mul_bits(a, b), fp_mul_bits(b, a)) << std::hex << a << " " << b;
    }
}

TEST(FpProperties, AddIdentity) {
    SplitMix64 rng(7);
    for (int i = 0; i < 100000; ++i) {
        uint32_t x = rng.next32();
        if (fp_is_nan(x)) continue;
        // The one exception is -0: the exactly-zero-sum rule gives +0.
        if (x == kFpNegZero) continue;
        ASSERT_EQ(fp_add_bits(x, kFpPosZero), x) << std::hex << x;
    }
    EXPECT_EQ(fp_add_bits(kFpNegZero, kFpPosZero), kFpPosZero);
}

TEST(FpProperties, MulIdentity) {
    SplitMix64 rng(8);
    for (int i = 0; i < 100000; ++i) {
        uint32_t x = rng.next32();
        if (fp_is_nan(x) || fp_is_subnormal(x)) continue;
        ASSERT_EQ(fp_mul_bits(x, kFpOne), x) << std::hex << x;
    }
}

TEST(FpProperties, MulSignSymmetry) {
    SplitMix64 rng(9);
    for (int i = 0; i < 100000; ++i) {
        const uint32_t a = rng.next32();
        const uint32_t b = rng.next32();
        const uint32_t p = fp_mul_bits(a, b);
        if (fp_is_nan(p)) continue;
        ASSERT_EQ(fp_mul_bits(a ^ kFpSignMask, b), p ^ kFpSignMask)
            << std::hex << a << " " << b;
    }
}

TEST(FpProperties, RandomBoundsVsHost) {
    // 10^5-pair smoke version of the acceptance run.
    SplitMix64 rng(0x5EEDull);
    for (int i = 0; i < 100000; ++i) {
        const uint32_t a = random_finite(rng);
        const uint32_t b = random_finite(rng);
        ASSERT_TRUE(add_within_bounds(fp_add_bits(a, b), a, b))
            << std::hex << a << " + " << b << " -> " << fp_add_bits(a, b);
        ASSERT_TRUE(mul_within_bounds(fp_mul_bits(a, b), a, b))
            << std::hex << a << " * " << b << " -> " << fp_mul_bits(a, b);
    }
}

TEST(FpProperties, ExactMatchVsDoubleModelOracles) {
    // The double-arithmetic oracles model the datapath independently; the
    // bit-level implementation must agree everywhere, not just within bounds.
    SplitMix64 rng(0xD1FFull);
    for (int i = 0; i < 200000; ++i) {
        const uint32_t a = rng.next32();
        const uint32_t b = rng.next32();
        ASSERT_EQ(fp_add_bits(a, b), oracle_add(a, b)) << std::hex << a << " + " << b;
        ASSERT_EQ(fp_mul_bits(a, b), oracle_mul(a, b)) << std::hex << a << " * " << b;
    }
}

TEST(FpProperties, ExactMatchOnCancellationHeavyPairs) {
    // Pairs with near-equal exponents and opposite signs exercise the
    // alignment and renormalization paths far more densely than uniform
    // random patterns do.
    SplitMix64 rng(0xCA9CE1);
    for (int i = 0; i < 300000; ++i) {
        const uint32_t exp_a = 1 + static_cast<uint32_t>(rng.below(253));
        const int64_t delta = static_cast<int64_t>(rng.below(7)) - 3;
        int64_t exp_b = static_cast<int64_t>(exp_a) + delta;
        if (exp_b < 0) exp_b = 0;
        if (exp_b > 254) exp_b = 254;
        const uint32_t a = (static_cast<uint32_t>(rng.below(2)) << 31) | (exp_a << 23) |
                           (rng.next32() & kFpMantMask);
        const uint32_t b = (static_cast<uint32_t>(rng.below(2)) << 31) |
                           (static_cast<uint32_t>(exp_b) << 23) | (rng.next32() & kFpMantMask);
        ASSERT_EQ(fp_add_bits(a, b), oracle_add(a, b)) << std::hex << a << " + " << b;
        ASSERT_EQ(fp_sub_bits(a, b), oracle_add(a, b ^ kFpSignMask))
            << std::hex << a << " - " << b;
    }
    // Subnormal-dense pairs around the gradual-underflow boundary.
    for (int i = 0; i < 200000; ++i) {
        const uint32_t a = (static_cast<uint32_t>(rng.below(2)) << 31) |
                           (static_cast<uint32_t>(rng.below(3)) << 23) |
                           (rng.next32() & kFpMantMask);
        const uint32_t b = (static_cast<uint32_t>(rng.below(2)) << 31) |
                           (static_cast<uint32_t>(rng.below(3)) << 23) |
                           (rng.next32() & kFpMantMask);
        ASSERT_EQ(fp_add_bits(a, b), oracle_add(a, b)) << std::hex << a << " + " << b;
        ASSERT_EQ(fp_mul_bits(a, b), oracle_mul(a, b)) << std::hex << a << " * " << b;
    }
}

TEST(FpConvert, ItfExamples) {
    EXPECT_EQ(itf_bits(0), 0x00000000u);
    EXPECT_EQ(itf_bits(-7), 0xC0E00000u);
    // 2^24 + 1 is not representable; truncation drops the low bit.
    EXPECT_EQ(itf_bits(16777217), 0x4B800000u);
    EXPECT_EQ(itf_bits(255), 0x437F0000u);
    EXPECT_EQ(itf_bits(INT32_MIN), 0xCF000000u);
}

TEST(FpConvert, FtiExamples) {
    EXPECT_EQ(fti_bits(0xC0E00000u), -7);
    EXPECT_EQ(fti_bits(0x3F000000u), 0);           // 0.5 truncates
    EXPECT_EQ(fti_bits(0xBF99999Au), -1);          // -1.2 truncates toward zero
    EXPECT_EQ(fti_bits(0x4F800000u), INT32_MAX);   // 2^32 saturates
    EXPECT_EQ(fti_bits(0xCF000001u), INT32_MIN);   // just below -2^31 saturates
    EXPECT_EQ(fti_bits(0xCF000000u), INT32_MIN);   // exactly -2^31
    EXPECT_EQ(fti_bits(kFpQuietNan), 0);
    EXPECT_EQ(fti_bits(kFpPosInf), INT32_MAX);
    EXPECT_EQ(fti_bits(kFpNegInf), INT32_MIN);
    EXPECT_EQ(fti_bits(kFpNegZero), 0);
    EXPECT_EQ(fti_bits(0x00000001u), 0);
}

TEST(FpConvert, RoundTripWithin2to24Exhaustive) {
    for (int64_t v = -16777216; v <= 16777216; ++v)
        ASSERT_EQ(fti_bits(itf_bits(static_cast<int32_t>(v))), v) << v;
}

TEST(FpConvert, ItfMatchesHostWhenExact) {
    SplitMix64 rng(12);
    for (int i = 0; i < 100000; ++i) {
        const int32_t v = static_cast<int32_t>(rng.below(2 * 16777216ull + 1)) - 16777216;
        ASSERT_EQ(itf_bits(v), as_bits(static_cast<float>(v))) << v;
    }
}

TEST(FpFlagsTest, Soundness) {
    SplitMix64 rng(13);
    for (int i = 0; i < 100000; ++i) {
        const uint32_t a = rng.next32();
        const uint32_t b = rng.next32();
        for (const FpValue r : {fp_add(a, b), fp_sub(a, b), fp_mul(a, b)}) {
            ASSERT_EQ(r.flags.zr, (r.bits & ~kFpSignMask) == 0);
            if (r.flags.neg) {
                ASSERT_TRUE(r.bits & kFpSignMask);
            }
            ASSERT_FALSE(r.flags.zr && r.flags.neg);
            ASSERT_FALSE(r.flags.ov);
        }
    }
}

}  // namespace
