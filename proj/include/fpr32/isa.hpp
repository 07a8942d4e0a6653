// SPDX-License-Identifier: Apache-2.0
//
// Canonical binary encoding of the 27-instruction RISC ISA. Field layout:
//   opcode    [31:27]
//   cond      [26:24]   (branches)
//   rd        [25:21]
//   rs        [20:16]
//   rt / imm5 [4:0]
//   imm8      [7:0]     (signed: ADDI/SUBI immediates, LW/SW offsets)
//   imm16     [15:0]    (LHB/LLB)
//   offset12  [11:0]    (signed: B/JAL)
// Don't-care bits encode as zero and are ignored on decode.

#pragma once

#include <cstdint>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>

namespace fpr32 {

enum class Opcode : uint8_t {
    Add = 0x00,
    Addz = 0x01,
    Sub = 0x02,
    And = 0x03,
    Nor = 0x04,
    Sll = 0x05,
    Srl = 0x06,
    Sra = 0x07,
    Lw = 0x08,
    Sw = 0x09,
    Lhb = 0x0A,
    Llb = 0x0B,
    B = 0x0C,
    Jal = 0x0D,
    Jr = 0x0E,
    Push = 0x12,
    Pop = 0x13,
    Addi = 0x14,
    Subi = 0x15,
    Mul = 0x18,
    Umul = 0x19,
    Addf = 0x1A,
    Subf = 0x1B,
    Mulf = 0x1C,
    Itf = 0x1D,
    Fti = 0x1E,
    Hlt = 0x1F,
};

enum class Cond : uint8_t {
    Neq = 0,   // Z == 0
    Eq = 1,    // Z == 1
    Gt = 2,    // Z == 0 and N == 0
    Lt = 3,    // N == 1
    Gte = 4,   // N == 0
    Lte = 5,   // N == 1 or Z == 1
    Ovfl = 6,  // V == 1
    Uncond = 7,
};

inline constexpr bool opcode_is_legal(uint32_t code) {
    switch (code) {
        case 0x0F:
        case 0x10:
        case 0x11:
        case 0x16:
        case 0x17:
            return false;
        default:
            return code < 32;
    }
}

struct Instruction {
    Opcode op = Opcode::Hlt;
    Cond cond = Cond::Neq;    // B only
    uint8_t rd = 0;
    uint8_t rs = 0;
    uint8_t rt = 0;
    uint8_t imm5 = 0;         // shift amount
    int8_t imm8 = 0;          // ADDI/SUBI immediate, LW/SW offset
    uint16_t imm16 = 0;       // LHB/LLB payload (raw 16-bit pattern)
    int16_t offset12 = 0;     // branch/JAL word offset

    friend bool operator==(const Instruction&, const Instruction&) = default;
};

namespace detail {

inline constexpr uint32_t enc_reg(uint8_t r, int shift) {
    return static_cast<uint32_t>(r & 0x1F) << shift;
}

}  // namespace detail

// Packs an instruction into its machine word. Throws std::out_of_range when
// a field exceeds its width (register >= 32, imm5 >= 32, offset12 outside
// [-2048, 2047]).
inline uint32_t encode(const Instruction& in) {
    auto check = [](bool ok, const char* what) {
        if (!ok) throw std::out_of_range(what);
    };
    check(in.rd < 32 && in.rs < 32 && in.rt < 32, "register index");

    const uint32_t op = static_cast<uint32_t>(in.op) << 27;
    switch (in.op) {
        case Opcode::Add:
        case Opcode::Addz:
        case Opcode::Sub:
        case Opcode::And:
        case Opcode::Nor:
        case Opcode::Mul:
        case Opcode::Umul:
        case Opcode::Addf:
        case Opcode::Subf:
        case Opcode::Mulf:
            return op | detail::enc_reg(in.rd, 21) | detail::enc_reg(in.rs, 16) |
                   detail::enc_reg(in.rt, 0);
        case Opcode::Sll:
        case Opcode::Srl:
        case Opcode::Sra:
            check(in.imm5 < 32, "shift amount");
            return op | detail::enc_reg(in.rd, 21) | detail::enc_reg(in.rs, 16) | in.imm5;
        case Opcode::Lw:
        case Opcode::Sw:
        case Opcode::Addi:
        case Opcode::Subi:
            return op | detail::enc_reg(in.rd, 21) | detail::enc_reg(in.rs, 16) |
                   (static_cast<uint32_t>(static_cast<uint8_t>(in.imm8)));
        case Opcode::Lhb:
        case Opcode::Llb:
            return op | detail::enc_reg(in.rd, 21) | in.imm16;
        case Opcode::B:
            check(in.offset12 >= -2048 && in.offset12 <= 2047, "branch offset");
            return op | (static_cast<uint32_t>(in.cond) << 24) |
                   (static_cast<uint32_t>(in.offset12) & 0xFFF);
        case Opcode::Jal:
            check(in.offset12 >= -2048 && in.offset12 <= 2047, "jump offset");
            return op | (static_cast<uint32_t>(in.offset12) & 0xFFF);
        case Opcode::Jr:
            return op | detail::enc_reg(in.rt, 0);
        case Opcode::Push:
            return op | detail::enc_reg(in.rs, 16);
        case Opcode::Pop:
            return op | detail::enc_reg(in.rd, 21);
        case Opcode::Itf:
        case Opcode::Fti:
            return op | detail::enc_reg(in.rd, 21) | detail::enc_reg(in.rs, 16);
        case Opcode::Hlt:
            return op;
    }
    throw std::out_of_range("opcode");
}

// Decodes a machine word, ignoring don't-care bits. Returns nullopt for the
// five unassigned opcodes.
inline std::optional<Instruction> decode(uint32_t w) {
    const uint32_t code = w >> 27;
    if (!opcode_is_legal(code)) return std::nullopt;

    Instruction in;
    in.op = static_cast<Opcode>(code);
    const auto rd = static_cast<uint8_t>((w >> 21) & 0x1F);
    const auto rs = static_cast<uint8_t>((w >> 16) & 0x1F);
    const auto rt = static_cast<uint8_t>(w & 0x1F);

    switch (in.op) {
        case Opcode::Add:
        case Opcode::Addz:
        case Opcode::Sub:
        case Opcode::And:
        case Opcode::Nor:
        case Opcode::Mul:
        case Opcode::Umul:
        case Opcode::Addf:
        case Opcode::Subf:
        case Opcode::Mulf:
            in.rd = rd;
            in.rs = rs;
            in.rt = rt;
            break;
        case Opcode::Sll:
        case Opcode::Srl:
        case Opcode::Sra:
            in.rd = rd;
            in.rs = rs;
            in.imm5 = static_cast<uint8_t>(w & 0x1F);
            break;
        case Opcode::Lw:
        case Opcode::Sw:
        case Opcode::Addi:
        case Opcode::Subi:
            in.rd = rd;
            in.rs = rs;
            in.imm8 = static_cast<int8_t>(w & 0xFF);
            break;
        case Opcode::Lhb:
        case Opcode::Llb:
            in.rd = rd;
            in.imm16 = static_cast<uint16_t>(w & 0xFFFF);
            break;
        case Opcode::B:
            in.cond = static_cast<Cond>((w >> 24) & 0x7);
            in.offset12 = static_cast<int16_t>(static_cast<int32_t>((w & 0xFFF) << 20) >> 20);
            break;
        case Opcode::Jal:
            in.offset12 = static_cast<int16_t>(static_cast<int32_t>((w & 0xFFF) << 20) >> 20);
            break;
        case Opcode::Jr:
            in.rt = rt;
            break;
        case Opcode::Push:
            in.rs = rs;
            break;
        case Opcode::Pop:
            in.rd = rd;
            break;
        case Opcode::Itf:
        case Opcode::Fti:
            in.rd = rd;
            in.rs = rs;
            break;
        case Opcode::Hlt:
            break;
    }
    return in;
}

inline const char* mnemonic(Opcode op) {
    switch (op) {
        case Opcode::Add: return "ADD";
        case Opcode::Addz: return "ADDZ";
        case Opcode::Sub: return "SUB";
        case Opcode::And: return "AND";
        case Opcode::Nor: return "NOR";
        case Opcode::Sll: return "SLL";
        case Opcode::Srl: return "SRL";
        case Opcode::Sra: return "SRA";
        case Opcode::Lw: return "LW";
        case Opcode::Sw: return "SW";
        case Opcode::Lhb: return "LHB";
        case Opcode::Llb: return "LLB";
        case Opcode::B: return "B";
        case Opcode::Jal: return "JAL";
        case Opcode::Jr: return "JR";
        case Opcode::Push: return "PUSH";
        case Opcode::Pop: return "POP";
        case Opcode::Addi: return "ADDI";
        case Opcode::Subi: return "SUBI";
        case Opcode::Mul: return "MUL";
        case Opcode::Umul: return "UMUL";
        case Opcode::Addf: return "ADDF";
        case Opcode::Subf: return "SUBF";
        case Opcode::Mulf: return "MULF";
        case Opcode::Itf: return "ITF";
        case Opcode::Fti: return "FTI";
        case Opcode::Hlt: return "HLT";
    }
    return "?";
}

inline const char* cond_name(Cond c) {
    switch (c) {
        case Cond::Neq: return "NEQ";
        case Cond::Eq: return "EQ";
        case Cond::Gt: return "GT";
        case Cond::Lt: return "LT";
        case Cond::Gte: return "GTE";
        case Cond::Lte: return "LTE";
        case Cond::Ovfl: return "OVFL";
        case Cond::Uncond: return "UNCOND";
    }
    return "?";
}

// Renders a word as assembler-accepted text; branch and jump targets come
// out as raw numeric offsets. Illegal words render as "<illegal>".
inline std::string disassemble(uint32_t w) {
    const auto di = decode(w);
    if (!di) return "<illegal>";
    const Instruction& in = *di;

    auto reg = [](uint8_t r) { return "R" + std::to_string(r); };
    auto hex16 = [](uint16_t v) {
        char buf[8];
        std::snprintf(buf, sizeof buf, "0x%04X", v);
        return std::string(buf);
    };

    const std::string m = mnemonic(in.op);
    switch (in.op) {
        case Opcode::Add:
        case Opcode::Addz:
        case Opcode::Sub:
        case Opcode::And:
        case Opcode::Nor:
        case Opcode::Mul:
        case Opcode::Umul:
        case Opcode::Addf:
        case Opcode::Subf:
        case Opcode::Mulf:
            return m + " " + reg(in.rd) + ", " + reg(in.rs) + ", " + reg(in.rt);
        case Opcode::Sll:
        case Opcode::Srl:
        case Opcode::Sra:
            return m + " " + reg(in.rd) + ", " + reg(in.rs) + ", " + std::to_string(in.imm5);
        case Opcode::Lw:
        case Opcode::Sw:
        case Opcode::Addi:
        case Opcode::Subi:
            return m + " " + reg(in.rd) + ", " + reg(in.rs) + ", " + std::to_string(in.imm8);
        case Opcode::Lhb:
        case Opcode::Llb:
            return m + " " + reg(in.rd) + ", " + hex16(in.imm16);
        case Opcode::B:
            return m + " " + std::string(cond_name(in.cond)) + ", " +
                   std::to_string(in.offset12);
        case Opcode::Jal:
            return m + " " + std::to_string(in.offset12);
        case Opcode::Jr:
            return m + " " + reg(in.rt);
        case Opcode::Push:
            return m + " " + reg(in.rs);
        case Opcode::Pop:
            return m + " " + reg(in.rd);
        case Opcode::Itf:
        case Opcode::Fti:
            return m + " " + reg(in.rd) + ", " + reg(in.rs);
        case Opcode::Hlt:
            return m;
    }
    return "<illegal>";
}

}  // namespace fpr32
