// SPDX-License-Identifier: Apache-2.0
//
// Two-pass assembler for the firmware dialect:
//   - one instruction per line, operands comma-separated
//   - labels are "NAME:" at line start and share one global namespace
//   - registers R0..R31 and mnemonics are case-insensitive
//   - immediates in decimal or 0x-hex; '#' starts a comment
//   - branch/JAL targets are labels or raw numeric word offsets; a label
//     resolves to target_address - (instruction_address + 1)
// There are no data or origin directives; constants are built in code with
// the LLB/LHB idiom. Instruction memory holds 1K words, so a program longer
// than 1024 instructions is an error.

#pragma once

#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fpr32/hex.hpp"
#include "fpr32/isa.hpp"

namespace fpr32 {

inline constexpr size_t kInstrMemWords = 1024;

struct ProgramImage {
    std::vector<uint32_t> words;
    std::map<std::string, uint32_t> symbols;  // label -> word address
    std::vector<size_t> listing;              // word index -> 1-based source line
};

struct AsmError {
    enum class Kind {
        UnknownMnemonic,
        BadOperand,
        DuplicateLabel,
        UndefinedLabel,
        OffsetOutOfRange,
        ImmediateOutOfRange,
        ProgramTooLarge,
    };
    size_t line = 0;  // 1-based
    Kind kind = Kind::BadOperand;
    std::string message;
};

struct AssembleResult {
    std::optional<ProgramImage> image;
    std::vector<AsmError> errors;
    bool ok() const { return errors.empty() && image.has_value(); }
};

namespace asm_detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

inline std::string upper(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

inline bool is_ident(std::string_view s) {
    if (s.empty()) return false;
    if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    return true;
}

inline std::optional<uint8_t> parse_reg(std::string_view s) {
    if (s.size() < 2 || (s[0] != 'R' && s[0] != 'r')) return std::nullopt;
    uint32_t v = 0;
    for (char c : s.substr(1)) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
        v = v * 10 + static_cast<uint32_t>(c - '0');
        if (v > 31) return std::nullopt;
    }
    return static_cast<uint8_t>(v);
}

inline std::optional<int64_t> parse_int(std::string_view s) {
    bool negate = false;
    if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
        negate = s[0] == '-';
        s.remove_prefix(1);
    }
    if (s.empty()) return std::nullopt;
    int64_t v = 0;
    if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
        for (char c : s.substr(2)) {
            const int d = detail::hex_digit(c);
            if (d < 0) return std::nullopt;
            v = v * 16 + d;
            if (v > 0xFFFFFFFFll) return std::nullopt;
        }
    } else {
        for (char c : s) {
            if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
            v = v * 10 + (c - '0');
            if (v > 0xFFFFFFFFll) return std::nullopt;
        }
    }
    return negate ? -v : v;
}

inline std::vector<std::string_view> split_operands(std::string_view s) {
    std::vector<std::string_view> out;
    size_t start = 0;
    while (start <= s.size()) {
        size_t comma = s.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(trim(s.substr(start)));
            break;
        }
        out.push_back(trim(s.substr(start, comma - start)));
        start = comma + 1;
    }
    if (out.size() == 1 && out[0].empty()) out.clear();
    return out;
}

struct SourceLine {
    size_t line_no;
    std::vector<std::string> labels;
    std::string mnemonic;  // uppercased, empty if label-only line
    std::vector<std::string> operands;
};

inline std::optional<Cond> parse_cond(std::string_view s) {
    const std::string u = upper(s);
    if (u == "NEQ") return Cond::Neq;
    if (u == "EQ") return Cond::Eq;
    if (u == "GT") return Cond::Gt;
    if (u == "LT") return Cond::Lt;
    if (u == "GTE") return Cond::Gte;
    if (u == "LTE") return Cond::Lte;
    if (u == "OVFL") return Cond::Ovfl;
    if (u == "UNCOND") return Cond::Uncond;
    return std::nullopt;
}

inline std::optional<Opcode> parse_mnemonic(std::string_view s) {
    static const std::map<std::string, Opcode> table = {
        {"ADD", Opcode::Add},   {"ADDZ", Opcode::Addz}, {"SUB", Opcode::Sub},
        {"AND", Opcode::And},   {"NOR", Opcode::Nor},   {"SLL", Opcode::Sll},
        {"SRL", Opcode::Srl},   {"SRA", Opcode::Sra},   {"LW", Opcode::Lw},
        {"SW", Opcode::Sw},     {"LHB", Opcode::Lhb},   {"LLB", Opcode::Llb},
        {"B", Opcode::B},       {"JAL", Opcode::Jal},   {"JR", Opcode::Jr},
        {"PUSH", Opcode::Push}, {"POP", Opcode::Pop},   {"ADDI", Opcode::Addi},
        {"SUBI", Opcode::Subi}, {"MUL", Opcode::Mul},   {"UMUL", Opcode::Umul},
        {"ADDF", Opcode::Addf}, {"SUBF", Opcode::Subf}, {"MULF", Opcode::Mulf},
        {"ITF", Opcode::Itf},   {"FTI", Opcode::Fti},   {"HLT", Opcode::Hlt},
    };
    const auto it = table.find(upper(s));
    if (it == table.end()) return std::nullopt;
    return it->second;
}

}  // namespace asm_detail

inline AssembleResult assemble(std::string_view source) {
    using namespace asm_detail;
    AssembleResult result;
    auto fail = [&](size_t line, AsmError::Kind kind, std::string msg) {
        result.errors.push_back({line, kind, std::move(msg)});
    };

    // Scan: strip comments, pull labels apart from instructions.
    std::vector<SourceLine> lines;
    {
        size_t pos = 0;
        size_t line_no = 0;
        while (pos <= source.size()) {
            if (pos == source.size() && line_no > 0) break;
            ++line_no;
            size_t eol = source.find('\n', pos);
            if (eol == std::string_view::npos) eol = source.size();
            std::string_view text = source.substr(pos, eol - pos);
            pos = eol + 1;
            if (const size_t hash = text.find('#'); hash != std::string_view::npos)
                text = text.substr(0, hash);
            text = trim(text);

            SourceLine sl;
            sl.line_no = line_no;
            while (true) {
                const size_t colon = text.find(':');
                if (colon == std::string_view::npos) break;
                std::string_view candidate = trim(text.substr(0, colon));
                if (!is_ident(candidate)) break;
                sl.labels.emplace_back(candidate);
                text = trim(text.substr(colon + 1));
            }
            if (!text.empty()) {
                const size_t sp = text.find_first_of(" \t");
                if (sp == std::string_view::npos) {
                    sl.mnemonic = upper(text);
                } else {
                    sl.mnemonic = upper(text.substr(0, sp));
                    for (auto op : split_operands(trim(text.substr(sp + 1))))
                        sl.operands.emplace_back(op);
                }
            }
            if (!sl.labels.empty() || !sl.mnemonic.empty()) lines.push_back(std::move(sl));
        }
    }

    // Pass 1: assign addresses and collect labels.
    std::map<std::string, uint32_t> symbols;
    uint32_t address = 0;
    for (const auto& sl : lines) {
        for (const auto& label : sl.labels) {
            if (symbols.count(label))
                fail(sl.line_no, AsmError::Kind::DuplicateLabel,
                     "duplicate label '" + label + "'");
            else
                symbols[label] = address;
        }
        if (!sl.mnemonic.empty()) ++address;
    }
    if (address > kInstrMemWords) {
        const size_t over_line =
            lines.empty() ? 1 : lines.back().line_no;  // report at the end of the file
        fail(over_line, AsmError::Kind::ProgramTooLarge,
             "program is " + std::to_string(address) + " words; instruction memory holds " +
                 std::to_string(kInstrMemWords));
    }

    // Pass 2: encode.
    ProgramImage image;
    image.symbols = symbols;
    address = 0;
    for (const auto& sl : lines) {
        if (sl.mnemonic.empty()) continue;
        const uint32_t insn_addr = address++;
        const auto opc = parse_mnemonic(sl.mnemonic);
        if (!opc) {
            fail(sl.line_no, AsmError::Kind::UnknownMnemonic,
                 "unknown mnemonic '" + sl.mnemonic + "'");
            continue;
        }

        Instruction in;
        in.op = *opc;
        bool bad = false;
        auto want_operands = [&](size_t n) {
            if (sl.operands.size() != n) {
                fail(sl.line_no, AsmError::Kind::BadOperand,
                     "expected " + std::to_string(n) + " operand(s), got " +
                         std::to_string(sl.operands.size()));
                bad = true;
            }
            return !bad;
        };
        auto reg_at = [&](size_t i) -> uint8_t {
            if (bad) return 0;
            const auto r = parse_reg(sl.operands[i]);
            if (!r) {
                fail(sl.line_no, AsmError::Kind::BadOperand,
                     "expected register, got '" + sl.operands[i] + "'");
                bad = true;
                return 0;
            }
            return *r;
        };
        auto imm_at = [&](size_t i, int64_t lo, int64_t hi) -> int64_t {
            if (bad) return 0;
            const auto v = parse_int(sl.operands[i]);
            if (!v) {
                fail(sl.line_no, AsmError::Kind::BadOperand,
                     "expected immediate, got '" + sl.operands[i] + "'");
                bad = true;
                return 0;
            }
            if (*v < lo || *v > hi) {
                fail(sl.line_no, AsmError::Kind::ImmediateOutOfRange,
                     "immediate " + std::string(sl.operands[i]) + " outside [" +
                         std::to_string(lo) + ", " + std::to_string(hi) + "]");
                bad = true;
                return 0;
            }
            return *v;
        };
        auto target_at = [&](size_t i) -> int16_t {
            if (bad) return 0;
            const std::string& t = sl.operands[i];
            if (const auto num = parse_int(t)) {
                if (*num < -2048 || *num > 2047) {
                    fail(sl.line_no, AsmError::Kind::OffsetOutOfRange,
                         "offset " + t + " outside [-2048, 2047]");
                    bad = true;
                    return 0;
                }
                return static_cast<int16_t>(*num);
            }
            const auto it = symbols.find(t);
            if (it == symbols.end()) {
                fail(sl.line_no, AsmError::Kind::UndefinedLabel, "undefined label '" + t + "'");
                bad = true;
                return 0;
            }
            const int64_t offset =
                static_cast<int64_t>(it->second) - (static_cast<int64_t>(insn_addr) + 1);
            if (offset < -2048 || offset > 2047) {
                fail(sl.line_no, AsmError::Kind::OffsetOutOfRange,
                     "branch to '" + t + "' is " + std::to_string(offset) +
                         " words away; offsets span [-2048, 2047]");
                bad = true;
                return 0;
            }
            return static_cast<int16_t>(offset);
        };

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
                if (want_operands(3)) {
                    in.rd = reg_at(0);
                    in.rs = reg_at(1);
                    in.rt = reg_at(2);
                }
                break;
            case Opcode::Sll:
            case Opcode::Srl:
            case Opcode::Sra:
                if (want_operands(3)) {
                    in.rd = reg_at(0);
                    in.rs = reg_at(1);
                    in.imm5 = static_cast<uint8_t>(imm_at(2, 0, 31));
                }
                break;
            case Opcode::Lw:
            case Opcode::Sw:
            case Opcode::Addi:
            case Opcode::Subi:
                if (want_operands(3)) {
                    in.rd = reg_at(0);
                    in.rs = reg_at(1);
                    // 128..255 are accepted as raw byte patterns.
                    in.imm8 = static_cast<int8_t>(imm_at(2, -128, 255));
                }
                break;
            case Opcode::Lhb:
            case Opcode::Llb:
                if (want_operands(2)) {
                    in.rd = reg_at(0);
                    in.imm16 = static_cast<uint16_t>(imm_at(1, -32768, 65535));
                }
                break;
            case Opcode::B:
                if (want_operands(2)) {
                    const auto c = parse_cond(sl.operands[0]);
                    if (!c) {
                        fail(sl.line_no, AsmError::Kind::BadOperand,
                             "expected branch condition, got '" + sl.operands[0] + "'");
                        bad = true;
                    } else {
                        in.cond = *c;
                        in.offset12 = target_at(1);
                    }
                }
                break;
            case Opcode::Jal:
                if (want_operands(1)) in.offset12 = target_at(0);
                break;
            case Opcode::Jr:
                if (want_operands(1)) in.rt = reg_at(0);
                break;
            case Opcode::Push:
                if (want_operands(1)) in.rs = reg_at(0);
                break;
            case Opcode::Pop:
                if (want_operands(1)) in.rd = reg_at(0);
                break;
            case Opcode::Itf:
            case Opcode::Fti:
                if (want_operands(2)) {
                    in.rd = reg_at(0);
                    in.rs = reg_at(1);
                }
                break;
            case Opcode::Hlt:
                want_operands(0);
                break;
        }
        if (!bad) {
            image.words.push_back(encode(in));
            image.listing.push_back(sl.line_no);
        }
    }

    if (!result.errors.empty()) return result;
    result.image = std::move(image);
    return result;
}

inline std::string emit_hex(const ProgramImage& image) { return emit_hex(image.words); }

}  // namespace fpr32
