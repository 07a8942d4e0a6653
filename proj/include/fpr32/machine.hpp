// SPDX-License-Identifier: Apache-2.0
//
// Instruction-level emulator: the CPU (32 registers, Z/V/N flags, dedicated
// 1K stack) behind a bus that maps data memory, the compressed-image memory,
// the weight ROM and the peripheral registers. One instruction is one cycle;
// the image compressor runs as a synchronous co-process whose countdown
// ticks once per executed instruction.
//
// Memory map (word addresses):
//   0x00000000..0x00001FFF  data memory (8K words)
//   0x0000C000              LED register (10 bits, write + read-back)
//   0x0000C001              switch inputs (10 bits, read-only)
//   0x0000C004              UART (write: enqueue tx byte; read: dequeue rx or 0)
//   0x0000C008              compression request/status
//   0x00010000..0x000103FF  image memory (byte-valued words, CPU read-only)
//   0x00020000..0x0002F8A5  weight ROM (63,654 words, CPU read-only)

#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fpr32/float32.hpp"
#include "fpr32/imgproc.hpp"
#include "fpr32/isa.hpp"

namespace fpr32 {

inline constexpr size_t kDataMemWords = 8192;
inline constexpr size_t kStackWords = 1024;
inline constexpr size_t kWeightRomWords = 63654;

inline constexpr uint32_t kLedAddr = 0x0000C000;
inline constexpr uint32_t kSwitchAddr = 0x0000C001;
inline constexpr uint32_t kUartAddr = 0x0000C004;
inline constexpr uint32_t kCompressAddr = 0x0000C008;
inline constexpr uint32_t kImageMemBase = 0x00010000;
inline constexpr uint32_t kWeightRomBase = 0x00020000;

inline constexpr uint32_t kPassParkAddr = 0x00AD;
inline constexpr uint32_t kFailParkAddr = 0x00DD;

// One pixel per cycle over the full 224x224 frame.
inline constexpr uint64_t kCompressLatencyCycles = 50176;

enum class Trap {
    None,
    IllegalOpcode,
    BusFault,
    StackOverflow,
    StackUnderflow,
    PcOutOfRange,
};

inline const char* trap_name(Trap t) {
    switch (t) {
        case Trap::None: return "none";
        case Trap::IllegalOpcode: return "illegal opcode";
        case Trap::BusFault: return "bus fault";
        case Trap::StackOverflow: return "stack overflow";
        case Trap::StackUnderflow: return "stack underflow";
        case Trap::PcOutOfRange: return "pc out of range";
    }
    return "?";
}

struct RunOptions {
    uint64_t max_cycles = 10'000'000;
    std::set<uint32_t> watch = {kPassParkAddr, kFailParkAddr};  // park self-loops
    std::set<uint32_t> breakpoints;  // stop before executing these addresses
    std::optional<size_t> stop_after_tx;
};

struct RunReport {
    enum class Stop { Halt, Trap, Park, Breakpoint, MaxCycles, TxCount };
    Stop stop = Stop::Halt;
    Trap trap = Trap::None;
    uint32_t pc = 0;
    uint64_t cycles = 0;
};

class Machine {
  public:
    // Architectural state
    uint32_t pc = 0;
    std::array<uint32_t, 32> rf{};
    bool flag_z = false, flag_v = false, flag_n = false;
    int32_t sp = static_cast<int32_t>(kStackWords) - 1;
    std::array<uint32_t, kStackWords> stack{};
    uint64_t cycle = 0;
    bool halted = false;
    Trap trap = Trap::None;

    // Memories and peripherals
    std::array<uint32_t, kInstrMemWords> imem{};
    std::vector<uint32_t> dm = std::vector<uint32_t>(kDataMemWords, 0);
    std::array<uint8_t, kImageMemWords> image_mem{};
    std::vector<uint32_t> weight_rom = std::vector<uint32_t>(kWeightRomWords, 0);
    uint32_t led = 0;
    uint32_t switches = 0;
    std::vector<uint8_t> uart_tx;
    std::deque<uint8_t> uart_rx;

    // Compressor co-process
    std::optional<GrayFrame> frame;
    uint64_t compress_latency = kCompressLatencyCycles;
    bool compress_pending = false;
    uint64_t compress_countdown = 0;

    uint32_t dm_highwater = 0;

    void load_program(const std::vector<uint32_t>& words) {
        if (words.size() > kInstrMemWords)
            throw std::length_error("program exceeds 1K instruction memory");
        imem.fill(0);
        std::copy(words.begin(), words.end(), imem.begin());
    }

    void load_weights(const std::vector<uint32_t>& words) {
        if (words.size() > kWeightRomWords)
            throw std::length_error("weight image exceeds ROM capacity (63654 words)");
        std::fill(weight_rom.begin(), weight_rom.end(), 0);
        std::copy(words.begin(), words.end(), weight_rom.begin());
    }

    void load_image(const std::array<uint8_t, kImageMemWords>& bytes) { image_mem = bytes; }

    void step() {
        if (halted) return;
        if (pc >= kInstrMemWords) {
            raise(Trap::PcOutOfRange);
            return;
        }
        const auto di = decode(imem[pc]);
        if (!di) {
            raise(Trap::IllegalOpcode);
            return;
        }
        const Instruction& in = *di;
        uint32_t next_pc = pc + 1;
        bool ok = true;

        switch (in.op) {
            case Opcode::Add:
                set_rd(in.rd, sat_add(reg(in.rs), reg(in.rt)));
                break;
            case Opcode::Addz:
                // No-op unless Z is set; then behaves exactly like ADD.
                if (flag_z) set_rd(in.rd, sat_add(reg(in.rs), reg(in.rt)));
                break;
            case Opcode::Sub:
                set_rd(in.rd, sat_sub(reg(in.rs), reg(in.rt)));
                break;
            case Opcode::And: {
                const uint32_t r = reg(in.rs) & reg(in.rt);
                flag_z = r == 0;
                set_rd(in.rd, r);
                break;
            }
            case Opcode::Nor: {
                const uint32_t r = ~(reg(in.rs) | reg(in.rt));
                flag_z = r == 0;
                set_rd(in.rd, r);
                break;
            }
            case Opcode::Sll: {
                const uint32_t r = reg(in.rs) << in.imm5;
                flag_z = r == 0;
                set_rd(in.rd, r);
                break;
            }
            case Opcode::Srl: {
                const uint32_t r = reg(in.rs) >> in.imm5;
                flag_z = r == 0;
                set_rd(in.rd, r);
                break;
            }
            case Opcode::Sra: {
                const uint32_t r =
                    static_cast<uint32_t>(static_cast<int32_t>(reg(in.rs)) >> in.imm5);
                flag_z = r == 0;
                set_rd(in.rd, r);
                break;
            }
            case Opcode::Lw: {
                uint32_t v = 0;
                ok = bus_read(reg(in.rs) + static_cast<uint32_t>(static_cast<int32_t>(in.imm8)), v);
                if (ok) set_rd(in.rd, v);
                break;
            }
            case Opcode::Sw:
                ok = bus_write(reg(in.rs) + static_cast<uint32_t>(static_cast<int32_t>(in.imm8)),
                               reg(in.rd));
                break;
            case Opcode::Lhb:
                set_rd(in.rd, (static_cast<uint32_t>(in.imm16) << 16) | (reg(in.rd) & 0xFFFF));
                break;
            case Opcode::Llb:
                set_rd(in.rd, static_cast<uint32_t>(
                                  static_cast<int32_t>(static_cast<int16_t>(in.imm16))));
                break;
            case Opcode::B:
                if (branch_taken(in.cond))
                    next_pc = static_cast<uint32_t>(static_cast<int64_t>(pc) + 1 + in.offset12);
                break;
            case Opcode::Jal:
                set_rd(31, pc + 1);
                next_pc = static_cast<uint32_t>(static_cast<int64_t>(pc) + 1 + in.offset12);
                break;
            case Opcode::Jr:
                next_pc = reg(in.rt);
                break;
            case Opcode::Push:
                if (sp < 0) {
                    raise(Trap::StackOverflow);
                    return;
                }
                stack[static_cast<size_t>(sp)] = reg(in.rs);
                --sp;
                break;
            case Opcode::Pop:
                if (sp >= static_cast<int32_t>(kStackWords) - 1) {
                    raise(Trap::StackUnderflow);
                    return;
                }
                ++sp;
                set_rd(in.rd, stack[static_cast<size_t>(sp)]);
                break;
            case Opcode::Addi:
                set_rd(in.rd, sat_add(reg(in.rs), static_cast<uint32_t>(
                                                      static_cast<int32_t>(in.imm8))));
                break;
            case Opcode::Subi:
                set_rd(in.rd, sat_sub(reg(in.rs), static_cast<uint32_t>(
                                                      static_cast<int32_t>(in.imm8))));
                break;
            case Opcode::Mul: {
                const int32_t a = static_cast<int16_t>(reg(in.rs) & 0xFFFF);
                const int32_t b = static_cast<int16_t>(reg(in.rt) & 0xFFFF);
                set_rd(in.rd, static_cast<uint32_t>(a * b));  // flags unchanged
                break;
            }
            case Opcode::Umul: {
                const uint32_t a = reg(in.rs) & 0xFFFF;
                const uint32_t b = reg(in.rt) & 0xFFFF;
                set_rd(in.rd, a * b);  // flags unchanged
                break;
            }
            case Opcode::Addf:
                set_rd(in.rd, fp_op(fp_add(reg(in.rs), reg(in.rt))));
                break;
            case Opcode::Subf:
                set_rd(in.rd, fp_op(fp_sub(reg(in.rs), reg(in.rt))));
                break;
            case Opcode::Mulf:
                set_rd(in.rd, fp_op(fp_mul(reg(in.rs), reg(in.rt))));
                break;
            case Opcode::Itf:
                set_rd(in.rd, itf_bits(static_cast<int32_t>(reg(in.rs))));  // flags unchanged
                break;
            case Opcode::Fti:
                set_rd(in.rd, static_cast<uint32_t>(fti_bits(reg(in.rs))));  // flags unchanged
                break;
            case Opcode::Hlt:
                halted = true;
                break;
        }
        if (!ok) return;  // bus fault already raised

        pc = next_pc;
        ++cycle;
        tick_compressor();
    }

    RunReport run(const RunOptions& opts = {}) {
        while (true) {
            if (halted) {
                if (trap != Trap::None)
                    return {RunReport::Stop::Trap, trap, pc, cycle};
                return {RunReport::Stop::Halt, Trap::None, pc, cycle};
            }
            if (opts.stop_after_tx && uart_tx.size() >= *opts.stop_after_tx)
                return {RunReport::Stop::TxCount, Trap::None, pc, cycle};
            if (opts.breakpoints.count(pc))
                return {RunReport::Stop::Breakpoint, Trap::None, pc, cycle};
            if (cycle >= opts.max_cycles)
                return {RunReport::Stop::MaxCycles, Trap::None, pc, cycle};

            const uint32_t prev = pc;
            step();
            // A watched address revisited back-to-back is a park loop.
            if (!halted && pc == prev && opts.watch.count(pc))
                return {RunReport::Stop::Park, Trap::None, pc, cycle};
        }
    }

    bool bus_read(uint32_t addr, uint32_t& value) {
        if (addr < kDataMemWords) {
            note_dm(addr);
            value = dm[addr];
            return true;
        }
        if (addr >= kImageMemBase && addr < kImageMemBase + kImageMemWords) {
            value = image_mem[addr - kImageMemBase];
            return true;
        }
        if (addr >= kWeightRomBase && addr < kWeightRomBase + kWeightRomWords) {
            value = weight_rom[addr - kWeightRomBase];
            return true;
        }
        switch (addr) {
            case kLedAddr:
                value = led;
                return true;
            case kSwitchAddr:
                value = switches & 0x3FF;
                return true;
            case kUartAddr:
                if (uart_rx.empty()) {
                    value = 0;
                } else {
                    value = uart_rx.front();
                    uart_rx.pop_front();
                }
                return true;
            case kCompressAddr:
                value = compress_pending ? 1 : 0;
                return true;
            default:
                raise(Trap::BusFault);
                return false;
        }
    }

    bool bus_write(uint32_t addr, uint32_t value) {
        if (addr < kDataMemWords) {
            note_dm(addr);
            dm[addr] = value;
            return true;
        }
        switch (addr) {
            case kLedAddr:
                led = value & 0x3FF;
                return true;
            case kUartAddr:
                uart_tx.push_back(static_cast<uint8_t>(value & 0xFF));
                return true;
            case kCompressAddr:
                if (value == 1 && !compress_pending) {
                    compress_pending = true;
                    compress_countdown = compress_latency;
                }
                return true;
            default:
                // Image memory, weight ROM, switches and unmapped space all
                // reject CPU writes.
                raise(Trap::BusFault);
                return false;
        }
    }

  private:
    uint32_t reg(uint8_t r) const { return r == 0 ? 0 : rf[r]; }

    void set_rd(uint8_t r, uint32_t v) {
        if (r != 0) rf[r] = v;
    }

    void raise(Trap t) {
        trap = t;
        halted = true;
    }

    void note_dm(uint32_t addr) {
        if (addr > dm_highwater) dm_highwater = addr;
    }

    uint32_t fp_op(const FpValue& v) {
        flag_z = v.flags.zr;
        flag_n = v.flags.neg;
        flag_v = false;
        return v.bits;
    }

    // Signed saturating add/sub; V flags a clamped result, N is the sign
    // after clamping.
    uint32_t sat_add(uint32_t a, uint32_t b) {
        const int64_t s = static_cast<int64_t>(static_cast<int32_t>(a)) +
                          static_cast<int32_t>(b);
        return sat_result(s);
    }

    uint32_t sat_sub(uint32_t a, uint32_t b) {
        const int64_t s = static_cast<int64_t>(static_cast<int32_t>(a)) -
                          static_cast<int32_t>(b);
        return sat_result(s);
    }

    uint32_t sat_result(int64_t s) {
        flag_v = false;
        if (s > INT32_MAX) {
            s = INT32_MAX;
            flag_v = true;
        } else if (s < INT32_MIN) {
            s = INT32_MIN;
            flag_v = true;
        }
        const auto r = static_cast<uint32_t>(static_cast<int32_t>(s));
        flag_z = r == 0;
        flag_n = (r >> 31) != 0;
        return r;
    }

    bool branch_taken(Cond c) const {
        switch (c) {
            case Cond::Neq: return !flag_z;
            case Cond::Eq: return flag_z;
            case Cond::Gt: return !flag_z && !flag_n;
            case Cond::Lt: return flag_n;
            case Cond::Gte: return !flag_n;
            case Cond::Lte: return flag_n || flag_z;
            case Cond::Ovfl: return flag_v;
            case Cond::Uncond: return true;
        }
        return false;
    }

    void tick_compressor() {
        if (!compress_pending) return;
        if (--compress_countdown == 0) {
            // Completion drops the whole padded image into image memory at
            // once. Without a source frame the preloaded contents stay put,
            // which lets pre-compressed image hex files flow through the
            // same firmware handshake.
            if (frame) image_mem = compress_to_image_mem(*frame);
            compress_pending = false;
        }
    }
};

}  // namespace fpr32
