// SPDX-License-Identifier: Apache-2.0
//
// Glue for running one firmware classification on the emulator and lifting
// the data-memory regions into a PredictionTrace for differential checks.
//
// The firmware reuses DM 0..1599 for the conv2 output, overwriting the
// input image and the first words of the conv1 region. The capture is
// therefore two-phase: stop at the CONV2_SETUP label (input, conv1 and
// pool1 all live), then continue until the UART byte goes out and read the
// remaining regions.

#pragma once

#include <stdexcept>
#include <string>

#include "fpr32/assembler.hpp"
#include "fpr32/cnn.hpp"
#include "fpr32/machine.hpp"

namespace fpr32 {

// Data-memory plan of the CNN firmware (word addresses).
namespace dm_layout {
inline constexpr uint32_t kInput = 0;      // 1024 words
inline constexpr uint32_t kConv1 = 1024;   // 4704 words
inline constexpr uint32_t kPool1 = 5728;   // 1176 words
inline constexpr uint32_t kConv2 = 0;      // 1600 words (reuse)
inline constexpr uint32_t kPool2 = 1600;   // 400 words
inline constexpr uint32_t kFc1 = 2000;     // 120 words
inline constexpr uint32_t kFc2 = 2120;     // 84 words
inline constexpr uint32_t kWorkZone = 7000;  // 400 words, reserved
inline constexpr uint32_t kScores = 8000;  // 36 words
}  // namespace dm_layout

struct ClassificationResult {
    PredictionTrace trace;
    uint64_t cycles = 0;
    uint32_t dm_highwater = 0;
    RunReport report;
};

namespace pipeline_detail {

inline void read_region(const Machine& m, uint32_t base, Tensor& out) {
    for (size_t i = 0; i < out.data.size(); ++i) out.data[i] = m.dm[base + i];
}

}  // namespace pipeline_detail

// Runs exactly one classification of the firmware already loaded into the
// machine. `program` supplies the CONV2_SETUP capture point. The machine is
// expected to be at the top of the MAIN loop (reset state is fine).
inline ClassificationResult run_one_classification(Machine& m, const ProgramImage& program,
                                                   uint64_t max_cycles = 50'000'000) {
    const auto it = program.symbols.find("CONV2_SETUP");
    if (it == program.symbols.end())
        throw std::invalid_argument("firmware image lacks a CONV2_SETUP label");

    ClassificationResult result;
    result.trace.input = make_tensor({kPaddedSide, kPaddedSide});
    result.trace.conv1 = make_tensor({6, 28, 28});
    result.trace.pool1 = make_tensor({6, 14, 14});
    result.trace.conv2 = make_tensor({16, 10, 10});
    result.trace.pool2 = make_tensor({16, 5, 5});
    result.trace.fc1 = make_tensor({120});
    result.trace.fc2 = make_tensor({84});
    result.trace.scores = make_tensor({36});

    const size_t tx_before = m.uart_tx.size();

    RunOptions phase1;
    phase1.max_cycles = max_cycles;
    phase1.watch.clear();
    phase1.breakpoints = {it->second};
    result.report = m.run(phase1);
    if (result.report.stop != RunReport::Stop::Breakpoint)
        throw std::runtime_error(std::string("classification stalled before conv2 (") +
                                 trap_name(m.trap) + ")");
    pipeline_detail::read_region(m, dm_layout::kInput, result.trace.input);
    pipeline_detail::read_region(m, dm_layout::kConv1, result.trace.conv1);
    pipeline_detail::read_region(m, dm_layout::kPool1, result.trace.pool1);

    RunOptions phase2;
    phase2.max_cycles = max_cycles;
    phase2.watch.clear();
    phase2.stop_after_tx = tx_before + 1;
    result.report = m.run(phase2);
    if (result.report.stop != RunReport::Stop::TxCount)
        throw std::runtime_error(std::string("classification did not transmit (") +
                                 trap_name(m.trap) + ")");
    pipeline_detail::read_region(m, dm_layout::kConv2, result.trace.conv2);
    pipeline_detail::read_region(m, dm_layout::kPool2, result.trace.pool2);
    pipeline_detail::read_region(m, dm_layout::kFc1, result.trace.fc1);
    pipeline_detail::read_region(m, dm_layout::kFc2, result.trace.fc2);
    pipeline_detail::read_region(m, dm_layout::kScores, result.trace.scores);

    result.trace.ascii = m.uart_tx[tx_before];
    result.trace.predicted =
        result.trace.ascii >= 'A' ? result.trace.ascii - 0x37 : result.trace.ascii - 0x30;
    result.cycles = m.cycle;
    result.dm_highwater = m.dm_highwater;
    return result;
}

}  // namespace fpr32
