// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end for the toolchain:
//   fpr32 asm       assemble a source file to instruction hex
//   fpr32 run       run a program on the emulator
//   fpr32 classify  compress a frame and run one CNN classification
//   fpr32 selftest  assemble and run every self-checking test in a directory
//   fpr32 golden    emit golden-model weights, image and trace dumps
//
// Exit codes: 0 pass/halt, 1 explicit failure (a 0x00dd park or a failing
// selftest), 2 abnormal (trap, cycle limit, I/O or usage errors).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fpr32/assembler.hpp"
#include "fpr32/cnn.hpp"
#include "fpr32/machine.hpp"
#include "fpr32/pipeline.hpp"

namespace {

namespace fs = std::filesystem;
using namespace fpr32;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed for " + path);
}

ProgramImage assemble_or_die(const std::string& path) {
    const auto result = assemble(read_file(path));
    if (!result.ok()) {
        for (const auto& e : result.errors)
            std::cerr << path << ":" << e.line << ": " << e.message << "\n";
        throw std::runtime_error("assembly failed");
    }
    return *result.image;
}

// A program argument may be assembly source or an instruction hex image.
ProgramImage load_program_file(const std::string& path) {
    if (fs::path(path).extension() == ".hex") {
        ProgramImage image;
        image.words = parse_hex_image(read_file(path), 8, kInstrMemWords);
        // Trim trailing zero words so size reporting stays meaningful.
        while (!image.words.empty() && image.words.back() == 0) image.words.pop_back();
        return image;
    }
    return assemble_or_die(path);
}

// A frame argument may be 50176 raw bytes, a 50176-line frame hex, or a
// 1024-line pre-compressed image hex.
void load_frame_file(Machine& m, const std::string& path) {
    const std::string content = read_file(path);
    if (content.size() == kFramePixels) {
        m.frame = GrayFrame::from_bytes(std::vector<uint8_t>(content.begin(), content.end()));
        return;
    }
    const size_t lines = static_cast<size_t>(std::count(content.begin(), content.end(), '\n'));
    if (lines == kImageMemWords) {
        m.load_image(read_image_hex(content));
        return;
    }
    m.frame = frame_from_hex(content);
}

void print_tx(const std::vector<uint8_t>& tx) {
    std::printf("tx (%zu byte%s):", tx.size(), tx.size() == 1 ? "" : "s");
    for (uint8_t b : tx) std::printf(" %02x", b);
    if (!tx.empty()) {
        std::string ascii;
        for (uint8_t b : tx) ascii += (b >= 0x20 && b < 0x7F) ? static_cast<char>(b) : '.';
        std::printf("  \"%s\"", ascii.c_str());
    }
    std::printf("\n");
}

struct RunArgs {
    std::string program;
    std::string weights;
    std::string frame;
    uint32_t switches = 0;
    uint64_t latency = kCompressLatencyCycles;
    bool fast = false;
    uint64_t max_cycles = 10'000'000;
    std::vector<std::string> dump_dm;
    size_t stop_after_tx = 0;
    std::string uart_rx;
};

int cmd_run(const RunArgs& args) {
    Machine m;
    const ProgramImage program = load_program_file(args.program);
    m.load_program(program.words);
    if (!args.weights.empty())
        m.load_weights(parse_hex_image(read_file(args.weights), 8, kWeightRomWords));
    if (!args.frame.empty()) load_frame_file(m, args.frame);
    m.switches = args.switches & 0x3FF;
    m.compress_latency = args.fast ? 1 : args.latency;
    for (size_t i = 0; i + 1 < args.uart_rx.size(); i += 2)
        m.uart_rx.push_back(
            static_cast<uint8_t>(std::stoul(args.uart_rx.substr(i, 2), nullptr, 16)));

    RunOptions opts;
    opts.max_cycles = args.max_cycles;
    if (args.stop_after_tx) opts.stop_after_tx = args.stop_after_tx;
    const RunReport report = m.run(opts);

    int exit_code = 2;
    switch (report.stop) {
        case RunReport::Stop::Park:
            if (report.pc == kPassParkAddr) {
                std::printf("PASS (pc=0x%04x)\n", report.pc);
                exit_code = 0;
            } else {
                std::printf("FAIL (pc=0x%04x)\n", report.pc);
                exit_code = 1;
            }
            break;
        case RunReport::Stop::Halt:
            std::printf("halt\n");
            exit_code = 0;
            break;
        case RunReport::Stop::Trap:
            std::printf("trap: %s (pc=0x%04x)\n", trap_name(report.trap), report.pc);
            break;
        case RunReport::Stop::MaxCycles:
            std::printf("max cycles reached\n");
            break;
        case RunReport::Stop::TxCount:
            std::printf("tx limit reached\n");
            exit_code = 0;
            break;
        case RunReport::Stop::Breakpoint:
            std::printf("breakpoint (pc=0x%04x)\n", report.pc);
            exit_code = 0;
            break;
    }
    std::printf("cycles: %llu\n", static_cast<unsigned long long>(report.cycles));
    print_tx(m.uart_tx);

    for (const std::string& range : args.dump_dm) {
        const size_t colon = range.find(':');
        if (colon == std::string::npos) throw std::runtime_error("--dump-dm wants START:END");
        const uint32_t start = std::stoul(range.substr(0, colon), nullptr, 0);
        const uint32_t end = std::stoul(range.substr(colon + 1), nullptr, 0);
        if (start > end || end >= kDataMemWords) throw std::runtime_error("bad --dump-dm range");
        for (uint32_t a = start; a <= end; ++a)
            std::fputs(hex_line(a, m.dm[a], 8).c_str(), stdout);
    }
    return exit_code;
}

int cmd_classify(const std::string& frame_path, const std::string& weights_path,
                 const std::string& firmware_path, const std::string& trace_path,
                 bool fast, uint64_t latency) {
    const ProgramImage program = assemble_or_die(firmware_path);
    Machine m;
    m.load_program(program.words);
    m.load_weights(parse_hex_image(read_file(weights_path), 8, kWeightRomWords));
    load_frame_file(m, frame_path);
    m.compress_latency = fast ? 1 : latency;

    const ClassificationResult result = run_one_classification(m, program);
    if (!trace_path.empty()) write_file(trace_path, write_trace(result.trace));
    std::printf("predicted: %c\n", result.trace.ascii);
    std::printf("cycles: %llu\n", static_cast<unsigned long long>(result.cycles));
    return 0;
}

int cmd_selftest(const std::string& dir, uint64_t max_cycles) {
    std::vector<fs::path> files;
    if (fs::exists(dir))
        for (const auto& entry : fs::directory_iterator(dir))
            if (entry.path().extension() == ".asm") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) {
        std::printf("0 tests in %s\n", dir.c_str());
        return 0;
    }

    int failures = 0;
    for (const auto& path : files) {
        std::string verdict;
        const auto result = assemble(read_file(path.string()));
        if (!result.ok()) {
            verdict = "ASSEMBLY ERROR";
        } else {
            Machine m;
            m.load_program(result.image->words);
            m.compress_latency = 1;
            RunOptions opts;
            opts.max_cycles = max_cycles;
            const RunReport report = m.run(opts);
            if (report.stop == RunReport::Stop::Park && report.pc == kPassParkAddr)
                verdict = "PASS";
            else if (report.stop == RunReport::Stop::Park && report.pc == kFailParkAddr)
                verdict = "FAIL";
            else if (report.stop == RunReport::Stop::Trap)
                verdict = std::string("TRAP (") + trap_name(report.trap) + ")";
            else
                verdict = "NO VERDICT";
        }
        if (verdict != "PASS") ++failures;
        std::printf("%-28s %s\n", path.filename().string().c_str(), verdict.c_str());
    }
    std::printf("%zu test%s, %d failure%s\n", files.size(), files.size() == 1 ? "" : "s",
                failures, failures == 1 ? "" : "s");
    return failures ? 1 : 0;
}

int cmd_golden(uint64_t seed, const std::string& frame_path, const std::string& out_dir) {
    fs::create_directories(out_dir);
    const WeightBank weights = gen_weights(seed);

    GrayFrame frame = fixture_frame(seed);
    if (!frame_path.empty()) {
        const std::string content = read_file(frame_path);
        frame = content.size() == kFramePixels
                    ? GrayFrame::from_bytes(std::vector<uint8_t>(content.begin(), content.end()))
                    : frame_from_hex(content);
    }
    const auto image = compress_to_image_mem(frame);

    const fs::path dir(out_dir);
    write_file((dir / "weights.hex").string(), write_weight_hex(weights));
    write_file((dir / "image.hex").string(), write_image_hex(image));
    write_file((dir / "trace_soft.txt").string(), write_trace(forward_soft(image, weights)));
    write_file((dir / "trace_native.txt").string(), write_trace(forward_native(image, weights)));
    std::printf("wrote weights.hex, image.hex, trace_soft.txt, trace_native.txt to %s\n",
                out_dir.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fpr32: assembler, emulator and golden model for the FP RISC toolchain"};
    app.require_subcommand(1);

    // asm
    std::string asm_src, asm_out;
    auto* sub_asm = app.add_subcommand("asm", "assemble a source file to instruction hex");
    sub_asm->add_option("source", asm_src, "assembly source file")->required();
    sub_asm->add_option("output", asm_out, "output hex file")->required();

    // run
    RunArgs run_args;
    auto* sub_run = app.add_subcommand("run", "run a program on the emulator");
    sub_run->add_option("program", run_args.program, "program (.asm source or .hex image)")
        ->required();
    sub_run->add_option("--weights", run_args.weights, "weight ROM hex file");
    sub_run->add_option("--frame", run_args.frame,
                        "camera frame (raw 50176 bytes, frame hex, or image hex)");
    sub_run->add_option("--switches", run_args.switches, "switch inputs (10 bits)");
    sub_run->add_option("--latency", run_args.latency, "compression latency in cycles");
    sub_run->add_flag("--fast", run_args.fast, "compression latency 1");
    sub_run->add_option("--max-cycles", run_args.max_cycles, "cycle limit");
    sub_run->add_option("--dump-dm", run_args.dump_dm, "dump DM range START:END after the run");
    sub_run->add_option("--stop-after-tx", run_args.stop_after_tx,
                        "stop once this many UART bytes have been sent");
    sub_run->add_option("--uart-rx", run_args.uart_rx, "hex byte string fed to the receive queue");

    // classify
    std::string cl_frame, cl_weights, cl_firmware = "firmware/cnn_main.asm", cl_trace;
    bool cl_fast = false;
    uint64_t cl_latency = kCompressLatencyCycles;
    auto* sub_classify =
        app.add_subcommand("classify", "compress a frame and classify it with the CNN firmware");
    sub_classify->add_option("--frame", cl_frame, "camera frame file")->required();
    sub_classify->add_option("--weights", cl_weights, "weight ROM hex file")->required();
    sub_classify->add_option("--firmware", cl_firmware, "CNN firmware source");
    sub_classify->add_option("--trace-out", cl_trace, "write the emulator trace dump here");
    sub_classify->add_flag("--fast", cl_fast, "compression latency 1");
    sub_classify->add_option("--latency", cl_latency, "compression latency in cycles");

    // selftest
    std::string st_dir = "firmware/tests";
    uint64_t st_max_cycles = 10000;
    auto* sub_selftest =
        app.add_subcommand("selftest", "assemble and run every self-checking test");
    sub_selftest->add_option("--dir", st_dir, "test directory");
    sub_selftest->add_option("--max-cycles", st_max_cycles, "cycle limit per test");

    // golden
    uint64_t gd_seed = 42;
    std::string gd_frame, gd_out = ".";
    auto* sub_golden =
        app.add_subcommand("golden", "emit golden-model weights, image and trace dumps");
    sub_golden->add_option("--seed", gd_seed, "weight/fixture seed");
    sub_golden->add_option("--frame", gd_frame, "frame file (default: fixture from seed)");
    sub_golden->add_option("--out-dir", gd_out, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sub_asm->parsed()) {
            const ProgramImage image = assemble_or_die(asm_src);
            write_file(asm_out, emit_hex(image));
            std::printf("%s: %zu words\n", asm_out.c_str(), image.words.size());
            return 0;
        }
        if (sub_run->parsed()) return cmd_run(run_args);
        if (sub_classify->parsed())
            return cmd_classify(cl_frame, cl_weights, cl_firmware, cl_trace, cl_fast, cl_latency);
        if (sub_selftest->parsed()) return cmd_selftest(st_dir, st_max_cycles);
        if (sub_golden->parsed()) return cmd_golden(gd_seed, gd_frame, gd_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
