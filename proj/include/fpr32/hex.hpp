// SPDX-License-Identifier: Apache-2.0
//
// The line-oriented hex image format shared by the assembler, the memory
// loaders and the golden-model dumps:
//
//   @AAAA DDDDDDDD\n      (word files: instruction and weight images)
//   @AAAA DD\n            (byte files: compressed-image dumps)
//
// Addresses are four lowercase hex digits, ascending from 0 with no gaps in
// emitted files; the data field is fixed-width per file kind. The parser
// accepts either letter case but is strict about the shape.

#pragma once

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fpr32 {

struct HexError : std::runtime_error {
    size_t line;
    HexError(size_t line_no, const std::string& what)
        : std::runtime_error("line " + std::to_string(line_no) + ": " + what),
          line(line_no) {}
};

// One "@AAAA <data>" line; data_digits is 8 for word files, 2 for byte files.
inline std::string hex_line(uint32_t address, uint32_t data, int data_digits) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "@%04x %0*x\n", address, data_digits, data);
    return buf;
}

inline std::string emit_hex(const std::vector<uint32_t>& words) {
    std::string out;
    out.reserve(words.size() * 15);
    for (size_t i = 0; i < words.size(); ++i)
        out += hex_line(static_cast<uint32_t>(i), words[i], 8);
    return out;
}

namespace detail {

inline int hex_digit(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

}  // namespace detail

// Parses a hex image into (address, data) pairs in file order. Blank lines
// are permitted; anything else malformed raises HexError with its 1-based
// line number.
inline std::vector<std::pair<uint32_t, uint32_t>> parse_hex(std::string_view text,
                                                            int data_digits) {
    std::vector<std::pair<uint32_t, uint32_t>> out;
    size_t pos = 0;
    size_t line_no = 0;
    while (pos < text.size()) {
        ++line_no;
        size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;

        if (line.size() != static_cast<size_t>(6 + data_digits) || line[0] != '@' ||
            line[5] != ' ')
            throw HexError(line_no, "malformed hex line");

        uint32_t addr = 0;
        for (int i = 1; i <= 4; ++i) {
            const int d = detail::hex_digit(line[i]);
            if (d < 0) throw HexError(line_no, "bad address digit");
            addr = addr << 4 | static_cast<uint32_t>(d);
        }
        uint32_t data = 0;
        for (int i = 6; i < 6 + data_digits; ++i) {
            const int d = detail::hex_digit(line[i]);
            if (d < 0) throw HexError(line_no, "bad data digit");
            data = data << 4 | static_cast<uint32_t>(d);
        }
        out.emplace_back(addr, data);
    }
    return out;
}

// Loader convenience: parse and place words by address into a zero-filled
// image of the given capacity. Addresses at or past the capacity are errors.
inline std::vector<uint32_t> parse_hex_image(std::string_view text, int data_digits,
                                             size_t capacity) {
    std::vector<uint32_t> image(capacity, 0);
    size_t line_no = 0;
    for (const auto& [addr, data] : parse_hex(text, data_digits)) {
        ++line_no;
        if (addr >= capacity) throw HexError(line_no, "address beyond image capacity");
        image[addr] = data;
    }
    return image;
}

}  // namespace fpr32
