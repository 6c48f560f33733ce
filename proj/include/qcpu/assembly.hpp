#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "qcpu/core.hpp"
#include "qcpu/instruction.hpp"

namespace qcpu {

// Assembly text format. One instruction per line:
//
//   qcpu n=2 m=3          mandatory header (first significant line)
//   RX 6                  x rotation, angle code 6
//   RZ 5                  z rotation, angle code 5
//   CNOT 2 1              CNOT, control d_2, target d_1 (adjacent, 1-based)
//   NOP                   all-zero instruction
//   001100                raw bit list of exact program width
//   # comment             '#' starts a comment anywhere on a line
//
// The assembler emits only single-action lines; raw bit lists cover every
// other encodable instruction, so emit/parse round-trips losslessly.

namespace detail {

inline bool is_bit_line(const std::vector<std::string>& tokens) {
    if (tokens.size() != 1)
        return false;
    for (const char c : tokens[0])
        if (c != '0' && c != '1')
            return false;
    return true;
}

struct AsmLine {
    std::size_t number = 0;
    std::vector<std::string> tokens;
};

inline std::vector<AsmLine> significant_lines(std::string_view text) {
    std::vector<AsmLine> out;
    const auto raw = split_lines(text);
    for (std::size_t i = 0; i < raw.size(); ++i) {
        std::string_view line = raw[i];
        if (const std::size_t hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        auto tokens = tokenize(line);
        if (!tokens.empty())
            out.push_back({i + 1, std::move(tokens)});
    }
    return out;
}

inline QcpuConfig parse_header(const AsmLine& line) {
    const auto& t = line.tokens;
    if (t.size() != 3 || t[0] != "qcpu" || !t[1].starts_with("n=") || !t[2].starts_with("m="))
        throw ParseError("expected header 'qcpu n=<n> m=<m>'", line.number);
    const std::uint64_t n = parse_uint(std::string_view(t[1]).substr(2), line.number);
    const std::uint64_t m = parse_uint(std::string_view(t[2]).substr(2), line.number);
    try {
        return QcpuConfig(static_cast<int>(n), static_cast<int>(m));
    } catch (const std::exception& e) {
        throw ParseError(e.what(), line.number);
    }
}

inline Instruction parse_instruction_line(const AsmLine& line, const QcpuConfig& config) {
    const auto& t = line.tokens;
    const std::string& op = t[0];
    try {
        if (op == "NOP") {
            if (t.size() != 1)
                throw ParseError("NOP takes no operands", line.number);
            return nop_instruction(config);
        }
        if (op == "RX" || op == "RZ") {
            if (t.size() != 2)
                throw ParseError(op + " takes one angle code", line.number);
            const std::uint64_t alpha = parse_uint(t[1], line.number);
            if (alpha >= config.code_count())
                throw ParseError("angle code " + t[1] + " out of range for m=" +
                                 std::to_string(config.m), line.number);
            return rotation_instruction(config, op == "RZ" ? 1 : 0, alpha);
        }
        if (op == "CNOT") {
            if (t.size() != 3)
                throw ParseError("CNOT takes control and target data indices", line.number);
            const std::uint64_t c = parse_uint(t[1], line.number);
            const std::uint64_t tgt = parse_uint(t[2], line.number);
            return cnot_instruction(config, static_cast<int>(c), static_cast<int>(tgt));
        }
        if (is_bit_line(t))
            return decode(t[0], config);
    } catch (const ParseError& e) {
        if (e.line())
            throw;
        throw ParseError(e.what(), line.number);
    } catch (const std::exception& e) {
        throw ParseError(e.what(), line.number);
    }
    throw ParseError("unrecognized instruction '" + op + "'", line.number);
}

} // namespace detail

/// Parses assembly text; the register geometry comes from the header line.
inline Program parse_program(std::string_view text) {
    const auto lines = detail::significant_lines(text);
    if (lines.empty())
        throw ParseError("missing header 'qcpu n=<n> m=<m>'");
    Program program;
    program.config = detail::parse_header(lines[0]);
    program.instructions.reserve(lines.size() - 1);
    for (std::size_t i = 1; i < lines.size(); ++i)
        program.instructions.push_back(detail::parse_instruction_line(lines[i], program.config));
    return program;
}

/// Parses assembly text and checks the header against an expected geometry.
inline Program parse_asm(std::string_view text, const QcpuConfig& config) {
    Program program = parse_program(text);
    if (!(program.config == config))
        throw ParseError("program header n=" + std::to_string(program.config.n) +
                         " m=" + std::to_string(program.config.m) +
                         " does not match expected n=" + std::to_string(config.n) +
                         " m=" + std::to_string(config.m));
    return program;
}

/// Emits canonical assembly: mnemonics for single-action instructions, raw
/// bit lists for everything else. parse_asm(emit_asm(p), p.config) == p.
inline std::string emit_asm(const Program& program) {
    validate_program(program);
    std::string out = "qcpu n=" + std::to_string(program.config.n) +
                      " m=" + std::to_string(program.config.m) + "\n";
    for (const Instruction& instr : program.instructions) {
        int pairs_set = 0;
        int pair_k = 0;
        for (std::size_t i = 0; i < instr.pairs.size(); ++i) {
            if (instr.pairs[i].b || instr.pairs[i].p) {
                ++pairs_set;
                pair_k = static_cast<int>(i) + 2;
            }
        }
        const bool single_pair =
            pairs_set == 1 && instr.pairs[pair_k - 2].b == 1 && instr.alpha == 0 && instr.r == 0;
        if (pairs_set == 0 && instr.alpha == 0 && instr.r == 0) {
            out += "NOP\n";
        } else if (pairs_set == 0 && instr.alpha != 0) {
            out += (instr.r ? "RZ " : "RX ") + std::to_string(instr.alpha) + "\n";
        } else if (single_pair) {
            const int control = instr.pairs[pair_k - 2].p ? pair_k : pair_k - 1;
            const int target = instr.pairs[pair_k - 2].p ? pair_k - 1 : pair_k;
            out += "CNOT " + std::to_string(control) + " " + std::to_string(target) + "\n";
        } else {
            out += encode(instr, program.config) + "\n";
        }
    }
    return out;
}

} // namespace qcpu
