#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "qcpu/config.hpp"
#include "qcpu/errors.hpp"

namespace qcpu {

/// Per-adjacent-pair CNOT controls: b enables the gate on (d_{k-1}, d_k),
/// p selects the control qubit (0 → d_{k-1}, 1 → d_k).
struct CnotPair {
    int b = 0;
    int p = 0;

    bool operator==(const CnotPair&) const = default;
};

/// Structured form of one program-register bit list: axis bit r (0 = x,
/// 1 = z), angle code alpha (alpha_1 is the least significant bit), and the
/// (b_k, p_k) pair for every adjacent data pair. pairs[k-2] holds pair k.
struct Instruction {
    int r = 0;
    std::uint64_t alpha = 0;
    std::vector<CnotPair> pairs;

    bool operator==(const Instruction&) const = default;
};

inline void validate_instruction(const Instruction& instr, const QcpuConfig& config) {
    if (instr.r != 0 && instr.r != 1)
        throw std::invalid_argument("Instruction: r must be 0 or 1");
    if (instr.alpha >= config.code_count())
        throw std::invalid_argument("Instruction: angle code out of range for m=" +
                                    std::to_string(config.m));
    if (instr.pairs.size() != static_cast<std::size_t>(config.n - 1))
        throw std::invalid_argument("Instruction: pair count does not match n=" +
                                    std::to_string(config.n));
    for (const CnotPair& pair : instr.pairs)
        if ((pair.b != 0 && pair.b != 1) || (pair.p != 0 && pair.p != 1))
            throw std::invalid_argument("Instruction: pair bits must be 0 or 1");
}

inline Instruction nop_instruction(const QcpuConfig& config) {
    Instruction instr;
    instr.pairs.resize(config.n - 1);
    return instr;
}

/// Rotation about the x axis (axis_r = 0) or z axis (axis_r = 1) by code alpha.
inline Instruction rotation_instruction(const QcpuConfig& config, int axis_r,
                                        std::uint64_t alpha) {
    Instruction instr = nop_instruction(config);
    instr.r = axis_r;
    instr.alpha = alpha;
    validate_instruction(instr, config);
    return instr;
}

/// CNOT between adjacent data qubits, 1-based indices, control_d ≠ target_d.
inline Instruction cnot_instruction(const QcpuConfig& config, int control_d, int target_d) {
    if (control_d < 1 || control_d > config.n || target_d < 1 || target_d > config.n)
        throw std::out_of_range("cnot_instruction: data index outside 1.." +
                                std::to_string(config.n));
    if (control_d - target_d != 1 && target_d - control_d != 1)
        throw std::invalid_argument("cnot_instruction: data qubits must be adjacent");
    Instruction instr = nop_instruction(config);
    const int k = control_d > target_d ? control_d : target_d;
    instr.pairs[k - 2] = {1, control_d > target_d ? 1 : 0};
    return instr;
}

/// Bit list of the instruction, left to right: b_n p_n … b_2 p_2 a_m … a_1 r.
inline std::string encode(const Instruction& instr, const QcpuConfig& config) {
    validate_instruction(instr, config);
    std::string bits;
    bits.reserve(config.program_width());
    for (int k = config.n; k >= 2; --k) {
        bits.push_back(static_cast<char>('0' + instr.pairs[k - 2].b));
        bits.push_back(static_cast<char>('0' + instr.pairs[k - 2].p));
    }
    for (int i = config.m; i >= 1; --i)
        bits.push_back(static_cast<char>('0' + ((instr.alpha >> (i - 1)) & 1)));
    bits.push_back(static_cast<char>('0' + instr.r));
    return bits;
}

/// Exact inverse of encode.
inline Instruction decode(std::string_view bits, const QcpuConfig& config) {
    if (bits.size() != static_cast<std::size_t>(config.program_width()))
        throw ParseError("instruction has " + std::to_string(bits.size()) +
                         " bits, expected " + std::to_string(config.program_width()));
    for (const char c : bits)
        if (c != '0' && c != '1')
            throw ParseError(std::string("non-binary character '") + c + "' in instruction");
    Instruction instr = nop_instruction(config);
    std::size_t pos = 0;
    for (int k = config.n; k >= 2; --k) {
        instr.pairs[k - 2].b = bits[pos++] - '0';
        instr.pairs[k - 2].p = bits[pos++] - '0';
    }
    for (int i = config.m; i >= 1; --i)
        instr.alpha |= static_cast<std::uint64_t>(bits[pos++] - '0') << (i - 1);
    instr.r = bits[pos] - '0';
    return instr;
}

/// Rotation angle θ = alpha·2π/2^m, in [0, 2π).
inline double angle_of(const Instruction& instr, const QcpuConfig& config) {
    return static_cast<double>(instr.alpha) * config.xi();
}

/// Basis index of the encoded bit list (qubit 0 is the MSB).
inline std::uint64_t basis_index(const Instruction& instr, const QcpuConfig& config) {
    std::uint64_t index = 0;
    for (const char c : encode(instr, config))
        index = (index << 1) | static_cast<std::uint64_t>(c - '0');
    return index;
}

/// Ordered instruction sequence together with the register geometry it
/// was written for.
struct Program {
    QcpuConfig config;
    std::vector<Instruction> instructions;

    bool operator==(const Program&) const = default;
};

inline void validate_program(const Program& program) {
    for (const Instruction& instr : program.instructions)
        validate_instruction(instr, program.config);
}

} // namespace qcpu
