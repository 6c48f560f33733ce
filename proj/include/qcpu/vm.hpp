#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <utility>
#include <vector>

#include "qcpu/assembly.hpp"
#include "qcpu/config.hpp"
#include "qcpu/core.hpp"
#include "qcpu/gate_array.hpp"
#include "qcpu/instruction.hpp"

namespace qcpu {

/// Default ceiling on simulated qubits; QCPU_MAX_QUBITS overrides it.
inline int qubit_guard() {
    if (const char* env = std::getenv("QCPU_MAX_QUBITS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1 && v <= 30)
            return static_cast<int>(v);
    }
    return 24;
}

namespace detail {

inline void check_guard(int qubits, const std::string& what) {
    const int guard = qubit_guard();
    if (qubits > guard)
        throw ResourceLimitError(what + " needs " + std::to_string(qubits) +
                                 " qubits, above the guard of " + std::to_string(guard));
}

inline void check_data_width(const QcpuConfig& config, const Statevector& data) {
    if (data.num_qubits != config.n)
        throw std::invalid_argument("data register has " + std::to_string(data.num_qubits) +
                                    " qubits, expected n=" + std::to_string(config.n));
}

} // namespace detail

/// One term per program basis state; weights are complex amplitudes with
/// Σ|w|² = 1. A single unit-weight term is an ordinary (classical) program.
struct ProgramTerm {
    cdouble weight;
    std::string bits;
};

struct ProgramState {
    std::vector<ProgramTerm> terms;

    static ProgramState basis(std::string bits) { return {{{1.0, std::move(bits)}}}; }

    static ProgramState basis(const QcpuConfig& config, const Instruction& instr) {
        return basis(encode(instr, config));
    }

    bool is_basis() const { return terms.size() == 1; }
};

inline void validate_program_state(const ProgramState& state, const QcpuConfig& config) {
    if (state.terms.empty())
        throw std::invalid_argument("ProgramState: no terms");
    double mass = 0.0;
    for (std::size_t i = 0; i < state.terms.size(); ++i) {
        decode(state.terms[i].bits, config); // width and character check
        for (std::size_t j = 0; j < i; ++j)
            if (state.terms[j].bits == state.terms[i].bits)
                throw std::invalid_argument("ProgramState: duplicate bitstring " +
                                            state.terms[i].bits);
        mass += std::norm(state.terms[i].weight);
    }
    if (std::abs(mass - 1.0) > 1e-10)
        throw std::invalid_argument("ProgramState: weights are not normalized");
}

struct TraceStep {
    std::size_t step = 0;       // 1-based
    std::string mode;           // "one", "two" or "hybrid"
    std::string program_bits;
    std::uint64_t data_checksum = 0;
};

/// Per-step execution record; one entry per instruction.
struct RunTrace {
    std::vector<TraceStep> steps;
};

inline std::string write_trace(const RunTrace& trace) {
    std::string out;
    char hex[17];
    for (const TraceStep& s : trace.steps) {
        std::snprintf(hex, sizeof hex, "%016llx",
                      static_cast<unsigned long long>(s.data_checksum));
        out += "step=" + std::to_string(s.step) + " program=" + s.program_bits +
               " checksum=" + hex + "\n";
    }
    return out;
}

/// Mode one: time-sequenced execution on a single gate array. The decoder is
/// modeled as a classical reset of the program register to each instruction's
/// basis state before G runs; the data register is carried forward. The final
/// data state equals U_{P_N}···U_{P_1}|D⟩.
inline std::pair<Statevector, RunTrace> run_mode_one(const QcpuConfig& config,
                                                     const Program& program,
                                                     const Statevector& data) {
    detail::check_data_width(config, data);
    if (!(program.config == config))
        throw std::invalid_argument("run_mode_one: program geometry does not match config");
    validate_program(program);
    detail::check_guard(config.total_width(), "mode one");

    const std::size_t data_dim = data.size();
    Statevector current = data;
    Statevector joint = Statevector::zero(config.total_width());
    RunTrace trace;
    trace.steps.reserve(program.instructions.size());

    std::size_t step = 0;
    for (const Instruction& instr : program.instructions) {
        const std::uint64_t block = basis_index(instr, config) * data_dim;
        std::fill(joint.amplitudes.begin(), joint.amplitudes.end(), cdouble{});
        std::copy(current.amplitudes.begin(), current.amplitudes.end(),
                  joint.amplitudes.begin() + static_cast<std::ptrdiff_t>(block));
        apply_G_at(config, joint, 0, config.program_width());
        std::copy_n(joint.amplitudes.begin() + static_cast<std::ptrdiff_t>(block), data_dim,
                    current.amplitudes.begin());
        trace.steps.push_back(
            {++step, "one", encode(instr, config), state_checksum(current)});
    }
    return {std::move(current), std::move(trace)};
}

/// Mode two: space-sequenced execution. Step j gets a fresh program register
/// (possibly in superposition) and G couples it to the shared data register;
/// registers are never reset, so superposed programs entangle with the data:
/// G((|P₀⟩+|P₁⟩)⊗|D⟩) = |P₀⟩⊗U_{P₀}|D⟩ + |P₁⟩⊗U_{P₁}|D⟩.
/// The joint state orders program registers by step, data register last.
/// The optional trace requires every program state to be a basis state.
inline Statevector run_mode_two(const QcpuConfig& config,
                                const std::vector<ProgramState>& program_states,
                                const Statevector& data, RunTrace* trace = nullptr) {
    detail::check_data_width(config, data);
    if (program_states.empty())
        throw std::invalid_argument("run_mode_two: empty program state list");
    for (const ProgramState& ps : program_states)
        validate_program_state(ps, config);

    const int steps = static_cast<int>(program_states.size());
    const int pw = config.program_width();
    const int total = steps * pw + config.n;
    detail::check_guard(total, "mode two");

    const bool all_basis = [&] {
        for (const ProgramState& ps : program_states)
            if (!ps.is_basis())
                return false;
        return true;
    }();
    if (trace && !all_basis)
        throw std::invalid_argument("run_mode_two: tracing requires basis-state programs");

    // Joint index layout: (((p_1·2^pw + p_2)·2^pw + …)·2^n + d).
    Statevector joint(total, std::vector<cdouble>(std::size_t{1} << total));
    std::vector<std::size_t> term_choice(program_states.size());
    const std::size_t data_dim = data.size();
    for (;;) {
        cdouble weight = 1.0;
        std::uint64_t base = 0;
        for (int j = 0; j < steps; ++j) {
            const ProgramTerm& term = program_states[j].terms[term_choice[j]];
            weight *= term.weight;
            std::uint64_t idx = 0;
            for (const char c : term.bits)
                idx = (idx << 1) | static_cast<std::uint64_t>(c - '0');
            base = (base << pw) | idx;
        }
        base <<= config.n;
        for (std::size_t d = 0; d < data_dim; ++d)
            joint.amplitudes[base | d] = weight * data.amplitudes[d];

        int j = steps - 1;
        while (j >= 0 && ++term_choice[j] == program_states[j].terms.size())
            term_choice[j--] = 0;
        if (j < 0)
            break;
    }

    for (int j = 1; j <= steps; ++j) {
        apply_G_at(config, joint, (j - 1) * pw, steps * pw);
        if (trace) {
            // Basis programs never entangle with the data, so the data block
            // at the known program indices is the exact data marginal.
            std::uint64_t base = 0;
            for (const ProgramState& ps : program_states)
                for (const char c : ps.terms[0].bits)
                    base = (base << 1) | static_cast<std::uint64_t>(c - '0');
            base <<= config.n;
            Statevector marginal(config.n,
                                 {joint.amplitudes.begin() + static_cast<std::ptrdiff_t>(base),
                                  joint.amplitudes.begin() +
                                      static_cast<std::ptrdiff_t>(base + data_dim)});
            trace->steps.push_back({static_cast<std::size_t>(j), "two",
                                    program_states[j - 1].terms[0].bits,
                                    state_checksum(marginal)});
        }
    }
    return joint;
}

/// Hybrid mode: program register in classical bits, data register in qubits.
/// Each instruction selects the active branch of every element gate, so only
/// the n data qubits are ever simulated. Gate for gate this performs the same
/// arithmetic as mode one restricted to the populated program block, making
/// the two modes agree bit for bit.
inline Statevector run_hybrid(const QcpuConfig& config, const Program& program,
                              const Statevector& data, RunTrace* trace = nullptr) {
    detail::check_data_width(config, data);
    if (!(program.config == config))
        throw std::invalid_argument("run_hybrid: program geometry does not match config");
    validate_program(program);
    detail::check_guard(config.n, "hybrid mode");

    Statevector state = data;
    std::size_t step = 0;
    for (const Instruction& instr : program.instructions) {
        for (int k = 1; k <= config.m; ++k) {
            if ((instr.alpha >> (k - 1)) & 1) {
                const double angle = std::ldexp(1.0, k - 1) * config.xi();
                const GateMatrix rot = instr.r ? rotation_z(angle) : rotation_x(angle);
                const int target[1] = {0};
                apply_gate_in_place(state, rot, target);
            }
        }
        for (int k = 2; k <= config.n; ++k) {
            const CnotPair pair = instr.pairs[k - 2];
            if (pair.b) {
                const GateMatrix gate = pair.p ? cnot_second_control() : cnot_first_control();
                const int targets[2] = {k - 2, k - 1};
                apply_gate_in_place(state, gate, targets);
            }
        }
        ++step;
        if (trace)
            trace->steps.push_back({step, "hybrid", encode(instr, config),
                                    state_checksum(state)});
    }
    return state;
}

/// Measurement right after running the array: collapses the listed data
/// qubits (1-based d indices) of either a bare data state or a joint state
/// whose data register sits at the end.
inline std::pair<std::string, Statevector> measure_after(const QcpuConfig& config,
                                                         const Statevector& state,
                                                         const std::vector<int>& data_indices,
                                                         std::uint64_t seed) {
    if (state.num_qubits < config.n)
        throw std::invalid_argument("measure_after: state narrower than the data register");
    std::vector<int> qubits;
    qubits.reserve(data_indices.size());
    for (const int j : data_indices) {
        if (j < 1 || j > config.n)
            throw std::out_of_range("measure_after: data index outside 1.." +
                                    std::to_string(config.n));
        qubits.push_back(state.num_qubits - config.n + (j - 1));
    }
    Rng rng(seed);
    return measure(state, std::span<const int>(qubits), rng);
}

} // namespace qcpu
