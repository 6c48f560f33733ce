#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "qcpu/assembly.hpp"
#include "qcpu/config.hpp"
#include "qcpu/core.hpp"
#include "qcpu/gates.hpp"
#include "qcpu/instruction.hpp"

namespace qcpu {

/// Circuit primitive: an arbitrary single-qubit unitary on one data qubit,
/// or a CNOT between any two data qubits. Indices are 1-based.
struct AbstractGate {
    enum class Kind { Unitary1Q, Cnot };

    Kind kind = Kind::Cnot;
    int target = 1;
    int control = 1;                            // Cnot only
    GateMatrix matrix = GateMatrix::identity(1); // Unitary1Q only

    static AbstractGate unitary1q(GateMatrix matrix, int target) {
        AbstractGate g;
        g.kind = Kind::Unitary1Q;
        g.target = target;
        g.matrix = std::move(matrix);
        return g;
    }

    static AbstractGate cnot(int control, int target) {
        AbstractGate g;
        g.kind = Kind::Cnot;
        g.control = control;
        g.target = target;
        return g;
    }
};

inline void validate_gate(const AbstractGate& gate, int n) {
    if (gate.kind == AbstractGate::Kind::Unitary1Q) {
        if (gate.target < 1 || gate.target > n)
            throw std::out_of_range("gate target outside 1.." + std::to_string(n));
        if (gate.matrix.arity != 1)
            throw std::invalid_argument("single-qubit gate needs a 2x2 matrix");
        require_unitary(gate.matrix, 1e-10, "single-qubit gate");
    } else {
        if (gate.control < 1 || gate.control > n || gate.target < 1 || gate.target > n)
            throw std::out_of_range("gate index outside 1.." + std::to_string(n));
        if (gate.control == gate.target)
            throw std::invalid_argument("CNOT control equals target");
    }
}

/// Program plus the per-rotation quantization errors δθ and the worst-case
/// probability deviation 2·Σ|δθ| they can cause. angle_errors has one entry
/// per quantized rotation angle, including rotations whose code rounded to 0
/// and were therefore not emitted — their error is real and must be budgeted.
struct CompiledProgram {
    Program program;
    std::vector<double> angle_errors;
    double deviation_bound = 0.0;
};

struct QuantizedAngle {
    std::uint64_t alpha = 0;
    double delta = 0.0; // alpha·ξ − θ, wrapped to (−π, π]
};

/// Nearest point of the grid {j·2π/2^m} to θ (mod 2π); ties go to the
/// smaller code. |delta| ≤ π/2^m always. Angles within rounding noise of a
/// grid point (1e-12, well under any ξ in use) count as exact hits, so
/// grid-aligned rotations quantize with delta = 0 rather than a stray ulp.
inline QuantizedAngle quantize_angle(double theta, int m) {
    if (!std::isfinite(theta))
        throw std::invalid_argument("quantize_angle: non-finite angle");
    if (m < 1 || m > 62)
        throw std::invalid_argument("quantize_angle: m must be in 1..62");

    double wrapped = std::fmod(theta, kTwoPi);
    if (wrapped < 0.0)
        wrapped += kTwoPi;
    const double xi = std::ldexp(kTwoPi, -m);
    const std::uint64_t codes = std::uint64_t{1} << m;

    std::uint64_t below = static_cast<std::uint64_t>(wrapped / xi);
    if (below >= codes)
        below = codes - 1;
    const double dist_below = wrapped - static_cast<double>(below) * xi;
    const double dist_above = xi - dist_below;
    const std::uint64_t above = (below + 1) % codes;

    QuantizedAngle q;
    if (dist_below < dist_above)
        q = {below, -dist_below};
    else if (dist_above < dist_below)
        q = {above, dist_above};
    else
        q = below < above ? QuantizedAngle{below, -dist_below}
                          : QuantizedAngle{above, dist_above};
    if (std::abs(q.delta) < 1e-12 && std::abs(q.delta) < 0.25 * xi)
        q.delta = 0.0;
    return q;
}

/// Z–X–Z Euler angles in the un-halved rotation convention:
/// U = e^{i·phase} · e^{iβσz} · e^{iγσx} · e^{iδσz}
/// (the δ rotation acts first). phase is reported but never compiled.
struct EulerZxz {
    double beta = 0.0;
    double gamma = 0.0;
    double delta = 0.0;
    double phase = 0.0;
};

inline GateMatrix euler_reconstruct(const EulerZxz& angles) {
    GateMatrix u = matmul(rotation_z(angles.beta),
                          matmul(rotation_x(angles.gamma), rotation_z(angles.delta)));
    const cdouble ph = std::polar(1.0, angles.phase);
    for (cdouble& e : u.entries)
        e *= ph;
    return u;
}

inline EulerZxz decompose_su2(const GateMatrix& u) {
    if (u.arity != 1)
        throw std::invalid_argument("decompose_su2: needs a 2x2 matrix");
    require_unitary(u, 1e-10, "decompose_su2");

    const cdouble det = u.at(0, 0) * u.at(1, 1) - u.at(0, 1) * u.at(1, 0);
    EulerZxz angles;
    angles.phase = 0.5 * std::arg(det);

    // Strip the phase; the remainder V is (numerically) in SU(2):
    // V = w·I + i(x·σx + y·σy + z·σz) with real w, x, y, z,
    //   = [[a, b], [-conj(b), conj(a)]], a = w + iz, b = y + ix.
    const cdouble unphase = std::polar(1.0, -angles.phase);
    const cdouble a = 0.5 * (u.at(0, 0) * unphase + std::conj(u.at(1, 1) * unphase));
    const cdouble b = 0.5 * (u.at(0, 1) * unphase - std::conj(u.at(1, 0) * unphase));
    const double w = a.real(), z = a.imag();
    const double y = b.real(), x = b.imag();

    // Pure-axis rotations get their canonical single-angle form (full range,
    // so e.g. e^{i(3π/2)σx} stays one x rotation instead of z·x·z).
    constexpr double kAxisTol = 1e-11;
    if (std::abs(x) < kAxisTol && std::abs(y) < kAxisTol) {
        angles.beta = std::atan2(z, w);
        return angles;
    }
    if (std::abs(y) < kAxisTol && std::abs(z) < kAxisTol) {
        angles.gamma = std::atan2(x, w);
        return angles;
    }

    // Generic case: a = cosγ·e^{i(β+δ)}, b = i·sinγ·e^{i(β−δ)}, γ in [0, π/2].
    angles.gamma = std::atan2(std::abs(b), std::abs(a));
    const double sum = std::abs(a) > 1e-12 ? std::arg(a) : 0.0;
    const double diff = std::abs(b) > 1e-12 ? std::arg(b) - 0.5 * kPi : 0.0;
    angles.beta = 0.5 * (sum + diff);
    angles.delta = 0.5 * (sum - diff);
    return angles;
}

/// Exact SWAP of the adjacent pair (i, i+1) as three CNOTs with alternating
/// control, the middle one controlled by d_{i+1}.
inline Program compile_swap(const QcpuConfig& config, int i) {
    if (i < 1 || i >= config.n)
        throw std::out_of_range("compile_swap: pair (" + std::to_string(i) + "," +
                                std::to_string(i + 1) + ") is not an adjacent data pair");
    Program program{config, {}};
    program.instructions.push_back(cnot_instruction(config, i, i + 1));
    program.instructions.push_back(cnot_instruction(config, i + 1, i));
    program.instructions.push_back(cnot_instruction(config, i, i + 1));
    return program;
}

namespace detail {

inline void append(Program& dst, const Program& src) {
    dst.instructions.insert(dst.instructions.end(), src.instructions.begin(),
                            src.instructions.end());
}

// Swap chain moving data qubit `from` to position `to`, one adjacent swap at
// a time. Emits 3·|from−to| instructions.
inline void append_swap_chain(Program& dst, const QcpuConfig& config, int from, int to) {
    for (int pos = from; pos < to; ++pos)
        append(dst, compile_swap(config, pos));
    for (int pos = from; pos > to; --pos)
        append(dst, compile_swap(config, pos - 1));
}

// Quantizes one Euler rotation; emits the instruction unless the code rounds
// to zero, and records the quantization error either way (a rounded-away
// rotation still perturbs the operator by its full angle).
inline void append_rotation(CompiledProgram& out, const QcpuConfig& config, int axis_r,
                            double theta) {
    const QuantizedAngle q = quantize_angle(theta, config.m);
    if (q.alpha != 0)
        out.program.instructions.push_back(rotation_instruction(config, axis_r, q.alpha));
    if (q.alpha != 0 || q.delta != 0.0)
        out.angle_errors.push_back(q.delta);
}

} // namespace detail

/// Lowers one primitive to instructions. CNOTs between non-adjacent qubits
/// route the control next to the target through a swap chain and restore the
/// data order afterwards; single-qubit unitaries ride a swap chain to d_1,
/// run their quantized Z–X–Z rotations, and ride back.
inline CompiledProgram compile_gate(const QcpuConfig& config, const AbstractGate& gate) {
    validate_gate(gate, config.n);
    CompiledProgram out;
    out.program.config = config;

    if (gate.kind == AbstractGate::Kind::Cnot) {
        const int control = gate.control;
        const int target = gate.target;
        if (control - target == 1 || target - control == 1) {
            out.program.instructions.push_back(cnot_instruction(config, control, target));
        } else {
            const int parked = control < target ? target - 1 : target + 1;
            detail::append_swap_chain(out.program, config, control, parked);
            out.program.instructions.push_back(cnot_instruction(config, parked, target));
            detail::append_swap_chain(out.program, config, parked, control);
        }
    } else {
        const EulerZxz angles = decompose_su2(gate.matrix);
        CompiledProgram rotations;
        rotations.program.config = config;
        detail::append_rotation(rotations, config, 1, angles.delta);
        detail::append_rotation(rotations, config, 0, angles.gamma);
        detail::append_rotation(rotations, config, 1, angles.beta);
        out.angle_errors = std::move(rotations.angle_errors);
        if (!rotations.program.instructions.empty()) {
            detail::append_swap_chain(out.program, config, gate.target, 1);
            detail::append(out.program, rotations.program);
            detail::append_swap_chain(out.program, config, 1, gate.target);
        }
    }

    for (const double d : out.angle_errors)
        out.deviation_bound += 2.0 * std::abs(d);
    return out;
}

/// Concatenation of compile_gate over the circuit; the deviation bound adds
/// up because each quantized angle contributes at most 2|δθ| to any final
/// projection probability.
inline CompiledProgram compile_circuit(const QcpuConfig& config,
                                       const std::vector<AbstractGate>& gates) {
    CompiledProgram out;
    out.program.config = config;
    for (const AbstractGate& gate : gates) {
        CompiledProgram part = compile_gate(config, gate);
        detail::append(out.program, part.program);
        out.angle_errors.insert(out.angle_errors.end(), part.angle_errors.begin(),
                                part.angle_errors.end());
        out.deviation_bound += part.deviation_bound;
    }
    return out;
}

/// Smallest m ≥ 1 with 2·N·(π/2^m) ≤ ε: every one of N quantized angles is
/// off by at most π/2^m, so the total probability deviation stays within ε.
inline int m_required(double instruction_count, double epsilon) {
    if (!(epsilon > 0.0))
        throw std::invalid_argument("m_required: epsilon must be positive");
    if (!(instruction_count >= 1.0))
        throw std::invalid_argument("m_required: instruction count must be at least 1");
    int m = 1;
    while (2.0 * instruction_count * std::ldexp(kPi, -m) > epsilon) {
        if (++m > 1100)
            throw std::invalid_argument("m_required: accuracy target underflows");
    }
    return m;
}

/// Program-register sizing from the data-register width alone, using the
/// worst-case instruction count N(n) = n⁴·4ⁿ for an arbitrary n-qubit
/// computation (a bound-shape estimate with unit constant, not a tight
/// count). asymptotic_m is the closed form 4·log2(n) + 2n − ln(ε).
struct ProgramSizing {
    double instruction_count = 0.0;
    int m = 0;
    double asymptotic_m = 0.0;
};

inline ProgramSizing m_required_for_data_qubits(int n, double epsilon) {
    if (n < 1)
        throw std::invalid_argument("m_required_for_data_qubits: n must be at least 1");
    ProgramSizing sizing;
    sizing.instruction_count = std::pow(static_cast<double>(n), 4) * std::pow(4.0, n);
    sizing.m = m_required(sizing.instruction_count, epsilon);
    sizing.asymptotic_m = 4.0 * std::log2(static_cast<double>(n)) + 2.0 * n -
                          std::log(epsilon);
    return sizing;
}

// Circuit text format. One gate per line, 1-based data indices, '#' comments:
//   U1Q <target> <re00> <im00> <re01> <im01> <re10> <im10> <re11> <im11>
//   CNOT <control> <target>

inline std::vector<AbstractGate> parse_circuit(std::string_view text, int n) {
    std::vector<AbstractGate> gates;
    for (const detail::AsmLine& line : detail::significant_lines(text)) {
        const auto& t = line.tokens;
        try {
            if (t[0] == "CNOT") {
                if (t.size() != 3)
                    throw ParseError("CNOT takes control and target indices", line.number);
                gates.push_back(AbstractGate::cnot(
                    static_cast<int>(detail::parse_uint(t[1], line.number)),
                    static_cast<int>(detail::parse_uint(t[2], line.number))));
            } else if (t[0] == "U1Q") {
                if (t.size() != 10)
                    throw ParseError("U1Q takes a target index and 8 matrix entries",
                                     line.number);
                const int target = static_cast<int>(detail::parse_uint(t[1], line.number));
                std::vector<cdouble> entries(4);
                for (int e = 0; e < 4; ++e)
                    entries[e] = {detail::parse_double(t[2 + 2 * e], line.number),
                                  detail::parse_double(t[3 + 2 * e], line.number)};
                gates.push_back(AbstractGate::unitary1q(GateMatrix{1, std::move(entries)},
                                                        target));
            } else {
                throw ParseError("unrecognized gate '" + t[0] + "'", line.number);
            }
            validate_gate(gates.back(), n);
        } catch (const ParseError& e) {
            if (e.line())
                throw;
            throw ParseError(e.what(), line.number);
        } catch (const std::exception& e) {
            throw ParseError(e.what(), line.number);
        }
    }
    return gates;
}

/// Instruction-count estimate before quantization (rotations are counted even
/// if they later round away), used to size m from an accuracy target.
inline double instruction_estimate(const std::vector<AbstractGate>& gates, int n) {
    double count = 0.0;
    for (const AbstractGate& gate : gates) {
        validate_gate(gate, n);
        if (gate.kind == AbstractGate::Kind::Cnot) {
            const int dist = std::abs(gate.control - gate.target);
            count += dist == 1 ? 1.0 : 6.0 * (dist - 1) + 1.0;
        } else {
            count += 6.0 * (gate.target - 1) + 3.0;
        }
    }
    return count;
}

/// Per-gate instruction counts for the compilation report.
struct GateCost {
    std::string kind;
    int instructions = 0;
};

inline std::vector<GateCost> per_gate_costs(const QcpuConfig& config,
                                            const std::vector<AbstractGate>& gates) {
    std::vector<GateCost> costs;
    costs.reserve(gates.size());
    for (const AbstractGate& gate : gates) {
        const CompiledProgram part = compile_gate(config, gate);
        costs.push_back({gate.kind == AbstractGate::Kind::Cnot ? "CNOT" : "U1Q",
                         static_cast<int>(part.program.instructions.size())});
    }
    return costs;
}

/// Sidecar report for a compilation: per-rotation quantization errors, the
/// resulting bound, the looser all-angles-worst-case form, and per-gate
/// instruction counts against the 3n single-primitive budget (which assumes
/// no restore swaps; this compiler restores data order, so up to ~6n can
/// legitimately occur).
inline std::string compile_report(const QcpuConfig& config, const CompiledProgram& compiled,
                                  const std::vector<GateCost>& costs) {
    std::string out;
    out += "n=" + std::to_string(config.n) + "\n";
    out += "m=" + std::to_string(config.m) + "\n";
    out += "instructions=" + std::to_string(compiled.program.instructions.size()) + "\n";
    out += "quantized_angles=" + std::to_string(compiled.angle_errors.size()) + "\n";
    out += "deviation_bound=" + format_double(compiled.deviation_bound) + "\n";
    const double per_angle_worst =
        2.0 * static_cast<double>(compiled.angle_errors.size()) * std::ldexp(kTwoPi, -config.m);
    out += "per_angle_worst_case_bound=" + format_double(per_angle_worst) + "\n";
    for (std::size_t i = 0; i < compiled.angle_errors.size(); ++i)
        out += "delta " + std::to_string(i + 1) + " " +
               format_double(compiled.angle_errors[i]) + "\n";
    const int budget = 3 * config.n;
    for (std::size_t i = 0; i < costs.size(); ++i) {
        out += "gate " + std::to_string(i + 1) + " kind=" + costs[i].kind +
               " instructions=" + std::to_string(costs[i].instructions) +
               " single_sided_budget=" + std::to_string(budget) +
               (costs[i].instructions > budget ? " exceeds_budget=yes" : " exceeds_budget=no") +
               "\n";
    }
    out += "note=the 3n budget assumes qubits are not swapped back; restore swaps can "
           "double it\n";
    return out;
}

/// Recovers the per-rotation deltas from a compile report's "delta i v" lines.
inline std::vector<double> parse_report_deltas(std::string_view report) {
    std::vector<double> deltas;
    const auto lines = detail::split_lines(report);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto tokens = detail::tokenize(lines[i]);
        if (tokens.size() == 3 && tokens[0] == "delta") {
            if (detail::parse_uint(tokens[1], i + 1) != deltas.size() + 1)
                throw ParseError("delta entries out of order", i + 1);
            deltas.push_back(detail::parse_double(tokens[2], i + 1));
        }
    }
    return deltas;
}

} // namespace qcpu
