#pragma once

#include <cmath>
#include <cstdint>

#include "qcpu/config.hpp"
#include "qcpu/core.hpp"
#include "qcpu/gates.hpp"

namespace qcpu {

// The fixed operator G. One application is a rotation stage on d_1 (element
// gates k = 1..m, ascending) followed by one CNOT stage per adjacent data
// pair (k = 2..n, ascending). Program qubits act as controls only, so G is
// block diagonal over program basis states: G = Σ_p |p⟩⟨p| ⊗ U_p.

/// Three-qubit element gate on (r, a_k, d_1): with a_k set it rotates d_1 by
/// 2^{k-1}·ξ about x (r=0) or z (r=1); with a_k clear it is the identity.
inline GateMatrix rotation_element(const QcpuConfig& config, int k) {
    if (k < 1 || k > config.m)
        throw std::out_of_range("rotation_element: k outside 1.." + std::to_string(config.m));
    const double angle = std::ldexp(1.0, k - 1) * config.xi();
    const GateMatrix rx = rotation_x(angle);
    const GateMatrix rz = rotation_z(angle);
    GateMatrix g = GateMatrix::identity(3);
    for (int d0 = 0; d0 < 2; ++d0)
        for (int d1 = 0; d1 < 2; ++d1) {
            g.at(2 | d0, 2 | d1) = rx.at(d0, d1);         // r=0, a_k=1
            g.at(6 | d0, 6 | d1) = rz.at(d0, d1);         // r=1, a_k=1
        }
    require_unitary(g, 1e-12, "rotation_element");
    return g;
}

/// Four-qubit element gate on (b_k, p_k, d_{k-1}, d_k): identity when b_k is
/// clear; otherwise the CNOT with control d_{k-1} (p_k=0) or d_k (p_k=1).
inline GateMatrix cnot_element() {
    const GateMatrix c1 = cnot_first_control();
    const GateMatrix c2 = cnot_second_control();
    GateMatrix g = GateMatrix::identity(4);
    for (int d0 = 0; d0 < 4; ++d0)
        for (int d1 = 0; d1 < 4; ++d1) {
            g.at(8 | d0, 8 | d1) = c1.at(d0, d1);         // b=1, p=0
            g.at(12 | d0, 12 | d1) = c2.at(d0, d1);       // b=1, p=1
        }
    require_unitary(g, 1e-12, "cnot_element");
    return g;
}

namespace detail {

inline void check_joint_width(const QcpuConfig& config, const Statevector& joint) {
    if (joint.num_qubits != config.total_width())
        throw std::invalid_argument("joint state has " + std::to_string(joint.num_qubits) +
                                    " qubits, expected " +
                                    std::to_string(config.total_width()));
}

} // namespace detail

/// Rotation stage applied in place, with the program register starting at
/// qubit `prog_start` and the data register at `data_start`.
inline void apply_rotation_stage_at(const QcpuConfig& config, Statevector& joint,
                                    int prog_start, int data_start) {
    for (int k = 1; k <= config.m; ++k) {
        const int targets[3] = {prog_start + config.qubit_r(), prog_start + config.qubit_a(k),
                                data_start};
        apply_gate_in_place(joint, rotation_element(config, k), targets);
    }
}

/// CNOT stage k applied in place at the given register offsets.
inline void apply_cnot_stage_at(const QcpuConfig& config, int k, Statevector& joint,
                                int prog_start, int data_start) {
    if (k < 2 || k > config.n)
        throw std::out_of_range("apply_cnot_stage: k outside 2.." + std::to_string(config.n));
    const int targets[4] = {prog_start + config.qubit_b(k), prog_start + config.qubit_p(k),
                            data_start + (k - 2), data_start + (k - 1)};
    apply_gate_in_place(joint, cnot_element(), targets);
}

inline void apply_G_at(const QcpuConfig& config, Statevector& joint, int prog_start,
                       int data_start) {
    apply_rotation_stage_at(config, joint, prog_start, data_start);
    for (int k = 2; k <= config.n; ++k)
        apply_cnot_stage_at(config, k, joint, prog_start, data_start);
}

inline Statevector apply_rotation_stage(const QcpuConfig& config, Statevector joint) {
    detail::check_joint_width(config, joint);
    apply_rotation_stage_at(config, joint, 0, config.program_width());
    return joint;
}

inline Statevector apply_cnot_stage(const QcpuConfig& config, int k, Statevector joint) {
    detail::check_joint_width(config, joint);
    apply_cnot_stage_at(config, k, joint, 0, config.program_width());
    return joint;
}

inline Statevector apply_G(const QcpuConfig& config, Statevector joint) {
    detail::check_joint_width(config, joint);
    apply_G_at(config, joint, 0, config.program_width());
    return joint;
}

/// Dense matrix of G, materialized column by column by running apply_G on
/// every basis state. Guarded to total widths of at most 14 qubits.
inline GateMatrix build_G_dense(const QcpuConfig& config) {
    const int width = config.total_width();
    if (width > 14)
        throw ResourceLimitError("build_G_dense: total width " + std::to_string(width) +
                                 " exceeds the 14-qubit guard");
    GateMatrix g = GateMatrix::zero(width);
    const std::size_t dim = g.dim();
    for (std::size_t col = 0; col < dim; ++col) {
        const Statevector column = apply_G(config, Statevector::basis(width, col));
        for (std::size_t row = 0; row < dim; ++row)
            g.at(row, col) = column.amplitudes[row];
    }
    return g;
}

} // namespace qcpu
