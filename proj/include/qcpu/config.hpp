#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "qcpu/gates.hpp"

namespace qcpu {

/// Register geometry of the gate array: n data qubits and m angle-code bits.
/// Fixes the angle grid ξ = 2π/2^m and the program register layout
/// |b_n⟩|p_n⟩…|b_2⟩|p_2⟩|a_m⟩…|a_1⟩|r⟩ (leftmost qubit first; with the
/// qubit-0-is-MSB convention a program basis state reads exactly as that
/// bit list). In a joint state the data qubits d_1…d_n follow the program
/// register.
struct QcpuConfig {
    int n = 1;
    int m = 1;

    QcpuConfig() = default;

    QcpuConfig(int n_, int m_) : n(n_), m(m_) {
        if (n < 1 || n > 30)
            throw std::invalid_argument("QcpuConfig: n must be in 1..30");
        if (m < 1 || m > 62)
            throw std::invalid_argument("QcpuConfig: m must be in 1..62");
    }

    /// Angle grid spacing ξ = 2π/2^m, radians. ξ·2^m reproduces 2π exactly.
    double xi() const { return std::ldexp(kTwoPi, -m); }

    std::uint64_t code_count() const { return std::uint64_t{1} << m; }

    int program_width() const { return 1 + m + 2 * (n - 1); }
    int total_width() const { return program_width() + n; }

    /// Qubit position of the axis-select bit r (rightmost program qubit).
    int qubit_r() const { return program_width() - 1; }

    /// Qubit position of angle bit a_i, i in 1..m (a_m is leftmost of the block).
    int qubit_a(int i) const {
        if (i < 1 || i > m)
            throw std::out_of_range("QcpuConfig: angle bit index " + std::to_string(i) +
                                    " outside 1.." + std::to_string(m));
        return 2 * (n - 1) + (m - i);
    }

    /// Qubit position of the CNOT-enable bit b_k, k in 2..n.
    int qubit_b(int k) const {
        check_pair_index(k);
        return 2 * (n - k);
    }

    /// Qubit position of the CNOT control-select bit p_k, k in 2..n.
    int qubit_p(int k) const {
        check_pair_index(k);
        return 2 * (n - k) + 1;
    }

    /// Qubit position of data qubit d_j, j in 1..n, within a joint state.
    int qubit_d(int j) const {
        if (j < 1 || j > n)
            throw std::out_of_range("QcpuConfig: data index " + std::to_string(j) +
                                    " outside 1.." + std::to_string(n));
        return program_width() + (j - 1);
    }

    bool operator==(const QcpuConfig&) const = default;

private:
    void check_pair_index(int k) const {
        if (k < 2 || k > n)
            throw std::out_of_range("QcpuConfig: pair index " + std::to_string(k) +
                                    " outside 2.." + std::to_string(n));
    }
};

} // namespace qcpu
