#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qcpu/errors.hpp"

namespace qcpu {

using cdouble = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Dense complex matrix over `arity` qubits, row-major, dimension 2^arity.
/// The first qubit a gate acts on corresponds to the most significant bit of
/// the row/column index. Gates applied to statevectors are 1..4 qubits wide
/// (the array's element gates touch at most four qubits); wider instances
/// appear only as dense materializations of whole operators.
struct GateMatrix {
    int arity = 1;
    std::vector<cdouble> entries;

    GateMatrix() : entries(4) {}

    GateMatrix(int arity_, std::vector<cdouble> entries_)
        : arity(arity_), entries(std::move(entries_)) {
        if (arity < 1 || arity > 15)
            throw std::invalid_argument("GateMatrix: arity " + std::to_string(arity) +
                                        " out of range");
        const std::size_t d = std::size_t{1} << arity;
        if (entries.size() != d * d)
            throw std::invalid_argument("GateMatrix: entry count does not match arity");
    }

    std::size_t dim() const { return std::size_t{1} << arity; }

    cdouble& at(std::size_t row, std::size_t col) { return entries[row * dim() + col]; }
    const cdouble& at(std::size_t row, std::size_t col) const {
        return entries[row * dim() + col];
    }

    static GateMatrix zero(int arity) {
        const std::size_t d = std::size_t{1} << arity;
        return {arity, std::vector<cdouble>(d * d)};
    }

    static GateMatrix identity(int arity) {
        GateMatrix g = zero(arity);
        for (std::size_t i = 0; i < g.dim(); ++i)
            g.at(i, i) = 1.0;
        return g;
    }

    bool operator==(const GateMatrix&) const = default;
};

inline GateMatrix matmul(const GateMatrix& a, const GateMatrix& b) {
    if (a.arity != b.arity)
        throw std::invalid_argument("matmul: arity mismatch");
    const std::size_t d = a.dim();
    GateMatrix out = GateMatrix::zero(a.arity);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t k = 0; k < d; ++k) {
            const cdouble aik = a.at(i, k);
            if (aik == cdouble{})
                continue;
            for (std::size_t j = 0; j < d; ++j)
                out.at(i, j) += aik * b.at(k, j);
        }
    return out;
}

inline GateMatrix adjoint(const GateMatrix& a) {
    GateMatrix out = GateMatrix::zero(a.arity);
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < a.dim(); ++j)
            out.at(j, i) = std::conj(a.at(i, j));
    return out;
}

/// Largest entry-wise modulus difference between two equally sized matrices.
inline double max_entry_distance(const GateMatrix& a, const GateMatrix& b) {
    if (a.arity != b.arity)
        throw std::invalid_argument("max_entry_distance: arity mismatch");
    double worst = 0.0;
    for (std::size_t i = 0; i < a.entries.size(); ++i)
        worst = std::max(worst, std::abs(a.entries[i] - b.entries[i]));
    return worst;
}

/// max-norm of M·M† − I; zero for an exactly unitary matrix.
inline double unitarity_defect(const GateMatrix& m) {
    return max_entry_distance(matmul(m, adjoint(m)), GateMatrix::identity(m.arity));
}

inline bool is_unitary(const GateMatrix& m, double tol) { return unitarity_defect(m) <= tol; }

inline void require_unitary(const GateMatrix& m, double tol, const std::string& what) {
    if (!is_unitary(m, tol))
        throw std::invalid_argument(what + ": matrix is not unitary within " +
                                    std::to_string(tol));
}

inline GateMatrix pauli_x() {
    return {1, {0.0, 1.0, 1.0, 0.0}};
}

inline GateMatrix pauli_z() {
    return {1, {1.0, 0.0, 0.0, -1.0}};
}

/// e^{iθσx} = cosθ·I + i·sinθ·σx.
inline GateMatrix rotation_x(double theta) {
    const cdouble c{std::cos(theta), 0.0};
    const cdouble is{0.0, std::sin(theta)};
    GateMatrix g{1, {c, is, is, c}};
    require_unitary(g, 1e-12, "rotation_x");
    return g;
}

/// e^{iθσz} = diag(e^{iθ}, e^{-iθ}).
inline GateMatrix rotation_z(double theta) {
    GateMatrix g{1, {std::polar(1.0, theta), 0.0, 0.0, std::polar(1.0, -theta)}};
    require_unitary(g, 1e-12, "rotation_z");
    return g;
}

/// CNOT on an adjacent pair with the first (most significant) qubit as control.
inline GateMatrix cnot_first_control() {
    GateMatrix g = GateMatrix::identity(2);
    g.at(2, 2) = 0.0;
    g.at(3, 3) = 0.0;
    g.at(2, 3) = 1.0;
    g.at(3, 2) = 1.0;
    return g;
}

/// CNOT on an adjacent pair with the second (least significant) qubit as control.
inline GateMatrix cnot_second_control() {
    GateMatrix g = GateMatrix::identity(2);
    g.at(1, 1) = 0.0;
    g.at(3, 3) = 0.0;
    g.at(1, 3) = 1.0;
    g.at(3, 1) = 1.0;
    return g;
}

inline GateMatrix swap_pair() {
    GateMatrix g = GateMatrix::identity(2);
    g.at(1, 1) = 0.0;
    g.at(2, 2) = 0.0;
    g.at(1, 2) = 1.0;
    g.at(2, 1) = 1.0;
    return g;
}

} // namespace qcpu
