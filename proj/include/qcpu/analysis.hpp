#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qcpu/compiler.hpp"
#include "qcpu/core.hpp"
#include "qcpu/gates.hpp"
#include "qcpu/vm.hpp"

namespace qcpu {

// Tolerance for the bound check: exactly compiled programs still differ from
// the dense ideal by evaluation-path rounding of order 1e-16.
inline constexpr double kBoundSlack = 1e-12;

/// Worst-case change of any projection probability caused by the listed
/// angle errors: 2·Σ|δθ_i|.
inline double deviation_bound(std::span<const double> deltas) {
    double bound = 0.0;
    for (const double d : deltas)
        bound += 2.0 * std::abs(d);
    return bound;
}

/// Haar-uniform random state: i.i.d. Gaussian amplitudes, normalized.
inline Statevector random_statevector(int num_qubits, Rng& rng) {
    std::vector<cdouble> amps(std::size_t{1} << num_qubits);
    for (cdouble& a : amps)
        a = {rng.gaussian(), rng.gaussian()};
    Statevector state{num_qubits, std::move(amps)};
    state.normalize();
    return state;
}

/// Dense operator a program induces on the data register, one hybrid run per
/// basis column.
inline GateMatrix compiled_operator(const QcpuConfig& config, const Program& program) {
    GateMatrix op = GateMatrix::zero(config.n);
    const std::size_t dim = op.dim();
    for (std::size_t col = 0; col < dim; ++col) {
        const Statevector column = run_hybrid(config, program, Statevector::basis(config.n, col));
        for (std::size_t row = 0; row < dim; ++row)
            op.at(row, col) = column.amplitudes[row];
    }
    return op;
}

/// min over global phase φ of max-entry |A − e^{iφ}B|: coarse phase scan plus
/// golden-section refinement. Compiled programs carry no global phase, so this
/// is the honest operator distance.
inline double operator_distance(const GateMatrix& a, const GateMatrix& b) {
    if (a.arity != b.arity)
        throw std::invalid_argument("operator_distance: arity mismatch");
    const auto distance_at = [&](double phi) {
        const cdouble rot = std::polar(1.0, phi);
        double worst = 0.0;
        for (std::size_t i = 0; i < a.entries.size(); ++i)
            worst = std::max(worst, std::abs(a.entries[i] - rot * b.entries[i]));
        return worst;
    };

    constexpr int kGrid = 2048;
    double best_phi = 0.0;
    double best = distance_at(0.0);
    for (int i = 1; i < kGrid; ++i) {
        const double phi = kTwoPi * i / kGrid;
        const double d = distance_at(phi);
        if (d < best) {
            best = d;
            best_phi = phi;
        }
    }

    double lo = best_phi - kTwoPi / kGrid;
    double hi = best_phi + kTwoPi / kGrid;
    constexpr double kInvGolden = 0.6180339887498949;
    double x1 = hi - kInvGolden * (hi - lo);
    double x2 = lo + kInvGolden * (hi - lo);
    double f1 = distance_at(x1);
    double f2 = distance_at(x2);
    for (int iter = 0; iter < 80; ++iter) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - kInvGolden * (hi - lo);
            f1 = distance_at(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + kInvGolden * (hi - lo);
            f2 = distance_at(x2);
        }
    }
    return std::min(best, std::min(f1, f2));
}

/// Measured worst-case deviation of projection probabilities between an ideal
/// operator and a compiled program, over random (|ψ⟩, |φ⟩) pairs.
struct ErrorReport {
    std::vector<double> per_instruction_delta;
    double bound = 0.0;
    double empirical_max_deviation = 0.0;
    double operator_distance = 0.0;
    int samples = 0;
    bool bound_holds = true; // empirical ≤ bound + kBoundSlack
};

inline ErrorReport empirical_deviation(const GateMatrix& ideal,
                                       const CompiledProgram& compiled,
                                       const QcpuConfig& config, int trials,
                                       std::uint64_t seed) {
    if (ideal.arity != config.n)
        throw std::invalid_argument("empirical_deviation: ideal operator is " +
                                    std::to_string(ideal.arity) + "-qubit, data register is " +
                                    std::to_string(config.n));
    if (trials < 1)
        throw std::invalid_argument("empirical_deviation: trials must be at least 1");

    ErrorReport report;
    report.per_instruction_delta = compiled.angle_errors;
    report.bound = deviation_bound(compiled.angle_errors);
    report.samples = trials;

    Rng root(seed);
    for (int t = 0; t < trials; ++t) {
        Rng trial(root.next_seed());
        const Statevector psi = random_statevector(config.n, trial);
        const Statevector phi = random_statevector(config.n, trial);
        const double p_ideal = projection_probability(apply_matrix(ideal, psi), phi);
        const double p_compiled =
            projection_probability(run_hybrid(config, compiled.program, psi), phi);
        report.empirical_max_deviation =
            std::max(report.empirical_max_deviation, std::abs(p_ideal - p_compiled));
    }
    report.operator_distance =
        operator_distance(ideal, compiled_operator(config, compiled.program));
    report.bound_holds = report.empirical_max_deviation <= report.bound + kBoundSlack;
    return report;
}

struct ScalingRow {
    int m = 0;
    double bound = 0.0;
    double empirical = 0.0;
    double operator_distance = 0.0;
};

/// Accuracy of one single-qubit target compiled at each m in m_range. The
/// bound column is the a-priori worst case 2·R·(π/2^m) over the target's R
/// nonzero Euler angles — it dominates the realized 2Σ|δθ|, halves exactly
/// per m step, and vanishes for the identity.
inline std::vector<ScalingRow> scaling_study(const GateMatrix& target,
                                             std::span<const int> m_range, int trials,
                                             std::uint64_t seed) {
    if (m_range.empty())
        throw std::invalid_argument("scaling_study: empty m range");
    if (target.arity != 1)
        throw std::invalid_argument("scaling_study: target must be a single-qubit matrix");

    const EulerZxz angles = decompose_su2(target);
    int nonzero_angles = 0;
    for (const double theta : {angles.delta, angles.gamma, angles.beta}) {
        double w = std::remainder(theta, kTwoPi);
        if (std::abs(w) > 1e-12)
            ++nonzero_angles;
    }

    Rng root(seed);
    std::vector<ScalingRow> rows;
    rows.reserve(m_range.size());
    for (const int m : m_range) {
        const QcpuConfig config(1, m);
        const CompiledProgram compiled =
            compile_gate(config, AbstractGate::unitary1q(target, 1));
        const ErrorReport report =
            empirical_deviation(target, compiled, config, trials, root.next_seed());
        rows.push_back({m, 2.0 * nonzero_angles * std::ldexp(kPi, -m),
                        report.empirical_max_deviation, report.operator_distance});
    }
    return rows;
}

inline std::string format_double12(double value) {
    if (value == 0.0)
        value = 0.0;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return buf;
}

inline std::string scaling_csv(std::span<const ScalingRow> rows) {
    std::string out = "m,bound,empirical,opdist\n";
    for (const ScalingRow& row : rows)
        out += std::to_string(row.m) + "," + format_double12(row.bound) + "," +
               format_double12(row.empirical) + "," + format_double12(row.operator_distance) +
               "\n";
    return out;
}

// Reference-unitary text format: header "qubits=<q>", then one line per entry
// in row-major order, "row col real imag".

inline std::string write_unitary(const GateMatrix& m) {
    std::string out = "qubits=" + std::to_string(m.arity) + "\n";
    for (std::size_t row = 0; row < m.dim(); ++row)
        for (std::size_t col = 0; col < m.dim(); ++col)
            out += std::to_string(row) + " " + std::to_string(col) + " " +
                   format_double(m.at(row, col).real()) + " " +
                   format_double(m.at(row, col).imag()) + "\n";
    return out;
}

inline GateMatrix read_unitary(std::string_view text) {
    const auto lines = detail::split_lines(text);
    if (lines.empty())
        throw ParseError("empty unitary file");
    if (!lines[0].starts_with("qubits="))
        throw ParseError("expected header 'qubits=<q>'", 1);
    const std::uint64_t q = detail::parse_uint(lines[0].substr(7), 1);
    if (q < 1 || q > 15)
        throw ParseError("qubit count out of range", 1);
    GateMatrix m = GateMatrix::zero(static_cast<int>(q));
    const std::size_t dim = m.dim();
    if (lines.size() != dim * dim + 1)
        throw ParseError("expected " + std::to_string(dim * dim) + " entry lines, found " +
                         std::to_string(lines.size() - 1));
    for (std::size_t i = 0; i < dim * dim; ++i) {
        const std::size_t lineno = i + 2;
        const auto tokens = detail::tokenize(lines[i + 1]);
        if (tokens.size() != 4)
            throw ParseError("expected 'row col real imag'", lineno);
        if (detail::parse_uint(tokens[0], lineno) != i / dim ||
            detail::parse_uint(tokens[1], lineno) != i % dim)
            throw ParseError("entry out of row-major order", lineno);
        m.at(i / dim, i % dim) = {detail::parse_double(tokens[2], lineno),
                                  detail::parse_double(tokens[3], lineno)};
    }
    return m;
}

} // namespace qcpu
