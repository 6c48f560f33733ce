#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qcpu/errors.hpp"
#include "qcpu/gates.hpp"

namespace qcpu {

// A branch whose probability falls below this is never selected by measure().
inline constexpr double kBranchThreshold = 1e-15;

/// Seedable random source. All randomness in the library flows through this
/// type so that identical seeds give bit-identical runs; the Gaussian variate
/// is hand-rolled Box-Muller to stay independent of the standard library's
/// distribution internals.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Standard normal variate (Box-Muller).
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0)
            u1 = uniform();
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        spare_ = radius * std::sin(kTwoPi * u2);
        have_spare_ = true;
        return radius * std::cos(kTwoPi * u2);
    }

    /// Deterministically derived child seed (for independent sub-streams).
    std::uint64_t next_seed() { return engine_(); }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

/// Normalized complex amplitude vector over 2^num_qubits basis states.
/// Convention used everywhere in this project: qubit 0 is the MOST significant
/// bit of the basis index, so a register written left-to-right as |q0 q1 ...⟩
/// reads exactly as the binary expansion of the index.
struct Statevector {
    int num_qubits = 0;
    std::vector<cdouble> amplitudes;

    Statevector() = default;

    Statevector(int num_qubits_, std::vector<cdouble> amplitudes_)
        : num_qubits(num_qubits_), amplitudes(std::move(amplitudes_)) {
        if (num_qubits < 1 || num_qubits > 30)
            throw std::invalid_argument("Statevector: qubit count out of range");
        if (amplitudes.size() != (std::size_t{1} << num_qubits))
            throw std::invalid_argument("Statevector: amplitude count is not 2^num_qubits");
    }

    std::size_t size() const { return amplitudes.size(); }

    static Statevector zero(int num_qubits) { return basis(num_qubits, 0); }

    static Statevector basis(int num_qubits, std::uint64_t index) {
        if (num_qubits < 1 || num_qubits > 30)
            throw std::invalid_argument("Statevector: qubit count out of range");
        if (index >= (std::uint64_t{1} << num_qubits))
            throw std::out_of_range("Statevector: basis index out of range");
        std::vector<cdouble> amps(std::size_t{1} << num_qubits);
        amps[index] = 1.0;
        return {num_qubits, std::move(amps)};
    }

    double norm() const {
        double s = 0.0;
        for (const cdouble& a : amplitudes)
            s += std::norm(a);
        return std::sqrt(s);
    }

    void normalize() {
        const double n = norm();
        if (n < kBranchThreshold)
            throw std::invalid_argument("Statevector: cannot normalize a null vector");
        for (cdouble& a : amplitudes)
            a /= n;
    }

    bool operator==(const Statevector&) const = default;
};

/// Largest per-amplitude modulus difference.
inline double max_amplitude_distance(const Statevector& a, const Statevector& b) {
    if (a.num_qubits != b.num_qubits)
        throw std::invalid_argument("max_amplitude_distance: dimension mismatch");
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        worst = std::max(worst, std::abs(a.amplitudes[i] - b.amplitudes[i]));
    return worst;
}

/// Applies `gate` in place on the listed qubits; the first listed qubit is the
/// most significant bit of the gate's basis ordering. All other qubits are
/// untouched. Gate arity is limited to 4 (the widest element gate).
inline void apply_gate_in_place(Statevector& state, const GateMatrix& gate,
                                std::span<const int> targets) {
    const int q = state.num_qubits;
    const int arity = gate.arity;
    if (arity > 4)
        throw std::invalid_argument("apply_gate: arity above 4 is not applicable to states");
    if (static_cast<std::size_t>(arity) != targets.size())
        throw std::invalid_argument("apply_gate: arity does not match target count");

    std::array<std::uint64_t, 4> bit{};
    std::uint64_t target_mask = 0;
    for (int j = 0; j < arity; ++j) {
        const int t = targets[j];
        if (t < 0 || t >= q)
            throw std::out_of_range("apply_gate: qubit index out of range");
        bit[j] = std::uint64_t{1} << (q - 1 - t);
        if (target_mask & bit[j])
            throw std::invalid_argument("apply_gate: duplicate target qubit");
        target_mask |= bit[j];
    }

    const std::size_t gdim = gate.dim();
    std::array<std::uint64_t, 16> offset{};
    for (std::size_t g = 0; g < gdim; ++g)
        for (int j = 0; j < arity; ++j)
            if ((g >> (arity - 1 - j)) & 1)
                offset[g] |= bit[j];

    std::array<cdouble, 16> gathered{};
    const std::uint64_t total = state.size();
    for (std::uint64_t base = 0; base < total; ++base) {
        if (base & target_mask)
            continue;
        bool occupied = false;
        for (std::size_t g = 0; g < gdim; ++g) {
            gathered[g] = state.amplitudes[base | offset[g]];
            occupied |= gathered[g] != cdouble{};
        }
        if (!occupied)
            continue;
        for (std::size_t g = 0; g < gdim; ++g) {
            cdouble acc{};
            for (std::size_t h = 0; h < gdim; ++h)
                acc += gate.at(g, h) * gathered[h];
            state.amplitudes[base | offset[g]] = acc;
        }
    }
}

inline Statevector apply_gate(Statevector state, const GateMatrix& gate,
                              std::span<const int> targets) {
    apply_gate_in_place(state, gate, targets);
    return state;
}

inline Statevector apply_gate(Statevector state, const GateMatrix& gate,
                              std::initializer_list<int> targets) {
    apply_gate_in_place(state, gate, std::span<const int>(targets.begin(), targets.size()));
    return state;
}

/// Full-width dense matrix-vector product (for materialized operators).
inline Statevector apply_matrix(const GateMatrix& m, const Statevector& state) {
    if (m.arity != state.num_qubits)
        throw std::invalid_argument("apply_matrix: dimension mismatch");
    const std::size_t d = m.dim();
    std::vector<cdouble> out(d);
    for (std::size_t i = 0; i < d; ++i) {
        cdouble acc{};
        for (std::size_t j = 0; j < d; ++j)
            acc += m.at(i, j) * state.amplitudes[j];
        out[i] = acc;
    }
    return {state.num_qubits, std::move(out)};
}

/// Projective measurement of the listed qubits in the computational basis.
/// Outcomes are sampled with Born probabilities, qubit by qubit in the order
/// given; the returned state is collapsed and renormalized. Deterministic for
/// a fixed Rng state. Branches below kBranchThreshold are unselectable.
inline std::pair<std::string, Statevector> measure(Statevector state,
                                                   std::span<const int> qubits, Rng& rng) {
    const int q = state.num_qubits;
    std::uint64_t seen = 0;
    for (const int t : qubits) {
        if (t < 0 || t >= q)
            throw std::out_of_range("measure: qubit index out of range");
        const std::uint64_t b = std::uint64_t{1} << t;
        if (seen & b)
            throw std::invalid_argument("measure: duplicate qubit index");
        seen |= b;
    }

    std::string outcome;
    outcome.reserve(qubits.size());
    for (const int t : qubits) {
        const std::uint64_t bit = std::uint64_t{1} << (q - 1 - t);
        double p_one = 0.0, p_total = 0.0;
        for (std::uint64_t i = 0; i < state.size(); ++i) {
            const double w = std::norm(state.amplitudes[i]);
            p_total += w;
            if (i & bit)
                p_one += w;
        }
        int bit_value;
        if (p_one < kBranchThreshold * p_total)
            bit_value = 0;
        else if (p_total - p_one < kBranchThreshold * p_total)
            bit_value = 1;
        else
            bit_value = rng.uniform() < p_one / p_total ? 1 : 0;

        const double kept = bit_value ? p_one : p_total - p_one;
        const double scale = 1.0 / std::sqrt(kept);
        for (std::uint64_t i = 0; i < state.size(); ++i) {
            if (((i & bit) != 0) == (bit_value != 0))
                state.amplitudes[i] *= scale;
            else
                state.amplitudes[i] = 0.0;
        }
        outcome.push_back(static_cast<char>('0' + bit_value));
    }
    return {std::move(outcome), std::move(state)};
}

inline std::pair<std::string, Statevector> measure(const Statevector& state,
                                                   std::initializer_list<int> qubits,
                                                   Rng& rng) {
    return measure(state, std::span<const int>(qubits.begin(), qubits.size()), rng);
}

/// |⟨reference|state⟩|².
inline double projection_probability(const Statevector& state, const Statevector& reference) {
    if (state.num_qubits != reference.num_qubits)
        throw std::invalid_argument("projection_probability: dimension mismatch");
    cdouble inner{};
    for (std::size_t i = 0; i < state.size(); ++i)
        inner += std::conj(reference.amplitudes[i]) * state.amplitudes[i];
    return std::norm(inner);
}

/// 17-significant-digit decimal; round-trips doubles exactly. Negative zero is
/// canonicalized so equal states serialize identically.
inline std::string format_double(double value) {
    if (value == 0.0)
        value = 0.0;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

/// Text serialization: header "qubits=<q>", then one line per amplitude,
/// "index real imag", indices ascending from 0.
inline std::string write_statevector(const Statevector& state) {
    std::string out = "qubits=" + std::to_string(state.num_qubits) + "\n";
    for (std::size_t i = 0; i < state.size(); ++i) {
        out += std::to_string(i);
        out += ' ';
        out += format_double(state.amplitudes[i].real());
        out += ' ';
        out += format_double(state.amplitudes[i].imag());
        out += '\n';
    }
    return out;
}

namespace detail {

inline std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) {
            if (start < text.size())
                lines.push_back(text.substr(start));
            break;
        }
        lines.push_back(text.substr(start, end - start));
        start = end + 1;
    }
    return lines;
}

inline double parse_double(std::string_view token, std::size_t line) {
    try {
        std::size_t used = 0;
        const double v = std::stod(std::string(token), &used);
        if (used != token.size())
            throw ParseError("trailing characters in number '" + std::string(token) + "'", line);
        return v;
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception&) {
        throw ParseError("malformed number '" + std::string(token) + "'", line);
    }
}

inline std::uint64_t parse_uint(std::string_view token, std::size_t line) {
    if (token.empty() || token[0] == '-' || token[0] == '+')
        throw ParseError("malformed integer '" + std::string(token) + "'", line);
    try {
        std::size_t used = 0;
        const std::uint64_t v = std::stoull(std::string(token), &used);
        if (used != token.size())
            throw ParseError("trailing characters in integer '" + std::string(token) + "'",
                             line);
        return v;
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception&) {
        throw ParseError("malformed integer '" + std::string(token) + "'", line);
    }
}

inline std::vector<std::string> tokenize(std::string_view line) {
    std::vector<std::string> tokens;
    std::istringstream in{std::string(line)};
    std::string tok;
    while (in >> tok)
        tokens.push_back(tok);
    return tokens;
}

} // namespace detail

inline Statevector read_statevector(std::string_view text) {
    const auto lines = detail::split_lines(text);
    if (lines.empty())
        throw ParseError("empty state file");
    const std::string_view header = lines[0];
    if (!header.starts_with("qubits="))
        throw ParseError("expected header 'qubits=<q>'", 1);
    const std::uint64_t q = detail::parse_uint(header.substr(7), 1);
    if (q < 1 || q > 30)
        throw ParseError("qubit count out of range", 1);
    const std::size_t dim = std::size_t{1} << q;
    if (lines.size() != dim + 1)
        throw ParseError("expected " + std::to_string(dim) + " amplitude lines, found " +
                         std::to_string(lines.size() - 1));
    std::vector<cdouble> amps(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        const std::size_t lineno = i + 2;
        const auto tokens = detail::tokenize(lines[i + 1]);
        if (tokens.size() != 3)
            throw ParseError("expected 'index real imag'", lineno);
        if (detail::parse_uint(tokens[0], lineno) != i)
            throw ParseError("amplitude index out of order", lineno);
        amps[i] = {detail::parse_double(tokens[1], lineno),
                   detail::parse_double(tokens[2], lineno)};
    }
    return {static_cast<int>(q), std::move(amps)};
}

inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ull;
    }
    return h;
}

/// Order- and value-sensitive digest of a state's serialized form.
inline std::uint64_t state_checksum(const Statevector& state) {
    return fnv1a64(write_statevector(state));
}

} // namespace qcpu
