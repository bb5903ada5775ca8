#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "qwalk/circuit.hpp"
#include "qwalk/common.hpp"
#include "qwalk/geometry.hpp"
#include "qwalk/simulator.hpp"
#include "qwalk/state_vector.hpp"

namespace qwalk {

// Qubit layout of one walk step. Within each register index 0 is the least
// significant bit; the register map is authoritative for placement.
struct WalkRegisters {
    QubitRange pos_x, pos_y, coin;
    std::uint32_t coin_ancilla = 0;
    std::uint32_t boundary_ancilla = 0;
    std::uint32_t n_qubits = 0;
    std::optional<QubitRange> score;
    std::optional<std::uint32_t> swap_ancilla;

    QubitRange position() const {
        if (pos_y.begin != pos_x.end()) throw std::logic_error("position registers not adjacent");
        return {pos_x.begin, pos_x.size + pos_y.size};
    }

    QubitRange position_and_coin() const {
        const QubitRange pos = position();
        if (coin.begin != pos.end()) throw std::logic_error("coin register not adjacent to position");
        return {pos.begin, pos.size + coin.size};
    }

    RegisterMap to_register_map() const {
        RegisterMap map;
        map.add("position-x", pos_x);
        map.add("position-y", pos_y);
        map.add("coin", coin);
        map.add("coin-ancilla", {coin_ancilla, 1});
        map.add("boundary-ancilla", {boundary_ancilla, 1});
        if (score) map.add("score", *score);
        if (swap_ancilla) map.add("swap-ancilla", {*swap_ancilla, 1});
        return map;
    }
};

inline void validate_walk_registers(const WalkRegisters& regs) {
    if (regs.coin.size != 3) throw std::invalid_argument("coin register must have 3 qubits");
    const RegisterMap map = regs.to_register_map();  // checks pairwise disjointness
    for (const auto& [name, range] : map.entries()) {
        if (range.end() > regs.n_qubits) {
            throw std::invalid_argument("register '" + name + "' exceeds declared qubit count");
        }
    }
}

inline WalkRegisters make_walk_registers(std::uint32_t n_x, std::uint32_t n_y) {
    WalkRegisters regs;
    regs.pos_x = {0, n_x};
    regs.pos_y = {n_x, n_y};
    regs.coin = {n_x + n_y, 3};
    regs.coin_ancilla = n_x + n_y + 3;
    regs.boundary_ancilla = n_x + n_y + 4;
    regs.n_qubits = n_x + n_y + 5;
    return regs;
}

// Adds a score register (same width as position) and a swap-test ancilla.
inline WalkRegisters make_walk_registers_with_score(std::uint32_t n_x, std::uint32_t n_y) {
    WalkRegisters regs = make_walk_registers(n_x, n_y);
    regs.score = QubitRange{regs.n_qubits, n_x + n_y};
    regs.swap_ancilla = regs.n_qubits + n_x + n_y;
    regs.n_qubits += n_x + n_y + 1;
    return regs;
}

namespace detail {

inline std::vector<ControlBit> range_value_controls(QubitRange range, std::uint64_t value) {
    std::vector<ControlBit> controls;
    controls.reserve(range.size);
    for (std::uint32_t i = 0; i < range.size; ++i) {
        controls.push_back({range.begin + i, ((value >> i) & 1u) != 0});
    }
    return controls;
}

// Uniformly-controlled RY cascade loading real nonnegative amplitudes onto a
// register block, most significant qubit first.
inline void append_amplitude_loader(Circuit& circuit, QubitRange block,
                                    const std::vector<double>& amplitudes) {
    const std::uint32_t m = block.size;
    if (amplitudes.size() != (std::uint64_t{1} << m)) {
        throw std::invalid_argument("amplitude vector does not match register size");
    }
    // subtree norms: level d has 2^d nodes over value prefixes (MSB first)
    std::vector<std::vector<double>> norms(m + 1);
    norms[m].assign(amplitudes.begin(), amplitudes.end());
    for (std::uint32_t d = m; d-- > 0;) {
        norms[d].resize(std::size_t{1} << d);
        for (std::size_t p = 0; p < norms[d].size(); ++p) {
            norms[d][p] = std::hypot(norms[d + 1][2 * p], norms[d + 1][2 * p + 1]);
        }
    }
    for (std::uint32_t d = 0; d < m; ++d) {
        for (std::uint64_t p = 0; p < (std::uint64_t{1} << d); ++p) {
            if (norms[d][p] <= 0.0) continue;
            const double theta = 2.0 * std::atan2(norms[d + 1][2 * p + 1], norms[d + 1][2 * p]);
            if (theta == 0.0) continue;
            std::vector<ControlBit> controls;
            for (std::uint32_t i = 0; i < d; ++i) {
                controls.push_back({block.begin + (m - 1 - i), ((p >> (d - 1 - i)) & 1u) != 0});
            }
            const std::uint32_t target = block.begin + (m - 1 - d);
            if (controls.empty()) {
                circuit.ry(target, theta);
            } else {
                circuit.mc_ry(std::move(controls), target, theta);
            }
        }
    }
}

}  // namespace detail

// Prepares sum_c sqrt(w_c / W) |c> on the position register from |0...0>.
// A point source needs only Pauli X gates; a weighted source uses the
// uniformly-controlled rotation loader.
inline Circuit build_source_prep(const GridGeometry& geom, const SourceSpec& source,
                                 const WalkRegisters& regs, std::uint32_t n_qubits = 0) {
    validate_source(geom, source);
    const QubitRange pos = regs.position();
    if (pos.size != geom.n_x() + geom.n_y()) {
        throw std::invalid_argument("position register does not match grid");
    }
    Circuit circuit(std::max(n_qubits, regs.n_qubits));
    if (source.kind == SourceSpec::Kind::Point) {
        const std::uint64_t v = geom.position_basis_index(source.cell);
        for (std::uint32_t i = 0; i < pos.size; ++i) {
            if ((v >> i) & 1u) circuit.x(pos.begin + i);
        }
        return circuit;
    }
    double total = 0.0;
    for (const auto& [cell, w] : source.weights) total += w;
    std::vector<double> amps(std::uint64_t{1} << pos.size, 0.0);
    for (const auto& [cell, w] : source.weights) {
        amps[geom.position_basis_index(cell)] += w / total;
    }
    for (double& a : amps) a = std::sqrt(a);
    detail::append_amplitude_loader(circuit, pos, amps);
    return circuit;
}

// Per-cell diagonal amplitudes d_k over the 8 coin basis states, plus the
// global rescale that keeps every ancilla rotation argument in [0, 1].
// d_k = sqrt(p_k) with p_k the target coin distribution of the cell:
// indices 0..3 (stay) carry p_a/4 each, index 4 = right, 5 = left, 6 = up,
// 7 = down carry p_s/4 each.
struct CoinSpec {
    std::vector<std::array<double, 8>> amplitude;  // by geometry cell index
    double scale = 1.0;

    // cos of the half-angle rotated onto the coin ancilla for (cell, k)
    double rotation_cos(std::uint32_t cell_index, std::uint32_t k) const {
        return std::min(1.0, std::sqrt(8.0 * scale) * amplitude[cell_index][k]);
    }
};

inline CoinSpec coin_spec_from_geometry(const GridGeometry& geom) {
    CoinSpec spec;
    spec.amplitude.resize(geom.n_cells());
    double max_p = 0.0;
    for (std::uint32_t idx = 0; idx < geom.n_cells(); ++idx) {
        const CellProbabilities p = cell_probabilities(geom, geom.cell_at(idx));
        std::array<double, 8> probs{};
        for (int k = 0; k < 4; ++k) probs[k] = p.absorb / 4.0;
        probs[coin_value(Direction::Right)] = p.scatter[static_cast<int>(Direction::Right)];
        probs[coin_value(Direction::Left)] = p.scatter[static_cast<int>(Direction::Left)];
        probs[coin_value(Direction::Up)] = p.scatter[static_cast<int>(Direction::Up)];
        probs[coin_value(Direction::Down)] = p.scatter[static_cast<int>(Direction::Down)];
        for (int k = 0; k < 8; ++k) {
            if (probs[k] < 0.0 || probs[k] > 1.0) {
                throw std::invalid_argument("coin probability outside [0, 1]");
            }
            max_p = std::max(max_p, probs[k]);
            spec.amplitude[idx][k] = std::sqrt(probs[k]);
        }
    }
    spec.scale = 1.0 / (8.0 * max_p);
    return spec;
}

// Position-dependent coin. The operator puts the coin register into uniform
// superposition, then realizes the diagonal amplitude map d_k through a
// rotation of the coin ancilla: |k>|0> -> a|k>|0> + sqrt(1-a^2)|k>|1> with
// a = sqrt(8 * scale) * d_k. Conditioned on coin-ancilla |0>, every position
// basis state ends up with exactly the coin distribution of its cell, and the
// success branch weighs `scale` regardless of the cell.
//
// Gate-level mode emits one multi-controlled rotation per (cell, coin state);
// the fast path applies the same rotations in a single pass over the
// amplitude array.
class PositionCoin {
public:
    enum class Mode { GateLevel, FastPath };

    PositionCoin(const GridGeometry& geom, const WalkRegisters& regs, Mode mode)
        : regs_(regs),
          mode_(mode),
          spec_(coin_spec_from_geometry(geom)),
          n_x_(geom.n_x()),
          n_y_(geom.n_y()) {
        validate_walk_registers(regs);
        if (regs.pos_x.size != n_x_ || regs.pos_y.size != n_y_) {
            throw std::invalid_argument("walk registers do not match grid dimensions");
        }
    }

    const CoinSpec& spec() const { return spec_; }
    double scale() const { return spec_.scale; }
    Mode mode() const { return mode_; }
    const WalkRegisters& registers() const { return regs_; }

    void apply_unitary(StateVector& state) const { apply_impl(state, false); }
    void apply_unitary_inverse(StateVector& state) const { apply_impl(state, true); }

    // Unitary action followed by post-selection of the coin ancilla success
    // branch; returns the branch probability (norm2 is scaled accordingly).
    double apply_postselected(StateVector& state) const {
        apply_unitary(state);
        return state.project({{regs_.coin_ancilla, 0}});
    }

    Circuit as_circuit(std::uint32_t n_qubits = 0) const {
        Circuit circuit(std::max(n_qubits, regs_.n_qubits));
        for (std::uint32_t i = 0; i < 3; ++i) circuit.h(regs_.coin.begin + i);
        const std::uint32_t w = 1u << n_x_;
        const std::uint32_t n_cells = w * (1u << n_y_);
        for (std::uint32_t cell = 0; cell < n_cells; ++cell) {
            const std::uint64_t x = cell % w;
            const std::uint64_t y = cell / w;
            for (std::uint32_t k = 0; k < kCoinStatesPerCell; ++k) {
                const double theta = 2.0 * std::acos(spec_.rotation_cos(cell, k));
                if (theta == 0.0) continue;
                std::vector<ControlBit> controls = detail::range_value_controls(regs_.pos_x, x);
                for (ControlBit c : detail::range_value_controls(regs_.pos_y, y)) controls.push_back(c);
                for (ControlBit c : detail::range_value_controls(regs_.coin, k)) controls.push_back(c);
                circuit.mc_ry(std::move(controls), regs_.coin_ancilla, theta);
            }
        }
        return circuit;
    }

private:
    void apply_impl(StateVector& state, bool inverse) const {
        if (state.n_qubits() < regs_.n_qubits) {
            throw std::invalid_argument("state too small for walk registers");
        }
        if (mode_ == Mode::GateLevel) {
            Circuit c = as_circuit(state.n_qubits());
            if (inverse) c = c.inverse();
            apply_circuit(state, c);
            return;
        }
        if (!inverse) {
            for (std::uint32_t i = 0; i < 3; ++i) state.apply_h(regs_.coin.begin + i);
            fast_rotations(state, false);
        } else {
            fast_rotations(state, true);
            for (std::uint32_t i = 0; i < 3; ++i) state.apply_h(regs_.coin.begin + i);
        }
    }

    void fast_rotations(StateVector& state, bool inverse) const {
        const std::uint64_t anc_bit = std::uint64_t{1} << regs_.coin_ancilla;
        const std::uint64_t x_mask = (std::uint64_t{1} << n_x_) - 1;
        const std::uint64_t y_mask = (std::uint64_t{1} << n_y_) - 1;
        const std::uint32_t w = 1u << n_x_;
        const std::uint64_t dim = state.dim();
        for (std::uint64_t i = 0; i < dim; ++i) {
            if (i & anc_bit) continue;
            const std::uint64_t x = (i >> regs_.pos_x.begin) & x_mask;
            const std::uint64_t y = (i >> regs_.pos_y.begin) & y_mask;
            const std::uint32_t cell = static_cast<std::uint32_t>(x + w * y);
            const std::uint32_t k = static_cast<std::uint32_t>((i >> regs_.coin.begin) & 7u);
            const double c = spec_.rotation_cos(cell, k);
            const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
            Complex& a0 = state.mutable_amplitude(i);
            Complex& a1 = state.mutable_amplitude(i | anc_bit);
            const Complex v0 = a0, v1 = a1;
            if (!inverse) {
                a0 = c * v0 - s * v1;
                a1 = s * v0 + c * v1;
            } else {
                a0 = c * v0 + s * v1;
                a1 = -s * v0 + c * v1;
            }
        }
    }

    WalkRegisters regs_;
    Mode mode_;
    CoinSpec spec_;
    std::uint32_t n_x_, n_y_;
};

inline PositionCoin build_position_coin(const GridGeometry& geom, const WalkRegisters& regs,
                                        PositionCoin::Mode mode) {
    return PositionCoin(geom, regs, mode);
}

// Reflective boundary conditions. Each of the four prohibited (edge,
// direction) combinations raises the boundary ancilla via a multi-controlled
// X; a single CNOT then flips c0, converting the move into its reflection:
//   all x = 1, coin |100> (right)  at the right edge
//   all x = 0, coin |101> (left)   at the left edge
//   all y = 1, coin |110> (up)     at the top edge
//   all y = 0, coin |111> (down)   at the bottom edge
// The four patterns are mutually exclusive, so one ancilla serves all of
// them; it must enter in |0> and is reset at the end of the step.
inline Circuit build_boundary_conditions(const WalkRegisters& regs, std::uint32_t n_qubits = 0) {
    validate_walk_registers(regs);
    Circuit circuit(std::max(n_qubits, regs.n_qubits));
    const std::uint32_t c0 = regs.coin.begin;
    const std::uint32_t c1 = regs.coin.begin + 1;
    const std::uint32_t c2 = regs.coin.begin + 2;

    auto edge_controls = [&](QubitRange axis, bool at_upper, bool c1_value, bool c0_value) {
        std::vector<ControlBit> controls;
        for (std::uint32_t i = 0; i < axis.size; ++i) controls.push_back({axis.begin + i, at_upper});
        controls.push_back({c2, true});
        controls.push_back({c1, c1_value});
        controls.push_back({c0, c0_value});
        return controls;
    };

    circuit.mcx(edge_controls(regs.pos_x, true, false, false), regs.boundary_ancilla);   // right edge
    circuit.mcx(edge_controls(regs.pos_x, false, false, true), regs.boundary_ancilla);   // left edge
    circuit.mcx(edge_controls(regs.pos_y, true, true, false), regs.boundary_ancilla);    // top edge
    circuit.mcx(edge_controls(regs.pos_y, false, true, true), regs.boundary_ancilla);    // bottom edge
    circuit.cnot(regs.boundary_ancilla, c0);
    return circuit;
}

// QFT-based shift: increments or decrements the x (resp. y) register by one
// depending on the coin direction, through a controlled phase ladder between
// a QFT / inverse-QFT pair. The rotation on position qubit i has angle
// +/- pi / 2^(n-1-i); coin states with c2 = 0 leave the position unchanged.
// Wrap-around of the underlying modular adder is unreachable once boundary
// conditions run first.
inline Circuit build_shift(const WalkRegisters& regs, std::uint32_t n_qubits = 0) {
    validate_walk_registers(regs);
    Circuit circuit(std::max(n_qubits, regs.n_qubits));
    const std::uint32_t c0 = regs.coin.begin;
    const std::uint32_t c1 = regs.coin.begin + 1;
    const std::uint32_t c2 = regs.coin.begin + 2;

    auto append_axis = [&](QubitRange axis, bool c1_value) {
        circuit.qft_block(axis, false);
        for (std::uint32_t i = 0; i < axis.size; ++i) {
            const double angle = kPi / static_cast<double>(std::uint64_t{1} << (axis.size - 1 - i));
            circuit.mc_phase({{c2, true}, {c1, c1_value}, {c0, false}}, axis.begin + i, angle);
            circuit.mc_phase({{c2, true}, {c1, c1_value}, {c0, true}}, axis.begin + i, -angle);
        }
        circuit.qft_block(axis, true);
    };

    append_axis(regs.pos_x, false);  // right / left
    append_axis(regs.pos_y, true);   // up / down
    return circuit;
}

enum class StepAncillaPolicy {
    ResetEachStep,   // measured strategy: ancillas and coin measured out
    FreshAncillas,   // amplified strategy: fully unitary step
};

struct WalkStepCircuit {
    Circuit circuit;
    WalkRegisters registers;
    double coin_scale = 1.0;
};

// One full walk iteration: coin superposition prep + diagonal coin, boundary
// conditions, shift, then (in the measured strategy) resets of the boundary
// ancilla, the coin ancilla and the coin register so the next step starts
// from |000>.
inline WalkStepCircuit build_walk_step(const GridGeometry& geom, const WalkRegisters& regs,
                                       StepAncillaPolicy policy = StepAncillaPolicy::ResetEachStep,
                                       std::uint32_t n_qubits = 0) {
    const PositionCoin coin(geom, regs, PositionCoin::Mode::GateLevel);
    WalkStepCircuit step;
    step.registers = regs;
    step.coin_scale = coin.scale();
    step.circuit = coin.as_circuit(std::max(n_qubits, regs.n_qubits));
    step.circuit.registers = regs.to_register_map();
    step.circuit.extend(build_boundary_conditions(regs, step.circuit.n_qubits));
    step.circuit.extend(build_shift(regs, step.circuit.n_qubits));
    if (policy == StepAncillaPolicy::ResetEachStep) {
        step.circuit.reset(regs.boundary_ancilla);
        step.circuit.reset(regs.coin_ancilla);
        for (std::uint32_t i = 0; i < 3; ++i) step.circuit.reset(regs.coin.begin + i);
    }
    return step;
}

// Fast-path walk step used by the strategies: coin (chosen mode) with the
// success branch post-selected, then boundary and shift circuits. The caller
// provides fresh states per step, so no resets are emitted here.
class WalkStepOperator {
public:
    WalkStepOperator(const GridGeometry& geom, const WalkRegisters& regs, PositionCoin::Mode mode)
        : coin_(geom, regs, mode),
          boundary_(build_boundary_conditions(regs)),
          shift_(build_shift(regs)) {}

    // Returns the coin post-selection success probability.
    double apply(StateVector& state) const {
        const double p = coin_.apply_postselected(state);
        apply_circuit(state, boundary_);
        apply_circuit(state, shift_);
        return p;
    }

    const PositionCoin& coin() const { return coin_; }
    const WalkRegisters& registers() const { return coin_.registers(); }

private:
    PositionCoin coin_;
    Circuit boundary_;
    Circuit shift_;
};

}  // namespace qwalk
