#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "qwalk/circuit.hpp"
#include "qwalk/qft.hpp"
#include "qwalk/state_vector.hpp"

namespace qwalk {

struct MeasureEvent {
    std::uint32_t qubit = 0;
    int outcome = 0;
    double probability = 1.0;
    bool was_reset = false;
};

struct ApplyResult {
    std::vector<MeasureEvent> measurements;
};

namespace detail {

inline void apply_unitary_op(StateVector& state, const GateOp& op) {
    switch (op.kind) {
        case GateKind::X:
        case GateKind::Cnot:
        case GateKind::Mcx:
            state.apply_x(op.targets[0], op.controls);
            break;
        case GateKind::H:
            state.apply_h(op.targets[0], op.controls);
            break;
        case GateKind::RY:
        case GateKind::McRy:
            state.apply_ry(op.targets[0], op.angle, op.controls);
            break;
        case GateKind::RZ:
            state.apply_rz(op.targets[0], op.angle, op.controls);
            break;
        case GateKind::Phase:
        case GateKind::McPhase:
            state.apply_phase(op.targets[0], op.angle, op.controls);
            break;
        case GateKind::Swap:
            state.apply_swap(op.targets[0], op.targets[1], op.controls);
            break;
        case GateKind::QftBlock:
        case GateKind::InvQftBlock: {
            const QubitRange range{op.targets.front(),
                                   static_cast<std::uint32_t>(op.targets.size())};
            for (const GateOp& sub : qft_ops(range, op.kind == GateKind::InvQftBlock)) {
                apply_unitary_op(state, sub);
            }
            break;
        }
        default:
            throw std::logic_error("non-unitary op in unitary path");
    }
}

}  // namespace detail

// Applies ops in order. MEASURE collapses per the Born rule using rng; RESET
// measures, then maps outcome |1> back to |0>. Outcomes and their branch
// probabilities are returned for post-selection bookkeeping.
inline ApplyResult apply_circuit(StateVector& state, const Circuit& circuit,
                                 RngStream* rng = nullptr) {
    if (state.n_qubits() != circuit.n_qubits) {
        throw std::invalid_argument("state/circuit qubit count mismatch");
    }
    if (circuit.has_nonunitary() && rng == nullptr) {
        throw std::invalid_argument("circuit contains measure/reset but no rng was supplied");
    }
    ApplyResult result;
    for (const GateOp& op : circuit.ops) {
        switch (op.kind) {
            case GateKind::Measure: {
                auto [outcome, p] = state.measure_qubit(op.targets[0], *rng);
                result.measurements.push_back({op.targets[0], outcome, p, false});
                break;
            }
            case GateKind::Reset: {
                auto [outcome, p] = state.measure_qubit(op.targets[0], *rng);
                if (outcome == 1) state.apply_x(op.targets[0]);
                result.measurements.push_back({op.targets[0], outcome, p, true});
                break;
            }
            default:
                detail::apply_unitary_op(state, op);
                break;
        }
    }
    return result;
}

// Full matrix of a unitary circuit, built column by column; entry (row, col)
// sits at matrix[col * dim + row]. Intended for structural checks on small
// instances.
inline std::vector<Complex> circuit_matrix(const Circuit& circuit) {
    if (circuit.has_nonunitary()) {
        throw std::invalid_argument("circuit_matrix requires a unitary circuit");
    }
    const std::uint64_t dim = dim_of(circuit.n_qubits);
    std::vector<Complex> matrix(dim * dim);
    for (std::uint64_t col = 0; col < dim; ++col) {
        StateVector s = StateVector::basis_state(circuit.n_qubits, col);
        apply_circuit(s, circuit);
        for (std::uint64_t row = 0; row < dim; ++row) {
            matrix[col * dim + row] = s.amplitude(row);
        }
    }
    return matrix;
}

// max |(U†U - I)_{ij}|, the unitarity defect used by structural tests.
inline double unitarity_defect(const std::vector<Complex>& matrix, std::uint64_t dim) {
    double worst = 0.0;
    for (std::uint64_t a = 0; a < dim; ++a) {
        for (std::uint64_t b = 0; b < dim; ++b) {
            Complex dot{0.0, 0.0};
            for (std::uint64_t i = 0; i < dim; ++i) {
                dot += std::conj(matrix[a * dim + i]) * matrix[b * dim + i];
            }
            if (a == b) dot -= Complex{1.0, 0.0};
            worst = std::max(worst, std::abs(dot));
        }
    }
    return worst;
}

}  // namespace qwalk
