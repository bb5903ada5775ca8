#pragma once

#include <vector>

#include "qwalk/circuit.hpp"
#include "qwalk/common.hpp"

namespace qwalk {

// Elementary gate sequence of the quantum Fourier transform on a qubit range
// (LSB first): H plus a controlled-phase ladder per qubit, final swaps to
// restore bit order. The inverse is the reversed sequence with negated angles.
inline std::vector<GateOp> qft_ops(QubitRange range, bool inverse) {
    std::vector<GateOp> ops;
    const std::uint32_t m = range.size;
    for (std::uint32_t jj = 0; jj < m; ++jj) {
        const std::uint32_t j = m - 1 - jj;
        ops.push_back({GateKind::H, {range.begin + j}, {}, 0.0});
        for (std::uint32_t kk = 0; kk < j; ++kk) {
            const std::uint32_t k = j - 1 - kk;
            const double angle = kPi / static_cast<double>(std::uint64_t{1} << (j - k));
            ops.push_back({GateKind::McPhase, {range.begin + j}, {{range.begin + k, true}}, angle});
        }
    }
    for (std::uint32_t i = 0; i < m / 2; ++i) {
        ops.push_back({GateKind::Swap, {range.begin + i, range.begin + m - 1 - i}, {}, 0.0});
    }
    if (inverse) {
        std::vector<GateOp> rev;
        rev.reserve(ops.size());
        for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
            GateOp op = *it;
            if (op.kind == GateKind::McPhase) op.angle = -op.angle;
            rev.push_back(std::move(op));
        }
        return rev;
    }
    return ops;
}

inline Circuit build_qft(QubitRange range, bool inverse = false, std::uint32_t n_qubits = 0) {
    if (range.size == 0) throw std::invalid_argument("QFT range must be non-empty");
    Circuit c(std::max(n_qubits, range.end()));
    for (GateOp& op : qft_ops(range, inverse)) c.append(std::move(op));
    return c;
}

}  // namespace qwalk
