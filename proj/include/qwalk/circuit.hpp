#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qwalk/common.hpp"

namespace qwalk {

enum class GateKind {
    X,
    H,
    RY,
    RZ,
    Phase,
    Cnot,
    Swap,
    Mcx,
    McRy,
    McPhase,
    QftBlock,
    InvQftBlock,
    Reset,
    Measure,
};

inline bool is_unitary(GateKind k) { return k != GateKind::Reset && k != GateKind::Measure; }

struct GateOp {
    GateKind kind;
    std::vector<std::uint32_t> targets;
    std::vector<ControlBit> controls;
    double angle = 0.0;
};

// Named, pairwise-disjoint qubit ranges; insertion order is preserved so
// exports list registers the way the builder declared them.
class RegisterMap {
public:
    void add(std::string name, QubitRange range) {
        if (range.size == 0) throw std::invalid_argument("register '" + name + "' is empty");
        for (const auto& [existing_name, existing] : entries_) {
            if (existing_name == name) {
                throw std::invalid_argument("duplicate register name '" + name + "'");
            }
            if (existing.overlaps(range)) {
                throw std::invalid_argument("register '" + name + "' overlaps '" + existing_name + "'");
            }
        }
        entries_.emplace_back(std::move(name), range);
    }

    bool has(const std::string& name) const {
        return std::any_of(entries_.begin(), entries_.end(),
                           [&](const auto& e) { return e.first == name; });
    }

    const QubitRange& at(const std::string& name) const {
        for (const auto& [n, r] : entries_) {
            if (n == name) return r;
        }
        throw std::out_of_range("no register named '" + name + "'");
    }

    const std::vector<std::pair<std::string, QubitRange>>& entries() const { return entries_; }

private:
    std::vector<std::pair<std::string, QubitRange>> entries_;
};

// Ordered gate list; the lingua franca between builders, simulator and the
// OpenQASM exporter.
struct Circuit {
    std::uint32_t n_qubits = 0;
    std::vector<GateOp> ops;
    RegisterMap registers;

    explicit Circuit(std::uint32_t n = 0) : n_qubits(n) {}

    void append(GateOp op) {
        validate(op);
        ops.push_back(std::move(op));
    }

    void x(std::uint32_t q) { append({GateKind::X, {q}, {}, 0.0}); }
    void h(std::uint32_t q) { append({GateKind::H, {q}, {}, 0.0}); }
    void ry(std::uint32_t q, double theta) { append({GateKind::RY, {q}, {}, theta}); }
    void rz(std::uint32_t q, double theta) { append({GateKind::RZ, {q}, {}, theta}); }
    void phase(std::uint32_t q, double theta) { append({GateKind::Phase, {q}, {}, theta}); }
    void cnot(std::uint32_t ctrl, std::uint32_t tgt) {
        append({GateKind::Cnot, {tgt}, {{ctrl, true}}, 0.0});
    }
    void swap_gate(std::uint32_t a, std::uint32_t b) { append({GateKind::Swap, {a, b}, {}, 0.0}); }
    void cswap(std::uint32_t ctrl, std::uint32_t a, std::uint32_t b) {
        append({GateKind::Swap, {a, b}, {{ctrl, true}}, 0.0});
    }
    void mcx(std::vector<ControlBit> controls, std::uint32_t tgt) {
        append({GateKind::Mcx, {tgt}, std::move(controls), 0.0});
    }
    void mc_ry(std::vector<ControlBit> controls, std::uint32_t tgt, double theta) {
        append({GateKind::McRy, {tgt}, std::move(controls), theta});
    }
    void mc_phase(std::vector<ControlBit> controls, std::uint32_t tgt, double theta) {
        append({GateKind::McPhase, {tgt}, std::move(controls), theta});
    }
    void qft_block(QubitRange range, bool inverse = false) {
        std::vector<std::uint32_t> targets(range.size);
        for (std::uint32_t i = 0; i < range.size; ++i) targets[i] = range.begin + i;
        append({inverse ? GateKind::InvQftBlock : GateKind::QftBlock, std::move(targets), {}, 0.0});
    }
    void reset(std::uint32_t q) { append({GateKind::Reset, {q}, {}, 0.0}); }
    void measure(std::uint32_t q) { append({GateKind::Measure, {q}, {}, 0.0}); }

    void extend(const Circuit& other) {
        if (other.n_qubits > n_qubits) throw std::invalid_argument("circuit extension exceeds qubit count");
        for (const GateOp& op : other.ops) append(op);
    }

    bool has_nonunitary() const {
        return std::any_of(ops.begin(), ops.end(), [](const GateOp& op) { return !is_unitary(op.kind); });
    }

    // Adjoint circuit: reversed op order, negated angles. Only defined for
    // unitary circuits.
    Circuit inverse() const {
        Circuit inv(n_qubits);
        inv.registers = registers;
        inv.ops.reserve(ops.size());
        for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
            GateOp op = *it;
            switch (op.kind) {
                case GateKind::Reset:
                case GateKind::Measure:
                    throw std::invalid_argument("cannot invert a circuit containing reset/measure");
                case GateKind::RY:
                case GateKind::RZ:
                case GateKind::Phase:
                case GateKind::McRy:
                case GateKind::McPhase:
                    op.angle = -op.angle;
                    break;
                case GateKind::QftBlock:
                    op.kind = GateKind::InvQftBlock;
                    break;
                case GateKind::InvQftBlock:
                    op.kind = GateKind::QftBlock;
                    break;
                default:
                    break;  // X, H, Cnot, Swap, Mcx are self-adjoint
            }
            inv.ops.push_back(std::move(op));
        }
        return inv;
    }

private:
    void validate(const GateOp& op) const {
        if (op.targets.empty()) throw std::invalid_argument("gate op has no target");
        for (std::uint32_t t : op.targets) {
            if (t >= n_qubits) throw std::out_of_range("gate target out of range");
        }
        for (const ControlBit& c : op.controls) {
            if (c.qubit >= n_qubits) throw std::out_of_range("gate control out of range");
            for (std::uint32_t t : op.targets) {
                if (c.qubit == t) throw std::invalid_argument("control and target overlap");
            }
        }
        if (op.kind == GateKind::Swap && op.targets.size() != 2) {
            throw std::invalid_argument("swap needs exactly two targets");
        }
        if (op.targets.size() == 2 && op.targets[0] == op.targets[1]) {
            throw std::invalid_argument("duplicate gate target");
        }
        if (!std::isfinite(op.angle)) throw std::invalid_argument("non-finite gate angle");
        if ((op.kind == GateKind::Reset || op.kind == GateKind::Measure) && !op.controls.empty()) {
            throw std::invalid_argument("reset/measure cannot be controlled");
        }
    }
};

}  // namespace qwalk
