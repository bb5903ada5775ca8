#pragma once

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "qwalk/circuit.hpp"
#include "qwalk/qft.hpp"

namespace qwalk {

namespace detail {

inline std::string qasm_angle(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Scratch-wire demand of one op when lowered to qelib1 gates. Up to four
// controls map onto cx/ccx/c3x/c4x directly; wider fans use a clean-ancilla
// Toffoli chain, and controlled rotations with two or more controls compute
// their AND into one extra scratch wire first.
inline std::uint32_t qasm_scratch_needed(const GateOp& op) {
    const std::uint32_t m = static_cast<std::uint32_t>(op.controls.size());
    switch (op.kind) {
        case GateKind::X:
        case GateKind::Cnot:
        case GateKind::Mcx:
            return m > 4 ? m - 2 : 0;
        case GateKind::RY:
        case GateKind::RZ:
        case GateKind::Phase:
        case GateKind::McRy:
        case GateKind::McPhase:
        case GateKind::Swap:
            if (m <= 1) return 0;
            return (m > 4 ? m - 2 : 0) + 1;
        default:
            return 0;
    }
}

class QasmWriter {
public:
    explicit QasmWriter(const Circuit& circuit) : circuit_(circuit) {
        for (const GateOp& op : circuit.ops) {
            if (op.kind == GateKind::QftBlock || op.kind == GateKind::InvQftBlock) {
                const QubitRange range{op.targets.front(),
                                       static_cast<std::uint32_t>(op.targets.size())};
                for (const GateOp& sub : qft_ops(range, op.kind == GateKind::InvQftBlock)) {
                    scratch_ = std::max(scratch_, qasm_scratch_needed(sub));
                }
            } else {
                scratch_ = std::max(scratch_, qasm_scratch_needed(op));
            }
            if (op.kind == GateKind::Measure) ++n_measure_;
        }
    }

    std::string write() {
        out_ << "OPENQASM 2.0;\n";
        out_ << "include \"qelib1.inc\";\n";
        for (const auto& [name, range] : circuit_.registers.entries()) {
            out_ << "// " << name << ": q[" << range.begin << ".." << (range.end() - 1) << "]\n";
        }
        out_ << "qreg q[" << circuit_.n_qubits << "];\n";
        if (scratch_ > 0) out_ << "qreg scratch[" << scratch_ << "];\n";
        if (n_measure_ > 0) out_ << "creg m[" << n_measure_ << "];\n";
        for (const GateOp& op : circuit_.ops) emit(op);
        return out_.str();
    }

private:
    std::string q(std::uint32_t i) const { return "q[" + std::to_string(i) + "]"; }
    static std::string s(std::uint32_t i) { return "scratch[" + std::to_string(i) + "]"; }

    void emit(const GateOp& op) {
        switch (op.kind) {
            case GateKind::Measure:
                out_ << "measure " << q(op.targets[0]) << " -> m[" << next_bit_++ << "];\n";
                return;
            case GateKind::Reset:
                out_ << "reset " << q(op.targets[0]) << ";\n";
                return;
            case GateKind::QftBlock:
            case GateKind::InvQftBlock: {
                const QubitRange range{op.targets.front(),
                                       static_cast<std::uint32_t>(op.targets.size())};
                for (const GateOp& sub : qft_ops(range, op.kind == GateKind::InvQftBlock)) emit(sub);
                return;
            }
            default:
                break;
        }

        // control-on-0 wires are X-conjugated around the lowered gate
        std::vector<std::string> wires;
        for (const ControlBit& c : op.controls) {
            wires.push_back(q(c.qubit));
            if (!c.on_one) out_ << "x " << wires.back() << ";\n";
        }
        emit_controlled(op, wires);
        for (std::size_t i = 0; i < op.controls.size(); ++i) {
            if (!op.controls[i].on_one) out_ << "x " << wires[i] << ";\n";
        }
    }

    void emit_controlled(const GateOp& op, const std::vector<std::string>& controls) {
        const std::size_t m = controls.size();
        switch (op.kind) {
            case GateKind::X:
            case GateKind::Cnot:
            case GateKind::Mcx:
                emit_mcx(controls, q(op.targets[0]));
                return;
            case GateKind::H:
                if (m == 0) {
                    out_ << "h " << q(op.targets[0]) << ";\n";
                } else if (m == 1) {
                    out_ << "ch " << controls[0] << "," << q(op.targets[0]) << ";\n";
                } else {
                    emit_via_and(controls, [&](const std::string& c) {
                        out_ << "ch " << c << "," << q(op.targets[0]) << ";\n";
                    });
                }
                return;
            case GateKind::RY:
            case GateKind::McRy:
                emit_rotation("ry", "cry", op, controls);
                return;
            case GateKind::RZ:
                emit_rotation("rz", "crz", op, controls);
                return;
            case GateKind::Phase:
            case GateKind::McPhase:
                emit_rotation("u1", "cu1", op, controls);
                return;
            case GateKind::Swap:
                if (m == 0) {
                    out_ << "swap " << q(op.targets[0]) << "," << q(op.targets[1]) << ";\n";
                } else if (m == 1) {
                    out_ << "cswap " << controls[0] << "," << q(op.targets[0]) << ","
                         << q(op.targets[1]) << ";\n";
                } else {
                    emit_via_and(controls, [&](const std::string& c) {
                        out_ << "cswap " << c << "," << q(op.targets[0]) << "," << q(op.targets[1])
                             << ";\n";
                    });
                }
                return;
            default:
                throw std::logic_error("unhandled gate kind in qasm export");
        }
    }

    void emit_rotation(const char* plain, const char* controlled, const GateOp& op,
                       const std::vector<std::string>& controls) {
        const std::string angle = qasm_angle(op.angle);
        const std::string target = q(op.targets[0]);
        if (controls.empty()) {
            out_ << plain << "(" << angle << ") " << target << ";\n";
        } else if (controls.size() == 1) {
            out_ << controlled << "(" << angle << ") " << controls[0] << "," << target << ";\n";
        } else {
            emit_via_and(controls, [&](const std::string& c) {
                out_ << controlled << "(" << angle << ") " << c << "," << target << ";\n";
            });
        }
    }

    // AND of all control wires computed into a scratch qubit, gate applied
    // from it, then uncomputed.
    template <typename Fn>
    void emit_via_and(const std::vector<std::string>& controls, Fn&& apply_from) {
        const std::uint32_t and_target = scratch_ - 1;
        emit_mcx(controls, s(and_target));
        apply_from(s(and_target));
        emit_mcx(controls, s(and_target));
    }

    void emit_mcx(const std::vector<std::string>& controls, const std::string& target) {
        const std::size_t m = controls.size();
        if (m == 0) {
            out_ << "x " << target << ";\n";
        } else if (m == 1) {
            out_ << "cx " << controls[0] << "," << target << ";\n";
        } else if (m == 2) {
            out_ << "ccx " << controls[0] << "," << controls[1] << "," << target << ";\n";
        } else if (m == 3) {
            out_ << "c3x " << controls[0] << "," << controls[1] << "," << controls[2] << ","
                 << target << ";\n";
        } else if (m == 4) {
            out_ << "c4x " << controls[0] << "," << controls[1] << "," << controls[2] << ","
                 << controls[3] << "," << target << ";\n";
        } else {
            // clean-ancilla Toffoli chain over scratch[0..m-3]
            std::vector<std::string> chain;
            out_ << "ccx " << controls[0] << "," << controls[1] << "," << s(0) << ";\n";
            for (std::size_t i = 2; i + 1 < m; ++i) {
                out_ << "ccx " << controls[i] << "," << s(static_cast<std::uint32_t>(i - 2)) << ","
                     << s(static_cast<std::uint32_t>(i - 1)) << ";\n";
            }
            out_ << "ccx " << controls[m - 1] << "," << s(static_cast<std::uint32_t>(m - 3)) << ","
                 << target << ";\n";
            for (std::size_t i = m - 2; i >= 2; --i) {
                out_ << "ccx " << controls[i] << "," << s(static_cast<std::uint32_t>(i - 2)) << ","
                     << s(static_cast<std::uint32_t>(i - 1)) << ";\n";
            }
            out_ << "ccx " << controls[0] << "," << controls[1] << "," << s(0) << ";\n";
        }
    }

    const Circuit& circuit_;
    std::ostringstream out_;
    std::uint32_t scratch_ = 0;
    std::uint32_t n_measure_ = 0;
    std::uint32_t next_bit_ = 0;
};

}  // namespace detail

// OpenQASM 2.0 text of a circuit, targeting Qiskit's qelib1 gate set.
// Multi-controlled gates beyond c4x are lowered through a clean scratch
// register declared alongside the main one; RESET maps to `reset`,
// measurement to `measure`.
inline std::string to_qasm(const Circuit& circuit) { return detail::QasmWriter(circuit).write(); }

}  // namespace qwalk
