#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qwalk/common.hpp"
#include "qwalk/rng.hpp"

namespace qwalk {

// One (qubit, required value) pair of a post-selection / probability mask.
struct MaskBit {
    std::uint32_t qubit = 0;
    int value = 0;
};

using Mask = std::vector<MaskBit>;

inline Mask mask_from_range(QubitRange range, std::uint64_t value) {
    Mask m;
    m.reserve(range.size);
    for (std::uint32_t i = 0; i < range.size; ++i) {
        m.push_back({range.begin + i, static_cast<int>((value >> i) & 1u)});
    }
    return m;
}

// Dense statevector over n qubits. Amplitudes are kept sub-normalized after
// post-selection; norm2 tracks the current sum of squared magnitudes so that
// probabilities and sampling stay well defined. Qubit q contributes bit
// (index >> q) & 1 of the basis index; within a register, index 0 is the
// least significant qubit.
class StateVector {
public:
    explicit StateVector(std::uint32_t n_qubits)
        : n_qubits_(n_qubits), amps_(dim_of(n_qubits), Complex{0.0, 0.0}), norm2_(1.0) {
        amps_[0] = Complex{1.0, 0.0};
    }

    static StateVector basis_state(std::uint32_t n_qubits, std::uint64_t index) {
        StateVector s(n_qubits);
        if (index >= s.dim()) {
            throw std::out_of_range("basis index out of range");
        }
        s.amps_[0] = Complex{0.0, 0.0};
        s.amps_[index] = Complex{1.0, 0.0};
        return s;
    }

    static StateVector from_amplitudes(std::uint32_t n_qubits, std::vector<Complex> amps) {
        if (amps.size() != dim_of(n_qubits)) {
            throw std::invalid_argument("amplitude vector size mismatch");
        }
        StateVector s(n_qubits);
        s.amps_ = std::move(amps);
        s.norm2_ = s.computed_norm2();
        if (s.norm2_ <= 0.0) {
            throw std::invalid_argument("zero-norm amplitude vector");
        }
        return s;
    }

    std::uint32_t n_qubits() const { return n_qubits_; }
    std::uint64_t dim() const { return amps_.size(); }
    double norm2() const { return norm2_; }

    std::span<const Complex> amplitudes() const { return amps_; }
    const Complex& amplitude(std::uint64_t i) const { return amps_[i]; }

    double computed_norm2() const {
        double s = 0.0;
        for (const Complex& a : amps_) s += std::norm(a);
        return s;
    }

    // --- gate kernels (in-place, stride/mask arithmetic) ---

    void apply_one_qubit(std::uint32_t target, Complex u00, Complex u01, Complex u10, Complex u11,
                         std::span<const ControlBit> controls = {}) {
        check_qubit(target);
        auto [on, off] = control_masks(controls, target);
        const std::uint64_t tbit = std::uint64_t{1} << target;
        const std::uint64_t n = dim();
        for (std::uint64_t i = 0; i < n; ++i) {
            if (i & tbit) continue;
            if ((i & on) != on || (i & off) != 0) continue;
            const Complex a0 = amps_[i];
            const Complex a1 = amps_[i | tbit];
            amps_[i] = u00 * a0 + u01 * a1;
            amps_[i | tbit] = u10 * a0 + u11 * a1;
        }
    }

    void apply_x(std::uint32_t q, std::span<const ControlBit> controls = {}) {
        apply_one_qubit(q, {0, 0}, {1, 0}, {1, 0}, {0, 0}, controls);
    }

    void apply_h(std::uint32_t q, std::span<const ControlBit> controls = {}) {
        const double r = 1.0 / std::sqrt(2.0);
        apply_one_qubit(q, {r, 0}, {r, 0}, {r, 0}, {-r, 0}, controls);
    }

    void apply_ry(std::uint32_t q, double theta, std::span<const ControlBit> controls = {}) {
        const double c = std::cos(theta / 2.0);
        const double s = std::sin(theta / 2.0);
        apply_one_qubit(q, {c, 0}, {-s, 0}, {s, 0}, {c, 0}, controls);
    }

    void apply_rz(std::uint32_t q, double theta, std::span<const ControlBit> controls = {}) {
        const Complex em = std::polar(1.0, -theta / 2.0);
        const Complex ep = std::polar(1.0, theta / 2.0);
        apply_one_qubit(q, em, {0, 0}, {0, 0}, ep, controls);
    }

    // Diagonal phase: |1> picks up e^{i theta}.
    void apply_phase(std::uint32_t q, double theta, std::span<const ControlBit> controls = {}) {
        apply_one_qubit(q, {1, 0}, {0, 0}, {0, 0}, std::polar(1.0, theta), controls);
    }

    void apply_swap(std::uint32_t a, std::uint32_t b, std::span<const ControlBit> controls = {}) {
        check_qubit(a);
        check_qubit(b);
        if (a == b) throw std::invalid_argument("swap targets must differ");
        auto [on, off] = control_masks(controls, a, b);
        const std::uint64_t abit = std::uint64_t{1} << a;
        const std::uint64_t bbit = std::uint64_t{1} << b;
        const std::uint64_t n = dim();
        for (std::uint64_t i = 0; i < n; ++i) {
            if ((i & abit) == 0 || (i & bbit) != 0) continue;  // visit each pair once
            if ((i & on) != on || (i & off) != 0) continue;
            std::swap(amps_[i], amps_[i ^ abit ^ bbit]);
        }
    }

    // --- probabilities, projection, measurement ---

    double probability_of(const Mask& mask) const {
        auto [on, off] = mask_masks(mask);
        double p = 0.0;
        const std::uint64_t n = dim();
        for (std::uint64_t i = 0; i < n; ++i) {
            if ((i & on) == on && (i & off) == 0) p += std::norm(amps_[i]);
        }
        return p / norm2_;
    }

    // Post-selection: zeroes non-matching amplitudes, scales norm2 by the
    // branch probability. Returns that probability.
    double project(const Mask& mask) {
        auto [on, off] = mask_masks(mask);
        double kept = 0.0;
        const std::uint64_t n = dim();
        for (std::uint64_t i = 0; i < n; ++i) {
            if ((i & on) == on && (i & off) == 0) {
                kept += std::norm(amps_[i]);
            } else {
                amps_[i] = Complex{0.0, 0.0};
            }
        }
        const double p = kept / norm2_;
        if (kept <= 0.0) {
            throw std::runtime_error("projection onto zero-probability branch");
        }
        norm2_ = kept;
        return p;
    }

    // Born-rule collapse of one qubit. The post-measurement amplitudes are
    // rescaled so the squared norm returns to its pre-measurement value;
    // outcome and branch probability are returned for bookkeeping.
    std::pair<int, double> measure_qubit(std::uint32_t q, RngStream& rng) {
        check_qubit(q);
        const std::uint64_t qbit = std::uint64_t{1} << q;
        double raw1 = 0.0;
        const std::uint64_t n = dim();
        for (std::uint64_t i = 0; i < n; ++i) {
            if (i & qbit) raw1 += std::norm(amps_[i]);
        }
        const double p1 = raw1 / norm2_;
        const int outcome = rng.next_double() < p1 ? 1 : 0;
        const double p = outcome ? p1 : 1.0 - p1;
        if (p <= 0.0) {
            throw std::runtime_error("measurement collapsed onto zero-probability branch");
        }
        const double rescale = 1.0 / std::sqrt(p);
        for (std::uint64_t i = 0; i < n; ++i) {
            if (((i & qbit) != 0) == (outcome == 1)) {
                amps_[i] *= rescale;
            } else {
                amps_[i] = Complex{0.0, 0.0};
            }
        }
        return {outcome, p};
    }

    // Marginal distribution of a qubit range, renormalized by norm2.
    std::vector<double> marginal(QubitRange range) const {
        if (range.size == 0) throw std::invalid_argument("empty qubit range");
        if (range.end() > n_qubits_) throw std::out_of_range("qubit range out of bounds");
        std::vector<double> probs(std::uint64_t{1} << range.size, 0.0);
        const std::uint64_t mask = probs.size() - 1;
        const std::uint64_t n = dim();
        for (std::uint64_t i = 0; i < n; ++i) {
            probs[(i >> range.begin) & mask] += std::norm(amps_[i]);
        }
        for (double& p : probs) p /= norm2_;
        return probs;
    }

    void scale_all(Complex factor) {
        for (Complex& a : amps_) a *= factor;
        norm2_ *= std::norm(factor);
    }

    Complex& mutable_amplitude(std::uint64_t i) { return amps_[i]; }
    void set_norm2(double v) { norm2_ = v; }

private:
    void check_qubit(std::uint32_t q) const {
        if (q >= n_qubits_) throw std::out_of_range("qubit index out of range");
    }

    template <typename... Targets>
    std::pair<std::uint64_t, std::uint64_t> control_masks(std::span<const ControlBit> controls,
                                                          Targets... targets) const {
        std::uint64_t on = 0, off = 0;
        for (const ControlBit& c : controls) {
            check_qubit(c.qubit);
            if (((c.qubit == targets) || ...)) {
                throw std::invalid_argument("control and target qubits must be disjoint");
            }
            (c.on_one ? on : off) |= std::uint64_t{1} << c.qubit;
        }
        return {on, off};
    }

    std::pair<std::uint64_t, std::uint64_t> mask_masks(const Mask& mask) const {
        std::uint64_t on = 0, off = 0;
        for (const MaskBit& b : mask) {
            check_qubit(b.qubit);
            (b.value ? on : off) |= std::uint64_t{1} << b.qubit;
        }
        return {on, off};
    }

    std::uint32_t n_qubits_;
    std::vector<Complex> amps_;
    double norm2_;
};

// Counts drawn i.i.d. from the marginal distribution of the given qubit range.
inline std::map<std::uint64_t, std::uint64_t> sample_positions(const StateVector& state,
                                                               QubitRange range,
                                                               std::uint64_t n_shots,
                                                               RngStream& rng) {
    if (n_shots == 0) throw std::invalid_argument("n_shots must be at least 1");
    if (state.norm2() <= 0.0) throw std::invalid_argument("zero-norm state");
    const std::vector<double> probs = state.marginal(range);
    std::vector<double> cdf(probs.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        cdf[i] = acc;
    }
    std::map<std::uint64_t, std::uint64_t> counts;
    for (std::uint64_t s = 0; s < n_shots; ++s) {
        const double u = rng.next_double() * acc;
        const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
        std::uint64_t idx = static_cast<std::uint64_t>(it - cdf.begin());
        if (idx >= probs.size()) idx = probs.size() - 1;
        ++counts[idx];
    }
    return counts;
}

// Tensor product with `high` occupying the upper qubits.
inline StateVector tensor(const StateVector& low, const StateVector& high) {
    const std::uint32_t n = low.n_qubits() + high.n_qubits();
    std::vector<Complex> amps(dim_of(n));
    const std::uint64_t dlow = low.dim();
    for (std::uint64_t h = 0; h < high.dim(); ++h) {
        for (std::uint64_t l = 0; l < dlow; ++l) {
            amps[(h << low.n_qubits()) | l] = high.amplitude(h) * low.amplitude(l);
        }
    }
    StateVector out = StateVector::from_amplitudes(n, std::move(amps));
    out.set_norm2(low.norm2() * high.norm2());
    return out;
}

}  // namespace qwalk
