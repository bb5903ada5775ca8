#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>

namespace qwalk {

using Complex = std::complex<double>;

// Tolerance constants are centralized here: structural checks (unitarity,
// permutation matrices, distribution matching) use kStructuralTol, norm
// bookkeeping uses the tighter kNormTol.
inline constexpr double kStructuralTol = 1e-10;
inline constexpr double kNormTol = 1e-12;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Dense-array simulation guard: 2^26 amplitudes is 1 GiB of complex doubles.
inline constexpr std::uint32_t kMaxQubits = 26;

struct QubitRange {
    std::uint32_t begin = 0;
    std::uint32_t size = 0;

    std::uint32_t end() const { return begin + size; }
    bool contains(std::uint32_t q) const { return q >= begin && q < end(); }
    bool overlaps(const QubitRange& o) const { return begin < o.end() && o.begin < end(); }
};

// A control wire: fires on |1> when on_one, on |0> otherwise.
struct ControlBit {
    std::uint32_t qubit = 0;
    bool on_one = true;
};

inline std::uint64_t dim_of(std::uint32_t n_qubits) {
    if (n_qubits > kMaxQubits) {
        throw std::invalid_argument("qubit count exceeds dense-simulation limit");
    }
    return std::uint64_t{1} << n_qubits;
}

}  // namespace qwalk
