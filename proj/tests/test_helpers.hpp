#pragma once

#include <cmath>
#include <vector>

#include "qwalk/rng.hpp"
#include "qwalk/state_vector.hpp"

namespace qwalk::testing {

inline StateVector random_state(std::uint32_t n_qubits, RngStream& rng) {
    std::vector<Complex> amps(dim_of(n_qubits));
    for (Complex& a : amps) a = Complex{rng.next_normal(), rng.next_normal()};
    double norm = 0.0;
    for (const Complex& a : amps) norm += std::norm(a);
    norm = std::sqrt(norm);
    for (Complex& a : amps) a /= norm;
    return StateVector::from_amplitudes(n_qubits, std::move(amps));
}

inline double max_amplitude_diff(const StateVector& a, const StateVector& b) {
    double worst = 0.0;
    for (std::uint64_t i = 0; i < a.dim(); ++i) {
        worst = std::max(worst, std::abs(a.amplitude(i) - b.amplitude(i)));
    }
    return worst;
}

inline double total_variation(const std::vector<double>& a, const std::vector<double>& b) {
    double tv = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) tv += std::abs(a[i] - b[i]);
    return tv / 2.0;
}

}  // namespace qwalk::testing
