#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qwalk/circuit.hpp"
#include "qwalk/common.hpp"
#include "qwalk/flux_map.hpp"
#include "qwalk/geometry.hpp"
#include "qwalk/rng.hpp"
#include "qwalk/simulator.hpp"
#include "qwalk/state_vector.hpp"
#include "qwalk/walk_circuits.hpp"

namespace qwalk {

// Classical Markov kernel implied by cell_probabilities with reflective
// boundaries: stay mass p_a, p_s/4 toward each neighbor, prohibited moves
// reflected to the opposite direction. This is the exact lattice counterpart
// of one quantum walk step and serves as the oracle for the quantum path.
inline std::vector<double> exact_step_distribution(const GridGeometry& geom,
                                                   std::span<const double> dist) {
    if (dist.size() != geom.n_cells()) {
        throw std::invalid_argument("distribution size does not match grid");
    }
    std::vector<double> out(geom.n_cells(), 0.0);
    const int w = static_cast<int>(geom.width());
    const int h = static_cast<int>(geom.height());
    for (std::uint32_t idx = 0; idx < geom.n_cells(); ++idx) {
        const double mass = dist[idx];
        if (mass == 0.0) continue;
        const Cell cell = geom.cell_at(idx);
        const CellProbabilities p = cell_probabilities(geom, cell);
        out[idx] += p.absorb * mass;
        for (int d = 0; d < 4; ++d) {
            int nx = static_cast<int>(cell.x) + kDirDx[d];
            int ny = static_cast<int>(cell.y) + kDirDy[d];
            if (nx < 0 || nx >= w || ny < 0 || ny >= h) {
                const Direction r = opposite(static_cast<Direction>(d));
                nx = static_cast<int>(cell.x) + kDirDx[static_cast<int>(r)];
                ny = static_cast<int>(cell.y) + kDirDy[static_cast<int>(r)];
            }
            out[static_cast<std::uint32_t>(nx) + geom.width() * static_cast<std::uint32_t>(ny)] +=
                p.scatter[d] * mass;
        }
    }
    return out;
}

// Same kernel with the stay (absorption) mass removed: particles that absorb
// die instead of looping. Used by the deterministic fixed-point solver.
inline std::vector<double> surviving_step_distribution(const GridGeometry& geom,
                                                       std::span<const double> dist) {
    std::vector<double> out = exact_step_distribution(geom, dist);
    for (std::uint32_t idx = 0; idx < geom.n_cells(); ++idx) {
        const double p_a = cell_probabilities(geom, geom.cell_at(idx)).absorb;
        out[idx] -= p_a * dist[idx];
    }
    return out;
}

enum class AbsorbMode { SelfLoop, Kill };

inline std::string to_string(AbsorbMode m) {
    return m == AbsorbMode::SelfLoop ? "self-loop" : "kill";
}

struct MeasuredWalkParams {
    std::uint32_t n_steps = 10;
    std::uint64_t n_shots = 1000;
    AbsorbMode absorb_mode = AbsorbMode::SelfLoop;
    PositionCoin::Mode coin_mode = PositionCoin::Mode::FastPath;
};

struct WalkRunReport {
    FluxMap flux;  // raw tallies; each step adds one tally per surviving shot
    std::vector<std::map<Cell, std::uint64_t>> step_histograms;
    std::vector<double> post_selection_success;  // exact branch probability per step
    std::vector<std::uint64_t> shots_alive;      // shots entering each step
    std::uint32_t steps_requested = 0;
    std::uint32_t steps_completed = 0;
    bool truncated = false;
    std::uint64_t seed = 0;
    std::string config_echo;
};

// Measured quantum walk: each iteration advances the current classical shot
// mixture one quantum step and samples the position register together with
// the coin, then re-injects the samples as the next source. Identical
// positions are grouped and advanced once (the step from a basis state is a
// fixed distribution), which is statistically identical to per-shot runs.
// The coin ancilla's failure branch is post-selected away exactly; its
// success probability is recorded per step rather than silently dropped.
// In kill mode a shot whose measured coin came out "stay" (c2 = 0) is
// tallied and then terminated.
inline WalkRunReport run_measured_walk(const GridGeometry& geom, const SourceSpec& source,
                                       const MeasuredWalkParams& params, RngStream& rng) {
    if (params.n_steps < 1) throw std::invalid_argument("n_steps must be at least 1");
    if (params.n_shots < 1) throw std::invalid_argument("n_shots must be at least 1");
    validate_source(geom, source);

    const WalkRegisters regs = make_walk_registers(geom.n_x(), geom.n_y());
    const WalkStepOperator step(geom, regs, params.coin_mode);
    const QubitRange sample_range = regs.position_and_coin();

    WalkRunReport report;
    report.flux = FluxMap(geom.n_x(), geom.n_y(), Normalization::PerStepSum);
    report.steps_requested = params.n_steps;
    report.seed = rng.seed();

    // initial shot histogram sampled from the source distribution
    std::map<std::uint32_t, std::uint64_t> histogram;
    {
        const std::vector<double> dist = source_distribution(geom, source);
        std::vector<double> cdf(dist.size());
        double acc = 0.0;
        for (std::size_t i = 0; i < dist.size(); ++i) {
            acc += dist[i];
            cdf[i] = acc;
        }
        for (std::uint64_t s = 0; s < params.n_shots; ++s) {
            const double u = rng.next_double() * acc;
            const std::size_t idx = std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
            ++histogram[static_cast<std::uint32_t>(std::min(idx, dist.size() - 1))];
        }
    }

    for (std::uint32_t step_index = 0; step_index < params.n_steps; ++step_index) {
        std::uint64_t alive = 0;
        for (const auto& [cell, count] : histogram) alive += count;
        if (alive == 0) {
            report.truncated = true;
            break;
        }
        report.shots_alive.push_back(alive);

        std::map<std::uint32_t, std::uint64_t> next_histogram;
        std::map<Cell, std::uint64_t> measured;
        double success = 1.0;

        for (const auto& [cell_idx, count] : histogram) {
            const Cell cell = geom.cell_at(cell_idx);
            StateVector state = StateVector::basis_state(
                regs.n_qubits, geom.position_basis_index(cell) << regs.pos_x.begin);
            success = step.apply(state);
            const auto counts = sample_positions(state, sample_range, count, rng);
            for (const auto& [outcome, n] : counts) {
                const std::uint64_t pos_bits = outcome & ((std::uint64_t{1} << regs.position().size) - 1);
                const std::uint32_t coin_bits =
                    static_cast<std::uint32_t>(outcome >> regs.position().size) & 7u;
                const Cell landed = geom.cell_of_basis_index(pos_bits);
                measured[landed] += n;
                const bool stayed = (coin_bits & 4u) == 0;  // c2 = 0: absorption self-loop
                if (params.absorb_mode == AbsorbMode::Kill && stayed) continue;
                next_histogram[geom.cell_index(landed)] += n;
            }
        }

        for (const auto& [cell, n] : measured) {
            report.flux.at(cell.x, cell.y) += static_cast<double>(n);
        }
        report.step_histograms.push_back(std::move(measured));
        report.post_selection_success.push_back(success);
        report.steps_completed = step_index + 1;
        histogram = std::move(next_histogram);
    }

    if (report.steps_completed < report.steps_requested) report.truncated = true;
    report.flux.n_samples = params.n_shots;
    return report;
}

struct AmplifiedWalkResult {
    double baseline = 0.0;   // a = sin^2(theta), read from exact simulation
    double amplified = 0.0;  // good-state probability after k Grover rounds
    double theta = 0.0;
    std::uint32_t k_used = 0;
    bool k_capped = false;  // a > 0.5 with k = auto
    std::uint32_t n_qubits = 0;
};

namespace detail {

// Unitary A = source prep + n walk steps, each step on fresh coin and
// ancilla registers (5 qubits per step) so that A is invertible. The good
// subspace is {position in detector} and {all ancillas = 0}.
class AmplifiedWalk {
public:
    AmplifiedWalk(const GridGeometry& geom, const SourceSpec& source, std::uint32_t n_steps,
                  const DetectorRegion& detector, PositionCoin::Mode mode) {
        validate_detector(geom, detector);
        const std::uint32_t n_pos = geom.n_x() + geom.n_y();
        n_qubits_ = n_pos + 5 * n_steps;
        if (n_qubits_ > kMaxQubits) {
            throw std::invalid_argument("amplified walk exceeds the simulator qubit budget");
        }
        for (std::uint32_t s = 0; s < n_steps; ++s) {
            WalkRegisters regs;
            regs.pos_x = {0, geom.n_x()};
            regs.pos_y = {geom.n_x(), geom.n_y()};
            regs.coin = {n_pos + 5 * s, 3};
            regs.coin_ancilla = n_pos + 5 * s + 3;
            regs.boundary_ancilla = n_pos + 5 * s + 4;
            regs.n_qubits = n_qubits_;
            StepBlock block{PositionCoin(geom, regs, mode),
                            build_boundary_conditions(regs),
                            build_shift(regs),
                            Circuit{0},
                            Circuit{0}};
            block.boundary_inv = block.boundary.inverse();
            block.shift_inv = block.shift.inverse();
            steps_.push_back(std::move(block));
            ancilla_mask_ |= std::uint64_t{1} << regs.coin_ancilla;
            ancilla_mask_ |= std::uint64_t{1} << regs.boundary_ancilla;
        }
        source_prep_ = build_source_prep(geom, source, steps_.front().coin.registers(), n_qubits_);
        source_prep_inv_ = source_prep_.inverse();
        for (Cell c : detector.cells) detector_positions_.push_back(geom.position_basis_index(c));
        std::sort(detector_positions_.begin(), detector_positions_.end());
        detector_positions_.erase(
            std::unique(detector_positions_.begin(), detector_positions_.end()),
            detector_positions_.end());
        position_mask_ = (std::uint64_t{1} << n_pos) - 1;
    }

    std::uint32_t n_qubits() const { return n_qubits_; }

    StateVector prepared() const {
        StateVector state(n_qubits_);
        apply_a(state);
        return state;
    }

    void apply_a(StateVector& state) const {
        apply_circuit(state, source_prep_);
        for (const StepBlock& step : steps_) {
            step.coin.apply_unitary(state);
            apply_circuit(state, step.boundary);
            apply_circuit(state, step.shift);
        }
    }

    void apply_a_inverse(StateVector& state) const {
        for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) {
            apply_circuit(state, it->shift_inv);
            apply_circuit(state, it->boundary_inv);
            it->coin.apply_unitary_inverse(state);
        }
        apply_circuit(state, source_prep_inv_);
    }

    bool is_good(std::uint64_t index) const {
        if (index & ancilla_mask_) return false;
        return std::binary_search(detector_positions_.begin(), detector_positions_.end(),
                                  index & position_mask_);
    }

    double good_probability(const StateVector& state) const {
        double p = 0.0;
        for (std::uint64_t i = 0; i < state.dim(); ++i) {
            if (is_good(i)) p += std::norm(state.amplitude(i));
        }
        return p / state.norm2();
    }

    // Grover iterate Q = -A S_0 A^dagger S_good.
    void apply_q(StateVector& state) const {
        for (std::uint64_t i = 0; i < state.dim(); ++i) {
            if (is_good(i)) state.mutable_amplitude(i) = -state.amplitude(i);
        }
        apply_a_inverse(state);
        state.mutable_amplitude(0) = -state.amplitude(0);
        apply_a(state);
        state.scale_all(Complex{-1.0, 0.0});
    }

private:
    struct StepBlock {
        PositionCoin coin;
        Circuit boundary;
        Circuit shift;
        Circuit boundary_inv;
        Circuit shift_inv;
    };

    std::uint32_t n_qubits_ = 0;
    std::vector<StepBlock> steps_;
    Circuit source_prep_{0};
    Circuit source_prep_inv_{0};
    std::uint64_t ancilla_mask_ = 0;
    std::uint64_t position_mask_ = 0;
    std::vector<std::uint64_t> detector_positions_;
};

}  // namespace detail

// Propagates the walk N steps as a single unitary (fresh ancillas per step,
// no mid-circuit reset) and applies k rounds of amplitude amplification on
// the detector subspace. The baseline probability a is read from exact
// simulation; k = auto picks floor(pi / (4 arcsin(sqrt(a)))).
inline AmplifiedWalkResult run_amplified_walk(const GridGeometry& geom, const SourceSpec& source,
                                              std::uint32_t n_steps, const DetectorRegion& detector,
                                              int grover_k = -1,
                                              PositionCoin::Mode mode = PositionCoin::Mode::FastPath) {
    if (n_steps < 1) throw std::invalid_argument("n_steps must be at least 1");
    const detail::AmplifiedWalk walk(geom, source, n_steps, detector, mode);

    StateVector state = walk.prepared();
    AmplifiedWalkResult result;
    result.n_qubits = walk.n_qubits();
    result.baseline = walk.good_probability(state);
    if (result.baseline <= 0.0) {
        throw std::runtime_error("detector unreachable after " + std::to_string(n_steps) +
                                 " steps: good-state probability is zero, nothing to amplify");
    }
    result.theta = std::asin(std::min(1.0, std::sqrt(result.baseline)));

    if (grover_k < 0) {
        if (result.baseline > 0.5) {
            result.k_used = 0;
            result.k_capped = true;
        } else {
            result.k_used = static_cast<std::uint32_t>(std::floor(kPi / (4.0 * result.theta)));
        }
    } else {
        result.k_used = static_cast<std::uint32_t>(grover_k);
    }

    for (std::uint32_t k = 0; k < result.k_used; ++k) walk.apply_q(state);
    result.amplified = walk.good_probability(state);
    return result;
}

struct SwapTestResult {
    double estimate = 0.0;      // 2 freq(0) - 1
    double exact_p0 = 0.0;      // ancilla P(0) from the statevector
    double exact_overlap = 0.0; // |<psi|phi>|^2 (Tr rho sigma for mixed inputs)
    std::uint64_t shots_zero = 0;
    std::uint64_t n_shots = 0;
    double std_error = 0.0;     // binomial sigma of the estimate
};

namespace detail {

inline SwapTestResult swap_test_run(StateVector joint, QubitRange a, QubitRange b,
                                    std::uint32_t ancilla, std::uint64_t n_shots, RngStream& rng) {
    if (a.size != b.size) throw std::invalid_argument("swap test register size mismatch");
    if (n_shots == 0) throw std::invalid_argument("n_shots must be at least 1");
    Circuit circuit(joint.n_qubits());
    circuit.h(ancilla);
    for (std::uint32_t i = 0; i < a.size; ++i) {
        circuit.cswap(ancilla, a.begin + i, b.begin + i);
    }
    circuit.h(ancilla);
    apply_circuit(joint, circuit);

    SwapTestResult result;
    result.n_shots = n_shots;
    result.exact_p0 = joint.probability_of({{ancilla, 0}});
    result.exact_overlap = std::clamp(2.0 * result.exact_p0 - 1.0, -1.0, 1.0);
    for (std::uint64_t s = 0; s < n_shots; ++s) {
        if (rng.next_double() < result.exact_p0) ++result.shots_zero;
    }
    const double freq0 = static_cast<double>(result.shots_zero) / static_cast<double>(n_shots);
    result.estimate = 2.0 * freq0 - 1.0;
    result.std_error =
        2.0 * std::sqrt(std::max(0.0, result.exact_p0 * (1.0 - result.exact_p0) /
                                          static_cast<double>(n_shots)));
    return result;
}

}  // namespace detail

// Swap test between two pure states on equally sized registers. P(ancilla=0)
// is (1 + |<psi|phi>|^2) / 2; the returned estimate 2 freq(0) - 1 converges
// to the squared overlap.
inline SwapTestResult swap_test_overlap(const StateVector& psi, const StateVector& phi,
                                        std::uint64_t n_shots, RngStream& rng) {
    if (psi.n_qubits() != phi.n_qubits()) {
        throw std::invalid_argument("swap test register size mismatch");
    }
    const std::uint32_t n = psi.n_qubits();
    StateVector joint = tensor(tensor(psi, phi), StateVector(1));
    return detail::swap_test_run(std::move(joint), {0, n}, {n, n}, 2 * n, n_shots, rng);
}

// Region indicator state: uniform superposition over the detector cells on a
// position-sized register.
inline StateVector region_indicator_state(const GridGeometry& geom, const DetectorRegion& region) {
    validate_detector(geom, region);
    std::vector<Complex> amps(std::uint64_t{1} << (geom.n_x() + geom.n_y()), Complex{0.0, 0.0});
    std::vector<std::uint64_t> indices;
    for (Cell c : region.cells) indices.push_back(geom.position_basis_index(c));
    std::sort(indices.begin(), indices.end());
    indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
    const double amp = 1.0 / std::sqrt(static_cast<double>(indices.size()));
    for (std::uint64_t i : indices) amps[i] = Complex{amp, 0.0};
    return StateVector::from_amplitudes(geom.n_x() + geom.n_y(), std::move(amps));
}

// Swap-test response scoring of a walk state against a detector region: the
// score register carries the normalized region indicator, a fresh ancilla is
// measured n_shots times. The walk state's non-position registers ride along
// untouched, so for an entangled walk state the estimate converges to
// Tr(rho_pos sigma_region).
inline SwapTestResult swap_test_score(const StateVector& walk_state, const WalkRegisters& regs,
                                      const GridGeometry& geom, const DetectorRegion& region,
                                      std::uint64_t n_shots, RngStream& rng) {
    const QubitRange pos = regs.position();
    if (pos.size != geom.n_x() + geom.n_y()) {
        throw std::invalid_argument("swap test register size mismatch");
    }
    const StateVector score = region_indicator_state(geom, region);
    StateVector joint = tensor(tensor(walk_state, score), StateVector(1));
    const QubitRange score_range{walk_state.n_qubits(), pos.size};
    const std::uint32_t ancilla = walk_state.n_qubits() + pos.size;
    return detail::swap_test_run(std::move(joint), pos, score_range, ancilla, n_shots, rng);
}

}  // namespace qwalk
