#include <catch2/catch_amalgamated.hpp>

#include <map>

#include "qwalk/simulator.hpp"
#include "qwalk/strategies.hpp"
#include "qwalk/walk_circuits.hpp"
#include "test_helpers.hpp"

using namespace qwalk;
using Catch::Approx;

namespace {

GridGeometry homogeneous_grid(std::uint32_t n_x, std::uint32_t n_y, double sigma_s, double sigma_a) {
    return GridGeometry(n_x, n_y, 1.0, {"medium"},
                        {make_material(sigma_s + sigma_a, sigma_s, sigma_a)},
                        std::vector<std::uint16_t>(std::size_t{1} << (n_x + n_y), 0));
}

// seeded two-material patchwork used by the cross-backend equivalence checks
GridGeometry random_grid_4x4(std::uint64_t seed) {
    RngStream rng(seed);
    std::vector<std::uint16_t> cells(16);
    for (auto& c : cells) c = rng.next_double() < 0.5 ? 0 : 1;
    return GridGeometry(2, 2, 1.0, {"a", "b"},
                        {make_material(1.0, 0.7, 0.3), make_material(1.0, 0.2, 0.8)},
                        std::move(cells));
}

StateVector position_state(const GridGeometry& geom, const WalkRegisters& regs, Cell cell) {
    return StateVector::basis_state(regs.n_qubits,
                                    geom.position_basis_index(cell) << regs.pos_x.begin);
}

}  // namespace

TEST_CASE("point source prep uses only X gates", "[walk]") {
    const GridGeometry geom = homogeneous_grid(2, 2, 1.0, 0.0);
    const WalkRegisters regs = make_walk_registers(2, 2);
    const Circuit prep = build_source_prep(geom, SourceSpec::point({2, 1}), regs);
    for (const GateOp& op : prep.ops) CHECK(op.kind == GateKind::X);

    StateVector s(regs.n_qubits);
    apply_circuit(s, prep);
    // |x=10>|y=01>: x bits 10 -> x=2, y bits 01 -> y=1
    const std::uint64_t expected = geom.position_basis_index({2, 1});
    CHECK(std::abs(s.amplitude(expected) - Complex{1.0, 0.0}) < kStructuralTol);
}

TEST_CASE("uniform weighted source gives equal amplitudes", "[walk]") {
    const GridGeometry geom = homogeneous_grid(2, 2, 1.0, 0.0);
    const WalkRegisters regs = make_walk_registers(2, 2);
    std::vector<std::pair<Cell, double>> weights;
    for (std::uint32_t i = 0; i < geom.n_cells(); ++i) weights.emplace_back(geom.cell_at(i), 1.0);
    StateVector s(regs.n_qubits);
    apply_circuit(s, build_source_prep(geom, SourceSpec::weighted(weights), regs));
    const double expected = 1.0 / 4.0;  // 2^{-(n_x+n_y)/2}
    for (std::uint32_t i = 0; i < 16; ++i) {
        CHECK(std::abs(s.amplitude(i) - Complex{expected, 0.0}) < kStructuralTol);
    }
}

TEST_CASE("weighted source 1:3 loads amplitudes (1/2, sqrt(3)/2)", "[walk]") {
    const GridGeometry geom = homogeneous_grid(2, 2, 1.0, 0.0);
    const WalkRegisters regs = make_walk_registers(2, 2);
    const SourceSpec source = SourceSpec::weighted({{{0, 0}, 1.0}, {{3, 2}, 3.0}});
    StateVector s(regs.n_qubits);
    apply_circuit(s, build_source_prep(geom, source, regs));
    CHECK(std::abs(s.amplitude(geom.position_basis_index({0, 0})) - Complex{0.5, 0.0}) <
          kStructuralTol);
    CHECK(std::abs(s.amplitude(geom.position_basis_index({3, 2})) -
                   Complex{std::sqrt(3.0) / 2.0, 0.0}) < kStructuralTol);
    CHECK_THROWS_AS(
        build_source_prep(geom, SourceSpec::weighted({{{0, 0}, 0.0}}), regs),
        std::invalid_argument);
}

TEST_CASE("coin spec amplitudes are normalized with shared stay amplitude", "[walk]") {
    const GridGeometry geom = build_bypass_geometry(3, 3);
    const CoinSpec spec = coin_spec_from_geometry(geom);
    for (std::uint32_t cell = 0; cell < geom.n_cells(); ++cell) {
        double sum = 0.0;
        for (int k = 0; k < 8; ++k) {
            CHECK(spec.amplitude[cell][k] >= 0.0);
            CHECK(spec.amplitude[cell][k] <= 1.0);
            sum += spec.amplitude[cell][k] * spec.amplitude[cell][k];
        }
        CHECK(std::abs(sum - 1.0) < 1e-12);
        const double p_a = cell_probabilities(geom, geom.cell_at(cell)).absorb;
        for (int k = 0; k < 4; ++k) {
            CHECK(spec.amplitude[cell][k] == Approx(std::sqrt(p_a) / 2.0).margin(1e-12));
        }
    }
    // bypass: max coin probability is 0.225, so scale = 1 / 1.8
    CHECK(spec.scale == Approx(1.0 / 1.8).margin(1e-12));
}

TEST_CASE("conditioned coin distribution matches cell probabilities", "[walk]") {
    const GridGeometry geom = build_bypass_geometry(2, 2);
    const WalkRegisters regs = make_walk_registers(2, 2);
    const PositionCoin coin(geom, regs, PositionCoin::Mode::FastPath);

    for (std::uint32_t idx = 0; idx < geom.n_cells(); ++idx) {
        const Cell cell = geom.cell_at(idx);
        StateVector s = position_state(geom, regs, cell);
        const double success = coin.apply_postselected(s);
        CHECK(success == Approx(coin.scale()).margin(kStructuralTol));

        const CellProbabilities p = cell_probabilities(geom, cell);
        const std::vector<double> coin_dist = s.marginal(regs.coin);
        for (int k = 0; k < 4; ++k) CHECK(coin_dist[k] == Approx(p.absorb / 4.0).margin(1e-10));
        CHECK(coin_dist[coin_value(Direction::Right)] ==
              Approx(p.scatter[0]).margin(1e-10));
        CHECK(coin_dist[coin_value(Direction::Left)] ==
              Approx(p.scatter[2]).margin(1e-10));
        CHECK(coin_dist[coin_value(Direction::Up)] == Approx(p.scatter[1]).margin(1e-10));
        CHECK(coin_dist[coin_value(Direction::Down)] ==
              Approx(p.scatter[3]).margin(1e-10));
    }
}

TEST_CASE("arm cell stay probability is p_a via the c2 mask", "[walk]") {
    const GridGeometry geom = build_bypass_geometry(3, 3);
    const WalkRegisters regs = make_walk_registers(3, 3);
    const PositionCoin coin(geom, regs, PositionCoin::Mode::FastPath);
    StateVector s = position_state(geom, regs, {0, 0});  // arm, p_a = 0.1
    coin.apply_postselected(s);
    CHECK(s.probability_of({{regs.coin.begin + 2, 0}}) == Approx(0.1).margin(1e-10));
}

TEST_CASE("pure scatterer: conditioned coin has no stay mass", "[walk]") {
    const GridGeometry geom = homogeneous_grid(2, 2, 1.0, 0.0);
    const WalkRegisters regs = make_walk_registers(2, 2);
    const PositionCoin coin(geom, regs, PositionCoin::Mode::FastPath);
    StateVector s = position_state(geom, regs, {1, 1});
    coin.apply_postselected(s);
    const std::vector<double> dist = s.marginal(regs.coin);
    for (int k = 0; k < 4; ++k) CHECK(dist[k] == Approx(0.0).margin(1e-12));
    for (int k = 4; k < 8; ++k) CHECK(dist[k] == Approx(0.25).margin(1e-10));
}

TEST_CASE("gate-level and fast-path coin agree including norm2", "[walk]") {
    const GridGeometry geom = random_grid_4x4(321);
    const WalkRegisters regs = make_walk_registers(2, 2);
    const PositionCoin gate(geom, regs, PositionCoin::Mode::GateLevel);
    const PositionCoin fast(geom, regs, PositionCoin::Mode::FastPath);

    RngStream rng(15);
    // random position-register superposition, everything else |0>
    StateVector pos = testing::random_state(4, rng);
    std::vector<Complex> amps(dim_of(regs.n_qubits), Complex{0, 0});
    for (std::uint64_t i = 0; i < 16; ++i) amps[i] = pos.amplitude(i);
    const StateVector start = StateVector::from_amplitudes(regs.n_qubits, std::move(amps));

    StateVector a = start, b = start;
    const double pa = gate.apply_postselected(a);
    const double pb = fast.apply_postselected(b);
    CHECK(pa == Approx(pb).margin(1e-10));
    CHECK(std::abs(a.norm2() - b.norm2()) < 1e-10);
    CHECK(testing::max_amplitude_diff(a, b) < 1e-10);
}

TEST_CASE("fast coin unitary inverts cleanly", "[walk]") {
    const GridGeometry geom = random_grid_4x4(77);
    const WalkRegisters regs = make_walk_registers(2, 2);
    const PositionCoin coin(geom, regs, PositionCoin::Mode::FastPath);
    RngStream rng(5);
    StateVector s = testing::random_state(regs.n_qubits, rng);
    const StateVector original = s;
    coin.apply_unitary(s);
    CHECK(std::abs(s.norm2() - original.norm2()) < kNormTol);
    coin.apply_unitary_inverse(s);
    CHECK(testing::max_amplitude_diff(s, original) < 1e-12);
}

TEST_CASE("coin builder rejects register collisions", "[walk]") {
    const GridGeometry geom = homogeneous_grid(2, 2, 1.0, 0.0);
    WalkRegisters regs = make_walk_registers(2, 2);
    regs.score = QubitRange{regs.coin_ancilla, 4};  // collides with coin-ancilla
    regs.n_qubits += 4;
    CHECK_THROWS_AS(PositionCoin(geom, regs, PositionCoin::Mode::FastPath),
                    std::invalid_argument);
}

TEST_CASE("boundary flips exactly the prohibited combinations", "[walk]") {
    const WalkRegisters regs = make_walk_registers(2, 2);
    const Circuit boundary = build_boundary_conditions(regs);
    const std::uint32_t w = 4, h = 4;

    for (std::uint32_t x = 0; x < w; ++x) {
        for (std::uint32_t y = 0; y < h; ++y) {
            for (std::uint32_t coin = 0; coin < 8; ++coin) {
                const std::uint64_t pos_bits = x | (y << 2);
                const std::uint64_t index = pos_bits | (std::uint64_t{coin} << 4);
                StateVector s = StateVector::basis_state(regs.n_qubits, index);
                apply_circuit(s, boundary);

                bool prohibited = false;
                std::uint32_t expected_coin = coin;
                if (coin == coin_value(Direction::Right) && x == w - 1) prohibited = true;
                if (coin == coin_value(Direction::Left) && x == 0) prohibited = true;
                if (coin == coin_value(Direction::Up) && y == h - 1) prohibited = true;
                if (coin == coin_value(Direction::Down) && y == 0) prohibited = true;
                if (prohibited) expected_coin = coin ^ 1u;  // c0 flip

                const std::uint64_t expected =
                    pos_bits | (std::uint64_t{expected_coin} << 4) |
                    (prohibited ? std::uint64_t{1} << regs.boundary_ancilla : 0);
                INFO("x=" << x << " y=" << y << " coin=" << coin);
                CHECK(std::abs(s.amplitude(expected) - Complex{1.0, 0.0}) < kStructuralTol);
            }
        }
    }
}

TEST_CASE("boundary is an involution on the coin", "[walk]") {
    const WalkRegisters regs = make_walk_registers(2, 2);
    const Circuit boundary = build_boundary_conditions(regs);
    const QubitRange pos_coin = regs.position_and_coin();
    for (std::uint64_t basis = 0; basis < (std::uint64_t{1} << pos_coin.size); ++basis) {
        StateVector s = StateVector::basis_state(regs.n_qubits, basis);
        apply_circuit(s, boundary);
        apply_circuit(s, boundary);
        // coin and position restored; the ancilla may keep its flag
        const std::vector<double> marg = s.marginal(pos_coin);
        CHECK(marg[basis] == Approx(1.0).margin(kStructuralTol));
    }
}

TEST_CASE("shift moves positions by coin direction with modular wrap", "[walk]") {
    for (std::uint32_t n : {2u, 3u}) {
        const WalkRegisters regs = make_walk_registers(n, n);
        const Circuit shift = build_shift(regs);
        const std::uint32_t w = 1u << n;
        std::uint32_t checked = 0;
        for (std::uint32_t x = 0; x < w; ++x) {
            for (std::uint32_t y = 0; y < w; ++y) {
                for (std::uint32_t coin = 0; coin < 8; ++coin) {
                    const std::uint64_t index =
                        x | (std::uint64_t{y} << n) | (std::uint64_t{coin} << (2 * n));
                    StateVector s = StateVector::basis_state(regs.n_qubits, index);
                    apply_circuit(s, shift);

                    std::uint32_t ex = x, ey = y;
                    if (const auto dir = direction_from_coin(coin)) {
                        const int d = static_cast<int>(*dir);
                        ex = static_cast<std::uint32_t>(
                            (static_cast<int>(x) + kDirDx[d] + w) % w);
                        ey = static_cast<std::uint32_t>(
                            (static_cast<int>(y) + kDirDy[d] + w) % w);
                    }
                    const std::uint64_t expected =
                        ex | (std::uint64_t{ey} << n) | (std::uint64_t{coin} << (2 * n));
                    // permutation check: unit amplitude at the target, nothing else
                    INFO("n=" << n << " x=" << x << " y=" << y << " coin=" << coin);
                    REQUIRE(std::abs(s.amplitude(expected) - Complex{1.0, 0.0}) < kStructuralTol);
                    ++checked;
                }
            }
        }
        CHECK(checked == w * w * 8);
    }
}

TEST_CASE("shift examples: right step, stay, raw wrap at the edge", "[walk]") {
    const WalkRegisters regs = make_walk_registers(3, 3);
    const Circuit shift = build_shift(regs);

    auto run = [&](std::uint32_t x, std::uint32_t y, std::uint32_t coin) {
        const std::uint64_t index = x | (y << 3) | (std::uint64_t{coin} << 6);
        StateVector s = StateVector::basis_state(regs.n_qubits, index);
        apply_circuit(s, shift);
        return s;
    };

    // |x=3>, coin right -> |x=4>
    CHECK(std::abs(run(3, 0, 4).amplitude(4 | (4ull << 6)) - Complex{1.0, 0.0}) < kStructuralTol);
    // stay coin |010> leaves the position alone
    CHECK(std::abs(run(5, 2, 2).amplitude(5 | (2ull << 3) | (2ull << 6)) - Complex{1.0, 0.0}) <
          kStructuralTol);
    // raw shift without boundaries wraps: |y=0>, coin down -> |y=7>
    CHECK(std::abs(run(1, 0, 7).amplitude(1 | (7ull << 3) | (7ull << 6)) - Complex{1.0, 0.0}) <
          kStructuralTol);
}

TEST_CASE("one walk step from an interior point source, pure scatterer", "[walk]") {
    const GridGeometry geom = homogeneous_grid(2, 2, 1.0, 0.0);
    const WalkRegisters regs = make_walk_registers(2, 2);
    const WalkStepOperator step(geom, regs, PositionCoin::Mode::FastPath);

    StateVector s = position_state(geom, regs, {1, 1});
    const double success = step.apply(s);
    CHECK(success == Approx(0.5).margin(1e-12));  // scale = 1/(8 * 0.25)

    const std::vector<double> dist = s.marginal(regs.position());
    CHECK(dist[geom.position_basis_index({2, 1})] == Approx(0.25).margin(1e-10));
    CHECK(dist[geom.position_basis_index({0, 1})] == Approx(0.25).margin(1e-10));
    CHECK(dist[geom.position_basis_index({1, 2})] == Approx(0.25).margin(1e-10));
    CHECK(dist[geom.position_basis_index({1, 0})] == Approx(0.25).margin(1e-10));
}

TEST_CASE("one walk step from the corner reflects prohibited moves", "[walk]") {
    const GridGeometry geom = homogeneous_grid(2, 2, 1.0, 0.0);
    const WalkRegisters regs = make_walk_registers(2, 2);
    const WalkStepOperator step(geom, regs, PositionCoin::Mode::FastPath);

    StateVector s = position_state(geom, regs, {0, 0});
    step.apply(s);
    const std::vector<double> dist = s.marginal(regs.position());
    // left reflects to right, down reflects to up
    CHECK(dist[geom.position_basis_index({1, 0})] == Approx(0.5).margin(1e-10));
    CHECK(dist[geom.position_basis_index({0, 1})] == Approx(0.5).margin(1e-10));

    // agrees with the classical kernel oracle
    std::vector<double> point(geom.n_cells(), 0.0);
    point[geom.cell_index({0, 0})] = 1.0;
    const std::vector<double> kernel = exact_step_distribution(geom, point);
    for (std::uint32_t i = 0; i < geom.n_cells(); ++i) {
        const Cell c = geom.cell_at(i);
        CHECK(dist[geom.position_basis_index(c)] == Approx(kernel[i]).margin(1e-10));
    }
}

TEST_CASE("one walk step in an arm cell keeps stay mass at the origin", "[walk]") {
    const GridGeometry geom = build_bypass_geometry(3, 3);
    const WalkRegisters regs = make_walk_registers(3, 3);
    const WalkStepOperator step(geom, regs, PositionCoin::Mode::FastPath);
    StateVector s = position_state(geom, regs, {1, 3});  // arm, interior
    step.apply(s);
    const std::vector<double> dist = s.marginal(regs.position());
    CHECK(dist[geom.position_basis_index({1, 3})] == Approx(0.1).margin(1e-10));
    CHECK(dist[geom.position_basis_index({2, 3})] == Approx(0.225).margin(1e-10));
}

TEST_CASE("full step with fresh ancillas matches the classical kernel everywhere", "[walk]") {
    const GridGeometry geom = build_bypass_geometry(2, 2);
    const WalkRegisters regs = make_walk_registers(2, 2);
    const WalkStepOperator step(geom, regs, PositionCoin::Mode::FastPath);

    for (std::uint32_t idx = 0; idx < geom.n_cells(); ++idx) {
        StateVector s = position_state(geom, regs, geom.cell_at(idx));
        step.apply(s);
        const std::vector<double> dist = s.marginal(regs.position());

        std::vector<double> point(geom.n_cells(), 0.0);
        point[idx] = 1.0;
        const std::vector<double> kernel = exact_step_distribution(geom, point);
        for (std::uint32_t j = 0; j < geom.n_cells(); ++j) {
            const Cell c = geom.cell_at(j);
            INFO("from cell " << idx << " to cell " << j);
            CHECK(dist[geom.position_basis_index(c)] == Approx(kernel[j]).margin(1e-10));
        }
    }
}

TEST_CASE("composed walk step without resets is unitary", "[walk]") {
    const GridGeometry geom = build_bypass_geometry(2, 2);
    const WalkRegisters regs = make_walk_registers(2, 2);
    const WalkStepCircuit step =
        build_walk_step(geom, regs, StepAncillaPolicy::FreshAncillas);
    REQUIRE(regs.n_qubits == 9);
    CHECK_FALSE(step.circuit.has_nonunitary());
    const auto matrix = circuit_matrix(step.circuit);
    CHECK(unitarity_defect(matrix, dim_of(regs.n_qubits)) < kStructuralTol);
}

TEST_CASE("walk step with resets runs honestly shot by shot", "[walk]") {
    const GridGeometry geom = homogeneous_grid(2, 2, 1.0, 0.0);
    const WalkRegisters regs = make_walk_registers(2, 2);
    const WalkStepCircuit step = build_walk_step(geom, regs);
    CHECK(step.circuit.has_nonunitary());
    CHECK(step.coin_scale == Approx(0.5).margin(1e-12));

    RngStream rng(8);
    std::map<std::uint64_t, int> landed;
    int successes = 0;
    const int shots = 400;
    for (int i = 0; i < shots; ++i) {
        StateVector s = position_state(geom, regs, {1, 1});
        const ApplyResult r = apply_circuit(s, step.circuit, &rng);
        // reset order: boundary ancilla, coin ancilla, then the coin register
        REQUIRE(r.measurements.size() == 5);
        if (r.measurements[1].outcome == 0) {
            ++successes;
            const auto counts = sample_positions(s, regs.position(), 1, rng);
            ++landed[counts.begin()->first];
        }
    }
    // coin post-selection succeeds about half the time (scale = 0.5)
    CHECK(successes > shots / 2 - 60);
    CHECK(successes < shots / 2 + 60);
    // successful shots land on the four neighbors only
    for (const auto& [index, count] : landed) {
        const Cell c = geom.cell_of_basis_index(index);
        const bool neighbor = (c.x == 1 && (c.y == 0 || c.y == 2)) ||
                              (c.y == 1 && (c.x == 0 || c.x == 2));
        CHECK(neighbor);
    }
}
