#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qwalk/config_io.hpp"
#include "qwalk/fixed_point.hpp"
#include "qwalk/flux_map.hpp"
#include "qwalk/geometry.hpp"
#include "qwalk/monte_carlo.hpp"
#include "qwalk/rng.hpp"
#include "qwalk/strategies.hpp"

namespace qwalk {

struct MapMetrics {
    double cosine = 0.0;
    double tv = 0.0;  // total-variation distance after unit-sum normalization
};

// Cosine similarity and TV distance between two flux maps, both unit-sum
// normalized first; scale- and order-invariant.
inline MapMetrics compare_maps(const FluxMap& a, const FluxMap& b) {
    if (a.n_x != b.n_x || a.n_y != b.n_y) {
        throw std::invalid_argument("flux map shape mismatch");
    }
    const FluxMap na = a.unit_sum();
    const FluxMap nb = b.unit_sum();
    double dot = 0.0, norm_a = 0.0, norm_b = 0.0, tv = 0.0;
    for (std::size_t i = 0; i < na.tallies.size(); ++i) {
        dot += na.tallies[i] * nb.tallies[i];
        norm_a += na.tallies[i] * na.tallies[i];
        norm_b += nb.tallies[i] * nb.tallies[i];
        tv += std::abs(na.tallies[i] - nb.tallies[i]);
    }
    return {dot / std::sqrt(norm_a * norm_b), tv / 2.0};
}

struct SliceVector {
    char axis = 'x';
    double coordinate_cm = 0.0;
    std::uint32_t index = 0;          // fixed row/column index
    std::vector<double> values;
    std::vector<double> centers_cm;   // cell centers along the varying axis
};

// Extracts the column (axis 'x') or row (axis 'y') of cells whose extent
// contains the coordinate; a cell boundary belongs to the upper cell.
inline SliceVector extract_slice(const FluxMap& flux, char axis, double coordinate_cm,
                                 double cell_size) {
    if (axis != 'x' && axis != 'y') throw std::invalid_argument("axis must be 'x' or 'y'");
    if (!(cell_size > 0.0)) throw std::invalid_argument("cell_size must be positive");
    const std::uint32_t along = axis == 'x' ? flux.width() : flux.height();
    if (coordinate_cm < 0.0 || coordinate_cm / cell_size >= static_cast<double>(along)) {
        throw std::out_of_range("slice coordinate outside the physical domain");
    }
    SliceVector slice;
    slice.axis = axis;
    slice.coordinate_cm = coordinate_cm;
    slice.index = static_cast<std::uint32_t>(coordinate_cm / cell_size);
    if (axis == 'x') {
        for (std::uint32_t y = 0; y < flux.height(); ++y) {
            slice.values.push_back(flux.at(slice.index, y));
            slice.centers_cm.push_back((y + 0.5) * cell_size);
        }
    } else {
        for (std::uint32_t x = 0; x < flux.width(); ++x) {
            slice.values.push_back(flux.at(x, slice.index));
            slice.centers_cm.push_back((x + 0.5) * cell_size);
        }
    }
    return slice;
}

enum class Solver { Mc, Fd, WalkMeasured, WalkAmplified, SwapScore };

inline std::string to_string(Solver s) {
    switch (s) {
        case Solver::Mc: return "mc";
        case Solver::Fd: return "fd";
        case Solver::WalkMeasured: return "walk-measured";
        case Solver::WalkAmplified: return "walk-amplified";
        case Solver::SwapScore: return "swap-score";
    }
    throw std::logic_error("bad solver");
}

struct SliceRequest {
    char axis = 'x';
    double coordinate_cm = 0.0;
};

struct ExperimentConfig {
    explicit ExperimentConfig(GeometryConfig geom, std::string source = "(inline)")
        : geometry(std::move(geom)), geometry_source(std::move(source)) {}

    GeometryConfig geometry;
    std::string geometry_source;  // path or "(inline)", echoed into reports
    std::set<Solver> solvers;
    std::uint64_t seed = 1;
    std::string out_dir = "out";

    std::uint64_t mc_particles = 500000;
    std::uint64_t mc_max_collisions = 1000;
    FdOptions fd;
    MeasuredWalkParams walk;
    std::uint32_t amplified_steps = 2;
    int grover_k = -1;  // -1 = auto
    std::uint32_t swap_steps = 2;
    std::uint64_t swap_shots = 100000;
    std::optional<SliceRequest> slice;
};

struct SolverOutcome {
    Solver solver{};
    bool ok = false;
    std::string error;
    double runtime_ms = 0.0;
    std::vector<std::string> outputs;  // file paths written
};

struct PairMetrics {
    std::string a, b;
    double cosine = 0.0;
    double tv = 0.0;
};

struct ComparisonReport {
    std::vector<SolverOutcome> outcomes;
    std::vector<PairMetrics> pairs;
    std::optional<AmplifiedWalkResult> amplified;
    std::optional<SwapTestResult> swap_score;
    nlohmann::json as_json;  // full serialized report
};

struct ExperimentResult {
    ComparisonReport report;
    bool all_ok = true;
};

namespace detail {

// Per-solver rng streams are derived from the master seed with fixed tags so
// that the solver set does not influence individual streams.
inline RngStream solver_stream(std::uint64_t seed, Solver solver) {
    RngStream tagger(seed ^ (0x51ED2701ULL + 0x9E3779B9ULL * static_cast<std::uint64_t>(solver)));
    return tagger.split();
}

// Post-selected walk state after n unitary steps (fresh ancillas per step):
// the input state for swap-test scoring.
inline StateVector swap_score_walk_state(const GridGeometry& geom, const SourceSpec& source,
                                         std::uint32_t n_steps, PositionCoin::Mode mode,
                                         WalkRegisters& regs_out) {
    const std::uint32_t n_pos = geom.n_x() + geom.n_y();
    const std::uint32_t n_qubits = n_pos + 5 * n_steps;
    if (n_qubits > kMaxQubits) {
        throw std::invalid_argument("swap-score walk exceeds the simulator qubit budget");
    }
    StateVector state(n_qubits);
    WalkRegisters first;
    for (std::uint32_t s = 0; s < n_steps; ++s) {
        WalkRegisters regs;
        regs.pos_x = {0, geom.n_x()};
        regs.pos_y = {geom.n_x(), geom.n_y()};
        regs.coin = {n_pos + 5 * s, 3};
        regs.coin_ancilla = n_pos + 5 * s + 3;
        regs.boundary_ancilla = n_pos + 5 * s + 4;
        regs.n_qubits = n_qubits;
        if (s == 0) {
            first = regs;
            apply_circuit(state, build_source_prep(geom, source, regs, n_qubits));
        }
        PositionCoin coin(geom, regs, mode);
        coin.apply_postselected(state);
        apply_circuit(state, build_boundary_conditions(regs, n_qubits));
        apply_circuit(state, build_shift(regs, n_qubits));
    }
    regs_out = first;
    return state;
}

inline nlohmann::json slice_to_json(const SliceVector& s) {
    return {{"axis", std::string(1, s.axis)},
            {"coordinate_cm", s.coordinate_cm},
            {"index", s.index},
            {"values", s.values},
            {"centers_cm", s.centers_cm}};
}

}  // namespace detail

// Runs every selected solver, writes one flux CSV per flux-producing solver
// plus report.json / manifest.json / plot_manifest.json under out_dir.
// A solver failure is recorded in the manifest and reflected in all_ok;
// completed outputs are retained.
inline ExperimentResult run_experiment(const ExperimentConfig& config) {
    namespace fs = std::filesystem;
    if (config.solvers.empty()) {
        throw std::invalid_argument("experiment selects no solver");
    }
    fs::create_directories(config.out_dir);

    const GridGeometry& geom = config.geometry.geometry;
    const SourceSpec& source = config.geometry.source;
    const DetectorRegion& detector = config.geometry.detector;

    ExperimentResult result;
    std::vector<std::pair<std::string, FluxMap>> flux_maps;
    nlohmann::json extra = nlohmann::json::object();

    for (Solver solver : config.solvers) {
        SolverOutcome outcome;
        outcome.solver = solver;
        const auto start = std::chrono::steady_clock::now();
        try {
            RngStream rng = detail::solver_stream(config.seed, solver);
            switch (solver) {
                case Solver::Mc: {
                    McOptions opts;
                    opts.max_collisions = config.mc_max_collisions;
                    const McResult mc = run_mc(geom, source, config.mc_particles, rng, opts);
                    flux_maps.emplace_back("mc", mc.flux);
                    extra["mc"] = {{"particles", mc.n_particles},
                                   {"capped_trajectories", mc.capped_trajectories}};
                    break;
                }
                case Solver::Fd: {
                    flux_maps.emplace_back("fd", run_fd(geom, source, config.fd));
                    break;
                }
                case Solver::WalkMeasured: {
                    const WalkRunReport report = run_measured_walk(geom, source, config.walk, rng);
                    flux_maps.emplace_back("walk_measured", report.flux);
                    extra["walk_measured"] = {
                        {"steps_requested", report.steps_requested},
                        {"steps_completed", report.steps_completed},
                        {"truncated", report.truncated},
                        {"shots", config.walk.n_shots},
                        {"absorb_mode", to_string(config.walk.absorb_mode)},
                        {"post_selection_success", report.post_selection_success},
                        {"shots_alive", report.shots_alive},
                        {"seed", report.seed}};
                    break;
                }
                case Solver::WalkAmplified: {
                    const AmplifiedWalkResult amp = run_amplified_walk(
                        geom, source, config.amplified_steps, detector, config.grover_k);
                    result.report.amplified = amp;
                    extra["walk_amplified"] = {{"baseline", amp.baseline},
                                               {"amplified", amp.amplified},
                                               {"theta", amp.theta},
                                               {"k_used", amp.k_used},
                                               {"k_capped", amp.k_capped},
                                               {"steps", config.amplified_steps},
                                               {"n_qubits", amp.n_qubits}};
                    break;
                }
                case Solver::SwapScore: {
                    WalkRegisters regs;
                    const StateVector state = detail::swap_score_walk_state(
                        geom, source, config.swap_steps, config.walk.coin_mode, regs);
                    const SwapTestResult swap =
                        swap_test_score(state, regs, geom, detector, config.swap_shots, rng);
                    result.report.swap_score = swap;
                    extra["swap_score"] = {{"estimate", swap.estimate},
                                           {"exact_p0", swap.exact_p0},
                                           {"exact_overlap", swap.exact_overlap},
                                           {"shots", swap.n_shots},
                                           {"std_error", swap.std_error},
                                           {"steps", config.swap_steps}};
                    break;
                }
            }
            outcome.ok = true;
        } catch (const std::exception& e) {
            outcome.ok = false;
            outcome.error = e.what();
            result.all_ok = false;
        }
        outcome.runtime_ms = std::chrono::duration<double, std::milli>(
                                 std::chrono::steady_clock::now() - start)
                                 .count();
        result.report.outcomes.push_back(std::move(outcome));
    }

    // emit flux CSVs
    auto file_tag = [](Solver s) {
        std::string tag = to_string(s);
        for (char& c : tag) {
            if (c == '-') c = '_';
        }
        return tag;
    };
    for (const auto& [name, map] : flux_maps) {
        const fs::path path = fs::path(config.out_dir) / ("flux_" + name + ".csv");
        write_flux_csv(map, path.string());
        for (SolverOutcome& o : result.report.outcomes) {
            if (file_tag(o.solver) == name) o.outputs.push_back(path.string());
        }
    }

    // pairwise metrics + optional slices
    nlohmann::json pairs = nlohmann::json::array();
    for (std::size_t i = 0; i < flux_maps.size(); ++i) {
        for (std::size_t j = i + 1; j < flux_maps.size(); ++j) {
            const MapMetrics m = compare_maps(flux_maps[i].second, flux_maps[j].second);
            result.report.pairs.push_back({flux_maps[i].first, flux_maps[j].first, m.cosine, m.tv});
            pairs.push_back({{"a", flux_maps[i].first},
                             {"b", flux_maps[j].first},
                             {"cosine", m.cosine},
                             {"tv", m.tv}});
        }
    }

    nlohmann::json slices = nlohmann::json::object();
    if (config.slice) {
        for (const auto& [name, map] : flux_maps) {
            const SliceVector s = extract_slice(map, config.slice->axis,
                                                config.slice->coordinate_cm, geom.cell_size());
            slices[name] = detail::slice_to_json(s);
        }
    }

    nlohmann::json report;
    report["geometry"] = config.geometry_source;
    report["seed"] = config.seed;
    nlohmann::json outcomes = nlohmann::json::object();
    for (const SolverOutcome& o : result.report.outcomes) {
        outcomes[to_string(o.solver)] = {{"ok", o.ok},
                                         {"runtime_ms", o.runtime_ms},
                                         {"error", o.error},
                                         {"outputs", o.outputs}};
    }
    report["solvers"] = outcomes;
    report["pairs"] = pairs;
    report["slices"] = slices;
    report["results"] = extra;
    result.report.as_json = report;

    {
        std::ofstream out(fs::path(config.out_dir) / "report.json");
        out << report.dump(2) << "\n";
    }
    {
        nlohmann::json manifest;
        manifest["ok"] = result.all_ok;
        nlohmann::json solvers = nlohmann::json::object();
        for (const SolverOutcome& o : result.report.outcomes) {
            solvers[to_string(o.solver)] = {{"status", o.ok ? "ok" : "failed"},
                                            {"error", o.error},
                                            {"outputs", o.outputs}};
        }
        manifest["solvers"] = solvers;
        std::ofstream out(fs::path(config.out_dir) / "manifest.json");
        out << manifest.dump(2) << "\n";
    }
    {
        nlohmann::json plot;
        nlohmann::json files = nlohmann::json::array();
        for (const auto& [name, map] : flux_maps) {
            files.push_back({{"label", name},
                             {"csv", (fs::path(config.out_dir) / ("flux_" + name + ".csv")).string()}});
        }
        plot["flux_maps"] = files;
        if (config.slice) {
            plot["slice"] = {{"axis", std::string(1, config.slice->axis)},
                             {"coordinate_cm", config.slice->coordinate_cm}};
        }
        std::ofstream out(fs::path(config.out_dir) / "plot_manifest.json");
        out << plot.dump(2) << "\n";
    }
    return result;
}

}  // namespace qwalk
