// Command-line harness: runs the solvers on a geometry config, compares flux
// maps and exports circuits as OpenQASM.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qwalk/qwalk.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    std::uint32_t steps = 10;
    std::uint64_t shots = 1000;
    std::uint64_t particles = 500000;
    std::string grover_k = "auto";
    std::string absorb_mode = "self-loop";
    double slice_cm = -1.0;
    std::string slice_axis = "x";
};

void add_common_options(CLI::App* cmd, CommonArgs& args, bool needs_config) {
    auto* config = cmd->add_option("--config", args.config_path, "geometry config (JSON)");
    if (needs_config) config->required();
    cmd->add_option("--seed", args.seed, "rng seed");
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--steps", args.steps, "walk steps");
    cmd->add_option("--shots", args.shots, "shots per step / swap-test shots");
    cmd->add_option("--particles", args.particles, "Monte Carlo particles");
    cmd->add_option("--grover-k", args.grover_k, "amplification rounds (N or 'auto')");
    cmd->add_option("--absorb-mode", args.absorb_mode, "self-loop|kill")
        ->check(CLI::IsMember({"self-loop", "kill"}));
    cmd->add_option("--slice-cm", args.slice_cm, "emit a 1D slice at this coordinate (cm)");
    cmd->add_option("--slice-axis", args.slice_axis, "slice axis (x or y)")
        ->check(CLI::IsMember({"x", "y"}));
}

qwalk::ExperimentConfig make_config(const CommonArgs& args, qwalk::Solver solver) {
    qwalk::ExperimentConfig config(qwalk::load_geometry(args.config_path), args.config_path);
    config.solvers = {solver};
    config.seed = args.seed;
    config.out_dir = args.out_dir;
    config.mc_particles = args.particles;
    config.walk.n_steps = args.steps;
    config.walk.n_shots = args.shots;
    config.walk.absorb_mode =
        args.absorb_mode == "kill" ? qwalk::AbsorbMode::Kill : qwalk::AbsorbMode::SelfLoop;
    config.amplified_steps = args.steps;
    config.swap_steps = args.steps;
    config.swap_shots = args.shots;
    config.grover_k = args.grover_k == "auto" ? -1 : std::stoi(args.grover_k);
    if (args.slice_cm >= 0.0) {
        config.slice = qwalk::SliceRequest{args.slice_axis[0], args.slice_cm};
    }
    return config;
}

int run_solver(const CommonArgs& args, qwalk::Solver solver) {
    const qwalk::ExperimentConfig config = make_config(args, solver);
    const qwalk::ExperimentResult result = qwalk::run_experiment(config);
    for (const qwalk::SolverOutcome& o : result.report.outcomes) {
        if (o.ok) {
            std::cout << to_string(o.solver) << ": ok (" << o.runtime_ms << " ms)\n";
            for (const std::string& f : o.outputs) std::cout << "  wrote " << f << "\n";
        } else {
            std::cerr << to_string(o.solver) << ": FAILED: " << o.error << "\n";
        }
    }
    if (result.report.amplified) {
        const auto& a = *result.report.amplified;
        std::cout << "baseline probability a = " << a.baseline << "\n"
                  << "amplified probability  = " << a.amplified << " (k = " << a.k_used
                  << (a.k_capped ? ", capped: a > 0.5" : "") << ")\n";
    }
    if (result.report.swap_score) {
        const auto& s = *result.report.swap_score;
        std::cout << "swap-test overlap estimate = " << s.estimate << " +/- " << 3.0 * s.std_error
                  << " (exact " << s.exact_overlap << ", " << s.n_shots << " shots)\n";
    }
    std::cout << "report: " << (std::filesystem::path(config.out_dir) / "report.json").string()
              << "\n";
    return result.all_ok ? 0 : 1;
}

int run_compare(const std::string& path_a, const std::string& path_b, double slice_cm,
                const std::string& slice_axis, double cell_size) {
    const qwalk::FluxMap a = qwalk::read_flux_csv(path_a);
    const qwalk::FluxMap b = qwalk::read_flux_csv(path_b);
    const qwalk::MapMetrics m = qwalk::compare_maps(a, b);
    std::cout << "cosine similarity: " << m.cosine << "\n";
    std::cout << "total variation:   " << m.tv << "\n";
    if (slice_cm >= 0.0) {
        const auto sa = qwalk::extract_slice(a.unit_sum(), slice_axis[0], slice_cm, cell_size);
        const auto sb = qwalk::extract_slice(b.unit_sum(), slice_axis[0], slice_cm, cell_size);
        std::cout << "slice " << slice_axis << "=" << slice_cm << " (index " << sa.index << ")\n";
        for (std::size_t i = 0; i < sa.values.size(); ++i) {
            std::cout << "  " << sa.centers_cm[i] << "," << sa.values[i] << "," << sb.values[i]
                      << "\n";
        }
    }
    return 0;
}

int run_export_qasm(const std::string& config_path, const std::string& circuit_name,
                    std::uint32_t qft_qubits, const std::string& out_path) {
    using namespace qwalk;
    Circuit circuit(0);
    if (circuit_name == "qft" || circuit_name == "inv-qft") {
        circuit = build_qft({0, qft_qubits}, circuit_name == "inv-qft");
    } else {
        if (config_path.empty()) {
            throw std::runtime_error("--config is required for geometry-dependent circuits");
        }
        const GeometryConfig gc = load_geometry(config_path);
        const GridGeometry& geom = gc.geometry;
        const WalkRegisters regs = make_walk_registers(geom.n_x(), geom.n_y());
        if (circuit_name == "source") {
            circuit = build_source_prep(geom, gc.source, regs);
            circuit.registers = regs.to_register_map();
        } else if (circuit_name == "coin") {
            circuit = PositionCoin(geom, regs, PositionCoin::Mode::GateLevel).as_circuit();
            circuit.registers = regs.to_register_map();
        } else if (circuit_name == "boundary") {
            circuit = build_boundary_conditions(regs);
            circuit.registers = regs.to_register_map();
        } else if (circuit_name == "shift") {
            circuit = build_shift(regs);
            circuit.registers = regs.to_register_map();
        } else if (circuit_name == "walk-step") {
            circuit = build_walk_step(geom, regs).circuit;
        } else {
            throw std::runtime_error("unknown circuit '" + circuit_name + "'");
        }
    }
    const std::string text = to_qasm(circuit);
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
    } else {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot open '" + out_path + "'");
        out << text;
        std::cout << "wrote " << out_path << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"2D particle transport: discrete-time quantum walk vs classical solvers"};
    app.require_subcommand(1);

    CommonArgs args;
    auto* mc = app.add_subcommand("mc", "analog Monte Carlo transport");
    auto* fd = app.add_subcommand("fd", "deterministic lattice fixed-point solver");
    auto* walk_measured = app.add_subcommand("walk-measured", "quantum walk, measured each step");
    auto* walk_amplified =
        app.add_subcommand("walk-amplified", "quantum walk with amplitude amplification");
    auto* swap_score = app.add_subcommand("swap-score", "swap-test response scoring");
    for (CLI::App* cmd : {mc, fd, walk_measured, walk_amplified, swap_score}) {
        add_common_options(cmd, args, true);
    }

    auto* compare = app.add_subcommand("compare", "compare two flux CSVs");
    std::string compare_a, compare_b;
    double compare_cell_size = 1.0;
    CommonArgs compare_args;
    compare->add_option("a", compare_a, "first flux CSV")->required();
    compare->add_option("b", compare_b, "second flux CSV")->required();
    compare->add_option("--cell-size", compare_cell_size, "cell size in cm for slices");
    compare->add_option("--slice-cm", compare_args.slice_cm, "print a 1D slice at this coordinate");
    compare->add_option("--slice-axis", compare_args.slice_axis, "slice axis (x or y)")
        ->check(CLI::IsMember({"x", "y"}));

    auto* export_qasm = app.add_subcommand("export-qasm", "export a circuit as OpenQASM 2.0");
    std::string circuit_name = "walk-step";
    std::uint32_t qft_qubits = 3;
    std::string qasm_out;
    export_qasm->add_option("--config", args.config_path, "geometry config (JSON)");
    export_qasm->add_option("--circuit", circuit_name,
                            "qft|inv-qft|source|coin|boundary|shift|walk-step")
        ->check(CLI::IsMember({"qft", "inv-qft", "source", "coin", "boundary", "shift", "walk-step"}));
    export_qasm->add_option("--qubits", qft_qubits, "qubit count for qft/inv-qft");
    export_qasm->add_option("--out", qasm_out, "output file ('-' for stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (mc->parsed()) return run_solver(args, qwalk::Solver::Mc);
        if (fd->parsed()) return run_solver(args, qwalk::Solver::Fd);
        if (walk_measured->parsed()) return run_solver(args, qwalk::Solver::WalkMeasured);
        if (walk_amplified->parsed()) return run_solver(args, qwalk::Solver::WalkAmplified);
        if (swap_score->parsed()) return run_solver(args, qwalk::Solver::SwapScore);
        if (compare->parsed()) {
            return run_compare(compare_a, compare_b, compare_args.slice_cm,
                               compare_args.slice_axis, compare_cell_size);
        }
        if (export_qasm->parsed()) {
            return run_export_qasm(args.config_path, circuit_name, qft_qubits, qasm_out);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
