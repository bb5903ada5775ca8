#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qwalk/flux_map.hpp"
#include "qwalk/geometry.hpp"
#include "qwalk/rng.hpp"

namespace qwalk {

struct Trajectory {
    enum class Termination { Absorbed, Capped };
    std::vector<std::pair<double, double>> collisions;  // (x, y) in cm
    Termination termination = Termination::Absorbed;
};

// Inverse-CDF flight length: rho = -ln(u) / sigma_t for u in (0, 1].
inline double flight_from_uniform(double u, double sigma_t) {
    if (!(sigma_t > 0.0)) throw std::invalid_argument("sigma_t must be positive");
    if (!(u > 0.0) || u > 1.0) throw std::invalid_argument("u must lie in (0, 1]");
    return -std::log(u) / sigma_t;
}

inline double sample_flight(double sigma_t, RngStream& rng) {
    return flight_from_uniform(rng.next_open_closed(), sigma_t);
}

// Source point in cm: a point source emits from its cell center, a weighted
// source picks a cell proportionally to weight and a uniform point within it.
inline std::pair<double, double> sample_source(const GridGeometry& geom, const SourceSpec& source,
                                               RngStream& rng) {
    validate_source(geom, source);
    const double cs = geom.cell_size();
    if (source.kind == SourceSpec::Kind::Point) {
        return {(source.cell.x + 0.5) * cs, (source.cell.y + 0.5) * cs};
    }
    double total = 0.0;
    for (const auto& [cell, w] : source.weights) total += w;
    double u = rng.next_double() * total;
    Cell chosen = source.weights.back().first;
    for (const auto& [cell, w] : source.weights) {
        if (u < w) {
            chosen = cell;
            break;
        }
        u -= w;
    }
    return {(chosen.x + rng.next_double()) * cs, (chosen.y + rng.next_double()) * cs};
}

struct CollisionOutcome {
    bool scattered = false;
    double angle = 0.0;  // isotropic, uniform in [0, 2 pi)
};

inline CollisionOutcome sample_collision(const Material& material, RngStream& rng) {
    CollisionOutcome out;
    out.scattered = rng.next_double() < material.sigma_s / material.sigma_t;
    if (out.scattered) out.angle = rng.next_double() * 2.0 * kPi;
    return out;
}

struct McOptions {
    std::uint64_t max_collisions = 1000;
    std::function<void(const Trajectory&)> trajectory_sink;  // optional debug dump
};

struct McResult {
    FluxMap flux;  // collision tally per cell, normalized per source particle
    std::uint64_t n_particles = 0;
    std::uint64_t capped_trajectories = 0;
};

namespace detail {

// Specular reflection at the domain walls: fold the coordinate back into
// [0, extent) and mirror the direction component.
inline void reflect_fold(double& coord, double& dir, double extent) {
    while (coord < 0.0 || coord >= extent) {
        if (coord < 0.0) {
            coord = -coord;
        } else {
            coord = 2.0 * extent - coord;
        }
        dir = -dir;
        if (coord >= extent) coord = std::nextafter(extent, 0.0);
    }
}

}  // namespace detail

// Analog Monte Carlo on the continuous geometry. Flights use delta tracking
// (Woodcock) with the majorant cross section over all cells, so flights may
// cross material interfaces freely; with the paper's uniform sigma_t = 1 no
// virtual collisions occur. Domain boundaries are reflective, matching the
// quantum walk.
inline McResult run_mc(const GridGeometry& geom, const SourceSpec& source,
                       std::uint64_t n_particles, RngStream& rng, const McOptions& options = {}) {
    if (n_particles < 1) throw std::invalid_argument("n_particles must be at least 1");
    validate_source(geom, source);

    double sigma_majorant = 0.0;
    for (const Material& m : geom.materials()) sigma_majorant = std::max(sigma_majorant, m.sigma_t);

    McResult result;
    result.n_particles = n_particles;
    result.flux = FluxMap(geom.n_x(), geom.n_y(), Normalization::PerShot);
    const double width = geom.width_cm();
    const double height = geom.height_cm();
    const double cs = geom.cell_size();

    for (std::uint64_t p = 0; p < n_particles; ++p) {
        auto [x, y] = sample_source(geom, source, rng);
        double angle = rng.next_double() * 2.0 * kPi;
        double dx = std::cos(angle), dy = std::sin(angle);

        Trajectory traj;
        const bool record = static_cast<bool>(options.trajectory_sink);
        std::uint64_t collisions = 0;
        while (true) {
            if (collisions >= options.max_collisions) {
                traj.termination = Trajectory::Termination::Capped;
                ++result.capped_trajectories;
                break;
            }
            const double rho = sample_flight(sigma_majorant, rng);
            x += rho * dx;
            y += rho * dy;
            detail::reflect_fold(x, dx, width);
            detail::reflect_fold(y, dy, height);

            const Cell cell{static_cast<std::uint32_t>(x / cs), static_cast<std::uint32_t>(y / cs)};
            const Material& material = geom.material_at(cell);
            if (rng.next_double() >= material.sigma_t / sigma_majorant) {
                continue;  // virtual collision: direction unchanged, keep flying
            }

            ++collisions;
            result.flux.at(cell.x, cell.y) += 1.0;
            if (record) traj.collisions.emplace_back(x, y);

            const CollisionOutcome outcome = sample_collision(material, rng);
            if (!outcome.scattered) {
                traj.termination = Trajectory::Termination::Absorbed;
                break;
            }
            dx = std::cos(outcome.angle);
            dy = std::sin(outcome.angle);
        }
        if (record) options.trajectory_sink(traj);
    }

    for (double& t : result.flux.tallies) t /= static_cast<double>(n_particles);
    result.flux.n_samples = n_particles;
    return result;
}

}  // namespace qwalk
