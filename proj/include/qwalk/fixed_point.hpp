#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "qwalk/flux_map.hpp"
#include "qwalk/geometry.hpp"
#include "qwalk/strategies.hpp"

namespace qwalk {

struct FdOptions {
    double tol = 1e-10;
    double floor = 1e-10;            // entries below this are cropped up to it
    std::uint64_t max_iterations = 200000;
};

namespace detail {

inline FluxMap flux_from_vector(const GridGeometry& geom, const std::vector<double>& phi,
                                double floor) {
    FluxMap map(geom.n_x(), geom.n_y(), Normalization::PerShot);
    for (std::uint32_t i = 0; i < geom.n_cells(); ++i) {
        const Cell c = geom.cell_at(i);
        map.at(c.x, c.y) = std::max(phi[i], floor);
    }
    return map;
}

}  // namespace detail

// Deterministic lattice solver: the fixed point of phi = K phi + s, with K
// the exact one-step kernel restricted to surviving (scattered) particles and
// s the source distribution. phi is the expected collision tally per cell and
// is the exact deterministic limit of both the measured walk in kill mode and
// the lattice Monte Carlo estimator.
inline FluxMap run_fd(const GridGeometry& geom, const SourceSpec& source,
                      const FdOptions& options = {}) {
    if (!(options.tol > 0.0)) throw std::invalid_argument("tol must be positive");
    const std::vector<double> s = source_distribution(geom, source);
    std::vector<double> phi(geom.n_cells(), 0.0);
    for (std::uint64_t it = 0; it < options.max_iterations; ++it) {
        std::vector<double> next = surviving_step_distribution(geom, phi);
        for (std::uint32_t i = 0; i < geom.n_cells(); ++i) next[i] += s[i];
        double delta = 0.0;
        for (std::uint32_t i = 0; i < geom.n_cells(); ++i) {
            delta = std::max(delta, std::abs(next[i] - phi[i]));
        }
        phi = std::move(next);
        if (delta < options.tol) {
            return detail::flux_from_vector(geom, phi, options.floor);
        }
    }
    throw std::runtime_error(
        "fixed-point iteration did not converge: the survival kernel's spectral radius is too "
        "close to 1 (does any cell absorb?)");
}

// Truncated variant: n sweeps of phi <- K phi + s starting from zero, i.e.
// the collision tally accumulated over the first n kernel applications.
inline FluxMap run_fd_iterations(const GridGeometry& geom, const SourceSpec& source,
                                 std::uint32_t n_iterations, double floor = 0.0) {
    const std::vector<double> s = source_distribution(geom, source);
    std::vector<double> phi(geom.n_cells(), 0.0);
    for (std::uint32_t it = 0; it < n_iterations; ++it) {
        std::vector<double> next = surviving_step_distribution(geom, phi);
        for (std::uint32_t i = 0; i < geom.n_cells(); ++i) next[i] += s[i];
        phi = std::move(next);
    }
    return detail::flux_from_vector(geom, phi, floor);
}

}  // namespace qwalk
