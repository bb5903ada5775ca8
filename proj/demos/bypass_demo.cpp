// Minimal tour: solve the bypass geometry with the deterministic solver and
// the measured quantum walk, print ASCII flux maps and the midline slice.

#include <cstdio>
#include <iostream>

#include "qwalk/qwalk.hpp"

namespace {

void print_map(const char* title, const qwalk::FluxMap& map) {
    const qwalk::FluxMap norm = map.unit_sum();
    double peak = 0.0;
    for (double t : norm.tallies) peak = std::max(peak, t);
    std::cout << title << "\n";
    for (std::uint32_t yy = norm.height(); yy-- > 0;) {
        for (std::uint32_t x = 0; x < norm.width(); ++x) {
            const char* shades = " .:-=+*#%@";
            const int level = static_cast<int>(9.0 * norm.at(x, yy) / peak);
            std::cout << shades[level] << shades[level];
        }
        std::cout << "\n";
    }
}

}  // namespace

int main() {
    using namespace qwalk;
    const GridGeometry geom = build_bypass_geometry(3, 3);
    const SourceSpec source = SourceSpec::point({0, 3});

    const FluxMap fd = run_fd(geom, source);
    print_map("deterministic fixed point (bypass 8x8):", fd);

    RngStream rng(42);
    MeasuredWalkParams params;
    params.n_steps = 10;
    params.n_shots = 5000;
    const WalkRunReport walk = run_measured_walk(geom, source, params, rng);
    print_map("\nmeasured quantum walk, 10 steps:", walk.flux);

    const SliceVector slice = extract_slice(fd.unit_sum(), 'x', 4.0, geom.cell_size());
    std::cout << "\nmidline slice (x = 4 cm, column " << slice.index << "):\n";
    for (std::size_t i = 0; i < slice.values.size(); ++i) {
        std::printf("  y=%4.1f  %.6f\n", slice.centers_cm[i], slice.values[i]);
    }
    return 0;
}
