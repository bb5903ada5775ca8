#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qwalk/common.hpp"

namespace qwalk {

// Macroscopic cross sections in 1/cm; total = scattering + absorption.
struct Material {
    double sigma_t = 1.0;
    double sigma_s = 0.0;
    double sigma_a = 0.0;
};

inline Material make_material(double sigma_t, double sigma_s, double sigma_a,
                              const std::string& name = "") {
    const std::string label = name.empty() ? "material" : "material '" + name + "'";
    if (!(sigma_t > 0.0)) throw std::invalid_argument(label + ": sigma_t must be positive");
    if (sigma_s < 0.0 || sigma_a < 0.0) {
        throw std::invalid_argument(label + ": cross sections must be nonnegative");
    }
    if (std::abs(sigma_s + sigma_a - sigma_t) > kNormTol) {
        throw std::invalid_argument(label + ": sigma_s + sigma_a must equal sigma_t");
    }
    return Material{sigma_t, sigma_s, sigma_a};
}

struct Cell {
    std::uint32_t x = 0;
    std::uint32_t y = 0;
    friend bool operator==(const Cell&, const Cell&) = default;
    friend auto operator<=>(const Cell&, const Cell&) = default;
};

enum class Direction : int { Right = 0, Up = 1, Left = 2, Down = 3 };

inline constexpr std::array<int, 4> kDirDx{1, 0, -1, 0};
inline constexpr std::array<int, 4> kDirDy{0, 1, 0, -1};

inline Direction opposite(Direction d) { return static_cast<Direction>((static_cast<int>(d) + 2) % 4); }

// Coin basis |c2 c1 c0|: |100>=right, |110>=up, |101>=left, |111>=down,
// |0..> = stay.
inline constexpr std::uint32_t kCoinStatesPerCell = 8;

inline std::uint32_t coin_value(Direction d) {
    switch (d) {
        case Direction::Right: return 4;
        case Direction::Up: return 6;
        case Direction::Left: return 5;
        case Direction::Down: return 7;
    }
    throw std::logic_error("bad direction");
}

inline std::optional<Direction> direction_from_coin(std::uint32_t coin) {
    switch (coin) {
        case 4: return Direction::Right;
        case 5: return Direction::Left;
        case 6: return Direction::Up;
        case 7: return Direction::Down;
        default: return std::nullopt;  // c2 = 0: stay
    }
}

// 2^n_x x 2^n_y cell grid with a material id per cell. Immutable after
// construction; freely shareable.
class GridGeometry {
public:
    GridGeometry(std::uint32_t n_x, std::uint32_t n_y, double cell_size,
                 std::vector<std::string> material_names, std::vector<Material> materials,
                 std::vector<std::uint16_t> cell_material)
        : n_x_(n_x),
          n_y_(n_y),
          cell_size_(cell_size),
          material_names_(std::move(material_names)),
          materials_(std::move(materials)),
          cell_material_(std::move(cell_material)) {
        if (n_x_ == 0 || n_y_ == 0) throw std::invalid_argument("grid needs at least one qubit per axis");
        if (n_x_ + n_y_ > kMaxQubits) throw std::invalid_argument("grid exceeds position-qubit budget");
        if (!(cell_size_ > 0.0)) throw std::invalid_argument("cell_size must be positive");
        if (materials_.empty()) throw std::invalid_argument("no materials defined");
        if (material_names_.size() != materials_.size()) {
            throw std::invalid_argument("material name/table size mismatch");
        }
        if (cell_material_.size() != static_cast<std::size_t>(width()) * height()) {
            throw std::invalid_argument("cell_material size does not match grid dimensions");
        }
        for (std::uint16_t id : cell_material_) {
            if (id >= materials_.size()) throw std::invalid_argument("cell refers to undefined material");
        }
    }

    std::uint32_t n_x() const { return n_x_; }
    std::uint32_t n_y() const { return n_y_; }
    std::uint32_t width() const { return 1u << n_x_; }
    std::uint32_t height() const { return 1u << n_y_; }
    std::uint32_t n_cells() const { return width() * height(); }
    double cell_size() const { return cell_size_; }
    double width_cm() const { return cell_size_ * width(); }
    double height_cm() const { return cell_size_ * height(); }

    bool in_grid(Cell c) const { return c.x < width() && c.y < height(); }

    std::uint32_t cell_index(Cell c) const { return c.x + width() * c.y; }
    Cell cell_at(std::uint32_t index) const { return {index % width(), index / width()}; }

    std::uint16_t material_id(Cell c) const {
        if (!in_grid(c)) throw std::out_of_range("cell out of grid");
        return cell_material_[cell_index(c)];
    }
    const Material& material_at(Cell c) const { return materials_[material_id(c)]; }
    const std::string& material_name(std::uint16_t id) const { return material_names_.at(id); }
    const std::vector<std::string>& material_names() const { return material_names_; }
    const std::vector<Material>& materials() const { return materials_; }
    const std::vector<std::uint16_t>& cell_materials() const { return cell_material_; }

    // Position-register basis index of a cell: x bits low, y bits high.
    std::uint64_t position_basis_index(Cell c) const {
        if (!in_grid(c)) throw std::out_of_range("cell out of grid");
        return static_cast<std::uint64_t>(c.x) | (static_cast<std::uint64_t>(c.y) << n_x_);
    }
    Cell cell_of_basis_index(std::uint64_t index) const {
        return {static_cast<std::uint32_t>(index & (width() - 1)),
                static_cast<std::uint32_t>(index >> n_x_)};
    }

private:
    std::uint32_t n_x_, n_y_;
    double cell_size_;
    std::vector<std::string> material_names_;
    std::vector<Material> materials_;
    std::vector<std::uint16_t> cell_material_;
};

// Per-collision interaction probabilities of a cell: absorb with
// p_a = sigma_a / (sigma_a + sigma_s), scatter into each of the four lattice
// directions with p_s / 4.
struct CellProbabilities {
    double absorb = 0.0;
    std::array<double, 4> scatter{};  // Direction order: right, up, left, down

    double scatter_total() const { return scatter[0] + scatter[1] + scatter[2] + scatter[3]; }
};

inline CellProbabilities cell_probabilities(const GridGeometry& geom, Cell cell) {
    const Material& m = geom.material_at(cell);
    const double denom = m.sigma_a + m.sigma_s;
    CellProbabilities p;
    p.absorb = m.sigma_a / denom;
    const double per_dir = m.sigma_s / denom / 4.0;
    p.scatter = {per_dir, per_dir, per_dir, per_dir};
    return p;
}

// Two-material bypass layout: a centered obstacle block spanning the middle
// half of each axis, arm material elsewhere. Both materials have sigma_t = 1;
// arms scatter (0.9), the obstacle absorbs (0.9).
inline GridGeometry build_bypass_geometry(std::uint32_t n_x, std::uint32_t n_y,
                                          double cell_size = 1.0) {
    if (n_x < 2 || n_y < 2) {
        throw std::invalid_argument("bypass geometry needs n_x, n_y >= 2 to fit both materials");
    }
    const std::uint32_t w = 1u << n_x;
    const std::uint32_t h = 1u << n_y;
    std::vector<std::uint16_t> cells(static_cast<std::size_t>(w) * h, 0);
    const std::uint32_t x_lo = w / 4, x_hi = 3 * w / 4;
    const std::uint32_t y_lo = h / 4, y_hi = 3 * h / 4;
    for (std::uint32_t y = y_lo; y < y_hi; ++y) {
        for (std::uint32_t x = x_lo; x < x_hi; ++x) {
            cells[x + w * y] = 1;
        }
    }
    return GridGeometry(n_x, n_y, cell_size, {"arm", "obstacle"},
                        {make_material(1.0, 0.9, 0.1, "arm"), make_material(1.0, 0.1, 0.9, "obstacle")},
                        std::move(cells));
}

struct SourceSpec {
    enum class Kind { Point, Weighted };
    Kind kind = Kind::Point;
    Cell cell{};                                       // point source
    std::vector<std::pair<Cell, double>> weights{};    // weighted source

    static SourceSpec point(Cell c) { return {Kind::Point, c, {}}; }
    static SourceSpec weighted(std::vector<std::pair<Cell, double>> w) {
        return {Kind::Weighted, {}, std::move(w)};
    }
};

inline void validate_source(const GridGeometry& geom, const SourceSpec& source) {
    if (source.kind == SourceSpec::Kind::Point) {
        if (!geom.in_grid(source.cell)) throw std::invalid_argument("source cell out of grid");
        return;
    }
    double total = 0.0;
    for (const auto& [cell, w] : source.weights) {
        if (!geom.in_grid(cell)) throw std::invalid_argument("weighted source cell out of grid");
        if (w < 0.0) throw std::invalid_argument("source weights must be nonnegative");
        total += w;
    }
    if (!(total > 0.0)) throw std::invalid_argument("source has zero total weight");
}

struct DetectorRegion {
    std::vector<Cell> cells;
};

inline void validate_detector(const GridGeometry& geom, const DetectorRegion& detector) {
    if (detector.cells.empty()) throw std::invalid_argument("detector region is empty");
    for (Cell c : detector.cells) {
        if (!geom.in_grid(c)) throw std::invalid_argument("detector cell out of grid");
    }
}

// Normalized source distribution over cells (classical view of the source).
inline std::vector<double> source_distribution(const GridGeometry& geom, const SourceSpec& source) {
    validate_source(geom, source);
    std::vector<double> dist(geom.n_cells(), 0.0);
    if (source.kind == SourceSpec::Kind::Point) {
        dist[geom.cell_index(source.cell)] = 1.0;
        return dist;
    }
    double total = 0.0;
    for (const auto& [cell, w] : source.weights) total += w;
    for (const auto& [cell, w] : source.weights) dist[geom.cell_index(cell)] += w / total;
    return dist;
}

}  // namespace qwalk
