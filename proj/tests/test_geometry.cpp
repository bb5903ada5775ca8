#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "qwalk/config_io.hpp"
#include "qwalk/geometry.hpp"

using namespace qwalk;
using Catch::Approx;

namespace {

std::string layout_ascii(const GridGeometry& geom) {
    // row y = 0 first, 'A' = material 0 (arm), 'O' = material 1 (obstacle)
    std::string out;
    for (std::uint32_t y = 0; y < geom.height(); ++y) {
        for (std::uint32_t x = 0; x < geom.width(); ++x) {
            out += geom.material_id({x, y}) == 0 ? 'A' : 'O';
        }
        out += '\n';
    }
    return out;
}

}  // namespace

TEST_CASE("cell probabilities from cross sections", "[geometry]") {
    const GridGeometry geom = build_bypass_geometry(3, 3);

    const CellProbabilities arm = cell_probabilities(geom, {0, 0});
    CHECK(arm.absorb == Approx(0.1).margin(1e-12));
    for (double p : arm.scatter) CHECK(p == Approx(0.225).margin(1e-12));

    const CellProbabilities obstacle = cell_probabilities(geom, {4, 4});
    CHECK(obstacle.absorb == Approx(0.9).margin(1e-12));
    for (double p : obstacle.scatter) CHECK(p == Approx(0.025).margin(1e-12));

    CHECK_THROWS_AS(cell_probabilities(geom, {8, 0}), std::out_of_range);
}

TEST_CASE("pure scatterer normalizes to quarter per direction", "[geometry]") {
    const GridGeometry geom(2, 2, 1.0, {"scatterer"}, {make_material(1.0, 1.0, 0.0)},
                            std::vector<std::uint16_t>(16, 0));
    const CellProbabilities p = cell_probabilities(geom, {1, 1});
    CHECK(p.absorb == Approx(0.0).margin(1e-12));
    for (double d : p.scatter) CHECK(d == Approx(0.25).margin(1e-12));
}

TEST_CASE("probabilities sum to one for every bypass cell", "[geometry]") {
    const GridGeometry geom = build_bypass_geometry(3, 4);
    for (std::uint32_t i = 0; i < geom.n_cells(); ++i) {
        const CellProbabilities p = cell_probabilities(geom, geom.cell_at(i));
        CHECK(std::abs(p.absorb + p.scatter_total() - 1.0) < 1e-12);
    }
}

TEST_CASE("bypass layout golden maps", "[geometry]") {
    const std::string expected_4x4 =
        "AAAA\n"
        "AOOA\n"
        "AOOA\n"
        "AAAA\n";
    CHECK(layout_ascii(build_bypass_geometry(2, 2)) == expected_4x4);

    const std::string expected_8x8 =
        "AAAAAAAA\n"
        "AAAAAAAA\n"
        "AAOOOOAA\n"
        "AAOOOOAA\n"
        "AAOOOOAA\n"
        "AAOOOOAA\n"
        "AAAAAAAA\n"
        "AAAAAAAA\n";
    CHECK(layout_ascii(build_bypass_geometry(3, 3)) == expected_8x8);
}

TEST_CASE("bypass contains both materials and partitions the grid", "[geometry]") {
    for (std::uint32_t n = 2; n <= 4; ++n) {
        const GridGeometry geom = build_bypass_geometry(n, n);
        std::uint32_t arm = 0, obstacle = 0;
        for (std::uint16_t id : geom.cell_materials()) (id == 0 ? arm : obstacle)++;
        CHECK(arm + obstacle == geom.n_cells());
        CHECK(arm > 0);
        CHECK(obstacle > 0);
    }
    CHECK_THROWS_AS(build_bypass_geometry(1, 3), std::invalid_argument);
}

TEST_CASE("bypass is symmetric under vertical mirror", "[geometry]") {
    const GridGeometry geom = build_bypass_geometry(3, 3);
    for (std::uint32_t y = 0; y < geom.height(); ++y) {
        for (std::uint32_t x = 0; x < geom.width(); ++x) {
            CHECK(geom.material_id({x, y}) == geom.material_id({x, geom.height() - 1 - y}));
        }
    }
}

TEST_CASE("material invariants are enforced", "[geometry]") {
    CHECK_THROWS_AS(make_material(0.0, 0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(make_material(1.0, -0.1, 1.1), std::invalid_argument);
    CHECK_THROWS_AS(make_material(1.0, 0.9, 0.3), std::invalid_argument);
    CHECK_NOTHROW(make_material(1.0, 0.9, 0.1));
}

TEST_CASE("geometry config parses and validates", "[config]") {
    const std::string text = R"({
      "grid": {"n_x": 3, "n_y": 3, "cell_size": 1.25},
      "materials": {
        "arm": {"sigma_t": 1.0, "sigma_s": 0.9, "sigma_a": 0.1},
        "obstacle": {"sigma_t": 1.0, "sigma_s": 0.1, "sigma_a": 0.9}
      },
      "layout": "bypass",
      "source": {"point": [0, 3]},
      "detector": {"cells": [[7, 3], [7, 4]]}
    })";
    const GeometryConfig config = parse_geometry_json(nlohmann::json::parse(text));
    CHECK(config.geometry.n_x() == 3);
    CHECK(config.geometry.cell_size() == 1.25);
    CHECK(config.source.kind == SourceSpec::Kind::Point);
    CHECK(config.source.cell == Cell{0, 3});
    CHECK(config.detector.cells.size() == 2);
    CHECK(config.geometry.material_at({0, 0}).sigma_s == 0.9);
}

TEST_CASE("config rejects inconsistent cross sections with a diagnostic", "[config]") {
    const std::string text = R"({
      "grid": {"n_x": 2, "n_y": 2},
      "materials": {"bad": {"sigma_t": 1.0, "sigma_s": 0.9, "sigma_a": 0.3}},
      "layout": {"cells": [["bad","bad","bad","bad"],["bad","bad","bad","bad"],
                           ["bad","bad","bad","bad"],["bad","bad","bad","bad"]]},
      "source": {"point": [0, 0]},
      "detector": {"cells": [[3, 3]]}
    })";
    try {
        parse_geometry_json(nlohmann::json::parse(text));
        FAIL("expected a validation error");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("bad") != std::string::npos);
    }
}

TEST_CASE("config round-trips bit-exactly", "[config]") {
    const GridGeometry geom = build_bypass_geometry(3, 3, 1.25);
    const GeometryConfig config{
        geom,
        SourceSpec::weighted({{{0, 3}, 1.0}, {{0, 4}, 3.5}}),
        DetectorRegion{{{7, 3}, {7, 4}}}};

    const auto path = std::filesystem::temp_directory_path() / "qwalk_geom_roundtrip.json";
    save_geometry(config, path.string());
    const GeometryConfig loaded = load_geometry(path.string());

    CHECK(loaded.geometry.n_x() == geom.n_x());
    CHECK(loaded.geometry.n_y() == geom.n_y());
    CHECK(loaded.geometry.cell_size() == geom.cell_size());
    CHECK(loaded.geometry.cell_materials() == geom.cell_materials());
    for (std::size_t i = 0; i < geom.materials().size(); ++i) {
        CHECK(loaded.geometry.materials()[i].sigma_t == geom.materials()[i].sigma_t);
        CHECK(loaded.geometry.materials()[i].sigma_s == geom.materials()[i].sigma_s);
        CHECK(loaded.geometry.materials()[i].sigma_a == geom.materials()[i].sigma_a);
    }
    REQUIRE(loaded.source.kind == SourceSpec::Kind::Weighted);
    CHECK(loaded.source.weights == config.source.weights);
    CHECK(loaded.detector.cells == config.detector.cells);

    // saving the loaded config reproduces the file byte for byte
    const auto path2 = std::filesystem::temp_directory_path() / "qwalk_geom_roundtrip2.json";
    save_geometry(loaded, path2.string());
    std::ifstream a(path), b(path2);
    const std::string text_a((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
    const std::string text_b((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
    CHECK(text_a == text_b);
    std::filesystem::remove(path);
    std::filesystem::remove(path2);
}

TEST_CASE("shipped bypass config loads", "[config]") {
    const GeometryConfig config = load_geometry(std::string(QWALK_CONFIG_DIR) + "/bypass8.json");
    CHECK(config.geometry.width() == 8);
    CHECK(config.geometry.cell_size() == Approx(1.25));
    CHECK(config.geometry.material_at({4, 4}).sigma_a == 0.9);
}

TEST_CASE("position basis index encoding", "[geometry]") {
    const GridGeometry geom = build_bypass_geometry(2, 3);
    const Cell c{2, 5};
    const std::uint64_t v = geom.position_basis_index(c);
    CHECK(v == (2u | (5u << 2)));
    CHECK(geom.cell_of_basis_index(v) == c);
}
