#pragma once

#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qwalk/geometry.hpp"

namespace qwalk {

struct GeometryConfig {
    GridGeometry geometry;
    SourceSpec source;
    DetectorRegion detector;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline Cell parse_cell(const nlohmann::json& j, const char* what) {
    if (!j.is_array() || j.size() != 2) {
        throw ConfigError(std::string(what) + " must be a [x, y] pair");
    }
    return Cell{j[0].get<std::uint32_t>(), j[1].get<std::uint32_t>()};
}

}  // namespace detail

// Geometry config schema (JSON): grid qubit counts and cell size, a material
// table, the layout (named preset "bypass" or an explicit per-cell name map),
// a source and a detector region. Validation failures name the offending
// material or cell.
inline GeometryConfig parse_geometry_json(const nlohmann::json& j) {
    try {
        const auto& grid = j.at("grid");
        const std::uint32_t n_x = grid.at("n_x").get<std::uint32_t>();
        const std::uint32_t n_y = grid.at("n_y").get<std::uint32_t>();
        const double cell_size = grid.value("cell_size", 1.0);

        std::vector<std::string> names;
        std::vector<Material> materials;
        std::map<std::string, std::uint16_t> ids;
        for (const auto& [name, body] : j.at("materials").items()) {
            ids[name] = static_cast<std::uint16_t>(materials.size());
            names.push_back(name);
            materials.push_back(make_material(body.at("sigma_t").get<double>(),
                                              body.at("sigma_s").get<double>(),
                                              body.at("sigma_a").get<double>(), name));
        }

        const std::uint32_t w = 1u << n_x, h = 1u << n_y;
        std::vector<std::uint16_t> cells(static_cast<std::size_t>(w) * h, 0);
        const auto& layout = j.at("layout");
        if (layout.is_string() && layout.get<std::string>() == "bypass") {
            GridGeometry preset = build_bypass_geometry(n_x, n_y, cell_size);
            if (!ids.count("arm") || !ids.count("obstacle")) {
                throw ConfigError("bypass layout needs materials named 'arm' and 'obstacle'");
            }
            for (std::uint32_t i = 0; i < preset.n_cells(); ++i) {
                cells[i] = preset.cell_materials()[i] == 0 ? ids.at("arm") : ids.at("obstacle");
            }
        } else if (layout.is_object()) {
            const auto& rows = layout.at("cells");
            if (rows.size() != h) throw ConfigError("layout.cells must have 2^n_y rows");
            for (std::uint32_t y = 0; y < h; ++y) {
                if (rows[y].size() != w) {
                    throw ConfigError("layout.cells row " + std::to_string(y) +
                                      " must have 2^n_x entries");
                }
                for (std::uint32_t x = 0; x < w; ++x) {
                    const std::string name = rows[y][x].get<std::string>();
                    auto it = ids.find(name);
                    if (it == ids.end()) {
                        throw ConfigError("cell (" + std::to_string(x) + ", " + std::to_string(y) +
                                          ") refers to undefined material '" + name + "'");
                    }
                    cells[x + w * y] = it->second;
                }
            }
        } else {
            throw ConfigError("layout must be \"bypass\" or an object with a cells table");
        }

        GridGeometry geometry(n_x, n_y, cell_size, std::move(names), std::move(materials),
                              std::move(cells));

        SourceSpec source;
        const auto& src = j.at("source");
        if (src.contains("point")) {
            source = SourceSpec::point(detail::parse_cell(src.at("point"), "source.point"));
        } else if (src.contains("weighted")) {
            std::vector<std::pair<Cell, double>> weights;
            for (const auto& entry : src.at("weighted")) {
                weights.emplace_back(detail::parse_cell(entry.at("cell"), "source cell"),
                                     entry.at("weight").get<double>());
            }
            source = SourceSpec::weighted(std::move(weights));
        } else {
            throw ConfigError("source must contain 'point' or 'weighted'");
        }
        validate_source(geometry, source);

        DetectorRegion detector;
        for (const auto& entry : j.at("detector").at("cells")) {
            detector.cells.push_back(detail::parse_cell(entry, "detector cell"));
        }
        validate_detector(geometry, detector);

        return GeometryConfig{std::move(geometry), std::move(source), std::move(detector)};
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("geometry config parse error: ") + e.what());
    }
}

inline nlohmann::json geometry_to_json(const GeometryConfig& config) {
    const GridGeometry& g = config.geometry;
    nlohmann::json j;
    j["grid"] = {{"n_x", g.n_x()}, {"n_y", g.n_y()}, {"cell_size", g.cell_size()}};
    nlohmann::json materials = nlohmann::json::object();
    for (std::size_t i = 0; i < g.materials().size(); ++i) {
        const Material& m = g.materials()[i];
        materials[g.material_names()[i]] = {
            {"sigma_t", m.sigma_t}, {"sigma_s", m.sigma_s}, {"sigma_a", m.sigma_a}};
    }
    j["materials"] = std::move(materials);
    nlohmann::json rows = nlohmann::json::array();
    for (std::uint32_t y = 0; y < g.height(); ++y) {
        nlohmann::json row = nlohmann::json::array();
        for (std::uint32_t x = 0; x < g.width(); ++x) {
            row.push_back(g.material_name(g.material_id({x, y})));
        }
        rows.push_back(std::move(row));
    }
    j["layout"] = {{"cells", std::move(rows)}};
    if (config.source.kind == SourceSpec::Kind::Point) {
        j["source"] = {{"point", {config.source.cell.x, config.source.cell.y}}};
    } else {
        nlohmann::json weights = nlohmann::json::array();
        for (const auto& [cell, w] : config.source.weights) {
            weights.push_back({{"cell", {cell.x, cell.y}}, {"weight", w}});
        }
        j["source"] = {{"weighted", std::move(weights)}};
    }
    nlohmann::json cells = nlohmann::json::array();
    for (Cell c : config.detector.cells) cells.push_back({c.x, c.y});
    j["detector"] = {{"cells", std::move(cells)}};
    return j;
}

inline GeometryConfig load_geometry(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open geometry config '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("geometry config '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_geometry_json(j);
}

inline void save_geometry(const GeometryConfig& config, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open '" + path + "' for writing");
    out << geometry_to_json(config).dump(2) << "\n";
}

}  // namespace qwalk
