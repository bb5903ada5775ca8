#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qwalk {

enum class Normalization { PerShot, PerStepSum, UnitSum };

inline std::string to_string(Normalization n) {
    switch (n) {
        case Normalization::PerShot: return "per-shot";
        case Normalization::PerStepSum: return "per-step-sum";
        case Normalization::UnitSum: return "unit-sum";
    }
    throw std::logic_error("bad normalization");
}

inline Normalization normalization_from_string(const std::string& s) {
    if (s == "per-shot") return Normalization::PerShot;
    if (s == "per-step-sum") return Normalization::PerStepSum;
    if (s == "unit-sum") return Normalization::UnitSum;
    throw std::invalid_argument("unknown normalization '" + s + "'");
}

// Per-cell nonnegative tally map, the common output of every solver.
// Stored row-major with x fastest; n_x / n_y are qubit counts per axis.
struct FluxMap {
    std::uint32_t n_x = 0;
    std::uint32_t n_y = 0;
    std::vector<double> tallies;
    std::uint64_t n_samples = 0;
    Normalization normalization = Normalization::PerShot;

    FluxMap() = default;
    FluxMap(std::uint32_t nx, std::uint32_t ny, Normalization norm)
        : n_x(nx), n_y(ny), tallies(std::size_t{1} << (nx + ny), 0.0), normalization(norm) {}

    std::uint32_t width() const { return 1u << n_x; }
    std::uint32_t height() const { return 1u << n_y; }

    double& at(std::uint32_t x, std::uint32_t y) { return tallies[x + std::size_t{1} * width() * y]; }
    double at(std::uint32_t x, std::uint32_t y) const {
        return tallies[x + std::size_t{1} * width() * y];
    }

    double total() const {
        double s = 0.0;
        for (double t : tallies) s += t;
        return s;
    }

    FluxMap unit_sum() const {
        const double s = total();
        if (!(s > 0.0)) throw std::invalid_argument("cannot normalize an all-zero flux map");
        FluxMap out = *this;
        for (double& t : out.tallies) t /= s;
        out.normalization = Normalization::UnitSum;
        return out;
    }
};

namespace detail {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

// CSV layout: header `# nx,ny,normalization`, then 2^n_y rows (y ascending)
// of 2^n_x comma-separated values. %.17g formatting round-trips bit-exactly.
inline void write_flux_csv(const FluxMap& map, std::ostream& out) {
    out << "# " << map.n_x << "," << map.n_y << "," << to_string(map.normalization) << "\n";
    for (std::uint32_t y = 0; y < map.height(); ++y) {
        for (std::uint32_t x = 0; x < map.width(); ++x) {
            if (x) out << ",";
            out << detail::format_double(map.at(x, y));
        }
        out << "\n";
    }
}

inline void write_flux_csv(const FluxMap& map, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_flux_csv(map, out);
}

inline FluxMap read_flux_csv(std::istream& in) {
    std::string header;
    if (!std::getline(in, header) || header.size() < 2 || header[0] != '#') {
        throw std::runtime_error("flux CSV is missing its header line");
    }
    std::istringstream hs(header.substr(1));
    std::uint32_t nx = 0, ny = 0;
    char comma1 = 0, comma2 = 0;
    std::string norm_text;
    if (!(hs >> nx >> comma1 >> ny >> comma2) || comma1 != ',' || comma2 != ',' ||
        !std::getline(hs, norm_text)) {
        throw std::runtime_error("malformed flux CSV header");
    }
    FluxMap map(nx, ny, normalization_from_string(norm_text));
    for (std::uint32_t y = 0; y < map.height(); ++y) {
        std::string line;
        if (!std::getline(in, line)) throw std::runtime_error("flux CSV has too few rows");
        std::istringstream ls(line);
        std::string tok;
        for (std::uint32_t x = 0; x < map.width(); ++x) {
            if (!std::getline(ls, tok, ',')) throw std::runtime_error("flux CSV row is too short");
            map.at(x, y) = std::stod(tok);
        }
    }
    return map;
}

inline FluxMap read_flux_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    return read_flux_csv(in);
}

}  // namespace qwalk
