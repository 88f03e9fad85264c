#pragma once

// Indicator-map output: CSV "x,y,value" and 16-bit binary PGM scaled to the
// map maximum (top image row = largest y).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <ostream>
#include <span>
#include <string>

#include "osm/detail/atomic_file.hpp"
#include "osm/fresnelio.hpp"
#include "osm/indicators.hpp"
#include "osm/theory.hpp"

namespace osm {

inline void write_map_csv(std::ostream& out, const IndicatorMap& map) {
    out << "x,y,value\n";
    const auto& g = map.grid;
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            out << detail::format_double(g.x(i)) << ',' << detail::format_double(g.y(j)) << ','
                << detail::format_double(map.at(i, j)) << '\n';
}

inline void write_map_csv(const std::filesystem::path& path, const IndicatorMap& map) {
    detail::write_atomically(path, [&](std::ostream& out) { write_map_csv(out, map); });
}

// P5, maxval 65535, big-endian samples. An all-zero map gives an all-zero image.
inline void write_map_pgm(std::ostream& out, const IndicatorMap& map) {
    const auto& g = map.grid;
    const double mx = map.max();
    out << "P5\n" << g.nx() << ' ' << g.ny() << "\n65535\n";
    for (int j = g.ny() - 1; j >= 0; --j) {
        for (int i = 0; i < g.nx(); ++i) {
            const double v = mx > 0.0 ? map.at(i, j) / mx : 0.0;
            const auto s = static_cast<std::uint16_t>(std::lround(std::clamp(v, 0.0, 1.0) * 65535.0));
            const char bytes[2] = {static_cast<char>(s >> 8), static_cast<char>(s & 0xff)};
            out.write(bytes, 2);
        }
    }
}

inline void write_map_pgm(const std::filesystem::path& path, const IndicatorMap& map) {
    detail::write_atomically(path, [&](std::ostream& out) { write_map_pgm(out, map); }, true);
}

// Two-column profile CSV "x,value".
inline void write_profile_csv(std::ostream& out, std::span<const double> xs, std::span<const double> values) {
    out << "x,value\n";
    for (std::size_t i = 0; i < xs.size() && i < values.size(); ++i)
        out << detail::format_double(xs[i]) << ',' << detail::format_double(values[i]) << '\n';
}

}  // namespace osm
