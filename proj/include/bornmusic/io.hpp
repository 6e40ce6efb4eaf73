#pragma once

// ImageMap CSV and binary PGM (P5) export.

#include <bornmusic/errors.hpp>
#include <bornmusic/forward.hpp>
#include <bornmusic/music.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

namespace bornmusic {

enum class MapQuantity { imaging, norm };

inline std::string_view to_string(MapQuantity q) { return q == MapQuantity::imaging ? "imaging" : "norm"; }

// CSV layout:
//   # resolution: <n>
//   # half_width: <L>
//   # roi_radius: <rho>
//   # k_aw: <re>,<im>
//   # quantity: imaging|norm
//   x,y,value
//   one row per unmasked cell, row-major, y then x ascending
inline void write_map_csv(std::ostream& os, const ImageMap& map, const Wavenumber& k_aw, MapQuantity quantity) {
  char buf[128];
  os << "# resolution: " << map.grid.resolution() << '\n';
  std::snprintf(buf, sizeof buf, "# half_width: %.17g\n# roi_radius: %.17g\n", map.grid.half_width(), map.grid.roi_radius());
  os << buf;
  std::snprintf(buf, sizeof buf, "# k_aw: %.17g,%.17g\n", k_aw.value.real(), k_aw.value.imag());
  os << buf << "# quantity: " << to_string(quantity) << '\n' << "x,y,value\n";
  const int n = map.grid.resolution();
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      if (map.masked(r, c)) continue;
      const Point2 p = map.grid.center(r, c);
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", p.x, p.y, map.at(r, c));
      os << buf;
    }
}

struct LoadedMap {
  ImageMap map;
  cdouble k_aw;
  MapQuantity quantity = MapQuantity::norm;
};

inline LoadedMap read_map_csv(std::istream& is) {
  int resolution = 0;
  double half_width = 0.0, roi = 0.0;
  cdouble k_aw;
  bool have_k = false;
  MapQuantity quantity = MapQuantity::norm;
  std::string line;
  while (std::getline(is, line) && line.starts_with("#")) {
    const auto colon = line.find(':');
    if (colon == std::string::npos) continue;
    std::string key = line.substr(1, colon - 1);
    std::erase(key, ' ');
    const std::string_view value = std::string_view(line).substr(colon + 1);
    if (key == "resolution") {
      resolution = static_cast<int>(detail::parse_double(value, "csv.resolution"));
    } else if (key == "half_width") {
      half_width = detail::parse_double(value, "csv.half_width");
    } else if (key == "roi_radius") {
      roi = detail::parse_double(value, "csv.roi_radius");
    } else if (key == "k_aw") {
      const auto comma = value.find(',');
      if (comma == std::string_view::npos) throw ConfigError("csv.k_aw", "expected 're,im'");
      k_aw = {detail::parse_double(value.substr(0, comma), "csv.k_aw"),
              detail::parse_double(value.substr(comma + 1), "csv.k_aw")};
      have_k = true;
    } else if (key == "quantity") {
      std::string q(value);
      std::erase(q, ' ');
      if (q == "imaging") quantity = MapQuantity::imaging;
      else if (q == "norm") quantity = MapQuantity::norm;
      else throw ConfigError("csv.quantity", "expected imaging or norm");
    }
  }
  if (resolution < 1 || !(half_width > 0.0) || !(roi > 0.0) || !have_k)
    throw ConfigError("csv", "missing resolution, half_width, roi_radius or k_aw header");
  if (line != "x,y,value") throw ConfigError("csv", "expected column header 'x,y,value'");

  LoadedMap out{ImageMap(ImagingGrid(resolution, half_width, roi)), k_aw, quantity};
  const double h = out.map.grid.cell_size();
  std::size_t rows = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos) throw ConfigError("csv", "malformed row: " + line);
    const std::string_view sv(line);
    const double x = detail::parse_double(sv.substr(0, c1), "csv.x");
    const double y = detail::parse_double(sv.substr(c1 + 1, c2 - c1 - 1), "csv.y");
    const double v = detail::parse_double(sv.substr(c2 + 1), "csv.value");
    const int col = static_cast<int>(std::lround((x + half_width) / h - 0.5));
    const int row = static_cast<int>(std::lround((y + half_width) / h - 0.5));
    if (row < 0 || col < 0 || row >= resolution || col >= resolution || !out.map.grid.inside(row, col))
      throw ConfigError("csv", "row outside the unmasked grid: " + line);
    out.map.at(row, col) = v;
    ++rows;
  }
  std::size_t expected = 0;
  for (int r = 0; r < resolution; ++r)
    for (int c = 0; c < resolution; ++c) expected += out.map.grid.inside(r, c) ? 1 : 0;
  if (rows != expected)
    throw ConfigError("csv", "expected " + std::to_string(expected) + " rows, found " + std::to_string(rows));
  return out;
}

/// Binary P5, maxval 255. The first image row is the top of the grid (largest y).
/// Unmasked cells are min-max normalised (a constant map becomes 255); masked cells are 0.
inline std::string encode_pgm(const ImageMap& map) {
  const int n = map.grid.resolution();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      if (!map.masked(r, c)) {
        lo = std::min(lo, map.at(r, c));
        hi = std::max(hi, map.at(r, c));
      }
  if (!(lo <= hi)) throw DomainError("render_pgm: map has no unmasked cells");

  std::string out = "P5\n" + std::to_string(n) + " " + std::to_string(n) + "\n255\n";
  const std::size_t header = out.size();
  out.resize(header + static_cast<std::size_t>(n) * n, '\0');
  const double range = hi - lo;
  std::size_t pos = header;
  for (int r = n - 1; r >= 0; --r)
    for (int c = 0; c < n; ++c, ++pos) {
      if (map.masked(r, c)) continue;
      const double v = range > 0.0 ? 255.0 * (map.at(r, c) - lo) / range : 255.0;
      out[pos] = static_cast<char>(static_cast<unsigned char>(std::clamp(std::lround(v), 0L, 255L)));
    }
  return out;
}

inline void render_pgm(const ImageMap& map, const std::filesystem::path& path) {
  const std::string bytes = encode_pgm(map);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("render_pgm: cannot open " + path.string());
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error("render_pgm: write failed for " + path.string());
}

}  // namespace bornmusic
