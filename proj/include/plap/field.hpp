#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "plap/csv.hpp"
#include "plap/error.hpp"

namespace plap {

/// Uniform node grid on a rectangle; node (i, j) sits at (x0 + i h, y0 + j h).
struct Grid {
  std::size_t nx = 0;
  std::size_t ny = 0;
  double h = 0.0;
  double x0 = 0.0;
  double y0 = 0.0;

  std::size_t size() const { return nx * ny; }
  std::size_t index(std::size_t i, std::size_t j) const { return j * nx + i; }
  double x(std::size_t i) const { return x0 + static_cast<double>(i) * h; }
  double y(std::size_t j) const { return y0 + static_cast<double>(j) * h; }
  bool interior(std::size_t i, std::size_t j) const { return i > 0 && j > 0 && i + 1 < nx && j + 1 < ny; }

  bool operator==(const Grid&) const = default;
};

struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;
};

/// Grid covering `rect` with spacing h; each side length must be a multiple of h.
inline Grid make_grid(const Rect& rect, double h) {
  require(h > 0.0, ErrorKind::Domain, "grid spacing must be positive");
  require(rect.x1 > rect.x0 && rect.y1 > rect.y0, ErrorKind::Domain, "rectangle must have positive extent");
  const double cx = (rect.x1 - rect.x0) / h, cy = (rect.y1 - rect.y0) / h;
  const double rx = std::round(cx), ry = std::round(cy);
  require(std::abs(cx - rx) <= 1e-9 * std::max(1.0, cx) && std::abs(cy - ry) <= 1e-9 * std::max(1.0, cy),
          ErrorKind::Domain, "rectangle sides must be multiples of h");
  require(rx >= 2 && ry >= 2, ErrorKind::Domain, "grid needs at least one interior node");
  return Grid{static_cast<std::size_t>(rx) + 1, static_cast<std::size_t>(ry) + 1, h, rect.x0, rect.y0};
}

/// Positive scalar grid function.
struct Field2D {
  Grid grid;
  std::vector<double> values;

  double& operator()(std::size_t i, std::size_t j) { return values[grid.index(i, j)]; }
  double operator()(std::size_t i, std::size_t j) const { return values[grid.index(i, j)]; }

  static Field2D sample(const Grid& g, const std::function<double(double, double)>& fn) {
    Field2D f{g, std::vector<double>(g.size())};
    for (std::size_t j = 0; j < g.ny; ++j)
      for (std::size_t i = 0; i < g.nx; ++i) f(i, j) = fn(g.x(i), g.y(j));
    return f;
  }

  void require_positive() const {
    require(values.size() == grid.size(), ErrorKind::Domain, "field size does not match its grid");
    require(grid.h > 0.0, ErrorKind::Domain, "field spacing must be positive");
    for (double v : values) require(v > 0.0, ErrorKind::NotPositive, "field values must be positive");
  }

  double min() const { return *std::min_element(values.begin(), values.end()); }
  double max() const { return *std::max_element(values.begin(), values.end()); }

  void write_csv(const std::string& path, const std::string& comment = {}) const {
    csv::Writer w(path);
    if (!comment.empty()) w.comment(comment);
    w.header({"x", "y", "v"});
    for (std::size_t j = 0; j < grid.ny; ++j)
      for (std::size_t i = 0; i < grid.nx; ++i) w.row({grid.x(i), grid.y(j), (*this)(i, j)});
  }

  // Binary layout (little-endian): "PLF2", u32 nx, u32 ny, f64 h, f64 x0,
  // f64 y0, then nx*ny f64 values row-major (x fastest).
  void write_binary(const std::string& path) const {
    static_assert(std::endian::native == std::endian::little, "binary grid format assumes a little-endian host");
    std::ofstream out(path, std::ios::binary);
    require(out.good(), ErrorKind::Io, "cannot open " + path + " for writing");
    require(grid.nx <= std::numeric_limits<std::uint32_t>::max() && grid.ny <= std::numeric_limits<std::uint32_t>::max(),
            ErrorKind::Io, "grid too large for the binary format");
    out.write("PLF2", 4);
    const std::uint32_t nx = static_cast<std::uint32_t>(grid.nx), ny = static_cast<std::uint32_t>(grid.ny);
    out.write(reinterpret_cast<const char*>(&nx), sizeof nx);
    out.write(reinterpret_cast<const char*>(&ny), sizeof ny);
    for (double d : {grid.h, grid.x0, grid.y0}) out.write(reinterpret_cast<const char*>(&d), sizeof d);
    out.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(double)));
    require(out.good(), ErrorKind::Io, "write failed for " + path);
  }

  static Field2D read_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), ErrorKind::Io, "cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    require(in.good() && std::memcmp(magic, "PLF2", 4) == 0, ErrorKind::Io, "bad magic in " + path);
    std::uint32_t nx = 0, ny = 0;
    in.read(reinterpret_cast<char*>(&nx), sizeof nx);
    in.read(reinterpret_cast<char*>(&ny), sizeof ny);
    double hdr[3];
    in.read(reinterpret_cast<char*>(hdr), sizeof hdr);
    require(in.good(), ErrorKind::Io, "truncated header in " + path);
    Field2D f{Grid{nx, ny, hdr[0], hdr[1], hdr[2]}, std::vector<double>(static_cast<std::size_t>(nx) * ny)};
    in.read(reinterpret_cast<char*>(f.values.data()), static_cast<std::streamsize>(f.values.size() * sizeof(double)));
    require(in.gcount() == static_cast<std::streamsize>(f.values.size() * sizeof(double)), ErrorKind::Io,
            "truncated payload in " + path);
    return f;
  }
};

/// Grid function defined only where `mask` is set (interior nodes of an
/// operator, or nodes off the critical set).
struct MaskedField {
  Grid grid;
  std::vector<double> values;
  std::vector<unsigned char> mask;

  explicit MaskedField(const Grid& g) : grid(g), values(g.size(), 0.0), mask(g.size(), 0) {}

  void set(std::size_t i, std::size_t j, double v) {
    values[grid.index(i, j)] = v;
    mask[grid.index(i, j)] = 1;
  }
  bool defined(std::size_t i, std::size_t j) const { return mask[grid.index(i, j)] != 0; }
  double operator()(std::size_t i, std::size_t j) const { return values[grid.index(i, j)]; }

  std::size_t count() const { return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), 1)); }

  /// Sup-norm over defined nodes; 0 when nothing is defined.
  double sup_norm() const {
    double s = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k)
      if (mask[k]) s = std::max(s, std::abs(values[k]));
    return s;
  }
};

}  // namespace plap
