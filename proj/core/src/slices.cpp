#include "lightray/slices.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "lightray/error.hpp"
#include "lightray/raw_io.hpp"

namespace lightray {

namespace {

std::string slice_name(int k, const char* ext) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "slice_%03d.%s", k + 1, ext);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream os(path, mode);
  require(os.good(), ErrorCode::Io, "cannot write " + path.string());
  return os;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(std::numeric_limits<double>::max_digits10);
  os << v;
  return os.str();
}

}  // namespace

SliceFormats SliceFormats::from_names(std::span<const std::string> names) {
  SliceFormats f{false, false};
  for (const auto& n : names) {
    if (n == "pgm") f.pgm = true;
    if (n == "csv") f.csv = true;
  }
  return f;
}

void export_slices(const StateVector& x, const SpaceTimeGrid& grid, const std::filesystem::path& dir,
                   const SliceFormats& formats) {
  check_state(grid, x);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  require(!ec && std::filesystem::is_directory(dir), ErrorCode::Io, "cannot create directory " + dir.string());

  const int n = grid.nx();
  const auto per_plane = static_cast<Eigen::Index>(grid.nodes_per_plane());
  std::ofstream scaling = open_out(dir / "scaling.csv");
  scaling << "slice,min,max,degenerate\n";
  for (int k = 0; k < grid.planes(); ++k) {
    const auto slice = x.segment(k * per_plane, per_plane);
    const double lo = slice.minCoeff();
    const double hi = slice.maxCoeff();
    const bool degenerate = !(hi > lo);
    scaling << k + 1 << ',' << fmt(lo) << ',' << fmt(hi) << ',' << (degenerate ? 1 : 0) << '\n';

    if (formats.pgm) {
      std::ofstream os = open_out(dir / slice_name(k, "pgm"), std::ios::binary);
      os << "P5\n" << n << ' ' << n << "\n255\n";
      std::vector<unsigned char> row(static_cast<std::size_t>(n));
      for (int iy = n - 1; iy >= 0; --iy) {
        for (int ix = 0; ix < n; ++ix) {
          const double v = slice[ix + static_cast<Eigen::Index>(n) * iy];
          const double scaled = degenerate ? 0.0 : std::round(255.0 * (v - lo) / (hi - lo));
          row[ix] = static_cast<unsigned char>(std::clamp(scaled, 0.0, 255.0));
        }
        os.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
      }
      require(os.good(), ErrorCode::Io, "failed writing slice image");
    }
    if (formats.csv) {
      std::ofstream os = open_out(dir / slice_name(k, "csv"));
      os.precision(std::numeric_limits<double>::max_digits10);
      for (int iy = 0; iy < n; ++iy) {
        for (int ix = 0; ix < n; ++ix) {
          if (ix > 0) os << ',';
          os << slice[ix + static_cast<Eigen::Index>(n) * iy];
        }
        os << '\n';
      }
      require(os.good(), ErrorCode::Io, "failed writing slice CSV");
    }
  }
  require(scaling.good(), ErrorCode::Io, "failed writing scaling sidecar");
}

std::vector<double> read_slice_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  require(is.good(), ErrorCode::Io, "cannot read " + path.string());
  std::vector<double> values;
  std::string line;
  std::size_t width = 0;
  std::size_t rows = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::size_t count = 0;
    while (std::getline(ls, cell, ',')) {
      try {
        values.push_back(std::stod(cell));
      } catch (const std::exception&) {
        fail(ErrorCode::Io, "malformed value in " + path.string());
      }
      ++count;
    }
    require(rows == 0 || count == width, ErrorCode::Io, "ragged slice CSV " + path.string());
    width = count;
    ++rows;
  }
  require(rows == width, ErrorCode::Io, "slice CSV is not square: " + path.string());
  return values;
}

void export_volume(const std::filesystem::path& path, const StateVector& x, const SpaceTimeGrid& grid) {
  check_state(grid, x);
  const std::map<std::string, std::string> header{
      {"kind", "state_volume"},
      {"nx", std::to_string(grid.nx())},
      {"planes", std::to_string(grid.planes())},
      {"spatial_extent", fmt(grid.spatial_extent().min) + " " + fmt(grid.spatial_extent().max)},
      {"time_extent", fmt(grid.time_extent().min) + " " + fmt(grid.time_extent().max)},
      {"layout", "t,y,x"},
  };
  write_raw_volume(path, header, std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
}

std::vector<unsigned char> read_pgm(const std::filesystem::path& path, int& width, int& height) {
  std::ifstream is(path, std::ios::binary);
  require(is.good(), ErrorCode::Io, "cannot read " + path.string());
  std::string magic;
  int maxval = 0;
  is >> magic >> width >> height >> maxval;
  require(magic == "P5" && width > 0 && height > 0 && maxval == 255, ErrorCode::Io, "unsupported PGM " + path.string());
  is.get();
  std::vector<unsigned char> pixels(static_cast<std::size_t>(width) * height);
  is.read(reinterpret_cast<char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
  require(is.gcount() == static_cast<std::streamsize>(pixels.size()), ErrorCode::Io, "truncated PGM " + path.string());
  return pixels;
}

}  // namespace lightray
