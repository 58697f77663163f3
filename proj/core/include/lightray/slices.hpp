#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "lightray/grid.hpp"

namespace lightray {

struct SliceFormats {
  bool pgm = true;
  bool csv = true;

  static SliceFormats from_names(std::span<const std::string> names);
};

/// Writes slice_NNN.pgm (8-bit P5, each slice mapped linearly from its own
/// [min, max] to [0, 255], top row = largest y) and slice_NNN.csv (rows
/// iy = 0..nx-1, columns ix, full precision), numbered from 1, plus
/// scaling.csv with `slice,min,max,degenerate`. A constant slice is degenerate
/// and maps to 0.
void export_slices(const StateVector& x, const SpaceTimeGrid& grid, const std::filesystem::path& dir,
                   const SliceFormats& formats = {});

/// One slice CSV back into column-major (x fastest) order.
std::vector<double> read_slice_csv(const std::filesystem::path& path);

/// The whole state as a raw volume with the grid in its header.
void export_volume(const std::filesystem::path& path, const StateVector& x, const SpaceTimeGrid& grid);

/// Reads an 8-bit P5 image; returns pixels row by row and sets width/height.
std::vector<unsigned char> read_pgm(const std::filesystem::path& path, int& width, int& height);

}  // namespace lightray
