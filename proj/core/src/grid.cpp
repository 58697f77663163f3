#include "lightray/grid.hpp"

#include <string>

#include "lightray/error.hpp"

namespace lightray {

SpaceTimeGrid::SpaceTimeGrid(int nx, Interval spatial_extent, int planes, Interval time_extent)
    : nx_(nx), planes_(planes), spatial_extent_(spatial_extent), time_extent_(time_extent) {
  require(spatial_extent.min < spatial_extent.max, ErrorCode::InvalidExtent,
          "spatial extent must satisfy min < max");
  require(time_extent.min < time_extent.max, ErrorCode::InvalidExtent,
          "time extent must satisfy min < max");
  require(nx >= 2, ErrorCode::InvalidCount, "need at least 2 spatial nodes per axis, got " + std::to_string(nx));
  require(planes >= 1, ErrorCode::InvalidCount, "need at least 1 event plane, got " + std::to_string(planes));

  spacing_ = spatial_extent.length() / (nx - 1);
  const double dt = time_extent.length() / planes;
  plane_times_.reserve(planes);
  for (int k = 0; k < planes; ++k) plane_times_.push_back(time_extent.min + (k + 0.5) * dt);
}

SpaceTimeGrid build_grid(int nx, Interval spatial_extent, int planes, Interval time_extent) {
  return SpaceTimeGrid(nx, spatial_extent, planes, time_extent);
}

void check_state(const SpaceTimeGrid& grid, const StateVector& x) {
  require(static_cast<std::size_t>(x.size()) == grid.size(), ErrorCode::DimensionMismatch,
          "state vector has " + std::to_string(x.size()) + " entries, grid expects " +
              std::to_string(grid.size()));
}

}  // namespace lightray
