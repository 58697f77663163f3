#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace lightray {

struct Interval {
  double min = 0.0;
  double max = 0.0;

  double length() const { return max - min; }
  bool operator==(const Interval&) const = default;
};

/// Concatenated event-plane slices; slice k occupies entries
/// [k*nx*nx, (k+1)*nx*nx), each slice stored column-major with x fastest.
using StateVector = Eigen::VectorXd;

/// Discretization of [t_min,t_max] x [x_min,x_max]^2.
///
/// The spatial grid has nx nodes per axis including both endpoints. Event
/// planes sit at the midpoints of T equal subintervals of the time extent so
/// that none of them coincides with the source (t_min) or detector (t_max)
/// plane.
class SpaceTimeGrid {
 public:
  SpaceTimeGrid(int nx, Interval spatial_extent, int planes, Interval time_extent);

  int nx() const { return nx_; }
  int planes() const { return planes_; }
  Interval spatial_extent() const { return spatial_extent_; }
  Interval time_extent() const { return time_extent_; }
  double spacing() const { return spacing_; }
  double plane_spacing() const { return time_extent_.length() / planes_; }
  std::span<const double> plane_times() const { return plane_times_; }

  /// Coordinate of node i along either spatial axis.
  double node(int i) const { return spatial_extent_.min + i * spacing_; }

  std::size_t nodes_per_plane() const { return static_cast<std::size_t>(nx_) * nx_; }
  std::size_t size() const { return nodes_per_plane() * planes_; }

  std::size_t spatial_index(int ix, int iy) const {
    return static_cast<std::size_t>(ix) + static_cast<std::size_t>(nx_) * iy;
  }
  std::size_t index(int ix, int iy, int plane) const {
    return nodes_per_plane() * plane + spatial_index(ix, iy);
  }

  bool operator==(const SpaceTimeGrid&) const = default;

 private:
  int nx_;
  int planes_;
  Interval spatial_extent_;
  Interval time_extent_;
  double spacing_;
  std::vector<double> plane_times_;
};

SpaceTimeGrid build_grid(int nx, Interval spatial_extent, int planes, Interval time_extent);

/// Throws dimension-mismatch unless x has exactly grid.size() entries.
void check_state(const SpaceTimeGrid& grid, const StateVector& x);

}  // namespace lightray
