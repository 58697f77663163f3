#include "lightray/forward_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lightray/error.hpp"
#include "lightray/parallel.hpp"
#include "lightray/random.hpp"

namespace lightray {

std::string_view to_string(RayMode mode) {
  return mode == RayMode::NullShell ? "null-shell" : "cone-interior";
}

RayMode ray_mode_from_string(std::string_view name) {
  if (name == "null-shell") return RayMode::NullShell;
  if (name == "cone-interior") return RayMode::ConeInterior;
  fail(ErrorCode::Config, "unknown ray mode '" + std::string(name) + "'");
}

RayPolicy RayPolicy::null_shell(std::optional<double> eps) { return {RayMode::NullShell, eps}; }

RayPolicy RayPolicy::cone_interior() { return {RayMode::ConeInterior, std::nullopt}; }

double RayPolicy::tolerance(const SpaceTimeGrid& grid) const { return eps.value_or(0.5 * grid.spacing()); }

std::vector<Ray> enumerate_rays(const SpaceTimeGrid& grid, const RayPolicy& policy) {
  const double span = grid.time_extent().length();
  const double eps = policy.tolerance(grid);
  require(eps >= 0.0, ErrorCode::InvalidArgument, "ray tolerance must be nonnegative");

  const int n = grid.nx();
  std::vector<Ray> rays;
  for (int sy = 0; sy < n; ++sy) {
    for (int sx = 0; sx < n; ++sx) {
      const std::size_t source = grid.spatial_index(sx, sy);
      for (int dy = 0; dy < n; ++dy) {
        for (int dx = 0; dx < n; ++dx) {
          const double dist = std::hypot(grid.node(dx) - grid.node(sx), grid.node(dy) - grid.node(sy));
          const bool admitted =
              policy.mode == RayMode::NullShell ? std::abs(dist - span) <= eps : dist <= span;
          if (admitted) rays.push_back({source, grid.spatial_index(dx, dy)});
        }
      }
    }
  }
  // Spatial indices are x-fastest, so the loops above already emit rays sorted
  // by (source, detector).
  return rays;
}

BilinearStencil bilinear_weights(double x, double y, const SpaceTimeGrid& grid) {
  constexpr double kEdgeTol = 1e-12;
  const double h = grid.spacing();
  const double last = grid.nx() - 1;
  double fx = (x - grid.spatial_extent().min) / h;
  double fy = (y - grid.spatial_extent().min) / h;
  BilinearStencil stencil;
  if (fx < -kEdgeTol || fy < -kEdgeTol || fx > last + kEdgeTol || fy > last + kEdgeTol) return stencil;
  fx = std::clamp(fx, 0.0, last);
  fy = std::clamp(fy, 0.0, last);

  const int ix = std::min(static_cast<int>(std::floor(fx)), grid.nx() - 2);
  const int iy = std::min(static_cast<int>(std::floor(fy)), grid.nx() - 2);
  const double wx = fx - ix;
  const double wy = fy - iy;

  // Listed in increasing node order: (ix,iy), (ix+1,iy), (ix,iy+1), (ix+1,iy+1).
  const NodeWeight candidates[4] = {
      {grid.spatial_index(ix, iy), (1.0 - wx) * (1.0 - wy)},
      {grid.spatial_index(ix + 1, iy), wx * (1.0 - wy)},
      {grid.spatial_index(ix, iy + 1), (1.0 - wx) * wy},
      {grid.spatial_index(ix + 1, iy + 1), wx * wy},
  };
  for (const auto& c : candidates) {
    if (c.weight != 0.0) stencil.entries[stencil.count++] = c;
  }
  return stencil;
}

namespace {

struct RayGeometry {
  double sx, sy, dx, dy;
};

RayGeometry geometry_of(const Ray& ray, const SpaceTimeGrid& grid) {
  const auto n = static_cast<std::size_t>(grid.nx());
  return {grid.node(static_cast<int>(ray.source % n)), grid.node(static_cast<int>(ray.source / n)),
          grid.node(static_cast<int>(ray.detector % n)), grid.node(static_cast<int>(ray.detector / n))};
}

template <typename Visit>
void trace_ray(const Ray& ray, const SpaceTimeGrid& grid, Visit&& visit) {
  const auto g = geometry_of(ray, grid);
  const double t0 = grid.time_extent().min;
  const double span = grid.time_extent().length();
  const auto times = grid.plane_times();
  for (int k = 0; k < grid.planes(); ++k) {
    const double s = (times[k] - t0) / span;
    visit(k, bilinear_weights(g.sx + s * (g.dx - g.sx), g.sy + s * (g.dy - g.sy), grid));
  }
}

}  // namespace

SparseOperator assemble_operator(const SpaceTimeGrid& grid, std::span<const Ray> rays,
                                 const AssemblyOptions& options) {
  const std::size_t m = rays.size();
  const std::size_t per_plane = grid.nodes_per_plane();
  require(grid.size() <= std::numeric_limits<std::uint32_t>::max(), ErrorCode::InvalidCount,
          "grid too large for 32-bit column indices");

  std::vector<std::int64_t> offsets(m + 1, 0);
  parallel_for(m, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      std::int64_t count = 0;
      trace_ray(rays[r], grid, [&](int, const BilinearStencil& st) { count += st.count; });
      offsets[r + 1] = count;
    }
  });
  for (std::size_t r = 0; r < m; ++r) offsets[r + 1] += offsets[r];

  std::vector<std::uint32_t> cols(static_cast<std::size_t>(offsets[m]));
  std::vector<double> vals(cols.size());
  const double span = grid.time_extent().length();
  parallel_for(m, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      double scale = 1.0;
      if (options.scale_by_segment_length) {
        const auto g = geometry_of(rays[r], grid);
        const double travel = std::hypot(g.dx - g.sx, g.dy - g.sy);
        scale = grid.plane_spacing() * std::sqrt(1.0 + (travel * travel) / (span * span));
      }
      auto pos = static_cast<std::size_t>(offsets[r]);
      trace_ray(rays[r], grid, [&](int k, const BilinearStencil& st) {
        for (const auto& nw : st.view()) {
          cols[pos] = static_cast<std::uint32_t>(per_plane * k + nw.node);
          vals[pos] = nw.weight * scale;
          ++pos;
        }
      });
    }
  });

  return SparseOperator(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(grid.size()), std::move(offsets),
                        std::move(cols), std::move(vals), std::vector<Ray>(rays.begin(), rays.end()));
}

Observation Observation::from_data(Eigen::VectorXd b, double delta) {
  Observation obs;
  obs.clean_norm = b.norm();
  obs.e = Eigen::VectorXd::Zero(b.size());
  obs.b = std::move(b);
  obs.delta = delta;
  obs.level = obs.clean_norm > 0.0 ? 100.0 * delta / obs.clean_norm : 0.0;
  return obs;
}

Observation add_noise(const Eigen::VectorXd& b_clean, double level, std::uint64_t seed) {
  require(level >= 0.0, ErrorCode::InvalidArgument, "noise level must be nonnegative");
  Observation obs;
  obs.level = level;
  obs.clean_norm = b_clean.norm();
  obs.e = Eigen::VectorXd::Zero(b_clean.size());
  if (level > 0.0) {
    require(obs.clean_norm > 0.0, ErrorCode::ZeroCleanData, "cannot scale noise relative to zero clean data");
    CounterRng rng(seed);
    obs.e = rng.normal_vector(b_clean.size());
    obs.e *= (level / 100.0) * obs.clean_norm / obs.e.norm();
  }
  obs.b = b_clean + obs.e;
  obs.delta = obs.e.norm();
  return obs;
}

}  // namespace lightray
