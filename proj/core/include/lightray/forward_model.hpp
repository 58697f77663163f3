#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "lightray/grid.hpp"
#include "lightray/linear_operator.hpp"

namespace lightray {

enum class RayMode { NullShell, ConeInterior };

std::string_view to_string(RayMode mode);
RayMode ray_mode_from_string(std::string_view name);

/// Which (source, detector) node pairs count as rays.
///
/// NullShell admits pairs whose spatial separation is within eps of the time
/// span t_max - t_min (discrete light-like rays). ConeInterior admits every
/// pair with separation <= the time span.
struct RayPolicy {
  RayMode mode = RayMode::NullShell;
  std::optional<double> eps;  // NullShell only; defaults to half the grid spacing

  static RayPolicy null_shell(std::optional<double> eps = std::nullopt);
  static RayPolicy cone_interior();

  double tolerance(const SpaceTimeGrid& grid) const;
  bool operator==(const RayPolicy&) const = default;
};

/// Straight spacetime segment from a node of the source plane (t_min) to a
/// node of the detector plane (t_max). Indices are spatial node indices.
struct Ray {
  std::size_t source = 0;
  std::size_t detector = 0;

  bool operator==(const Ray&) const = default;
};

/// All admissible rays ordered by source index, then detector index.
std::vector<Ray> enumerate_rays(const SpaceTimeGrid& grid, const RayPolicy& policy);

struct NodeWeight {
  std::size_t node = 0;
  double weight = 0.0;
};

/// Up to four nonzero bilinear interpolation weights, ordered by node index.
struct BilinearStencil {
  std::array<NodeWeight, 4> entries{};
  int count = 0;

  bool empty() const { return count == 0; }
  std::span<const NodeWeight> view() const { return {entries.data(), static_cast<std::size_t>(count)}; }
};

/// Empty stencil when (x, y) lies outside the closed spatial box.
BilinearStencil bilinear_weights(double x, double y, const SpaceTimeGrid& grid);

struct AssemblyOptions {
  /// Multiply each plane's weights by the spacetime length of the ray segment
  /// belonging to that plane.
  bool scale_by_segment_length = false;
};

/// Compressed-sparse-row matrix with a cached transpose for adjoint products.
class SparseOperator final : public LinearOperator {
 public:
  SparseOperator() = default;
  /// Builds from CSR arrays; column indices within a row must be increasing.
  SparseOperator(Eigen::Index rows, Eigen::Index cols, std::vector<std::int64_t> row_offsets,
                 std::vector<std::uint32_t> col_indices, std::vector<double> values,
                 std::vector<Ray> row_map = {});

  Eigen::Index rows() const override { return rows_; }
  Eigen::Index cols() const override { return cols_; }
  std::size_t nonzeros() const { return values_.size(); }

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const override;
  Eigen::VectorXd apply_adjoint(const Eigen::VectorXd& y) const override;

  std::span<const std::int64_t> row_offsets() const { return row_offsets_; }
  std::span<const std::uint32_t> col_indices() const { return col_indices_; }
  std::span<const double> values() const { return values_; }
  /// Ray behind each row; empty when the operator was imported.
  std::span<const Ray> row_map() const { return row_map_; }

  double frobenius_norm() const;
  Eigen::MatrixXd to_dense() const;

  /// Reorders rows: row i of the result is row perm[i] of this operator.
  SparseOperator permute_rows(std::span<const std::size_t> perm) const;

 private:
  void build_transpose();

  Eigen::Index rows_ = 0;
  Eigen::Index cols_ = 0;
  std::vector<std::int64_t> row_offsets_{0};
  std::vector<std::uint32_t> col_indices_;
  std::vector<double> values_;
  std::vector<Ray> row_map_;

  std::vector<std::int64_t> t_offsets_{0};
  std::vector<std::uint32_t> t_indices_;
  std::vector<double> t_values_;
};

/// One row per ray; for each event plane the ray's crossing point contributes
/// its bilinear weights to that plane's block of columns.
SparseOperator assemble_operator(const SpaceTimeGrid& grid, std::span<const Ray> rays,
                                 const AssemblyOptions& options = {});

/// Matrix Market coordinate real general, 1-based indices.
void write_matrix_market(const std::filesystem::path& path, const SparseOperator& op);
SparseOperator read_matrix_market(const std::filesystem::path& path);

/// CSV with header `ray_id,src_ix,src_iy,det_ix,det_iy`.
void write_rays_csv(const std::filesystem::path& path, std::span<const Ray> rays, const SpaceTimeGrid& grid);
std::vector<Ray> read_rays_csv(const std::filesystem::path& path, const SpaceTimeGrid& grid);

struct Observation {
  Eigen::VectorXd b;           // noisy data
  Eigen::VectorXd e;           // the noise that was added
  double delta = 0.0;          // ||e||
  double level = 0.0;          // percent
  double clean_norm = 0.0;     // ||A x_true||, used as the RRN denominator

  /// Wraps externally supplied data; the RRN denominator falls back to ||b||.
  static Observation from_data(Eigen::VectorXd b, double delta);
};

/// b = b_clean + e with e i.i.d. standard normal from CounterRng(seed),
/// rescaled so that ||e|| = (level / 100) ||b_clean||.
Observation add_noise(const Eigen::VectorXd& b_clean, double level, std::uint64_t seed);

}  // namespace lightray
