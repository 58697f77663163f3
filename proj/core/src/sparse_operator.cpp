#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>

#include "lightray/error.hpp"
#include "lightray/forward_model.hpp"
#include "lightray/parallel.hpp"

namespace lightray {

SparseOperator::SparseOperator(Eigen::Index rows, Eigen::Index cols, std::vector<std::int64_t> row_offsets,
                               std::vector<std::uint32_t> col_indices, std::vector<double> values,
                               std::vector<Ray> row_map)
    : rows_(rows),
      cols_(cols),
      row_offsets_(std::move(row_offsets)),
      col_indices_(std::move(col_indices)),
      values_(std::move(values)),
      row_map_(std::move(row_map)) {
  require(rows_ >= 0 && cols_ >= 0, ErrorCode::InvalidCount, "negative operator dimensions");
  require(row_offsets_.size() == static_cast<std::size_t>(rows_) + 1, ErrorCode::DimensionMismatch,
          "row offsets must have rows + 1 entries");
  require(col_indices_.size() == values_.size() &&
              static_cast<std::size_t>(row_offsets_.back()) == values_.size(),
          ErrorCode::DimensionMismatch, "CSR arrays are inconsistent");
  require(row_map_.empty() || row_map_.size() == static_cast<std::size_t>(rows_), ErrorCode::DimensionMismatch,
          "row map must be empty or have one ray per row");
  for (auto c : col_indices_) {
    require(c < static_cast<std::uint64_t>(cols_), ErrorCode::DimensionMismatch, "column index out of range");
  }
  build_transpose();
}

void SparseOperator::build_transpose() {
  // Counting sort by column keeps row indices increasing inside each column,
  // so adjoint sums are accumulated in a fixed order.
  t_offsets_.assign(static_cast<std::size_t>(cols_) + 1, 0);
  for (auto c : col_indices_) ++t_offsets_[c + 1];
  for (std::size_t j = 0; j < static_cast<std::size_t>(cols_); ++j) t_offsets_[j + 1] += t_offsets_[j];
  t_indices_.resize(values_.size());
  t_values_.resize(values_.size());
  std::vector<std::int64_t> cursor(t_offsets_.begin(), t_offsets_.end() - 1);
  for (std::size_t r = 0; r < static_cast<std::size_t>(rows_); ++r) {
    for (auto p = row_offsets_[r]; p < row_offsets_[r + 1]; ++p) {
      const auto dst = static_cast<std::size_t>(cursor[col_indices_[p]]++);
      t_indices_[dst] = static_cast<std::uint32_t>(r);
      t_values_[dst] = values_[p];
    }
  }
}

Eigen::VectorXd SparseOperator::apply(const Eigen::VectorXd& x) const {
  require(x.size() == cols_, ErrorCode::DimensionMismatch,
          "apply: expected " + std::to_string(cols_) + " entries, got " + std::to_string(x.size()));
  Eigen::VectorXd y(rows_);
  parallel_for(static_cast<std::size_t>(rows_), [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      double acc = 0.0;
      for (auto p = row_offsets_[r]; p < row_offsets_[r + 1]; ++p) acc += values_[p] * x[col_indices_[p]];
      y[static_cast<Eigen::Index>(r)] = acc;
    }
  });
  return y;
}

Eigen::VectorXd SparseOperator::apply_adjoint(const Eigen::VectorXd& y) const {
  require(y.size() == rows_, ErrorCode::DimensionMismatch,
          "apply_adjoint: expected " + std::to_string(rows_) + " entries, got " + std::to_string(y.size()));
  Eigen::VectorXd x(cols_);
  parallel_for(static_cast<std::size_t>(cols_), [&](std::size_t begin, std::size_t end) {
    for (std::size_t c = begin; c < end; ++c) {
      double acc = 0.0;
      for (auto p = t_offsets_[c]; p < t_offsets_[c + 1]; ++p) acc += t_values_[p] * y[t_indices_[p]];
      x[static_cast<Eigen::Index>(c)] = acc;
    }
  });
  return x;
}

double SparseOperator::frobenius_norm() const {
  double acc = 0.0;
  for (double v : values_) acc += v * v;
  return std::sqrt(acc);
}

Eigen::MatrixXd SparseOperator::to_dense() const {
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(rows_, cols_);
  for (Eigen::Index r = 0; r < rows_; ++r) {
    for (auto p = row_offsets_[r]; p < row_offsets_[r + 1]; ++p) dense(r, col_indices_[p]) += values_[p];
  }
  return dense;
}

SparseOperator SparseOperator::permute_rows(std::span<const std::size_t> perm) const {
  require(perm.size() == static_cast<std::size_t>(rows_), ErrorCode::DimensionMismatch,
          "permutation length must equal the row count");
  std::vector<std::int64_t> offsets{0};
  std::vector<std::uint32_t> cols;
  std::vector<double> vals;
  std::vector<Ray> map;
  cols.reserve(col_indices_.size());
  vals.reserve(values_.size());
  for (auto src : perm) {
    require(src < static_cast<std::size_t>(rows_), ErrorCode::InvalidArgument, "permutation index out of range");
    for (auto p = row_offsets_[src]; p < row_offsets_[src + 1]; ++p) {
      cols.push_back(col_indices_[p]);
      vals.push_back(values_[p]);
    }
    offsets.push_back(static_cast<std::int64_t>(cols.size()));
    if (!row_map_.empty()) map.push_back(row_map_[src]);
  }
  return SparseOperator(rows_, cols_, std::move(offsets), std::move(cols), std::move(vals), std::move(map));
}

void write_matrix_market(const std::filesystem::path& path, const SparseOperator& op) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorCode::Io, "cannot open " + path.string() + " for writing");
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << op.rows() << ' ' << op.cols() << ' ' << op.nonzeros() << '\n';
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  const auto offsets = op.row_offsets();
  const auto cols = op.col_indices();
  const auto vals = op.values();
  for (Eigen::Index r = 0; r < op.rows(); ++r) {
    for (auto p = offsets[r]; p < offsets[r + 1]; ++p) out << r + 1 << ' ' << cols[p] + 1 << ' ' << vals[p] << '\n';
  }
  require(static_cast<bool>(out), ErrorCode::Io, "failed while writing " + path.string());
}

SparseOperator read_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::Io, "cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  std::string lowered = line;
  std::transform(lowered.begin(), lowered.end(), lowered.begin(), [](unsigned char ch) { return std::tolower(ch); });
  require(lowered.rfind("%%matrixmarket matrix coordinate real general", 0) == 0, ErrorCode::Io,
          path.string() + " is not a coordinate real general Matrix Market file");
  while (std::getline(in, line) && (line.empty() || line[0] == '%')) {
  }
  std::istringstream header(line);
  long long rows = 0, cols = 0, nnz = 0;
  require(static_cast<bool>(header >> rows >> cols >> nnz), ErrorCode::Io, "bad Matrix Market size line");

  struct Entry {
    long long r, c;
    double v;
  };
  std::vector<Entry> entries;
  entries.reserve(static_cast<std::size_t>(nnz));
  for (long long i = 0; i < nnz; ++i) {
    Entry e{};
    require(static_cast<bool>(in >> e.r >> e.c >> e.v), ErrorCode::Io, "truncated Matrix Market data");
    require(e.r >= 1 && e.r <= rows && e.c >= 1 && e.c <= cols, ErrorCode::Io, "Matrix Market index out of range");
    entries.push_back(e);
  }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const Entry& a, const Entry& b) { return a.r != b.r ? a.r < b.r : a.c < b.c; });

  std::vector<std::int64_t> offsets(static_cast<std::size_t>(rows) + 1, 0);
  std::vector<std::uint32_t> col_idx;
  std::vector<double> vals;
  long long last_r = 0, last_c = 0;
  for (const auto& e : entries) {
    // Duplicates are summed, as the format prescribes.
    if (e.r == last_r && e.c == last_c) {
      vals.back() += e.v;
      continue;
    }
    col_idx.push_back(static_cast<std::uint32_t>(e.c - 1));
    vals.push_back(e.v);
    ++offsets[static_cast<std::size_t>(e.r)];
    last_r = e.r;
    last_c = e.c;
  }
  for (std::size_t r = 0; r < static_cast<std::size_t>(rows); ++r) offsets[r + 1] += offsets[r];
  return SparseOperator(rows, cols, std::move(offsets), std::move(col_idx), std::move(vals));
}

void write_rays_csv(const std::filesystem::path& path, std::span<const Ray> rays, const SpaceTimeGrid& grid) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorCode::Io, "cannot open " + path.string() + " for writing");
  const auto n = static_cast<std::size_t>(grid.nx());
  out << "ray_id,src_ix,src_iy,det_ix,det_iy\n";
  for (std::size_t i = 0; i < rays.size(); ++i) {
    out << i << ',' << rays[i].source % n << ',' << rays[i].source / n << ',' << rays[i].detector % n << ','
        << rays[i].detector / n << '\n';
  }
  require(static_cast<bool>(out), ErrorCode::Io, "failed while writing " + path.string());
}

std::vector<Ray> read_rays_csv(const std::filesystem::path& path, const SpaceTimeGrid& grid) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::Io, "cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  require(line == "ray_id,src_ix,src_iy,det_ix,det_iy", ErrorCode::Io, "unexpected ray CSV header in " + path.string());
  std::vector<Ray> rays;
  const int n = grid.nx();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    long long id = 0;
    int sx = 0, sy = 0, dx = 0, dy = 0;
    char comma = 0;
    require(static_cast<bool>(row >> id >> comma >> sx >> comma >> sy >> comma >> dx >> comma >> dy), ErrorCode::Io,
            "malformed ray CSV line: " + line);
    require(sx >= 0 && sx < n && sy >= 0 && sy < n && dx >= 0 && dx < n && dy >= 0 && dy < n, ErrorCode::Io,
            "ray CSV node index outside the grid");
    rays.push_back({grid.spatial_index(sx, sy), grid.spatial_index(dx, dy)});
  }
  return rays;
}

}  // namespace lightray
