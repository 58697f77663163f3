#pragma once

#include <array>
#include <filesystem>
#include <memory>
#include <span>
#include <vector>

#include "lightray/grid.hpp"
#include "lightray/linear_operator.hpp"

namespace lightray {

struct MaternParams {
  double nu = 1.5;
  double ell = 0.05;   // correlation length in normalized [0,1]^3 coordinates
  double sigma2 = 1.0;

  void validate() const;
  bool operator==(const MaternParams&) const = default;
};

/// Matern covariance at distance r. Only nu = 1.5 is supported:
/// sigma2 (1 + sqrt(3) r / ell) exp(-sqrt(3) r / ell).
double matern_kernel(double r, const MaternParams& params);

/// Smallest integer >= n whose only prime factors are 2, 3, 5 and 7.
int efficient_fft_size(int n);

/// Matern prior covariance Q over the (x, y, t) grid, applied matrix-free.
///
/// Grid coordinates are mapped affinely to [0,1]^3: x and y by the spatial
/// extent (node spacing 1/(nx-1)), t by the time extent (plane spacing 1/T).
/// The stationary kernel is sampled on a periodic lattice of at least 2n-1
/// points per axis; its FFT (the spectrum) diagonalises the embedded
/// circulant matrix, whose leading block is exactly Q. Negative spectrum
/// values are clamped to zero so the embedded operator is PSD.
class CovarianceOperator final : public SymmetricOperator {
 public:
  CovarianceOperator(const SpaceTimeGrid& grid, const MaternParams& params);

  Eigen::Index size() const override;
  Eigen::VectorXd apply(const Eigen::VectorXd& v) const override;

  /// (nx, ny, T) and the embedding lattice (Mx, My, Mt).
  std::array<int, 3> grid_dims() const { return dims_; }
  std::array<int, 3> embedding_dims() const { return embed_; }
  std::array<double, 3> normalized_spacing() const { return spacing_; }
  const MaternParams& params() const { return params_; }

  /// Real half spectrum in FFTW r2c layout [Mt][My][Mx/2+1], after clamping.
  std::span<const double> spectrum() const { return spectrum_; }
  double min_raw_spectrum() const { return min_raw_; }
  /// Sum of the magnitudes removed by clamping negative entries.
  double clamped_mass() const { return clamped_mass_; }

 private:
  struct Plans;

  std::array<int, 3> dims_{};
  std::array<int, 3> embed_{};
  std::array<double, 3> spacing_{};
  MaternParams params_;
  std::vector<double> spectrum_;
  double min_raw_ = 0.0;
  double clamped_mass_ = 0.0;
  std::shared_ptr<const Plans> plans_;
};

CovarianceOperator build_covariance_operator(const SpaceTimeGrid& grid, const MaternParams& params);

/// Raw volume with header fields dims, embedding, nu, ell, sigma2, layout.
void write_spectrum(const std::filesystem::path& path, const CovarianceOperator& q);

}  // namespace lightray
