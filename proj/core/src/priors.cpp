#include "lightray/priors.hpp"

#include <cmath>
#include <complex>
#include <sstream>
#include <string>

#include <fftw3.h>

#include "fftw_util.hpp"

#include "lightray/error.hpp"
#include "lightray/raw_io.hpp"

namespace lightray {

using detail::ComplexBuffer;
using detail::RealBuffer;

struct CovarianceOperator::Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  std::size_t real_size = 0;
  std::size_t complex_size = 0;

  ~Plans() {
    std::lock_guard lock(detail::fftw_planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

void MaternParams::validate() const {
  require(nu > 0.0 && ell > 0.0 && sigma2 > 0.0, ErrorCode::InvalidArgument,
          "Matern parameters nu, ell, sigma2 must be positive");
  require(nu == 1.5, ErrorCode::UnsupportedNu, "only nu = 1.5 is implemented");
}

double matern_kernel(double r, const MaternParams& params) {
  params.validate();
  require(r >= 0.0, ErrorCode::InvalidArgument, "distance must be nonnegative");
  const double s = std::sqrt(3.0) * r / params.ell;
  return params.sigma2 * (1.0 + s) * std::exp(-s);
}

int efficient_fft_size(int n) {
  for (int m = std::max(n, 1);; ++m) {
    int rest = m;
    for (int p : {2, 3, 5, 7}) {
      while (rest % p == 0) rest /= p;
    }
    if (rest == 1) return m;
  }
}

CovarianceOperator::CovarianceOperator(const SpaceTimeGrid& grid, const MaternParams& params) : params_(params) {
  params.validate();
  dims_ = {grid.nx(), grid.nx(), grid.planes()};
  for (int d = 0; d < 3; ++d) embed_[d] = efficient_fft_size(2 * dims_[d] - 1);
  spacing_ = {1.0 / (grid.nx() - 1), 1.0 / (grid.nx() - 1), 1.0 / grid.planes()};

  const int mx = embed_[0], my = embed_[1], mt = embed_[2];
  const std::size_t real_size = static_cast<std::size_t>(mx) * my * mt;
  const std::size_t half_x = static_cast<std::size_t>(mx / 2 + 1);
  const std::size_t complex_size = half_x * my * mt;

  auto plans = std::make_shared<Plans>();
  plans->real_size = real_size;
  plans->complex_size = complex_size;
  RealBuffer column(real_size);
  ComplexBuffer freq(complex_size);
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    plans->forward = fftw_plan_dft_r2c_3d(mt, my, mx, column.data, freq.data, FFTW_ESTIMATE);
    plans->backward = fftw_plan_dft_c2r_3d(mt, my, mx, freq.data, column.data, FFTW_ESTIMATE);
  }
  require(plans->forward && plans->backward, ErrorCode::NonFinite, "FFTW planning failed");

  auto wrap = [](int j, int m) { return std::min(j, m - j); };
  for (int kt = 0; kt < mt; ++kt) {
    const double dt = wrap(kt, mt) * spacing_[2];
    for (int ky = 0; ky < my; ++ky) {
      const double dy = wrap(ky, my) * spacing_[1];
      for (int kx = 0; kx < mx; ++kx) {
        const double dx = wrap(kx, mx) * spacing_[0];
        column.data[(static_cast<std::size_t>(kt) * my + ky) * mx + kx] =
            matern_kernel(std::sqrt(dx * dx + dy * dy + dt * dt), params);
      }
    }
  }
  fftw_execute_dft_r2c(plans->forward, column.data, freq.data);

  spectrum_.resize(complex_size);
  min_raw_ = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < complex_size; ++i) {
    const double re = freq.data[i][0];
    require(std::isfinite(re), ErrorCode::NonFinite, "non-finite covariance spectrum");
    min_raw_ = std::min(min_raw_, re);
    if (re < 0.0) clamped_mass_ += -re;
    spectrum_[i] = std::max(re, 0.0);
  }
  plans_ = std::move(plans);
}

Eigen::Index CovarianceOperator::size() const {
  return static_cast<Eigen::Index>(dims_[0]) * dims_[1] * dims_[2];
}

Eigen::VectorXd CovarianceOperator::apply(const Eigen::VectorXd& v) const {
  require(v.size() == size(), ErrorCode::DimensionMismatch,
          "covariance apply: expected " + std::to_string(size()) + " entries, got " + std::to_string(v.size()));
  const int nx = dims_[0], ny = dims_[1], nt = dims_[2];
  const int mx = embed_[0], my = embed_[1];

  RealBuffer work(plans_->real_size);
  ComplexBuffer freq(plans_->complex_size);
  std::fill(work.data, work.data + plans_->real_size, 0.0);
  for (int t = 0; t < nt; ++t) {
    for (int y = 0; y < ny; ++y) {
      const auto src = (static_cast<std::size_t>(t) * ny + y) * nx;
      const auto dst = (static_cast<std::size_t>(t) * my + y) * mx;
      for (int x = 0; x < nx; ++x) work.data[dst + x] = v[static_cast<Eigen::Index>(src + x)];
    }
  }
  fftw_execute_dft_r2c(plans_->forward, work.data, freq.data);
  for (std::size_t i = 0; i < plans_->complex_size; ++i) {
    freq.data[i][0] *= spectrum_[i];
    freq.data[i][1] *= spectrum_[i];
  }
  fftw_execute_dft_c2r(plans_->backward, freq.data, work.data);

  const double scale = 1.0 / static_cast<double>(plans_->real_size);
  Eigen::VectorXd out(size());
  for (int t = 0; t < nt; ++t) {
    for (int y = 0; y < ny; ++y) {
      const auto dst = (static_cast<std::size_t>(t) * ny + y) * nx;
      const auto src = (static_cast<std::size_t>(t) * my + y) * mx;
      for (int x = 0; x < nx; ++x) out[static_cast<Eigen::Index>(dst + x)] = work.data[src + x] * scale;
    }
  }
  require(out.allFinite(), ErrorCode::NonFinite, "non-finite covariance product");
  return out;
}

CovarianceOperator build_covariance_operator(const SpaceTimeGrid& grid, const MaternParams& params) {
  return CovarianceOperator(grid, params);
}

void write_spectrum(const std::filesystem::path& path, const CovarianceOperator& q) {
  auto triple = [](const auto& a) {
    std::ostringstream s;
    s << a[0] << ' ' << a[1] << ' ' << a[2];
    return s.str();
  };
  std::ostringstream nu, ell, sigma2;
  nu.precision(17);
  ell.precision(17);
  sigma2.precision(17);
  nu << q.params().nu;
  ell << q.params().ell;
  sigma2 << q.params().sigma2;
  write_raw_volume(path,
                   {{"dims", triple(q.grid_dims())},
                    {"embedding", triple(q.embedding_dims())},
                    {"layout", "r2c-half t,y,x"},
                    {"nu", nu.str()},
                    {"ell", ell.str()},
                    {"sigma2", sigma2.str()}},
                   q.spectrum());
}

}  // namespace lightray
