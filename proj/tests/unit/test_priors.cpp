#include <cmath>
#include <algorithm>
#include <filesystem>
#include <thread>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "lightray/priors.hpp"
#include "lightray/raw_io.hpp"
#include "test_util.hpp"

using namespace lightray;
using lightray::testing::expect_error;
using lightray::testing::random_vector;

namespace {

/// Dense Q from the kernel, with nodes mapped to (ix/(nx-1), iy/(nx-1), k/T).
Eigen::MatrixXd dense_covariance(const SpaceTimeGrid& g, const MaternParams& p) {
  const int nx = g.nx();
  const auto n = static_cast<Eigen::Index>(g.size());
  auto coords = [&](Eigen::Index i) {
    const auto per = static_cast<Eigen::Index>(g.nodes_per_plane());
    const auto k = i / per, s = i % per;
    return Eigen::Vector3d(static_cast<double>(s % nx) / (nx - 1), static_cast<double>(s / nx) / (nx - 1),
                           static_cast<double>(k) / g.planes());
  };
  Eigen::MatrixXd Q(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) Q(i, j) = matern_kernel((coords(i) - coords(j)).norm(), p);
  }
  return Q;
}

}  // namespace

TEST(Matern, KernelValues) {
  const MaternParams p{1.5, 0.05, 2.0};
  EXPECT_EQ(matern_kernel(0.0, p), 2.0);
  EXPECT_NEAR(matern_kernel(0.05 / std::sqrt(3.0), p), 2.0 * 2.0 * std::exp(-1.0), 1e-15);
  EXPECT_NEAR(matern_kernel(0.05 / std::sqrt(3.0), MaternParams{}), 0.73576, 1e-5);
  EXPECT_LT(matern_kernel(0.5, p), 1e-5 * 2.0);
  double prev = INFINITY;
  for (double r = 0.0; r < 0.5; r += 0.01) {
    const double v = matern_kernel(r, p);
    EXPECT_LT(v, prev);
    prev = v;
  }
}

TEST(Matern, Validation) {
  expect_error(ErrorCode::UnsupportedNu, [] { matern_kernel(0.1, MaternParams{2.5, 0.05, 1.0}); });
  expect_error(ErrorCode::InvalidArgument, [] { matern_kernel(0.1, MaternParams{1.5, 0.0, 1.0}); });
  expect_error(ErrorCode::InvalidArgument, [] { matern_kernel(0.1, MaternParams{1.5, 0.05, -1.0}); });
  expect_error(ErrorCode::InvalidArgument, [] { matern_kernel(-0.1, MaternParams{}); });
}

TEST(Matern, EfficientFftSize) {
  EXPECT_EQ(efficient_fft_size(1), 1);
  EXPECT_EQ(efficient_fft_size(11), 12);
  EXPECT_EQ(efficient_fft_size(101), 105);
  EXPECT_EQ(efficient_fft_size(39), 40);
  EXPECT_EQ(efficient_fft_size(64), 64);
}

TEST(Covariance, EmbeddingDims) {
  const CovarianceOperator Q = build_covariance_operator(build_grid(51, {-3, 3}, 20, {0, 4}), MaternParams{});
  EXPECT_EQ(Q.grid_dims(), (std::array<int, 3>{51, 51, 20}));
  for (int d = 0; d < 3; ++d) EXPECT_GE(Q.embedding_dims()[d], 2 * Q.grid_dims()[d] - 1);
  EXPECT_EQ(Q.size(), 52020);
  EXPECT_GE(Q.min_raw_spectrum(), -1e-12);
  EXPECT_EQ(Q.clamped_mass(), 0.0);
  for (double s : Q.spectrum()) EXPECT_GE(s, 0.0);
}

TEST(Covariance, DenseOracleAllUnitVectors) {
  const SpaceTimeGrid g = build_grid(6, {-3, 3}, 4, {0, 4});
  for (const MaternParams& p : {MaternParams{}, MaternParams{1.5, 0.3, 1.7}}) {
    const CovarianceOperator Q = build_covariance_operator(g, p);
    const Eigen::MatrixXd D = dense_covariance(g, p);
    ASSERT_EQ(Q.size(), 144);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < 144; ++i) {
      const Eigen::VectorXd col = Q.apply(Eigen::VectorXd::Unit(144, i));
      worst = std::max(worst, (col - D.col(i)).cwiseAbs().maxCoeff());
      Eigen::Index arg = 0;
      col.maxCoeff(&arg);
      EXPECT_EQ(arg, i);
    }
    EXPECT_LE(worst, 1e-10) << "ell=" << p.ell;
  }
}

TEST(Covariance, TinyCorrelationLengthIsNearIdentity) {
  const SpaceTimeGrid g = build_grid(6, {-3, 3}, 4, {0, 4});
  const MaternParams p{1.5, 1e-6, 1.3};
  const CovarianceOperator Q = build_covariance_operator(g, p);
  for (Eigen::Index i = 0; i < 144; i += 7) {
    const Eigen::VectorXd col = Q.apply(Eigen::VectorXd::Unit(144, i));
    const Eigen::VectorXd off = col - 1.3 * Eigen::VectorXd::Unit(144, i);
    EXPECT_LE(off.cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(Covariance, ZeroAndLinearity) {
  const SpaceTimeGrid g = build_grid(9, {-3, 3}, 5, {0, 4});
  const CovarianceOperator Q = build_covariance_operator(g, MaternParams{1.5, 0.2, 1.0});
  const auto n = Q.size();
  EXPECT_EQ(Q.apply(Eigen::VectorXd::Zero(n)).cwiseAbs().maxCoeff(), 0.0);
  const Eigen::VectorXd u = random_vector(n, 1), w = random_vector(n, 2);
  const Eigen::VectorXd lhs = Q.apply(1.5 * u - 0.25 * w);
  const Eigen::VectorXd rhs = 1.5 * Q.apply(u) - 0.25 * Q.apply(w);
  EXPECT_LE((lhs - rhs).cwiseAbs().maxCoeff(), 1e-12 * (1 + rhs.cwiseAbs().maxCoeff()));
  expect_error(ErrorCode::DimensionMismatch, [&] { Q.apply(Eigen::VectorXd::Zero(n - 1)); });
}

TEST(Covariance, SymmetricPositiveSemidefinite) {
  const SpaceTimeGrid g = build_grid(11, {-3, 3}, 6, {0, 4});
  const CovarianceOperator Q = build_covariance_operator(g, MaternParams{1.5, 0.15, 1.0});
  const auto n = Q.size();
  for (std::uint64_t s = 0; s < 200; ++s) {
    const Eigen::VectorXd v = random_vector(n, 1000 + s);
    const Eigen::VectorXd w = random_vector(n, 5000 + s);
    const Eigen::VectorXd Qv = Q.apply(v);
    EXPECT_GE(Qv.dot(v), -1e-10 * v.squaredNorm());
    const double a = Qv.dot(w), b = v.dot(Q.apply(w));
    EXPECT_LE(std::abs(a - b), 1e-10 * std::max(std::abs(a), Qv.norm() * w.norm()));
  }
}

TEST(Covariance, TranslationInvariance) {
  const SpaceTimeGrid g = build_grid(8, {-3, 3}, 5, {0, 4});
  const CovarianceOperator Q = build_covariance_operator(g, MaternParams{1.5, 0.25, 1.0});
  const auto n = Q.size();
  const Eigen::VectorXd a = Q.apply(Eigen::VectorXd::Unit(n, static_cast<Eigen::Index>(g.index(2, 3, 1))));
  const Eigen::VectorXd b = Q.apply(Eigen::VectorXd::Unit(n, static_cast<Eigen::Index>(g.index(4, 2, 3))));
  // b is a shifted by (+2, -1, +2); compare wherever both indices are on the grid.
  int compared = 0;
  for (int k = 0; k < 5; ++k) {
    for (int iy = 0; iy < 8; ++iy) {
      for (int ix = 0; ix < 8; ++ix) {
        const int sx = ix + 2, sy = iy - 1, sk = k + 2;
        if (sx >= 8 || sy < 0 || sk >= 5) continue;
        EXPECT_NEAR(b[static_cast<Eigen::Index>(g.index(sx, sy, sk))], a[static_cast<Eigen::Index>(g.index(ix, iy, k))],
                    1e-12);
        ++compared;
      }
    }
  }
  EXPECT_GT(compared, 100);
}

TEST(Covariance, ThreadSafeConcurrentApply) {
  const SpaceTimeGrid g = build_grid(9, {-3, 3}, 4, {0, 4});
  const CovarianceOperator Q = build_covariance_operator(g, MaternParams{});
  const Eigen::VectorXd v = random_vector(Q.size(), 3);
  const Eigen::VectorXd ref = Q.apply(v);
  std::vector<Eigen::VectorXd> out(4);
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) threads.emplace_back([&, t] { out[t] = Q.apply(v); });
  for (auto& t : threads) t.join();
  for (const auto& o : out) EXPECT_EQ(o, ref);
}

TEST(Covariance, WriteSpectrum) {
  const SpaceTimeGrid g = build_grid(6, {-3, 3}, 4, {0, 4});
  const CovarianceOperator Q = build_covariance_operator(g, MaternParams{1.5, 0.1, 2.0});
  const auto path = std::filesystem::temp_directory_path() / "lightray_spectrum.raw";
  write_spectrum(path, Q);
  const RawVolume r = read_raw_volume(path);
  EXPECT_EQ(r.header.at("dims"), "6 6 4");
  EXPECT_EQ(r.header.at("ell"), "0.10000000000000001");
  ASSERT_EQ(r.data.size(), Q.spectrum().size());
  EXPECT_TRUE(std::equal(r.data.begin(), r.data.end(), Q.spectrum().begin()));
  std::filesystem::remove(path);
}
