#include <cmath>

#include <gtest/gtest.h>

#include "lightray/grid.hpp"
#include "lightray/phantom.hpp"
#include "test_util.hpp"

using namespace lightray;
using lightray::testing::expect_error;

TEST(Grid, FullResolution) {
  const SpaceTimeGrid g = build_grid(51, {-3, 3}, 20, {0, 4});
  EXPECT_NEAR(g.spacing(), 0.12, 1e-15);
  ASSERT_EQ(g.plane_times().size(), 20u);
  for (int k = 0; k < 20; ++k) EXPECT_NEAR(g.plane_times()[k], 0.1 + 0.2 * k, 1e-14);
  EXPECT_EQ(g.size(), 52020u);
}

TEST(Grid, SingleMidpoint) {
  const SpaceTimeGrid g = build_grid(2, {0, 1}, 1, {0, 1});
  EXPECT_EQ(g.spacing(), 1.0);
  ASSERT_EQ(g.plane_times().size(), 1u);
  EXPECT_EQ(g.plane_times()[0], 0.5);
}

TEST(Grid, DeskResolution) {
  const SpaceTimeGrid g = build_grid(25, {-3, 3}, 10, {0, 4});
  EXPECT_NEAR(g.spacing(), 0.25, 1e-15);
  for (int k = 0; k < 10; ++k) EXPECT_NEAR(g.plane_times()[k], 0.2 + 0.4 * k, 1e-14);
}

TEST(Grid, PlanesStrictlyInsideAndIncreasing) {
  for (int T : {1, 2, 7, 20}) {
    const SpaceTimeGrid g = build_grid(3, {0, 1}, T, {-1, 2});
    auto t = g.plane_times();
    for (int k = 0; k < T; ++k) {
      EXPECT_GT(t[k], -1.0);
      EXPECT_LT(t[k], 2.0);
      if (k > 0) EXPECT_GT(t[k], t[k - 1]);
    }
  }
}

TEST(Grid, Errors) {
  expect_error(ErrorCode::InvalidExtent, [] { build_grid(5, {1, 1}, 2, {0, 1}); });
  expect_error(ErrorCode::InvalidExtent, [] { build_grid(5, {0, 1}, 2, {2, 1}); });
  expect_error(ErrorCode::InvalidCount, [] { build_grid(1, {0, 1}, 2, {0, 1}); });
  expect_error(ErrorCode::InvalidCount, [] { build_grid(5, {0, 1}, 0, {0, 1}); });
}

TEST(Grid, ColumnMajorIndexing) {
  const SpaceTimeGrid g = build_grid(4, {0, 3}, 3, {0, 1});
  EXPECT_EQ(g.index(0, 0, 0), 0u);
  EXPECT_EQ(g.index(1, 0, 0), 1u);
  EXPECT_EQ(g.index(0, 1, 0), 4u);
  EXPECT_EQ(g.index(0, 0, 1), 16u);
  EXPECT_EQ(g.index(3, 3, 2), 47u);
}

TEST(Phantom, Examples) {
  // 2^0.05 by its series-free definition exp(0.05 ln 2).
  EXPECT_NEAR(eval_phantom(Phantom::translating_circle(0.05, 0.0), 0, 0, 0), std::exp(0.05 * std::log(2.0)), 1e-15);
  EXPECT_NEAR(eval_phantom(Phantom::translating_circle(0.05, 0.0), 0, 0, 0), 1.035265, 1e-6);
  for (double a : {0.05, 0.5, 1.0, 3.0}) EXPECT_EQ(eval_phantom(Phantom::translating_circle(a, 0.0), 0, 2, 0), 0.0);
  EXPECT_EQ(eval_phantom(Phantom::appearing_ball(0.05, 1.2, 2.8), 0.5, 0, 0), 0.0);
  EXPECT_EQ(eval_phantom(Phantom::collapsing_circle(1.0), 2.0, 0, 0), 0.0);
}

TEST(Phantom, Formulas) {
  const Phantom f1 = Phantom::translating_circle(0.5, 1.0);
  EXPECT_NEAR(eval_phantom(f1, 1.0, 1.0, 1.0), std::sqrt(1.0), 1e-15);  // r = 1 about (ct, 0)
  const Phantom f2 = Phantom::collapsing_circle(1.0);
  EXPECT_NEAR(eval_phantom(f2, 1.0, 0.25, 0.0), 0.25, 1e-15);  // 1 - 1/2 - 1/4
  EXPECT_NEAR(eval_phantom(f2, 3.0, 1.0, 0.0), 0.5, 1e-15);    // 1 - 3/2 + 1
  const Phantom f3 = Phantom::appearing_ball(1.0, 1.2, 2.8);
  EXPECT_NEAR(eval_phantom(f3, 2.0, 0.5, 0.0), 1.0, 1e-15);
  EXPECT_EQ(eval_phantom(f3, 2.9, 0.0, 0.0), 0.0);
  EXPECT_EQ(positive_power(0.0, 0.05), 0.0);
  EXPECT_EQ(positive_power(-1.0, 2.0), 0.0);
}

TEST(Phantom, Validation) {
  expect_error(ErrorCode::InvalidArgument, [] { Phantom::translating_circle(0.0, 0.0).validate({0, 4}); });
  expect_error(ErrorCode::InvalidArgument, [] { Phantom::appearing_ball(0.05, 2.0, 1.0).validate({0, 4}); });
  expect_error(ErrorCode::InvalidArgument, [] { Phantom::appearing_ball(0.05, -1.0, 1.0).validate({0, 4}); });
  EXPECT_NO_THROW(Phantom::appearing_ball(0.05, 1.2, 2.8).validate({0, 4}));
  EXPECT_EQ(phantom_kind_from_string("appearing_ball"), PhantomKind::AppearingBall);
  expect_error(ErrorCode::Config, [] { phantom_kind_from_string("square"); });
}

TEST(Rasterize, AppearingBallEmptySlices) {
  const SpaceTimeGrid g = build_grid(51, {-3, 3}, 20, {0, 4});
  const StateVector x = rasterize_phantom(Phantom::appearing_ball(0.05, 1.2, 2.8), g);
  const auto n = static_cast<Eigen::Index>(g.nodes_per_plane());
  for (int k = 0; k < 20; ++k) {
    const double m = x.segment(k * n, n).cwiseAbs().maxCoeff();
    if (k < 6 || k >= 14) {
      EXPECT_EQ(m, 0.0) << "slice " << k + 1;
    } else {
      EXPECT_GT(m, 0.0) << "slice " << k + 1;
    }
  }
}

TEST(Rasterize, AppearingBallTimeSymmetry) {
  const SpaceTimeGrid g = build_grid(51, {-3, 3}, 20, {0, 4});
  const StateVector x = rasterize_phantom(Phantom::appearing_ball(0.05, 1.2, 2.8), g);
  const auto n = static_cast<Eigen::Index>(g.nodes_per_plane());
  for (int k = 0; k < 20; ++k) {
    EXPECT_LE((x.segment(k * n, n) - x.segment((19 - k) * n, n)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Rasterize, ZeroPhantoms) {
  const SpaceTimeGrid g = build_grid(9, {-3, 3}, 4, {0, 4});
  EXPECT_EQ(rasterize_phantom(Phantom::zero(), g).cwiseAbs().maxCoeff(), 0.0);
  // Moving at speed 10 the circle leaves the box before the first plane.
  EXPECT_EQ(rasterize_phantom(Phantom::translating_circle(0.05, 10.0), g).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Rasterize, CentreNodeOfFirstSlice) {
  const SpaceTimeGrid g = build_grid(51, {-3, 3}, 20, {0, 4});
  const StateVector x = rasterize_phantom(Phantom::translating_circle(0.05, 0.0), g);
  EXPECT_NEAR(g.node(25), 0.0, 1e-15);
  EXPECT_NEAR(x[static_cast<Eigen::Index>(g.index(25, 25, 0))], std::pow(2.0, 0.05), 1e-14);
}

TEST(Rasterize, PointwiseOnSmallGrid) {
  const SpaceTimeGrid g = build_grid(7, {-3, 3}, 5, {0, 4});
  for (const Phantom& p : {Phantom::translating_circle(0.3, 0.7), Phantom::collapsing_circle(0.5),
                           Phantom::appearing_ball(0.2, 1.0, 3.0)}) {
    const StateVector x = rasterize_phantom(p, g);
    for (int k = 0; k < 5; ++k) {
      for (int iy = 0; iy < 7; ++iy) {
        for (int ix = 0; ix < 7; ++ix) {
          const double t = g.plane_times()[k];
          const double expect = eval_phantom(p, t, -3.0 + ix, -3.0 + iy);
          EXPECT_EQ(x[static_cast<Eigen::Index>(ix + 7 * iy + 49 * k)], expect);
        }
      }
    }
  }
}

TEST(Rasterize, TranslatingCircleSupport) {
  const SpaceTimeGrid g = build_grid(31, {-3, 3}, 6, {0, 4});
  const double c = 0.5;
  const StateVector x = rasterize_phantom(Phantom::translating_circle(0.05, c), g);
  for (int k = 0; k < g.planes(); ++k) {
    const double t = g.plane_times()[k];
    for (int iy = 0; iy < g.nx(); ++iy) {
      for (int ix = 0; ix < g.nx(); ++ix) {
        const double dx = g.node(ix) - c * t;
        const double r2 = dx * dx + g.node(iy) * g.node(iy);
        const double v = x[static_cast<Eigen::Index>(g.index(ix, iy, k))];
        if (r2 > 4.0) EXPECT_EQ(v, 0.0);
        if (r2 < 3.99) EXPECT_GT(v, 0.0);
      }
    }
  }
}
