#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "amcp/projector.hpp"
#include "test_util.hpp"

using namespace amcp;

namespace {

// Direct windowed mean and population std, clipped to the frame.
void window_stats(const ImageBuf& img, int window, int x, int y, int c, double& mean,
                  double& sd) {
  const int before = window / 2;
  const int after = window - before - 1;
  double s = 0.0, n = 0.0;
  for (int yy = std::max(0, y - before); yy <= std::min(img.height() - 1, y + after); ++yy) {
    for (int xx = std::max(0, x - before); xx <= std::min(img.width() - 1, x + after); ++xx) {
      s += img.at(xx, yy, c);
      n += 1.0;
    }
  }
  mean = s / n;
  double v = 0.0;
  for (int yy = std::max(0, y - before); yy <= std::min(img.height() - 1, y + after); ++yy) {
    for (int xx = std::max(0, x - before); xx <= std::min(img.width() - 1, x + after); ++xx) {
      v += (img.at(xx, yy, c) - mean) * (img.at(xx, yy, c) - mean);
    }
  }
  sd = std::sqrt(v / n);
}

}  // namespace

TEST(IdentityProjector, CopiesRgb) {
  std::mt19937_64 rng(1);
  const ImageBuf img = testutil::random_image(rng, 7, 5);
  const FeatureMap f = IdentityProjector().project(img);
  ASSERT_EQ(f.channels(), 3);
  for (int y = 0; y < 5; ++y) {
    for (int x = 0; x < 7; ++x) {
      for (int c = 0; c < 3; ++c) EXPECT_EQ(f.at(x, y, c), img.at(x, y, c));
    }
  }
}

TEST(PatchStats, ConstantImageHasZeroStd) {
  ImageBuf img(20, 12);
  for (int y = 0; y < 12; ++y) {
    for (int x = 0; x < 20; ++x) img.set_pixel(x, y, {0.2f, 0.4f, 0.6f});
  }
  const FeatureMap f = PatchStatsProjector(8).project(img);
  ASSERT_EQ(f.channels(), 6);
  for (int y = 0; y < 12; ++y) {
    for (int x = 0; x < 20; ++x) {
      EXPECT_FLOAT_EQ(f.at(x, y, 0), 0.2f);
      EXPECT_FLOAT_EQ(f.at(x, y, 2), 0.6f);
      for (int c = 3; c < 6; ++c) EXPECT_EQ(f.at(x, y, c), 0.0f);
    }
  }
}

TEST(PatchStats, MatchesSlidingWindowOracle) {
  std::mt19937_64 rng(2);
  for (int window : {1, 3, 8}) {
    const ImageBuf img = testutil::random_image(rng, 17, 13);
    const FeatureMap f = PatchStatsProjector(window).project(img);
    for (int y = 0; y < 13; ++y) {
      for (int x = 0; x < 17; ++x) {
        for (int c = 0; c < 3; ++c) {
          double m, sd;
          window_stats(img, window, x, y, c, m, sd);
          ASSERT_NEAR(f.at(x, y, c), m, 1e-5);
          ASSERT_NEAR(f.at(x, y, c + 3), sd, 1e-4);
        }
      }
    }
  }
}

TEST(PatchStats, StepEdgeRaisesStdOnlyNearEdge) {
  ImageBuf img(32, 8);
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 32; ++x) {
      const float v = x < 16 ? 0.0f : 1.0f;
      img.set_pixel(x, y, {v, v, v});
    }
  }
  const FeatureMap f = PatchStatsProjector(8).project(img);
  // window covers x-4 .. x+3
  EXPECT_EQ(f.at(5, 4, 3), 0.0f);
  EXPECT_EQ(f.at(28, 4, 3), 0.0f);
  EXPECT_NEAR(f.at(16, 4, 3), 0.5, 1e-6);  // half dark, half bright
  EXPECT_NEAR(f.at(16, 4, 0), 0.5, 1e-6);
}

TEST(PatchStats, RejectsBadWindow) {
  EXPECT_AMCP_ERROR(PatchStatsProjector(0), ErrorCode::kInvalidArgument);
}
