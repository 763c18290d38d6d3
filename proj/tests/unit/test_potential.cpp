#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "amcp/potential.hpp"
#include "test_util.hpp"

using namespace amcp;

namespace {

FeatureMap random_features(std::mt19937_64& rng, int w, int h, int c) {
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  FeatureMap f(w, h, c);
  for (auto& v : f.data()) v = u(rng);
  return f;
}

ContrastField constant_field(int w, int h, const Rect& roi, float v) {
  ContrastField f(w, h, roi);
  for (int y = roi.y0; y < roi.y1; ++y) {
    for (int x = roi.x0; x < roi.x1; ++x) f.at(x, y) = v;
  }
  return f;
}

double isotropic_log_density(const std::array<double, 3>& x, const std::array<double, 3>& mean,
                             double sigma) {
  double q = 0.0;
  for (int c = 0; c < 3; ++c) q += (x[c] - mean[c]) * (x[c] - mean[c]);
  return -0.5 * q / (sigma * sigma) - 3.0 * std::log(sigma) - 1.5 * std::log(2.0 * M_PI);
}

}  // namespace

TEST(PhiPaint, IdenticalMapsGiveZero) {
  std::mt19937_64 rng(1);
  const FeatureMap f = random_features(rng, 6, 5, 3);
  const ContrastField phi = phi_paint(f, f, {0, 0, 6, 5});
  for (float v : phi.values()) EXPECT_EQ(v, 0.0f);
}

TEST(PhiPaint, PythagoreanPixel) {
  FeatureMap a(4, 4, 2), b(4, 4, 2);
  b.at(2, 1, 0) = 3.0f;
  b.at(2, 1, 1) = 4.0f;
  const ContrastField phi = phi_paint(a, b, {0, 0, 4, 4});
  EXPECT_FLOAT_EQ(phi.at(2, 1), 5.0f);
  EXPECT_EQ(phi.at(1, 2), 0.0f);
}

TEST(PhiPaint, MatchesLoopOracleAndZeroOutsideRoi) {
  std::mt19937_64 rng(2);
  const FeatureMap a = random_features(rng, 8, 8, 4);
  const FeatureMap b = random_features(rng, 8, 8, 4);
  const Rect roi{1, 2, 7, 8};
  const ContrastField phi = phi_paint(a, b, roi);
  const ContrastField sym = phi_paint(b, a, roi);
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) {
      double s = 0.0;
      for (int c = 0; c < 4; ++c) s += std::pow(double(a.at(x, y, c)) - b.at(x, y, c), 2);
      const double expected = roi.contains(x, y) ? std::sqrt(s) : 0.0;
      EXPECT_NEAR(phi.at(x, y), expected, 1e-6);
      EXPECT_EQ(phi.at(x, y), sym.at(x, y));
    }
  }
}

TEST(PhiPaint, ShapeMismatchThrows) {
  EXPECT_AMCP_ERROR(phi_paint(FeatureMap(4, 4, 3), FeatureMap(4, 4, 2), {0, 0, 4, 4}),
                    ErrorCode::kDimensionMismatch);
  EXPECT_AMCP_ERROR(phi_paint(FeatureMap(4, 4, 3), FeatureMap(5, 4, 3), {0, 0, 4, 4}),
                    ErrorCode::kDimensionMismatch);
}

TEST(PhiColor, SeparableColors) {
  ImageBuf img(16, 16);
  BitMask region(16, 16);
  for (int y = 0; y < 16; ++y) {
    for (int x = 0; x < 16; ++x) {
      const bool red = x < 8;
      img.set_pixel(x, y, red ? Rgb{1, 0, 0} : Rgb{0, 0, 1});
      region.set(x, y, red);
    }
  }
  const ContrastField f = phi_color(img, region, {0, 0, 16, 16}, 5, 0);
  EXPECT_GT(f.at(2, 3), 0.99f);
  EXPECT_LT(f.at(12, 3), 0.01f);
}

TEST(PhiColor, UniformImageIsHalf) {
  ImageBuf img(10, 10);
  for (auto& v : img.data()) v = 0.5f;
  const BitMask region = BitMask::from_rect(10, 10, {2, 2, 6, 6});
  ColorFitInfo info;
  const Rect roi{1, 1, 9, 9};
  const ContrastField f = phi_color(img, region, roi, 5, 3, &info);
  for (int y = roi.y0; y < roi.y1; ++y) {
    for (int x = roi.x0; x < roi.x1; ++x) EXPECT_NEAR(f.at(x, y), 0.5f, 1e-6);
  }
  EXPECT_TRUE(info.degenerate);  // one distinct color < 5 components
  EXPECT_EQ(f.at(0, 0), 0.0f);
}

TEST(PhiColor, EmptySideIsUninformative) {
  ImageBuf img(6, 6);
  ColorFitInfo info;
  const ContrastField f = phi_color(img, BitMask(6, 6, true), {0, 0, 6, 6}, 5, 0, &info);
  EXPECT_TRUE(info.uninformative);
  EXPECT_EQ(f.at(3, 3), 0.5f);
}

// Two isotropic Gaussian color populations; the fitted single-component
// models must reproduce the Bayes posterior computed from the true
// parameters.
TEST(PhiColor, MatchesClosedFormTwoGaussianPosterior) {
  const std::array<double, 3> mu_fg{0.40, 0.42, 0.45}, mu_bg{0.58, 0.55, 0.50};
  const double sigma = 0.06;
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n(0.0, sigma);
  const int w = 96, h = 96;
  ImageBuf img(w, h);
  BitMask region(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const bool fg = x < w / 2;
      const auto& mu = fg ? mu_fg : mu_bg;
      img.set_pixel(x, y, {float(mu[0] + n(rng)), float(mu[1] + n(rng)), float(mu[2] + n(rng))});
      region.set(x, y, fg);
    }
  }
  const ContrastField f = phi_color(img, region, {0, 0, w, h}, 1, 0);
  double worst = 0.0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Rgb p = img.pixel(x, y);
      const std::array<double, 3> c{p[0], p[1], p[2]};
      const double d = isotropic_log_density(c, mu_bg, sigma) - isotropic_log_density(c, mu_fg, sigma);
      const double expected = 1.0 / (1.0 + std::exp(d));
      worst = std::max(worst, std::abs(f.at(x, y) - expected));
    }
  }
  EXPECT_LE(worst, 0.05);
}

TEST(PhiColor, ProbabilityRange) {
  std::mt19937_64 rng(4);
  const ImageBuf img = testutil::random_image(rng, 20, 20);
  BitMask region(20, 20);
  std::bernoulli_distribution b(0.4);
  for (int i = 0; i < 400; ++i) region.set_index(i, b(rng));
  const ContrastField f = phi_color(img, region, {0, 0, 20, 20}, 5, 9);
  for (float v : f.values()) {
    EXPECT_GE(v, 0.0f);
    EXPECT_LE(v, 1.0f);
    EXPECT_TRUE(std::isfinite(v));
  }
  EXPECT_EQ(phi_color(img, region, {0, 0, 20, 20}, 5, 9).values().size(), f.values().size());
}

TEST(PhiPrompt, PeakAndUnitOffset) {
  const std::vector<Point> pts{{10, 10}};
  const GaussianSigma s{4.0, 2.0};
  const ContrastField f = phi_prompt(pts, s, {0, 0, 32, 32}, 32, 32);
  EXPECT_FLOAT_EQ(f.at(10, 10), 1.0f);
  EXPECT_NEAR(f.at(14, 10), std::exp(-1.0), 1e-6);
  EXPECT_NEAR(f.at(10, 12), std::exp(-1.0), 1e-6);
}

TEST(PhiPrompt, TwoPointsTakePointwiseMax) {
  const GaussianSigma s{3.0, 5.0};
  const Rect roi{0, 0, 24, 20};
  const std::vector<Point> a{{4, 5}}, b{{15, 12}}, both{{4, 5}, {15, 12}};
  const ContrastField fa = phi_prompt(a, s, roi, 24, 20);
  const ContrastField fb = phi_prompt(b, s, roi, 24, 20);
  const ContrastField fab = phi_prompt(both, s, roi, 24, 20);
  for (int y = 0; y < 20; ++y) {
    for (int x = 0; x < 24; ++x) EXPECT_FLOAT_EQ(fab.at(x, y), std::max(fa.at(x, y), fb.at(x, y)));
  }
}

TEST(PhiPrompt, TranslationEquivariant) {
  const GaussianSigma s{3.0, 3.0};
  const Rect roi{0, 0, 40, 40};
  const std::vector<Point> p{{10, 12}}, q{{17, 15}};
  const ContrastField fp = phi_prompt(p, s, roi, 40, 40);
  const ContrastField fq = phi_prompt(q, s, roi, 40, 40);
  for (int y = 0; y + 3 < 40; ++y) {
    for (int x = 0; x + 7 < 40; ++x) EXPECT_FLOAT_EQ(fp.at(x, y), fq.at(x + 7, y + 3));
  }
}

TEST(PhiPrompt, NoPointsThrows) {
  EXPECT_AMCP_ERROR(phi_prompt({}, GaussianSigma{1, 1}, {0, 0, 4, 4}, 4, 4),
                    ErrorCode::kNoPromptPoints);
}

TEST(GaussianSigmaTest, FractionOfBox) {
  const GaussianSigma s = GaussianSigma::from_box({10, 20, 60, 40}, 0.1);
  EXPECT_DOUBLE_EQ(s.x, 5.0);
  EXPECT_DOUBLE_EQ(s.y, 2.0);
}

TEST(Combine, ConstantFieldsWithDefaultWeights) {
  const Rect roi{0, 0, 5, 5};
  const auto one = constant_field(5, 5, roi, 1.0f);
  const ContrastField i = combine(one, one, &one, PotentialWeights{}, StepKind::kInpaint);
  const ContrastField o = combine(one, one, &one, PotentialWeights{}, StepKind::kOutpaint);
  EXPECT_NEAR(i.at(2, 2), 1.2f, 1e-6);
  EXPECT_NEAR(o.at(2, 2), 0.8f, 1e-6);
}

TEST(Combine, PromptOmittedAndZeros) {
  const Rect roi{0, 0, 4, 4};
  const auto one = constant_field(4, 4, roi, 1.0f);
  const auto zero = constant_field(4, 4, roi, 0.0f);
  EXPECT_NEAR(combine(one, one, nullptr, {}, StepKind::kInpaint).at(1, 1), 1.0f, 1e-6);
  const ContrastField z = combine(zero, zero, &zero, {}, StepKind::kInpaint);
  for (float v : z.values()) EXPECT_EQ(v, 0.0f);
}

TEST(Combine, PaintNormalizedByRoiMaxAndLinear) {
  const Rect roi{0, 0, 4, 1};
  ContrastField paint(4, 1, roi), color(4, 1, roi), prompt(4, 1, roi);
  const float pv[4] = {0.0f, 1.0f, 2.0f, 4.0f};
  for (int x = 0; x < 4; ++x) {
    paint.at(x, 0) = pv[x];
    color.at(x, 0) = 0.25f * x;
    prompt.at(x, 0) = 1.0f - 0.25f * x;
  }
  const PotentialWeights w{0.5, 0.3, 0.2, -0.1};
  const ContrastField c = combine(paint, color, &prompt, w, StepKind::kInpaint);
  for (int x = 0; x < 4; ++x) {
    EXPECT_NEAR(c.at(x, 0), 0.5 * pv[x] / 4.0 + 0.3 * 0.25 * x + 0.2 * (1.0 - 0.25 * x), 1e-6);
  }
  // Doubling the paint field leaves its normalized contribution unchanged.
  ContrastField paint2 = paint;
  for (int x = 0; x < 4; ++x) paint2.at(x, 0) *= 2.0f;
  const ContrastField c2 = combine(paint2, color, &prompt, w, StepKind::kInpaint);
  for (int x = 0; x < 4; ++x) EXPECT_NEAR(c2.at(x, 0), c.at(x, 0), 1e-6);
}

TEST(Combine, ShapeMismatchThrows) {
  const auto a = constant_field(4, 4, {0, 0, 4, 4}, 1.0f);
  const auto b = constant_field(5, 4, {0, 0, 4, 4}, 1.0f);
  EXPECT_AMCP_ERROR(combine(a, b, nullptr, {}, StepKind::kInpaint), ErrorCode::kDimensionMismatch);
}

TEST(Weights, Validation) {
  EXPECT_AMCP_ERROR((PotentialWeights{0.0, 0.0, 0.2, -0.2}.validate()), ErrorCode::kConfigError);
  EXPECT_NO_THROW(PotentialWeights{}.validate());
}
