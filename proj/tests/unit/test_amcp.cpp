#include <cmath>
#include <random>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "amcp/amcp.hpp"
#include "amcp/geometry.hpp"
#include "amcp/morphology.hpp"
#include "amcp/scene.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace amcp;

namespace {

constexpr int kW = 48;
constexpr int kH = 48;
const Rect kObject{14, 12, 34, 36};

SceneSpec scene(double sigma = 0.0) {
  SceneSpec s;
  s.width = kW;
  s.height = kH;
  s.background = {21, {0.35f, 0.45f, 0.55f}, 0.03, 10.0, 2};
  s.foreground = {22, {0.55f, 0.40f, 0.30f}, 0.03, 10.0, 2};
  s.background_alt = {23, {0.15f, 0.75f, 0.25f}, 0.03, 10.0, 2};
  s.gt = BitMask::from_rect(kW, kH, kObject);
  s.noise_sigma = sigma;
  s.measure_gaps();
  return s;
}

AmcpConfig config(int n = 1) {
  AmcpConfig c;
  c.n_samples = n;
  c.seed = 7;
  c.threads = 1;
  return c;
}

double rgb_distance(const Rgb& a, const Rgb& b) {
  double s = 0.0;
  for (int c = 0; c < 3; ++c) s += (double(a[c]) - b[c]) * (double(a[c]) - b[c]);
  return std::sqrt(s);
}

}  // namespace

TEST(InitMask, FollowsPromptKind) {
  const Rect box{5, 6, 20, 30};
  EXPECT_EQ(init_mask(Prompt::box(box), kW, kH), BitMask::from_rect(kW, kH, box));
  const BitMask coarse = BitMask::from_rect(kW, kH, {10, 10, 12, 14});
  EXPECT_EQ(init_mask(Prompt::mask(coarse), kW, kH), coarse);
  EXPECT_TRUE(init_mask(Prompt::points({{3, 3}}), kW, kH).all());
  EXPECT_TRUE(init_mask(Prompt::scribble(coarse), kW, kH).all());
  EXPECT_AMCP_ERROR(init_mask(Prompt::box({0, 0, 49, 10}), kW, kH),
                    ErrorCode::kPromptOutOfBounds);
}

TEST(Step, InpaintingCarvesObjectOutOfBox) {
  const SceneSpec s = scene();
  const ImageBuf img = render_scene(s);
  const OraclePainter painter(s);
  const IdentityProjector projector;
  const Prompt prompt = Prompt::box({8, 6, 40, 42});
  const BitMask box = init_mask(prompt, kW, kH);
  const StepTrace t =
      run_step(img, box, StepKind::kInpaint, 0, config(), painter, projector, prompt);
  EXPECT_EQ(t.mask, s.gt & box);
  EXPECT_FALSE(t.degenerate);
  EXPECT_FALSE(t.skipped);
  EXPECT_EQ(t.input, box);
}

TEST(Step, OutpaintingRecoversMissingStrip) {
  const SceneSpec s = scene();
  const ImageBuf img = render_scene(s);
  const OraclePainter painter(s);
  const IdentityProjector projector;
  const Prompt prompt = Prompt::box(kObject);
  const BitMask partial =
      BitMask::from_rect(kW, kH, {kObject.x0, kObject.y0, kObject.x1 - 8, kObject.y1});
  const StepTrace t =
      run_step(img, partial, StepKind::kOutpaint, 3, config(), painter, projector, prompt);
  EXPECT_EQ(t.mask, s.gt);
}

TEST(Step, InpaintShrinksAndOutpaintGrows) {
  const SceneSpec s = scene(0.05);
  const ImageBuf img = render_scene(s);
  const OraclePainter painter(s);
  const IdentityProjector projector;
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> d(-6, 6);
  for (int i = 0; i < 8; ++i) {
    const Rect r{kObject.x0 + d(rng), kObject.y0 + d(rng), kObject.x1 + d(rng),
                 kObject.y1 + d(rng)};
    const Prompt prompt = Prompt::box(r);
    const BitMask m = init_mask(prompt, kW, kH);
    const auto in = run_step(img, m, StepKind::kInpaint, 0, config(3), painter, projector, prompt);
    const auto out =
        run_step(img, m, StepKind::kOutpaint, 1, config(3), painter, projector, prompt);
    EXPECT_TRUE(in.mask.subset_of(m));
    EXPECT_TRUE(in.pre_clean.subset_of(m));
    EXPECT_TRUE(m.subset_of(out.mask));
    EXPECT_TRUE(m.subset_of(out.pre_clean));
  }
}

TEST(Step, FullMaskOutpaintingIsSkipped) {
  const SceneSpec s = scene();
  const ImageBuf img = render_scene(s);
  const BitMask full(kW, kH, true);
  const StepTrace t = run_step(img, full, StepKind::kOutpaint, 1, config(), OraclePainter(s),
                               IdentityProjector(), Prompt::points({{20, 20}}));
  EXPECT_TRUE(t.skipped);
  EXPECT_EQ(t.mask, full);
}

TEST(Step, TinyResultIsDegenerateAndKeepsInput) {
  const SceneSpec s = scene();
  const ImageBuf img = render_scene(s);
  // Anything the step returns is cleaned away by the 5x5 opening.
  const BitMask speck = BitMask::from_rect(kW, kH, {20, 20, 22, 22});
  const StepTrace t = run_step(img, speck, StepKind::kInpaint, 0, config(), OraclePainter(s),
                               IdentityProjector(), Prompt::box({18, 18, 24, 24}));
  EXPECT_TRUE(t.degenerate);
  EXPECT_EQ(t.mask, speck);
}

TEST(Step, RejectsBadInput) {
  const SceneSpec s = scene();
  const ImageBuf img = render_scene(s);
  const OraclePainter painter(s);
  const IdentityProjector projector;
  const Prompt prompt = Prompt::box(kObject);
  EXPECT_AMCP_ERROR(run_step(img, BitMask(kW, kH), StepKind::kInpaint, 0, config(), painter,
                             projector, prompt),
                    ErrorCode::kInvalidMask);
  EXPECT_AMCP_ERROR(run_step(img, BitMask(8, 8, true), StepKind::kInpaint, 0, config(), painter,
                             projector, prompt),
                    ErrorCode::kDimensionMismatch);
  EXPECT_AMCP_ERROR(run_step(img, s.gt, StepKind::kInpaint, 5, config(), painter, projector,
                             prompt),
                    ErrorCode::kInvalidArgument);
}

TEST(Step, KeepsFieldsWhenAsked) {
  const SceneSpec s = scene(0.05);
  AmcpConfig c = config(3);
  c.keep_fields = true;
  const Prompt prompt = Prompt::box({8, 6, 40, 42});
  const StepTrace t = run_step(render_scene(s), init_mask(prompt, kW, kH), StepKind::kInpaint, 0,
                               c, OraclePainter(s), IdentityProjector(), prompt);
  EXPECT_EQ(t.fields.size(), 3u);
  EXPECT_EQ(t.painted.size(), 3u);
  EXPECT_GT(t.posterior, 0.0);
  EXPECT_LE(t.posterior, 1.0);
}

TEST(Run, AlternatesStartingFromFirstStep) {
  const SceneSpec s = scene();
  const ImageBuf img = render_scene(s);
  AmcpConfig c = config();
  c.record_objective = false;
  const RunResult r = run(img, Prompt::box({8, 6, 40, 42}), c, OraclePainter(s),
                          IdentityProjector());
  ASSERT_EQ(r.steps.size(), 5u);
  for (int t = 0; t < 5; ++t) {
    EXPECT_EQ(r.steps[t].index, t);
    EXPECT_EQ(r.steps[t].kind, t % 2 == 0 ? StepKind::kInpaint : StepKind::kOutpaint);
    if (t > 0) EXPECT_EQ(r.steps[t].input, r.steps[t - 1].mask);
    EXPECT_TRUE(std::isnan(r.steps[t].objective));
  }
  EXPECT_EQ(r.final_mask, s.gt);

  c.first_step = StepKind::kOutpaint;
  c.steps = 2;
  const RunResult o = run(img, Prompt::box({8, 6, 40, 42}), c, OraclePainter(s),
                          IdentityProjector());
  EXPECT_EQ(o.steps[0].kind, StepKind::kOutpaint);
  EXPECT_EQ(o.steps[1].kind, StepKind::kInpaint);
}

TEST(Run, ZeroStepsRejected) {
  const SceneSpec s = scene();
  AmcpConfig c = config();
  c.steps = 0;
  EXPECT_AMCP_ERROR(run(render_scene(s), Prompt::box(kObject), c, OraclePainter(s),
                        IdentityProjector()),
                    ErrorCode::kConfigError);
}

TEST(Run, GroundTruthCoarseMaskIsFixedPoint) {
  const SceneSpec s = scene();
  const RunResult r = run(render_scene(s), Prompt::mask(s.gt), config(), OraclePainter(s),
                          IdentityProjector());
  for (const auto& step : r.steps) EXPECT_EQ(step.mask, s.gt);
}

TEST(Run, PointPromptConverges) {
  const SceneSpec s = scene();
  const RunResult r = run(render_scene(s), Prompt::points({{24, 24}}), config(),
                          OraclePainter(s), IdentityProjector());
  EXPECT_GT(iou(r.final_mask, s.gt), 0.95);
}

TEST(Run, DeterministicWithNoise) {
  const SceneSpec s = scene(0.05);
  const ImageBuf img = render_scene(s);
  const AmcpConfig c = config(3);
  const Prompt prompt = Prompt::box({10, 8, 38, 40});
  const RunResult a = run(img, prompt, c, OraclePainter(s), IdentityProjector());
  const RunResult b = run(img, prompt, c, OraclePainter(s), IdentityProjector());
  ASSERT_EQ(a.steps.size(), b.steps.size());
  for (std::size_t t = 0; t < a.steps.size(); ++t) {
    EXPECT_EQ(a.steps[t].mask, b.steps[t].mask);
    EXPECT_EQ(a.steps[t].average.values().size(), b.steps[t].average.values().size());
    EXPECT_TRUE(std::equal(a.steps[t].average.values().begin(), a.steps[t].average.values().end(),
                           b.steps[t].average.values().begin()));
    EXPECT_EQ(a.steps[t].posterior, b.steps[t].posterior);
    EXPECT_EQ(a.steps[t].objective, b.steps[t].objective);
  }
  // Worker count does not change results.
  AmcpConfig threaded = c;
  threaded.threads = 3;
  const RunResult p = run(img, prompt, threaded, OraclePainter(s), IdentityProjector());
  EXPECT_EQ(p.final_mask, a.final_mask);
}

TEST(Objective, MatchesClosedFormOnOracle) {
  const SceneSpec s = scene();
  const ImageBuf img = render_scene(s);
  const int ring = 6;
  // Inner ring inpainted to background, outer ring outpainted to the
  // alternate background.
  const BitMask inner = oracle::minus(s.gt, oracle::erode(s.gt, ring));
  const BitMask outer = oracle::minus(oracle::dilate(s.gt, ring), s.gt);
  double in_sum = 0.0, out_sum = 0.0;
  for (int y = 0; y < kH; ++y) {
    for (int x = 0; x < kW; ++x) {
      if (inner.get(x, y)) in_sum += rgb_distance(s.foreground.at(x, y), s.background.at(x, y));
      if (outer.get(x, y)) out_sum += rgb_distance(s.background_alt.at(x, y), s.background.at(x, y));
    }
  }
  const double expected = in_sum / inner.count() + out_sum / outer.count();
  const double got = objective(img, s.gt, OraclePainter(s), IdentityProjector(), ring);
  EXPECT_NEAR(got, expected, 1e-5);
}

TEST(Objective, GroundTruthBeatsLooseMask) {
  const SceneSpec s = scene();
  const ImageBuf img = render_scene(s);
  const OraclePainter painter(s);
  const IdentityProjector projector;
  const double at_gt = objective(img, s.gt, painter, projector, 8);
  const double loose = objective(img, dilate(s.gt, 8), painter, projector, 8);
  const double tight = objective(img, erode(s.gt, 4), painter, projector, 8);
  EXPECT_GE(loose, 0.0);
  EXPECT_GT(at_gt, loose);
  EXPECT_GT(at_gt, tight);
  EXPECT_AMCP_ERROR(objective(img, BitMask(kW, kH), painter, projector, 8),
                    ErrorCode::kInvalidMask);
  EXPECT_AMCP_ERROR(objective(img, BitMask(kW, kH, true), painter, projector, 8),
                    ErrorCode::kInvalidMask);
}

TEST(Erase, OracleRestoresBackground) {
  const SceneSpec s = scene();
  const ImageBuf img = render_scene(s);
  const ImageBuf erased = erase_object(img, s.gt, OraclePainter(s));
  for (int y = 0; y < kH; ++y) {
    for (int x = 0; x < kW; ++x) {
      ASSERT_EQ(erased.pixel(x, y), s.gt.get(x, y) ? s.background.at(x, y) : img.pixel(x, y));
    }
  }
  EXPECT_AMCP_ERROR(erase_object(img, BitMask(kW, kH), OraclePainter(s)),
                    ErrorCode::kInvalidMask);
  EXPECT_AMCP_ERROR(erase_object(img, BitMask(4, 4, true), OraclePainter(s)),
                    ErrorCode::kInvalidMask);
}

TEST(Trace, WritesMasksAndJson) {
  const SceneSpec s = scene();
  AmcpConfig c = config();
  c.steps = 3;
  const RunResult r = run(render_scene(s), Prompt::box({8, 6, 40, 42}), c, OraclePainter(s),
                          IdentityProjector());
  testutil::TempDir dir;
  write_trace(dir.path(), r, c);
  EXPECT_EQ(read_png_mask(dir / "step_0_I.png"), r.steps[0].mask);
  EXPECT_EQ(read_png_mask(dir / "step_1_O.png"), r.steps[1].mask);
  EXPECT_TRUE(std::filesystem::exists(dir / "step_2_avg.png"));

  std::ifstream in(dir / "trace.json");
  const auto j = nlohmann::json::parse(in);
  ASSERT_EQ(j["steps"].size(), 3u);
  EXPECT_EQ(j["steps"][1]["kind"], "O");
  EXPECT_EQ(j["steps"][0]["foreground_px"], r.steps[0].mask.count());
  EXPECT_FALSE(j["steps"][0].contains("wall_ms"));
  EXPECT_TRUE(j["steps"][0]["objective"].is_number());
  EXPECT_EQ(j["final_foreground_px"], r.final_mask.count());
  EXPECT_EQ(j["config"]["steps"], 3);

  const auto before = testutil::read_bytes(dir / "trace.json");
  write_trace(dir.path(), r, c);
  EXPECT_EQ(testutil::read_bytes(dir / "trace.json"), before);
  write_trace(dir.path(), r, c, true);
  std::ifstream timed(dir / "trace.json");
  EXPECT_TRUE(nlohmann::json::parse(timed)["steps"][0].contains("wall_ms"));
}
