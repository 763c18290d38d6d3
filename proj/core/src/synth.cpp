#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include <nlohmann/json.hpp>

#include "amcp/error.hpp"
#include "amcp/eval.hpp"
#include "amcp/geometry.hpp"
#include "amcp/morphology.hpp"
#include "amcp/png_io.hpp"

namespace amcp {
namespace {

constexpr int kMargin = 6;
constexpr int kCleanKernel = 5;
constexpr double kMinArea = 0.05;
constexpr double kMaxArea = 0.40;
constexpr double kMinTextureGap = 0.08;
// Foreground base color distance from the background. Low enough that
// painter noise of a few percent flips individual pixels.
constexpr double kGapLow = 0.08;
constexpr double kGapHigh = 0.2;

std::uint64_t splitmix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

template <typename Inside>
BitMask rasterize(int width, int height, Inside inside) {
  BitMask m(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) m.set(x, y, inside(x + 0.5, y + 0.5));
  }
  return m;
}

// Radial shape r <= radius(theta) around (cx, cy).
template <typename Radius>
BitMask radial_shape(int width, int height, double cx, double cy, Radius radius) {
  return rasterize(width, height, [&](double x, double y) {
    const double dx = x - cx, dy = y - cy;
    return std::hypot(dx, dy) <= radius(std::atan2(dy, dx));
  });
}

BitMask draw_shape(ShapeFamily family, int width, int height, std::mt19937_64& rng) {
  const double size = std::min(width, height);
  const double reach = 0.32 * size;  // upper bound of every radius below
  const double cx = uniform(rng, reach + kMargin, width - reach - kMargin);
  const double cy = uniform(rng, reach + kMargin, height - reach - kMargin);
  switch (family) {
    case ShapeFamily::kEllipse: {
      const double a = uniform(rng, 0.14, 0.32) * size;
      const double b = uniform(rng, 0.14, 0.32) * size;
      const double angle = uniform(rng, 0.0, std::numbers::pi);
      const double c = std::cos(angle), s = std::sin(angle);
      return rasterize(width, height, [&](double x, double y) {
        const double u = (x - cx) * c + (y - cy) * s;
        const double v = -(x - cx) * s + (y - cy) * c;
        return (u * u) / (a * a) + (v * v) / (b * b) <= 1.0;
      });
    }
    case ShapeFamily::kPolygon: {
      const int n = std::uniform_int_distribution<int>(5, 8)(rng);
      const double r0 = uniform(rng, 0.2, 0.32) * size;
      std::vector<double> angles(n), radii(n);
      const double step = 2.0 * std::numbers::pi / n;
      const double phase = uniform(rng, 0.0, step);
      for (int i = 0; i < n; ++i) {
        angles[i] = phase + step * (i + uniform(rng, -0.25, 0.25));
        radii[i] = r0 * uniform(rng, 0.65, 1.0);
      }
      // Star-convex polygon: radius along theta interpolates the edge between
      // the two neighbouring vertices.
      return radial_shape(width, height, cx, cy, [&](double theta) {
        double t = theta - angles[0];
        t -= 2.0 * std::numbers::pi * std::floor(t / (2.0 * std::numbers::pi));
        int i = 0;
        while (i + 1 < n && angles[i + 1] - angles[0] <= t) ++i;
        const int j = (i + 1) % n;
        const double ai = angles[i] - angles[0];
        const double aj = j == 0 ? 2.0 * std::numbers::pi : angles[j] - angles[0];
        const double px = radii[i] * std::cos(ai), py = radii[i] * std::sin(ai);
        const double qx = radii[j] * std::cos(aj), qy = radii[j] * std::sin(aj);
        const double dx = std::cos(t), dy = std::sin(t);
        // ray (dx, dy) * r hits segment p + s (q - p)
        const double ex = qx - px, ey = qy - py;
        const double denom = dx * ey - dy * ex;
        return std::abs(denom) < 1e-12 ? radii[i] : (px * ey - py * ex) / denom;
      });
    }
    case ShapeFamily::kBlob: {
      const double r0 = uniform(rng, 0.15, 0.25) * size;
      double amp[3], phase[3];
      for (int k = 0; k < 3; ++k) {
        amp[k] = uniform(rng, 0.0, 0.12);
        phase[k] = uniform(rng, 0.0, 2.0 * std::numbers::pi);
      }
      return radial_shape(width, height, cx, cy, [&](double theta) {
        double r = 1.0;
        for (int k = 0; k < 3; ++k) r += amp[k] * std::cos((k + 2) * theta + phase[k]);
        return r0 * r;
      });
    }
  }
  return BitMask(width, height);
}

BitMask clean_fixpoint(BitMask m) {
  const StructuringElement k(kCleanKernel);
  for (int i = 0; i < 16; ++i) {
    BitMask next = morph_clean(m, k);
    if (next == m) return m;
    m = std::move(next);
  }
  return m;
}

bool keeps_margin(const BitMask& m) {
  const Rect b = tight_bbox(m);
  return b.x0 >= kMargin && b.y0 >= kMargin && b.x1 <= m.width() - kMargin &&
         b.y1 <= m.height() - kMargin;
}

Rgb offset_color(const Rgb& base, double distance, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  double d[3], norm = 0.0;
  do {
    norm = 0.0;
    for (double& v : d) {
      v = normal(rng);
      norm += v * v;
    }
    norm = std::sqrt(norm);
  } while (norm < 1e-6);
  Rgb out;
  for (int c = 0; c < 3; ++c) {
    out[c] = static_cast<float>(std::clamp(base[c] + distance * d[c] / norm, 0.05, 0.95));
  }
  return out;
}

TextureSpec texture(std::mt19937_64& rng, const Rgb& base) {
  TextureSpec t;
  t.seed = rng();
  t.base = base;
  t.amplitude = 0.03;
  t.cell = uniform(rng, 8.0, 16.0);
  t.octaves = 3;
  return t;
}

Point centroid_point(const BitMask& gt) {
  double sx = 0.0, sy = 0.0;
  for (int y = 0; y < gt.height(); ++y) {
    for (int x = 0; x < gt.width(); ++x) {
      if (gt.get(x, y)) {
        sx += x;
        sy += y;
      }
    }
  }
  const double n = static_cast<double>(gt.count());
  const Point c{static_cast<int>(std::lround(sx / n)), static_cast<int>(std::lround(sy / n))};
  if (gt.get(c.x, c.y)) return c;
  Point best{};
  long best_d = -1;
  for (int y = 0; y < gt.height(); ++y) {
    for (int x = 0; x < gt.width(); ++x) {
      if (!gt.get(x, y)) continue;
      const long d = static_cast<long>(x - c.x) * (x - c.x) + static_cast<long>(y - c.y) * (y - c.y);
      if (best_d < 0 || d < best_d) {
        best_d = d;
        best = {x, y};
      }
    }
  }
  return best;
}

BitMask coarse_mask(const BitMask& gt) {
  const double target = 0.7 * static_cast<double>(gt.count());
  BitMask previous = gt;
  for (int r = 1;; ++r) {
    BitMask e = erode(gt, r);
    if (e.none()) return r == 1 ? gt : previous;
    if (static_cast<double>(e.count()) <= target) return e;
    previous = std::move(e);
  }
}

// Lantuejoul skeleton with a 3x3 element, then the 60% of its pixels
// nearest the centroid.
BitMask scribble(const BitMask& gt, const Point& center) {
  const StructuringElement unit(3);
  BitMask skeleton(gt.width(), gt.height());
  for (BitMask e = gt; !e.none(); e = erode(e, 1)) skeleton |= e - open(e, unit);

  std::vector<std::pair<long, int>> order;
  for (int y = 0; y < gt.height(); ++y) {
    for (int x = 0; x < gt.width(); ++x) {
      if (!skeleton.get(x, y)) continue;
      const long d = static_cast<long>(x - center.x) * (x - center.x) +
                     static_cast<long>(y - center.y) * (y - center.y);
      order.emplace_back(d, y * gt.width() + x);
    }
  }
  std::sort(order.begin(), order.end());
  const auto keep = static_cast<std::size_t>(std::ceil(0.6 * static_cast<double>(order.size())));
  BitMask out(gt.width(), gt.height());
  for (std::size_t i = 0; i < keep; ++i) out.set_index(order[i].second, true);
  return out;
}

nlohmann::json rect_json(const Rect& r) { return {r.x0, r.y0, r.x1, r.y1}; }

Rect rect_from_json(const nlohmann::json& j) {
  const auto v = j.get<std::vector<int>>();
  if (v.size() != 4) throw Error(ErrorCode::kIoError, "box needs four coordinates");
  return {v[0], v[1], v[2], v[3]};
}

}  // namespace

std::string_view to_string(ShapeFamily family) {
  switch (family) {
    case ShapeFamily::kEllipse:
      return "ellipse";
    case ShapeFamily::kPolygon:
      return "polygon";
    case ShapeFamily::kBlob:
      return "blob";
  }
  return "ellipse";
}

ShapeFamily parse_shape_family(std::string_view name) {
  for (auto f : {ShapeFamily::kEllipse, ShapeFamily::kPolygon, ShapeFamily::kBlob}) {
    if (name == to_string(f)) return f;
  }
  throw Error(ErrorCode::kConfigError, "unknown shape family '" + std::string(name) + "'");
}

const Prompt& DerivedPrompts::get(PromptKind kind) const {
  switch (kind) {
    case PromptKind::kPoint:
      return point;
    case PromptKind::kBox:
      return box;
    case PromptKind::kScribble:
      return scribble;
    case PromptKind::kMask:
      return mask;
  }
  return box;
}

DerivedPrompts derive_prompts(const BitMask& gt) {
  if (gt.none()) throw Error(ErrorCode::kEmptyMask, "cannot derive prompts from an empty mask");
  const Point center = centroid_point(gt);
  return DerivedPrompts{Prompt::points({center}), Prompt::box(tight_bbox(gt)),
                        Prompt::scribble(amcp::scribble(gt, center)),
                        Prompt::mask(coarse_mask(gt))};
}

std::vector<GeneratedScene> gen_scenes(int n, std::uint64_t seed, const SceneOptions& options) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "scene count must be at least 1");
  if (options.width < 48 || options.height < 48) {
    throw Error(ErrorCode::kInvalidArgument, "scenes need at least 48x48 pixels");
  }
  if (options.noise_sigma < 0.0) throw Error(ErrorCode::kInvalidArgument, "negative noise sigma");
  const double frame = static_cast<double>(options.width) * options.height;

  std::vector<GeneratedScene> scenes;
  scenes.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const std::uint64_t scene_seed = splitmix(seed ^ splitmix(static_cast<std::uint64_t>(i)));
    std::mt19937_64 rng(scene_seed);
    const ShapeFamily family = options.family.value_or(static_cast<ShapeFamily>(i % 3));

    for (int attempt = 0;; ++attempt) {
      if (attempt == 1000) throw Error(ErrorCode::kInvalidArgument, "scene generation failed");
      BitMask gt = clean_fixpoint(draw_shape(family, options.width, options.height, rng));
      if (gt.none()) continue;
      const double area = static_cast<double>(gt.count()) / frame;
      if (area < kMinArea || area > kMaxArea || !keeps_margin(gt)) continue;

      SceneSpec spec;
      spec.width = options.width;
      spec.height = options.height;
      const Rgb bg{static_cast<float>(uniform(rng, 0.25, 0.75)),
                   static_cast<float>(uniform(rng, 0.25, 0.75)),
                   static_cast<float>(uniform(rng, 0.25, 0.75))};
      spec.background = texture(rng, bg);
      spec.foreground = texture(rng, offset_color(bg, uniform(rng, kGapLow, kGapHigh), rng));
      spec.background_alt = texture(rng, offset_color(bg, uniform(rng, 0.25, 0.4), rng));
      spec.gt = std::move(gt);
      spec.noise_sigma = options.noise_sigma;
      spec.measure_gaps();
      if (spec.texture_gap < kMinTextureGap || spec.alt_gap < kMinTextureGap) continue;

      DerivedPrompts prompts = derive_prompts(spec.gt);
      const auto& coarse = std::get<MaskPrompt>(prompts.mask.value()).mask;
      if (coarse == spec.gt) continue;

      char id[32];
      std::snprintf(id, sizeof id, "scene_%03d", i);
      ImageBuf image = render_scene(spec);
      scenes.push_back(GeneratedScene{id, scene_seed, family, std::move(spec), std::move(image),
                                      std::move(prompts)});
      break;
    }
  }
  return scenes;
}

void write_suite(const std::filesystem::path& dir, const std::vector<GeneratedScene>& scenes) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create suite directory " + dir.string());

  nlohmann::json list = nlohmann::json::array();
  for (const auto& s : scenes) {
    write_png(dir / (s.id + ".png"), s.image);
    write_scene(dir / (s.id + ".json"), s.spec, s.id + "_gt.png");
    write_png(dir / (s.id + "_coarse.png"), std::get<MaskPrompt>(s.prompts.mask.value()).mask);
    write_png(dir / (s.id + "_scribble.png"),
              std::get<ScribblePrompt>(s.prompts.scribble.value()).strokes);
    const Rect box = tight_bbox(s.spec.gt);
    const Point p = std::get<PointPrompt>(s.prompts.point.value()).points.front();
    list.push_back({
        {"id", s.id},
        {"seed", s.seed},
        {"family", std::string(to_string(s.family))},
        {"texture_gap", s.spec.texture_gap},
        {"alt_gap", s.spec.alt_gap},
        {"gt_bbox", rect_json(box)},
        {"gt_bbox_diagonal", std::hypot(box.width(), box.height())},
        {"gt_area", s.spec.gt.count()},
        {"point", {p.x, p.y}},
        {"box", rect_json(std::get<BoxPrompt>(s.prompts.box.value()).box)},
        {"image", s.id + ".png"},
        {"scene", s.id + ".json"},
        {"coarse", s.id + "_coarse.png"},
        {"scribble", s.id + "_scribble.png"},
    });
  }
  std::ofstream out(dir / "scenes.json", std::ios::binary);
  out << nlohmann::json{{"scenes", std::move(list)}}.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::kIoError, "cannot write scenes.json in " + dir.string());
}

std::vector<GeneratedScene> read_suite(const std::filesystem::path& dir) {
  std::ifstream in(dir / "scenes.json", std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + (dir / "scenes.json").string());
  std::vector<GeneratedScene> scenes;
  try {
    const auto manifest = nlohmann::json::parse(in);
    for (const auto& e : manifest.at("scenes")) {
      const auto point = e.at("point").get<std::vector<int>>();
      if (point.size() != 2) throw Error(ErrorCode::kIoError, "point needs two coordinates");
      SceneSpec spec = read_scene(dir / e.at("scene").get<std::string>());
      ImageBuf image = read_png_rgb(dir / e.at("image").get<std::string>());
      if (image.width() != spec.width || image.height() != spec.height) {
        throw Error(ErrorCode::kSceneMismatch, "suite image does not match its scene");
      }
      DerivedPrompts prompts{
          Prompt::points({{point[0], point[1]}}), Prompt::box(rect_from_json(e.at("box"))),
          Prompt::scribble(read_png_mask(dir / e.at("scribble").get<std::string>())),
          Prompt::mask(read_png_mask(dir / e.at("coarse").get<std::string>()))};
      scenes.push_back(GeneratedScene{e.at("id").get<std::string>(),
                                      e.at("seed").get<std::uint64_t>(),
                                      parse_shape_family(e.at("family").get<std::string>()),
                                      std::move(spec), std::move(image), std::move(prompts)});
    }
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::kIoError, std::string("malformed scenes.json: ") + ex.what());
  }
  return scenes;
}

}  // namespace amcp
