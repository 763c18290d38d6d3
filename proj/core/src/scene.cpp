#include "amcp/scene.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>

#include <nlohmann/json.hpp>

#include "amcp/error.hpp"
#include "amcp/png_io.hpp"

namespace amcp {
namespace {

std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double lattice(std::uint64_t seed, std::int64_t ix, std::int64_t iy, int channel, int octave) {
  std::uint64_t h = mix(seed);
  h = mix(h ^ static_cast<std::uint64_t>(ix));
  h = mix(h ^ static_cast<std::uint64_t>(iy));
  h = mix(h ^ (static_cast<std::uint64_t>(channel) << 8 | static_cast<std::uint64_t>(octave)));
  return static_cast<double>(h >> 11) * (1.0 / 9007199254740992.0);
}

double smooth(double t) { return t * t * (3.0 - 2.0 * t); }

double value_noise(const TextureSpec& t, int x, int y, int channel) {
  double sum = 0.0, norm = 0.0, amp = 1.0, cell = t.cell;
  for (int o = 0; o < t.octaves; ++o) {
    const double fx = x / cell, fy = y / cell;
    const auto ix = static_cast<std::int64_t>(std::floor(fx));
    const auto iy = static_cast<std::int64_t>(std::floor(fy));
    const double tx = smooth(fx - ix), ty = smooth(fy - iy);
    const double v00 = lattice(t.seed, ix, iy, channel, o);
    const double v10 = lattice(t.seed, ix + 1, iy, channel, o);
    const double v01 = lattice(t.seed, ix, iy + 1, channel, o);
    const double v11 = lattice(t.seed, ix + 1, iy + 1, channel, o);
    const double top = v00 + (v10 - v00) * tx;
    const double bottom = v01 + (v11 - v01) * tx;
    sum += amp * (top + (bottom - top) * ty);
    norm += amp;
    amp *= 0.5;
    cell = std::max(1.0, cell * 0.5);
  }
  return sum / norm;
}

double rgb_distance(const Rgb& a, const Rgb& b) {
  double s = 0.0;
  for (int c = 0; c < 3; ++c) {
    const double d = static_cast<double>(a[c]) - b[c];
    s += d * d;
  }
  return std::sqrt(s);
}

double min_gap(const TextureSpec& a, const TextureSpec& b, int width, int height) {
  double best = std::numeric_limits<double>::max();
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) best = std::min(best, rgb_distance(a.at(x, y), b.at(x, y)));
  }
  return best;
}

nlohmann::json texture_to_json(const TextureSpec& t) {
  return {{"seed", t.seed},
          {"base", {t.base[0], t.base[1], t.base[2]}},
          {"amplitude", t.amplitude},
          {"cell", t.cell},
          {"octaves", t.octaves}};
}

TextureSpec texture_from_json(const nlohmann::json& j) {
  TextureSpec t;
  t.seed = j.at("seed").get<std::uint64_t>();
  const auto base = j.at("base").get<std::vector<float>>();
  if (base.size() != 3) throw Error(ErrorCode::kIoError, "texture base must have 3 channels");
  t.base = {base[0], base[1], base[2]};
  t.amplitude = j.at("amplitude").get<double>();
  t.cell = j.at("cell").get<double>();
  t.octaves = j.at("octaves").get<int>();
  return t;
}

}  // namespace

Rgb TextureSpec::at(int x, int y) const {
  Rgb out;
  for (int c = 0; c < 3; ++c) {
    const double v = base[c] + amplitude * (2.0 * value_noise(*this, x, y, c) - 1.0);
    out[c] = from_byte(to_byte(static_cast<float>(v)));
  }
  return out;
}

void SceneSpec::validate() const {
  if (width < 1 || height < 1) throw Error(ErrorCode::kInvalidArgument, "scene has no pixels");
  if (gt.width() != width || gt.height() != height) {
    throw Error(ErrorCode::kSceneMismatch, "ground-truth mask does not match scene size");
  }
  if (gt.none()) throw Error(ErrorCode::kInvalidArgument, "scene ground truth is empty");
  if (noise_sigma < 0.0) throw Error(ErrorCode::kInvalidArgument, "negative noise sigma");
  for (const TextureSpec* t : {&background, &foreground, &background_alt}) {
    if (t->octaves < 1 || !(t->cell > 0.0) || t->amplitude < 0.0) {
      throw Error(ErrorCode::kInvalidArgument, "invalid texture parameters");
    }
  }
}

void SceneSpec::measure_gaps() {
  texture_gap = min_gap(foreground, background, width, height);
  alt_gap = min_gap(background_alt, background, width, height);
}

ImageBuf render_scene(const SceneSpec& scene) {
  scene.validate();
  ImageBuf image(scene.width, scene.height);
  for (int y = 0; y < scene.height; ++y) {
    for (int x = 0; x < scene.width; ++x) {
      image.set_pixel(x, y, scene.gt.get(x, y) ? scene.foreground.at(x, y)
                                               : scene.background.at(x, y));
    }
  }
  return image;
}

OraclePainter::OraclePainter(SceneSpec scene) : scene_(std::move(scene)) { scene_.validate(); }

StepKind OraclePainter::classify(const BitMask& keep) const {
  const std::size_t object = scene_.gt.count();
  const std::size_t background = scene_.gt.size() - object;
  const std::size_t kept_object = (keep & scene_.gt).count();
  const std::size_t kept_background = keep.count() - kept_object;
  // kept_object / object > kept_background / background, cross-multiplied
  const bool outpaint = background == 0
                            ? kept_object > 0
                            : static_cast<double>(kept_object) * background >
                                  static_cast<double>(kept_background) * object;
  return outpaint ? StepKind::kOutpaint : StepKind::kInpaint;
}

PaintResult OraclePainter::paint(const PaintRequest& request) const {
  request.validate();
  if (request.image.width() != scene_.width || request.image.height() != scene_.height) {
    throw Error(ErrorCode::kSceneMismatch, "request image does not match the oracle scene");
  }
  const StepKind kind = classify(request.keep);
  PaintResult result;
  result.samples.resize(static_cast<std::size_t>(request.n_samples));
  for (std::size_t i = 0; i < result.samples.size(); ++i) {
    std::mt19937_64 rng(request.seed + i);
    std::normal_distribution<double> noise(0.0, scene_.noise_sigma > 0 ? scene_.noise_sigma : 1.0);
    ImageBuf painted = request.image;
    for (int y = 0; y < painted.height(); ++y) {
      for (int x = 0; x < painted.width(); ++x) {
        if (request.keep.get(x, y)) continue;
        Rgb v;
        if (kind == StepKind::kInpaint) {
          v = scene_.background.at(x, y);
        } else {
          v = scene_.gt.get(x, y) ? scene_.foreground.at(x, y) : scene_.background_alt.at(x, y);
        }
        if (scene_.noise_sigma > 0.0) {
          for (auto& c : v) c = static_cast<float>(std::clamp(c + noise(rng), 0.0, 1.0));
        }
        painted.set_pixel(x, y, v);
      }
    }
    result.samples[i] = std::move(painted);
  }
  return result;
}

void write_scene(const std::filesystem::path& json_path, const SceneSpec& scene,
                 const std::string& gt_png_name) {
  scene.validate();
  const auto gt_path = json_path.parent_path() / gt_png_name;
  write_png(gt_path, scene.gt);
  const nlohmann::json j = {{"width", scene.width},
                            {"height", scene.height},
                            {"background", texture_to_json(scene.background)},
                            {"foreground", texture_to_json(scene.foreground)},
                            {"background_alt", texture_to_json(scene.background_alt)},
                            {"gt_mask", gt_png_name},
                            {"noise_sigma", scene.noise_sigma},
                            {"texture_gap", scene.texture_gap},
                            {"alt_gap", scene.alt_gap}};
  std::ofstream out(json_path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + json_path.string());
  out << j.dump(2) << '\n';
}

SceneSpec read_scene(const std::filesystem::path& json_path) {
  std::ifstream in(json_path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + json_path.string());
  try {
    const auto j = nlohmann::json::parse(in);
    SceneSpec scene;
    scene.width = j.at("width").get<int>();
    scene.height = j.at("height").get<int>();
    scene.background = texture_from_json(j.at("background"));
    scene.foreground = texture_from_json(j.at("foreground"));
    scene.background_alt = texture_from_json(j.at("background_alt"));
    scene.gt = read_png_mask(json_path.parent_path() / j.at("gt_mask").get<std::string>());
    scene.noise_sigma = j.value("noise_sigma", 0.0);
    scene.texture_gap = j.value("texture_gap", 0.0);
    scene.alt_gap = j.value("alt_gap", 0.0);
    scene.validate();
    return scene;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kIoError, json_path.string() + ": " + e.what());
  }
}

}  // namespace amcp
