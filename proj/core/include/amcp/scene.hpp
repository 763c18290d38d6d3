#pragma once

#include <cstdint>
#include <filesystem>

#include "amcp/image.hpp"
#include "amcp/painter.hpp"
#include "amcp/potential.hpp"

namespace amcp {

// Seeded multi-octave value noise around a base color, quantized to 8 bits
// so rendered scenes survive a PNG round trip unchanged.
struct TextureSpec {
  std::uint64_t seed = 0;
  Rgb base{0.5f, 0.5f, 0.5f};
  double amplitude = 0.03;  // max deviation from base per channel
  double cell = 12.0;       // lattice spacing of the coarsest octave, pixels
  int octaves = 3;

  Rgb at(int x, int y) const;
};

// A synthetic scene with known foreground and background textures.
// background_alt is a second background realization (different seed and
// base color) that the oracle uses when it outpaints background pixels.
struct SceneSpec {
  int width = 0;
  int height = 0;
  TextureSpec background;
  TextureSpec foreground;
  TextureSpec background_alt;
  BitMask gt;
  double noise_sigma = 0.0;
  double texture_gap = 0.0;  // min_x |fg(x) - bg(x)|_2 over the frame
  double alt_gap = 0.0;      // min_x |alt(x) - bg(x)|_2 over the frame

  void validate() const;
  // Recomputes texture_gap and alt_gap from the textures.
  void measure_gaps();
};

ImageBuf render_scene(const SceneSpec& scene);

// Stand-in for a generative painter on a synthetic scene. Inpainting fills
// with background texture; outpainting fills object pixels with foreground
// texture and everything else with the alternate background. Gaussian noise
// of scene.noise_sigma is added to painted pixels, seeded per sample.
class OraclePainter final : public Painter {
 public:
  explicit OraclePainter(SceneSpec scene);

  PaintResult paint(const PaintRequest& request) const override;
  std::string name() const override { return "oracle"; }

  // Outpainting iff the kept region covers a larger fraction of the object
  // than of the background.
  StepKind classify(const BitMask& keep) const;
  const SceneSpec& scene() const { return scene_; }

 private:
  SceneSpec scene_;
};

// Scene description as JSON; the ground-truth mask is stored next to it as
// a PNG whose file name is recorded in the JSON.
void write_scene(const std::filesystem::path& json_path, const SceneSpec& scene,
                 const std::string& gt_png_name);
SceneSpec read_scene(const std::filesystem::path& json_path);

}  // namespace amcp
