#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "amcp/amcp.hpp"
#include "amcp/config.hpp"
#include "amcp/image.hpp"
#include "amcp/painter.hpp"
#include "amcp/projector.hpp"
#include "amcp/prompt.hpp"
#include "amcp/scene.hpp"

namespace amcp {

enum class ShapeFamily { kEllipse, kPolygon, kBlob };

std::string_view to_string(ShapeFamily family);
ShapeFamily parse_shape_family(std::string_view name);

// The four prompts derived from a ground-truth mask: centroid point, tight
// box, coarse mask (eroded until about 30% of the area is gone) and a
// scribble (skeleton pixels closest to the centroid, 60% of the skeleton).
struct DerivedPrompts {
  Prompt point;
  Prompt box;
  Prompt scribble;
  Prompt mask;

  const Prompt& get(PromptKind kind) const;
};

DerivedPrompts derive_prompts(const BitMask& gt);

struct SceneOptions {
  int width = 128;
  int height = 128;
  double noise_sigma = 0.0;
  std::optional<ShapeFamily> family;  // unset: cycle through all three
};

struct GeneratedScene {
  std::string id;
  std::uint64_t seed = 0;
  ShapeFamily family = ShapeFamily::kEllipse;
  SceneSpec spec;
  ImageBuf image;
  DerivedPrompts prompts;
};

// n reproducible scenes. Ground-truth masks cover 5% to 40% of the frame,
// keep a margin from the border and are fixed points of morph_clean.
std::vector<GeneratedScene> gen_scenes(int n, std::uint64_t seed, const SceneOptions& options = {});

// Suite layout: scenes.json manifest plus, per scene, <id>.png (image),
// <id>.json (scene spec), <id>_gt.png, <id>_coarse.png, <id>_scribble.png.
void write_suite(const std::filesystem::path& dir, const std::vector<GeneratedScene>& scenes);
std::vector<GeneratedScene> read_suite(const std::filesystem::path& dir);

struct NoiseSpec {
  double rate = 0.0;
  std::uint64_t seed = 0;
  bool per_point = false;  // independent jitter per point instead of one shift
};

// Translates the prompt by an integer vector of length at most
// rate * (half the diagonal of the ground-truth box). Boxes and masks move
// rigidly and the vector is clamped so they stay inside the frame; points are
// clamped individually.
Prompt perturb_prompt(const Prompt& prompt, const BitMask& gt, const NoiseSpec& noise);

// Whether the prompt still touches the object.
bool prompt_overlaps(const Prompt& prompt, const BitMask& gt);

struct EvalItem {
  std::string id;
  ImageBuf image;
  BitMask gt;
  Prompt prompt;
  std::optional<SceneSpec> scene;  // present for synthetic scenes
};

// Items for one prompt type. With noise, each item gets its own noise seed
// derived from noise.seed and its position.
std::vector<EvalItem> make_items(const std::vector<GeneratedScene>& scenes, PromptKind kind,
                                 const std::optional<NoiseSpec>& noise = std::nullopt);

// Loads an image / mask pair and derives the prompt from the mask.
EvalItem load_item(const std::string& id, const std::filesystem::path& image_path,
                   const std::filesystem::path& gt_path, PromptKind kind);

struct Backends {
  std::function<std::shared_ptr<const Painter>(const EvalItem&)> painter;
  std::shared_ptr<const Projector> projector;
};

// Oracle painter built from each item's scene (kSceneMismatch without one).
Backends oracle_backends(std::shared_ptr<const Projector> projector);
// The same painter for every item.
Backends shared_backends(std::shared_ptr<const Painter> painter,
                         std::shared_ptr<const Projector> projector);

struct ReportRow {
  std::string item_id;
  PromptKind prompt_type = PromptKind::kBox;
  double noise_rate = 0.0;
  double iou = 0.0;  // 0 for failed items
  int steps_run = 0;
  int degenerate_steps = 0;
  double wall_ms = 0.0;
  bool feasible = true;  // prompt overlaps the ground truth
  std::string error;     // non-empty when the item failed
  bool backend_failure = false;
};

struct Report {
  std::vector<ReportRow> rows;  // in item order
  std::string config_json;

  double mean_iou() const;
  int failures() const;
  int infeasible() const;
};

struct EvalOptions {
  unsigned threads = 0;  // item workers, 0 = hardware concurrency
  // Off: wall_ms is written as 0 so reruns give byte-identical reports.
  bool record_timings = true;
  std::optional<std::filesystem::path> trace_dir;  // one subdirectory per item
  double noise_rate = 0.0;                         // echoed into rows
  // Called once per successful item, serialized across workers.
  std::function<void(const EvalItem&, const RunResult&)> on_result;
};

// Throws kInvalidArgument on an empty item list; per-item failures are
// recorded in the report.
Report evaluate(const std::vector<EvalItem>& items, const AmcpConfig& config,
                const Backends& backends, const EvalOptions& options = {});

// CSV columns: item_id,prompt_type,noise_rate,iou,steps_run,degenerate_steps,wall_ms
void write_report_csv(const std::filesystem::path& path, const Report& report);
// Summary with mean IoU, failures, infeasible prompts and the config echo.
void write_report_json(const std::filesystem::path& path, const Report& report);

enum class AblationAxis { kSamples, kSteps, kClusters, kBoxRate, kRingWidth };

std::string_view to_string(AblationAxis axis);  // N, T, K, box_rate, ring_width
AblationAxis parse_ablation_axis(std::string_view name);

// Config with one axis set. K fixes the cluster count for every step.
AmcpConfig apply_axis(AmcpConfig config, AblationAxis axis, double value);

struct AblationEntry {
  double value = 0.0;
  Report report;
};

std::vector<AblationEntry> ablate(const std::vector<EvalItem>& items, const AmcpConfig& config,
                                  const Backends& backends, AblationAxis axis,
                                  const std::vector<double>& values,
                                  const EvalOptions& options = {});

// Report columns prefixed by axis,value; one block of rows per value.
void write_ablation_csv(const std::filesystem::path& path, AblationAxis axis,
                        const std::vector<AblationEntry>& entries);

}  // namespace amcp
