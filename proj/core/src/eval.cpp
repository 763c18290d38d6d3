#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <random>
#include <thread>

#include <nlohmann/json.hpp>

#include "amcp/error.hpp"
#include "amcp/eval.hpp"
#include "amcp/geometry.hpp"
#include "amcp/png_io.hpp"
#include "parallel.hpp"

namespace amcp {
namespace {

std::uint64_t splitmix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct Shift {
  int dx = 0;
  int dy = 0;
};

// Uniform over integer vectors of length <= radius.
Shift random_shift(std::mt19937_64& rng, double radius) {
  const int r = static_cast<int>(std::floor(radius));
  if (r < 1) return {};
  std::uniform_int_distribution<int> coord(-r, r);
  for (;;) {
    const int dx = coord(rng), dy = coord(rng);
    if (static_cast<double>(dx) * dx + static_cast<double>(dy) * dy <= radius * radius) {
      return {dx, dy};
    }
  }
}

// Largest part of the shift that keeps `box` inside the frame.
Shift clamp_shift(Shift s, const Rect& box, int width, int height) {
  s.dx = std::clamp(s.dx, -box.x0, width - box.x1);
  s.dy = std::clamp(s.dy, -box.y0, height - box.y1);
  return s;
}

BitMask translate(const BitMask& m, Shift s) {
  BitMask out(m.width(), m.height());
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      if (!m.get(x, y)) continue;
      const int nx = x + s.dx, ny = y + s.dy;
      if (nx >= 0 && ny >= 0 && nx < m.width() && ny < m.height()) out.set(nx, ny, true);
    }
  }
  return out;
}

BitMask translate_rigid(const BitMask& m, Shift s) {
  if (m.none()) return m;
  return translate(m, clamp_shift(s, tight_bbox(m), m.width(), m.height()));
}

std::string format(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

std::string csv_row(const ReportRow& r) {
  return r.item_id + "," + std::string(to_string(r.prompt_type)) + "," +
         format("%.4f", r.noise_rate) + "," + format("%.6f", r.iou) + "," +
         std::to_string(r.steps_run) + "," + std::to_string(r.degenerate_steps) + "," +
         format("%.3f", r.wall_ms);
}

constexpr const char* kCsvHeader = "item_id,prompt_type,noise_rate,iou,steps_run,degenerate_steps,wall_ms";

std::ofstream open_report(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kReportWriteError, "cannot open " + path.string());
  return out;
}

void finish_report(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw Error(ErrorCode::kReportWriteError, "cannot write " + path.string());
}

}  // namespace

Prompt perturb_prompt(const Prompt& prompt, const BitMask& gt, const NoiseSpec& noise) {
  if (noise.rate < 0.0 || noise.rate > 1.0) {
    throw Error(ErrorCode::kInvalidArgument, "noise rate must lie in [0, 1]");
  }
  const Rect gt_box = tight_bbox(gt);
  const double radius = noise.rate * 0.5 * std::hypot(gt_box.width(), gt_box.height());
  const int w = gt.width(), h = gt.height();
  std::mt19937_64 rng(noise.seed);

  switch (prompt.kind()) {
    case PromptKind::kPoint: {
      auto points = std::get<PointPrompt>(prompt.value()).points;
      const Shift common = random_shift(rng, radius);
      for (auto& p : points) {
        const Shift s = noise.per_point ? random_shift(rng, radius) : common;
        p.x = std::clamp(p.x + s.dx, 0, w - 1);
        p.y = std::clamp(p.y + s.dy, 0, h - 1);
      }
      return Prompt::points(std::move(points));
    }
    case PromptKind::kBox: {
      Rect box = std::get<BoxPrompt>(prompt.value()).box;
      const Shift s = clamp_shift(random_shift(rng, radius), box, w, h);
      box.x0 += s.dx;
      box.x1 += s.dx;
      box.y0 += s.dy;
      box.y1 += s.dy;
      return Prompt::box(box);
    }
    case PromptKind::kScribble:
      return Prompt::scribble(
          translate_rigid(std::get<ScribblePrompt>(prompt.value()).strokes, random_shift(rng, radius)));
    case PromptKind::kMask:
      return Prompt::mask(
          translate_rigid(std::get<MaskPrompt>(prompt.value()).mask, random_shift(rng, radius)));
  }
  return prompt;
}

bool prompt_overlaps(const Prompt& prompt, const BitMask& gt) {
  switch (prompt.kind()) {
    case PromptKind::kPoint:
      for (const auto& p : std::get<PointPrompt>(prompt.value()).points) {
        if (gt.get(p.x, p.y)) return true;
      }
      return false;
    case PromptKind::kBox:
      return !(BitMask::from_rect(gt.width(), gt.height(), std::get<BoxPrompt>(prompt.value()).box) &
               gt)
                  .none();
    case PromptKind::kScribble:
      return !(std::get<ScribblePrompt>(prompt.value()).strokes & gt).none();
    case PromptKind::kMask:
      return !(std::get<MaskPrompt>(prompt.value()).mask & gt).none();
  }
  return false;
}

std::vector<EvalItem> make_items(const std::vector<GeneratedScene>& scenes, PromptKind kind,
                                 const std::optional<NoiseSpec>& noise) {
  std::vector<EvalItem> items;
  items.reserve(scenes.size());
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    const auto& s = scenes[i];
    Prompt prompt = s.prompts.get(kind);
    if (noise) {
      NoiseSpec local = *noise;
      local.seed = splitmix(noise->seed ^ splitmix(i + 1));
      prompt = perturb_prompt(prompt, s.spec.gt, local);
    }
    items.push_back(EvalItem{s.id, s.image, s.spec.gt, std::move(prompt), s.spec});
  }
  return items;
}

EvalItem load_item(const std::string& id, const std::filesystem::path& image_path,
                   const std::filesystem::path& gt_path, PromptKind kind) {
  ImageBuf image = read_png_rgb(image_path);
  BitMask gt = read_png_mask(gt_path);
  if (image.width() != gt.width() || image.height() != gt.height()) {
    throw Error(ErrorCode::kDimensionMismatch, "image and ground truth differ in size for " + id);
  }
  Prompt prompt = derive_prompts(gt).get(kind);
  return EvalItem{id, std::move(image), std::move(gt), std::move(prompt), std::nullopt};
}

Backends oracle_backends(std::shared_ptr<const Projector> projector) {
  return {[](const EvalItem& item) -> std::shared_ptr<const Painter> {
            if (!item.scene) {
              throw Error(ErrorCode::kSceneMismatch, "oracle painter needs a synthetic scene");
            }
            return std::make_shared<OraclePainter>(*item.scene);
          },
          std::move(projector)};
}

Backends shared_backends(std::shared_ptr<const Painter> painter,
                         std::shared_ptr<const Projector> projector) {
  return {[painter](const EvalItem&) { return painter; }, std::move(projector)};
}

double Report::mean_iou() const {
  if (rows.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& r : rows) sum += r.iou;
  return sum / static_cast<double>(rows.size());
}

int Report::failures() const {
  return static_cast<int>(
      std::count_if(rows.begin(), rows.end(), [](const ReportRow& r) { return !r.error.empty(); }));
}

int Report::infeasible() const {
  return static_cast<int>(
      std::count_if(rows.begin(), rows.end(), [](const ReportRow& r) { return !r.feasible; }));
}

Report evaluate(const std::vector<EvalItem>& items, const AmcpConfig& config,
                const Backends& backends, const EvalOptions& options) {
  if (items.empty()) throw Error(ErrorCode::kInvalidArgument, "no items to evaluate");
  if (!backends.painter || !backends.projector) {
    throw Error(ErrorCode::kInvalidArgument, "evaluation needs a painter and a projector");
  }
  config.validate();

  unsigned workers = options.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                          : options.threads;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, items.size()));
  AmcpConfig run_config = config;
  if (workers > 1) run_config.threads = 1;

  Report report;
  report.config_json = config_to_json(config);
  report.rows.resize(items.size());
  std::mutex callback_mu;

  detail::parallel_for(items.size(), workers, [&](std::size_t i) {
    const EvalItem& item = items[i];
    ReportRow& row = report.rows[i];
    row.item_id = item.id;
    row.prompt_type = item.prompt.kind();
    row.noise_rate = options.noise_rate;
    row.feasible = prompt_overlaps(item.prompt, item.gt);
    const auto start = std::chrono::steady_clock::now();
    try {
      const auto painter = backends.painter(item);
      const RunResult result = run(item.image, item.prompt, run_config, *painter, *backends.projector);
      row.iou = iou(result.final_mask, item.gt);
      row.steps_run = static_cast<int>(result.steps.size());
      row.degenerate_steps = static_cast<int>(std::count_if(
          result.steps.begin(), result.steps.end(), [](const StepTrace& s) { return s.degenerate; }));
      if (options.trace_dir) {
        write_trace(*options.trace_dir / item.id, result, config, options.record_timings);
      }
      if (options.on_result) {
        std::lock_guard lock(callback_mu);
        options.on_result(item, result);
      }
    } catch (const Error& e) {
      row.error = e.what();
      row.backend_failure = e.is_backend_failure();
    } catch (const std::exception& e) {
      row.error = e.what();
      if (row.error.empty()) row.error = "unknown failure";
    }
    if (options.record_timings) {
      row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                        .count();
    }
  });
  return report;
}

void write_report_csv(const std::filesystem::path& path, const Report& report) {
  auto out = open_report(path);
  out << kCsvHeader << '\n';
  for (const auto& r : report.rows) out << csv_row(r) << '\n';
  finish_report(out, path);
}

void write_report_json(const std::filesystem::path& path, const Report& report) {
  nlohmann::json failed = nlohmann::json::array();
  nlohmann::json infeasible = nlohmann::json::array();
  for (const auto& r : report.rows) {
    if (!r.error.empty()) failed.push_back({{"item_id", r.item_id}, {"error", r.error}});
    if (!r.feasible) infeasible.push_back(r.item_id);
  }
  const nlohmann::json doc = {
      {"items", report.rows.size()},
      {"mean_iou", report.mean_iou()},
      {"failures", std::move(failed)},
      {"infeasible_prompts", std::move(infeasible)},
      {"config", report.config_json.empty() ? nlohmann::json::object()
                                            : nlohmann::json::parse(report.config_json)},
  };
  auto out = open_report(path);
  out << doc.dump(2) << '\n';
  finish_report(out, path);
}

std::string_view to_string(AblationAxis axis) {
  switch (axis) {
    case AblationAxis::kSamples:
      return "N";
    case AblationAxis::kSteps:
      return "T";
    case AblationAxis::kClusters:
      return "K";
    case AblationAxis::kBoxRate:
      return "box_rate";
    case AblationAxis::kRingWidth:
      return "ring_width";
  }
  return "N";
}

AblationAxis parse_ablation_axis(std::string_view name) {
  for (auto a : {AblationAxis::kSamples, AblationAxis::kSteps, AblationAxis::kClusters,
                 AblationAxis::kBoxRate, AblationAxis::kRingWidth}) {
    if (name == to_string(a)) return a;
  }
  throw Error(ErrorCode::kConfigError, "unknown ablation axis '" + std::string(name) + "'");
}

AmcpConfig apply_axis(AmcpConfig config, AblationAxis axis, double value) {
  auto integer = [&] {
    if (value != std::floor(value) || std::abs(value) > 1e6) {
      throw Error(ErrorCode::kConfigError,
                  "axis " + std::string(to_string(axis)) + " needs integer values");
    }
    return static_cast<int>(value);
  };
  switch (axis) {
    case AblationAxis::kSamples:
      config.n_samples = integer();
      break;
    case AblationAxis::kSteps:
      config.steps = integer();
      if (!config.k_schedule.empty() && config.steps > 0) {
        config.k_schedule.resize(static_cast<std::size_t>(config.steps), config.k_schedule.back());
      }
      break;
    case AblationAxis::kClusters:
      config.k_schedule.assign(static_cast<std::size_t>(std::max(config.steps, 0)), integer());
      break;
    case AblationAxis::kBoxRate:
      config.box_rate = value;
      break;
    case AblationAxis::kRingWidth:
      config.ring_width = integer();
      break;
  }
  config.validate();
  return config;
}

std::vector<AblationEntry> ablate(const std::vector<EvalItem>& items, const AmcpConfig& config,
                                  const Backends& backends, AblationAxis axis,
                                  const std::vector<double>& values, const EvalOptions& options) {
  if (values.empty()) throw Error(ErrorCode::kInvalidArgument, "no ablation values");
  std::vector<AmcpConfig> configs;
  for (double v : values) configs.push_back(apply_axis(config, axis, v));
  std::vector<AblationEntry> entries;
  for (std::size_t i = 0; i < values.size(); ++i) {
    EvalOptions local = options;
    if (options.trace_dir) {
      local.trace_dir = *options.trace_dir / (std::string(to_string(axis)) + "_" + format("%g", values[i]));
    }
    entries.push_back({values[i], evaluate(items, configs[i], backends, local)});
  }
  return entries;
}

void write_ablation_csv(const std::filesystem::path& path, AblationAxis axis,
                        const std::vector<AblationEntry>& entries) {
  auto out = open_report(path);
  out << "axis,value," << kCsvHeader << '\n';
  for (const auto& e : entries) {
    for (const auto& r : e.report.rows) {
      out << to_string(axis) << ',' << format("%g", e.value) << ',' << csv_row(r) << '\n';
    }
  }
  finish_report(out, path);
}

}  // namespace amcp
