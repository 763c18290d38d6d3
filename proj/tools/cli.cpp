#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "amcp/amcp.hpp"
#include "amcp/error.hpp"
#include "amcp/eval.hpp"
#include "amcp/geometry.hpp"
#include "amcp/morphology.hpp"
#include "amcp/png_io.hpp"
#include "amcp/remote.hpp"
#include "amcp/scene.hpp"

namespace amcp::cli {
namespace {

constexpr const char* kPromptUsage =
    "expected point:X,Y[;X,Y...], box:x0,y0,x1,y1, scribble:path.png or mask:path.png";

[[noreturn]] void bad_input(const std::string& message) {
  throw Error(ErrorCode::kInvalidArgument, message);
}

std::vector<int> parse_ints(std::string_view text, char sep) {
  std::vector<int> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = text.find(sep, start);
    const std::string_view part = text.substr(start, end == std::string_view::npos ? end : end - start);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (part.empty() || ec != std::errc() || ptr != part.data() + part.size()) {
      bad_input("not an integer: '" + std::string(part) + "'");
    }
    out.push_back(v);
    if (end == std::string_view::npos) return out;
    start = end + 1;
  }
}

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::logic_error&) {
      bad_input("not a number: '" + part + "'");
    }
  }
  if (out.empty()) bad_input("empty value list");
  return out;
}

// Flags shared by the subcommands that run the segmentation loop.
struct Options {
  std::optional<std::string> painter;
  std::string projector = "identity";
  std::string scene;
  std::string config_path;
  double timeout = 120.0;
  int canvas = 512;

  std::optional<int> steps, n_samples, ring_width, clean_kernel, diffusion_steps, color_components;
  std::optional<std::string> k_schedule, first_step;
  std::optional<double> box_rate, sigma_fraction, avg_threshold;
  std::optional<double> lambda_paint, lambda_color, lambda_prompt_i, lambda_prompt_o;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  bool no_objective = false;
};

void add_backend_flags(CLI::App* app, Options& o) {
  app->add_option("--painter", o.painter, "oracle | meanfill | remote:URL (default: oracle with --scene, else meanfill)");
  app->add_option("--projector", o.projector, "identity | patchstats | remote:URL")->capture_default_str();
  app->add_option("--scene", o.scene, "scene JSON for the oracle painter");
  app->add_option("--timeout", o.timeout, "remote request timeout in seconds")->capture_default_str();
  app->add_option("--canvas", o.canvas, "remote canvas size")->capture_default_str();
}

void add_config_flags(CLI::App* app, Options& o) {
  app->add_option("--config", o.config_path, "JSON config; flags override it");
  app->add_option("--steps", o.steps, "number of alternating steps T");
  app->add_option("--first-step", o.first_step, "I or O");
  app->add_option("--n-samples", o.n_samples, "paintings averaged per step N");
  app->add_option("--k-schedule", o.k_schedule, "clusters per step, e.g. 3,3,3,2,2");
  app->add_option("--ring-width", o.ring_width);
  app->add_option("--clean-kernel", o.clean_kernel);
  app->add_option("--box-rate", o.box_rate);
  app->add_option("--sigma-fraction", o.sigma_fraction);
  app->add_option("--avg-threshold", o.avg_threshold);
  app->add_option("--diffusion-steps", o.diffusion_steps);
  app->add_option("--color-components", o.color_components);
  app->add_option("--lambda-paint", o.lambda_paint);
  app->add_option("--lambda-color", o.lambda_color);
  app->add_option("--lambda-prompt-i", o.lambda_prompt_i);
  app->add_option("--lambda-prompt-o", o.lambda_prompt_o);
  app->add_option("--seed", o.seed);
  app->add_option("--threads", o.threads, "sample workers, 0 = all cores");
  app->add_flag("--no-objective", o.no_objective, "skip the per-step objective paintings");
}

AmcpConfig build_config(const Options& o) {
  AmcpConfig c;
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path, std::ios::binary);
    if (!in) throw Error(ErrorCode::kConfigError, "cannot read config " + o.config_path);
    std::stringstream ss;
    ss << in.rdbuf();
    c = config_from_json(ss.str(), c);
  }
  if (o.steps) c.steps = *o.steps;
  if (o.first_step) {
    if (*o.first_step == "I") {
      c.first_step = StepKind::kInpaint;
    } else if (*o.first_step == "O") {
      c.first_step = StepKind::kOutpaint;
    } else {
      throw Error(ErrorCode::kConfigError, "--first-step must be I or O");
    }
  }
  if (o.n_samples) c.n_samples = *o.n_samples;
  if (o.k_schedule) c.k_schedule = parse_ints(*o.k_schedule, ',');
  if (o.ring_width) c.ring_width = *o.ring_width;
  if (o.clean_kernel) c.clean_kernel = *o.clean_kernel;
  if (o.box_rate) c.box_rate = *o.box_rate;
  if (o.sigma_fraction) c.sigma_fraction = *o.sigma_fraction;
  if (o.avg_threshold) c.avg_threshold = *o.avg_threshold;
  if (o.diffusion_steps) c.diffusion_steps = *o.diffusion_steps;
  if (o.color_components) c.color_components = *o.color_components;
  if (o.lambda_paint) c.weights.paint = *o.lambda_paint;
  if (o.lambda_color) c.weights.color = *o.lambda_color;
  if (o.lambda_prompt_i) c.weights.prompt_inpaint = *o.lambda_prompt_i;
  if (o.lambda_prompt_o) c.weights.prompt_outpaint = *o.lambda_prompt_o;
  if (o.seed) c.seed = *o.seed;
  if (o.threads) c.threads = *o.threads;
  if (o.no_objective) c.record_objective = false;
  c.validate();
  return c;
}

RemoteOptions remote_options(const Options& o) {
  RemoteOptions r;
  r.canvas = o.canvas;
  r.timeout_seconds = o.timeout;
  return r;
}

std::string painter_name(const Options& o) {
  return o.painter.value_or(o.scene.empty() ? "meanfill" : "oracle");
}

std::shared_ptr<const Painter> make_painter(const Options& o) {
  const std::string name = painter_name(o);
  if (name == "oracle") {
    if (o.scene.empty()) throw Error(ErrorCode::kConfigError, "the oracle painter needs --scene");
    return std::make_shared<OraclePainter>(read_scene(o.scene));
  }
  if (name == "meanfill") return std::make_shared<MeanFillPainter>();
  if (name.rfind("remote:", 0) == 0) {
    return std::make_shared<RemotePainter>(name.substr(7), remote_options(o));
  }
  throw Error(ErrorCode::kConfigError, "unknown painter '" + name + "'");
}

std::shared_ptr<const Projector> make_projector(const Options& o) {
  if (o.projector == "identity") return std::make_shared<IdentityProjector>();
  if (o.projector == "patchstats") return std::make_shared<PatchStatsProjector>();
  if (o.projector.rfind("remote:", 0) == 0) {
    return std::make_shared<RemoteProjector>(o.projector.substr(7), remote_options(o));
  }
  throw Error(ErrorCode::kConfigError, "unknown projector '" + o.projector + "'");
}

// Suite items always carry their scene; with the oracle each item gets its
// own painter, other painters are shared.
Backends make_backends(const Options& o) {
  auto projector = make_projector(o);
  if (o.painter.value_or("oracle") == "oracle") return oracle_backends(std::move(projector));
  return shared_backends(make_painter(o), std::move(projector));
}

double ms_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

void summary(std::ostream& out, const std::string& cmd, const std::vector<std::string>& paths,
             std::optional<double> mean_iou, std::chrono::steady_clock::time_point start) {
  nlohmann::json j = {{"cmd", cmd}, {"out_paths", paths}};
  if (mean_iou) j["mean_iou"] = *mean_iou;
  j["wall_ms"] = ms_since(start);
  out << j.dump() << std::endl;
}

// Output files may name directories that do not exist yet.
const std::string& ensure_parent(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(parent, ec);
  }
  return path;
}

int backend_exit(const Report& report) {
  const bool backend = std::any_of(report.rows.begin(), report.rows.end(),
                                   [](const ReportRow& r) { return r.backend_failure; });
  return backend ? kExitBackend : kExitOk;
}

}  // namespace

Prompt parse_prompt(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) bad_input("malformed prompt '" + text + "': " + kPromptUsage);
  const std::string kind = text.substr(0, colon);
  const std::string body = text.substr(colon + 1);
  try {
    if (kind == "point") {
      std::vector<Point> points;
      std::stringstream ss(body);
      std::string pair;
      while (std::getline(ss, pair, ';')) {
        const auto v = parse_ints(pair, ',');
        if (v.size() != 2) bad_input("a point needs two coordinates");
        points.push_back({v[0], v[1]});
      }
      if (points.empty()) bad_input("no points given");
      return Prompt::points(std::move(points));
    }
    if (kind == "box") {
      const auto v = parse_ints(body, ',');
      if (v.size() != 4) bad_input("a box needs four coordinates");
      if (v[2] <= v[0] || v[3] <= v[1]) bad_input("box must satisfy x0 < x1 and y0 < y1");
      return Prompt::box({v[0], v[1], v[2], v[3]});
    }
  } catch (const Error& e) {
    bad_input("malformed prompt '" + text + "': " + e.what() + "; " + kPromptUsage);
  }
  if (kind == "scribble") return Prompt::scribble(read_png_mask(body));
  if (kind == "mask") return Prompt::mask(read_png_mask(body));
  bad_input("unknown prompt type '" + kind + "': " + kPromptUsage);
}

ImageBuf overlay(const ImageBuf& image, const BitMask& mask) {
  if (image.width() != mask.width() || image.height() != mask.height()) {
    throw Error(ErrorCode::kDimensionMismatch, "overlay mask does not match the image");
  }
  ImageBuf out = image;
  const BitMask edge = mask - erode(mask, 1);
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (edge.get(x, y)) out.set_pixel(x, y, {1.0f, 0.0f, 0.0f});
    }
  }
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  CLI::App app("Training-free prompt-guided segmentation by alternating inpainting and outpainting",
               "amcp");
  app.require_subcommand(1);

  Options opts;

  // segment
  std::string image_path, prompt_text, mask_out = "mask.png", trace_dir, overlay_path, gt_path;
  bool trace_timings = false;
  auto* segment = app.add_subcommand("segment", "segment one image");
  segment->add_option("--image", image_path, "input PNG")->required();
  segment->add_option("--prompt", prompt_text, kPromptUsage)->required();
  segment->add_option("--out", mask_out, "output mask PNG")->capture_default_str();
  segment->add_option("--trace", trace_dir, "write per-step masks and trace.json here");
  segment->add_flag("--trace-timings", trace_timings, "include wall-clock timings in trace.json");
  segment->add_option("--overlay", overlay_path, "write the image with the mask boundary drawn");
  segment->add_option("--gt", gt_path, "ground-truth mask; reports IoU");
  add_backend_flags(segment, opts);
  add_config_flags(segment, opts);

  // eval / ablate
  std::string suite_dir, prompt_type = "box", out_dir = "report", axis_name, values_text;
  double noise_rate = 0.0;
  std::uint64_t noise_seed = 0;
  bool per_point = false, no_timings = false;
  unsigned workers = 0;
  auto* eval = app.add_subcommand("eval", "evaluate a scene suite");
  auto* abl = app.add_subcommand("ablate", "sweep one config axis over a scene suite");
  for (auto* sub : {eval, abl}) {
    sub->add_option("--suite", suite_dir, "suite directory with scenes.json")->required();
    sub->add_option("--prompt-type", prompt_type, "point | box | scribble | mask")->capture_default_str();
    sub->add_option("--noise", noise_rate, "prompt noise rate")->capture_default_str();
    sub->add_option("--noise-seed", noise_seed)->capture_default_str();
    sub->add_flag("--per-point", per_point, "jitter each point independently");
    sub->add_option("--out", out_dir, "report directory")->capture_default_str();
    sub->add_option("--trace", trace_dir, "per-item trace directories");
    sub->add_flag("--no-timings", no_timings, "write wall_ms as 0 for reproducible reports");
    sub->add_option("--workers", workers, "item workers, 0 = all cores")->capture_default_str();
    add_backend_flags(sub, opts);
    add_config_flags(sub, opts);
  }
  abl->add_option("--axis", axis_name, "N | T | K | box_rate | ring_width")->required();
  abl->add_option("--values", values_text, "comma-separated axis values")->required();

  // synth
  int n_scenes = 20, width = 128, height = 128;
  std::uint64_t synth_seed = 7;
  double noise_sigma = 0.0;
  std::string family, synth_out;
  auto* synth = app.add_subcommand("synth", "generate a synthetic scene suite");
  synth->add_option("--n", n_scenes)->capture_default_str();
  synth->add_option("--seed", synth_seed)->capture_default_str();
  synth->add_option("--width", width)->capture_default_str();
  synth->add_option("--height", height)->capture_default_str();
  synth->add_option("--noise-sigma", noise_sigma, "oracle painter noise")->capture_default_str();
  synth->add_option("--family", family, "ellipse | polygon | blob (default: all)");
  synth->add_option("--out", synth_out, "suite directory")->required();

  // erase
  std::string erase_mask, erase_out = "erased.png";
  std::uint64_t erase_seed = 0;
  auto* erase = app.add_subcommand("erase", "inpaint an object away");
  erase->add_option("--image", image_path, "input PNG")->required();
  erase->add_option("--mask", erase_mask, "object mask PNG")->required();
  erase->add_option("--out", erase_out, "output PNG")->capture_default_str();
  erase->add_option("--seed", erase_seed)->capture_default_str();
  add_backend_flags(erase, opts);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    err << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return kExitBadInput;
  }

  try {
    if (segment->parsed()) {
      const AmcpConfig config = build_config(opts);
      const ImageBuf image = read_png_rgb(image_path);
      const Prompt prompt = parse_prompt(prompt_text);
      const auto painter = make_painter(opts);
      const auto projector = make_projector(opts);
      const RunResult result = amcp::run(image, prompt, config, *painter, *projector);
      std::vector<std::string> paths{mask_out};
      write_png(ensure_parent(mask_out), result.final_mask);
      if (!trace_dir.empty()) {
        write_trace(trace_dir, result, config, trace_timings);
        paths.push_back(trace_dir);
      }
      if (!overlay_path.empty()) {
        write_png(ensure_parent(overlay_path), overlay(image, result.final_mask));
        paths.push_back(overlay_path);
      }
      std::optional<double> score;
      if (!gt_path.empty()) score = iou(result.final_mask, read_png_mask(gt_path));
      err << "segment: " << result.steps.size() << " steps, " << result.final_mask.count()
          << " foreground px\n";
      summary(out, "segment", paths, score, start);
      return kExitOk;
    }

    if (eval->parsed() || abl->parsed()) {
      const AmcpConfig config = build_config(opts);
      const PromptKind kind = parse_prompt_kind(prompt_type);
      const auto scenes = read_suite(suite_dir);
      std::optional<NoiseSpec> noise;
      if (noise_rate > 0.0) noise = NoiseSpec{noise_rate, noise_seed, per_point};
      const auto items = make_items(scenes, kind, noise);
      const Backends backends = make_backends(opts);
      EvalOptions eo;
      eo.threads = workers;
      eo.record_timings = !no_timings;
      eo.noise_rate = noise_rate;
      if (!trace_dir.empty()) eo.trace_dir = trace_dir;
      const std::filesystem::path dir(out_dir);

      if (eval->parsed()) {
        const Report report = evaluate(items, config, backends, eo);
        write_report_csv(dir / "report.csv", report);
        write_report_json(dir / "report.json", report);
        err << "eval: " << report.rows.size() << " items, " << report.failures() << " failed, "
            << report.infeasible() << " infeasible prompts\n";
        summary(out, "eval", {(dir / "report.csv").string(), (dir / "report.json").string()},
                report.mean_iou(), start);
        return backend_exit(report);
      }

      const AblationAxis axis = parse_ablation_axis(axis_name);
      const auto entries = ablate(items, config, backends, axis, parse_doubles(values_text), eo);
      write_ablation_csv(dir / "ablation.csv", axis, entries);
      nlohmann::json values = nlohmann::json::array();
      int code = kExitOk;
      for (const auto& e : entries) {
        values.push_back({{"value", e.value},
                          {"mean_iou", e.report.mean_iou()},
                          {"failures", e.report.failures()}});
        err << "ablate: " << to_string(axis) << "=" << e.value << " mean IoU "
            << e.report.mean_iou() << "\n";
        code = std::max(code, backend_exit(e.report));
      }
      std::ofstream json(dir / "ablation.json", std::ios::binary);
      json << nlohmann::json{{"axis", std::string(to_string(axis))}, {"values", values},
                             {"config", nlohmann::json::parse(config_to_json(config))}}
                  .dump(2)
           << '\n';
      if (!json) throw Error(ErrorCode::kReportWriteError, "cannot write ablation.json");
      summary(out, "ablate", {(dir / "ablation.csv").string(), (dir / "ablation.json").string()},
              std::nullopt, start);
      return code;
    }

    if (synth->parsed()) {
      SceneOptions so;
      so.width = width;
      so.height = height;
      so.noise_sigma = noise_sigma;
      if (!family.empty()) so.family = parse_shape_family(family);
      const auto scenes = gen_scenes(n_scenes, synth_seed, so);
      write_suite(synth_out, scenes);
      err << "synth: " << scenes.size() << " scenes\n";
      summary(out, "synth", {(std::filesystem::path(synth_out) / "scenes.json").string()},
              std::nullopt, start);
      return kExitOk;
    }

    if (erase->parsed()) {
      const ImageBuf image = read_png_rgb(image_path);
      const BitMask mask = read_png_mask(erase_mask);
      const auto painter = make_painter(opts);
      write_png(ensure_parent(erase_out), erase_object(image, mask, *painter, erase_seed));
      summary(out, "erase", {erase_out}, std::nullopt, start);
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.is_backend_failure() ? kExitBackend : kExitBadInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitBadInput;
  }
  return kExitBadInput;
}

}  // namespace amcp::cli
