#include <cmath>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "amcp/amcp.hpp"
#include "amcp/error.hpp"
#include "amcp/png_io.hpp"

namespace amcp {
namespace {

nlohmann::json number_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

void write_trace(const std::filesystem::path& dir, const RunResult& result,
                 const AmcpConfig& config, bool include_timings) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create trace directory " + dir.string());

  nlohmann::json steps = nlohmann::json::array();
  for (const auto& step : result.steps) {
    const std::string stem = "step_" + std::to_string(step.index);
    write_png(dir / (stem + "_" + step_letter(step.kind) + ".png"), step.mask);
    write_png(dir / (stem + "_avg.png"), step.average);

    nlohmann::json s = {
        {"index", step.index},
        {"kind", std::string(1, step_letter(step.kind))},
        {"foreground_px", step.mask.count()},
        {"objective", number_or_null(step.objective)},
        {"posterior", number_or_null(step.posterior)},
        {"degenerate", step.degenerate},
        {"skipped", step.skipped},
        {"degenerate_samples", step.degenerate_samples},
        {"color_fallback", step.color_fallback},
    };
    if (include_timings) s["wall_ms"] = step.wall_ms;
    steps.push_back(std::move(s));
  }

  const nlohmann::json doc = {
      {"config", nlohmann::json::parse(config_to_json(config))},
      {"steps", std::move(steps)},
      {"final_foreground_px", result.final_mask.count()},
  };
  std::ofstream out(dir / "trace.json", std::ios::binary);
  out << doc.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::kIoError, "cannot write trace.json in " + dir.string());
}

}  // namespace amcp
