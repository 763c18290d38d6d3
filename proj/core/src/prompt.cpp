#include "amcp/prompt.hpp"

#include <string>

#include "amcp/error.hpp"

namespace amcp {

std::string_view to_string(PromptKind kind) {
  switch (kind) {
    case PromptKind::kPoint: return "point";
    case PromptKind::kScribble: return "scribble";
    case PromptKind::kBox: return "box";
    case PromptKind::kMask: return "mask";
  }
  return "unknown";
}

PromptKind parse_prompt_kind(std::string_view name) {
  if (name == "point") return PromptKind::kPoint;
  if (name == "scribble") return PromptKind::kScribble;
  if (name == "box") return PromptKind::kBox;
  if (name == "mask") return PromptKind::kMask;
  throw Error(ErrorCode::kConfigError, "unknown prompt type '" + std::string(name) + "'");
}

void Prompt::validate(int width, int height) const {
  auto check_mask = [&](const BitMask& m, const char* what) {
    if (m.width() != width || m.height() != height) {
      throw Error(ErrorCode::kPromptOutOfBounds, std::string(what) + " does not match the image size");
    }
    if (m.none()) throw Error(ErrorCode::kInvalidArgument, std::string(what) + " is empty");
  };
  switch (kind()) {
    case PromptKind::kPoint: {
      const auto& pts = std::get<PointPrompt>(value_).points;
      if (pts.empty()) throw Error(ErrorCode::kNoPromptPoints, "point prompt has no points");
      for (const auto& p : pts) {
        if (p.x < 0 || p.y < 0 || p.x >= width || p.y >= height) {
          throw Error(ErrorCode::kPromptOutOfBounds,
                      "point (" + std::to_string(p.x) + "," + std::to_string(p.y) + ") outside image");
        }
      }
      break;
    }
    case PromptKind::kBox:
      if (!std::get<BoxPrompt>(value_).box.valid_for(width, height)) {
        throw Error(ErrorCode::kPromptOutOfBounds, "box outside image or empty");
      }
      break;
    case PromptKind::kScribble:
      check_mask(std::get<ScribblePrompt>(value_).strokes, "scribble");
      break;
    case PromptKind::kMask:
      check_mask(std::get<MaskPrompt>(value_).mask, "coarse mask");
      break;
  }
}

std::vector<Point> Prompt::prior_points() const {
  switch (kind()) {
    case PromptKind::kPoint:
      return std::get<PointPrompt>(value_).points;
    case PromptKind::kBox: {
      const Rect& b = std::get<BoxPrompt>(value_).box;
      return {{(b.x0 + b.x1 - 1) / 2, (b.y0 + b.y1 - 1) / 2}};
    }
    case PromptKind::kScribble: {
      const BitMask& s = std::get<ScribblePrompt>(value_).strokes;
      std::vector<Point> pts;
      for (int y = 0; y < s.height(); ++y) {
        for (int x = 0; x < s.width(); ++x) {
          if (s.get(x, y)) pts.push_back({x, y});
        }
      }
      return pts;
    }
    case PromptKind::kMask:
      return {};
  }
  return {};
}

}  // namespace amcp
