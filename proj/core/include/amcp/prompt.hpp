#pragma once

#include <string_view>
#include <variant>
#include <vector>

#include "amcp/image.hpp"

namespace amcp {

enum class PromptKind { kPoint, kScribble, kBox, kMask };

std::string_view to_string(PromptKind kind);
// Accepts point, scribble, box, mask. Throws kConfigError otherwise.
PromptKind parse_prompt_kind(std::string_view name);

struct PointPrompt {
  std::vector<Point> points;
};
struct ScribblePrompt {
  BitMask strokes;
};
struct BoxPrompt {
  Rect box;
};
struct MaskPrompt {
  BitMask mask;
};

// A localisation cue assumed to overlap the target object.
class Prompt {
 public:
  using Value = std::variant<PointPrompt, ScribblePrompt, BoxPrompt, MaskPrompt>;

  static Prompt points(std::vector<Point> points) { return Prompt(PointPrompt{std::move(points)}); }
  static Prompt scribble(BitMask strokes) { return Prompt(ScribblePrompt{std::move(strokes)}); }
  static Prompt box(const Rect& box) { return Prompt(BoxPrompt{box}); }
  static Prompt mask(BitMask mask) { return Prompt(MaskPrompt{std::move(mask)}); }

  PromptKind kind() const { return static_cast<PromptKind>(value_.index()); }
  const Value& value() const { return value_; }

  // Throws kInvalidArgument when empty and kPromptOutOfBounds when any part
  // falls outside a width x height frame.
  void validate(int width, int height) const;

  // Points feeding the Gaussian prompt prior: the points themselves, the box
  // center, or every scribble pixel. Coarse masks have none.
  std::vector<Point> prior_points() const;
  bool has_prior() const { return kind() != PromptKind::kMask; }

 private:
  explicit Prompt(Value value) : value_(std::move(value)) {}

  Value value_;
};

}  // namespace amcp
