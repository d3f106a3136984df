#pragma once

#include <string>
#include <variant>
#include <vector>

#include "planbench/world.hpp"

namespace planbench {

struct TextSegment {
  std::string text;
  friend bool operator==(const TextSegment&, const TextSegment&) = default;
};

/// Self-contained snapshot of a single object, standing in for an object image.
struct ObjectRef {
  SceneObject object;
  friend bool operator==(const ObjectRef&, const ObjectRef&) = default;
};

/// Self-contained snapshot of a whole scene, standing in for a scene image.
struct SceneRef {
  Scene scene;
  friend bool operator==(const SceneRef&, const SceneRef&) = default;
};

using PromptSegment = std::variant<TextSegment, ObjectRef, SceneRef>;

struct MultimodalPrompt {
  std::vector<PromptSegment> segments;

  bool has_reference() const {
    for (const auto& s : segments)
      if (!std::holds_alternative<TextSegment>(s)) return true;
    return false;
  }

  friend bool operator==(const MultimodalPrompt&, const MultimodalPrompt&) = default;
};

}  // namespace planbench
