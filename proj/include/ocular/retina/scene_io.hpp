#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "ocular/retina/scene.hpp"

namespace ocular::retina {

inline constexpr int kSceneSchemaVersion = 1;

/// Parses a version-1 scene document (see docs/scene.md). Image textures are
/// resolved relative to `base_dir`. Throws std::invalid_argument on schema errors.
Scene scene_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
nlohmann::json scene_to_json(const Scene& scene);

Scene load_scene(const std::filesystem::path& path);

}  // namespace ocular::retina
