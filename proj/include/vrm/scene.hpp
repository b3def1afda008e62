#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "vrm/camera.hpp"
#include "vrm/robot.hpp"

namespace vrm {

/// Everything needed to render a dataset: robot, obstacles, cameras, raster,
/// background color and the root seed. Serialized as JSON (see README).
struct Scene {
  std::string name;
  RobotSpec robot;
  ObstacleSet obstacles;
  std::vector<Camera> cameras;
  Rgb background{235, 235, 235};
  std::uint64_t seed = 1;
  double gold_epsilon = degrees_to_radians(1.0);

  /// Checks robot, obstacle and camera invariants; throws Error.
  void validate() const;
};

Scene scene_from_json(const std::string& text);
std::string scene_to_json(const Scene& scene);
Scene load_scene(const std::filesystem::path& path);
void save_scene(const std::filesystem::path& path, const Scene& scene);

namespace presets {

/// Planar 3-link arm with three rectangular obstacles; the benchmark scene.
Scene arm3();
/// Planar 2-link arm on the torus with a wall obstacle.
Scene arm2();
/// Translating square (x, y) with two obstacles.
Scene mobile();
/// Look up a preset by name ("arm3", "arm2", "mobile").
Scene by_name(const std::string& name);

}  // namespace presets

}  // namespace vrm
