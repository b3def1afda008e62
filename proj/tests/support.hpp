#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "vrm/render.hpp"
#include "vrm/scene.hpp"

namespace vrm::test {

inline Scene one_link_scene(double length, double width) {
  Scene s;
  s.name = "one-link";
  ArmSpec arm;
  arm.link_lengths = {length};
  arm.link_widths = {width};
  arm.link_colors = {{200, 40, 40}};
  s.robot = arm;
  s.cameras = {Camera::orthographic_window({-5, -5}, {5, 5}, 100, 100)};
  return s;
}

inline Scene two_link_scene(double l1, double l2, double width) {
  Scene s;
  s.name = "two-link";
  ArmSpec arm;
  arm.link_lengths = {l1, l2};
  arm.link_widths = {width, width};
  arm.link_colors = {{200, 40, 40}, {40, 70, 200}};
  s.robot = arm;
  s.cameras = {Camera::orthographic_window({-5, -5}, {5, 5}, 100, 100)};
  return s;
}

inline Polygon square(Vec2 c, double half) {
  return {{c.x - half, c.y - half}, {c.x + half, c.y - half}, {c.x + half, c.y + half}, {c.x - half, c.y + half}};
}

inline Obstacle obstacle(const Polygon& p) { return {p, {90, 90, 90}, 1.0}; }

/// Circular distance in [0, pi], computed from atan2 independently of the library.
inline double circular_distance(double a, double b) {
  return std::abs(std::atan2(std::sin(a - b), std::cos(a - b)));
}

inline std::vector<std::uint32_t> foreground_support(const RobotImage& img, const ImageBuffer& background) {
  std::vector<std::uint32_t> out;
  for (std::size_t i = 0; i < img.pixels.pixel_count(); ++i) {
    if (img.pixels.pixel(i) != background.pixel(i)) out.push_back(static_cast<std::uint32_t>(i));
  }
  return out;
}

}  // namespace vrm::test
