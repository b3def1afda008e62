#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vrm/camera.hpp"
#include "vrm/image.hpp"
#include "vrm/robot.hpp"
#include "vrm/scene.hpp"

namespace vrm {

/// Appends the in-view pixel indices (row * cols + col) whose centers fall
/// inside `pixel_poly` (pixel coordinates). Half-open on both axes, so
/// polygons sharing an edge never both claim a pixel.
void rasterize_polygon(const Polygon& pixel_poly, ViewGeometry view,
                       std::vector<std::uint32_t>& out);

/// Integer line from floor(a) to floor(b), both endpoints plotted, one pixel
/// wide; off-raster pixels are dropped. Appends in-view pixel indices.
void rasterize_line(Vec2 a, Vec2 b, ViewGeometry view, std::vector<std::uint32_t>& out);

/// Single-camera render: background, then obstacles, then links in link order
/// (later links on top). Binary coverage by pixel center, no anti-aliasing.
RobotImage render(const Configuration& q, const RobotSpec& spec, const ObstacleSet& obstacles,
                  const Camera& camera, const ImageBuffer& background);

/// Robot alone against the scene background, every camera stitched in order.
RobotImage render_robot(const Configuration& q, const Scene& scene);

ImageBuffer render_background(const Scene& scene);
/// Obstacles (no robot) over the background, every camera stitched.
ImageBuffer render_obstacle_scene(const Scene& scene);
/// Obstacle scene with the background removed.
ObstacleImage obstacle_image(const Scene& scene);

/// Sorted global pixel indices covered by the robot across all scene cameras.
/// Same coverage as the foreground of `render_robot`.
std::vector<std::uint32_t> robot_coverage(const Configuration& q, const Scene& scene);

inline constexpr double kBackgroundThreshold = 1.0 / 255.0;

/// Keeps a pixel's original value where its max-channel absolute difference
/// from the background exceeds `threshold` (intensity units); zero elsewhere.
ForegroundImage background_subtract(const RobotImage& x, const ImageBuffer& background,
                                    double threshold = kBackgroundThreshold);

/// True iff some pixel is non-zero in both images (x * b != 0).
bool hadamard_overlap(const ForegroundImage& fg, const ObstacleImage& b);
std::size_t overlap_count(const ImageBuffer& fg, const ImageBuffer& b);

/// Pixel-wise maximum over a non-empty list.
ForegroundImage superimpose(std::span<const ForegroundImage> images);

/// Concatenates views in order; the result records per-view geometry.
RobotImage stitch_views(std::span<const RobotImage> views);

/// Free iff at least one view shows no overlap.
bool multi_view_free(std::span<const ForegroundImage> fg_views,
                     std::span<const ObstacleImage> b_views);

/// Multi-view rule on stitched supports: a set of pixels collides with the
/// obstacle iff it overlaps the obstacle in every view.
bool support_collides(std::span<const std::uint32_t> pixels, const OccupancyMask& obstacle);
/// Number of support pixels that land on the obstacle.
std::size_t support_overlap(std::span<const std::uint32_t> pixels, const OccupancyMask& obstacle);

}  // namespace vrm
