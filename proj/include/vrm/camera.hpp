#pragma once

#include <array>
#include <vector>

#include "vrm/common.hpp"
#include "vrm/geometry.hpp"

namespace vrm {

enum class CameraMode { Orthographic, Perspective };

/// Maps the planar workspace onto a rows x cols raster. Pixel (c, r) covers
/// the continuous square [c, c+1) x [r, r+1); its center is (c+0.5, r+0.5).
///
/// Orthographic: pixel = A * world + t, with `affine` = {a00, a01, tx, a10, a11, ty}.
/// Perspective: pinhole at `center` raised to `height`, looking straight down
/// with focal length `focal` (pixels). Objects are prisms standing on the floor,
/// so taller objects subtend wider cones.
struct Camera {
  CameraMode mode = CameraMode::Orthographic;
  int rows = 100;
  int cols = 100;
  std::array<double, 6> affine{10.0, 0.0, 50.0, 0.0, -10.0, 50.0};
  Vec2 center;
  double height = 10.0;
  double focal = 100.0;

  /// Maps the axis-aligned window [lo, hi] onto the full raster, y up.
  static Camera orthographic_window(Vec2 lo, Vec2 hi, int rows, int cols);
  static Camera perspective(Vec2 center, double height, double focal, int rows, int cols);

  /// Throws Error(DegenerateCamera) for a non-invertible view or a raster below 8x8.
  void validate() const;

  /// Continuous pixel coordinates (x = column, y = row) of a point at height z.
  Vec2 project(Vec2 world, double z = 0.0) const;

  /// Workspace length of one pixel on the floor plane.
  double pixel_size() const;

  /// Image-plane footprint of a prism over `base` of the given height, as a
  /// union of polygons.
  std::vector<Polygon> project_prism(const Polygon& base, double prism_height) const;
};

}  // namespace vrm
