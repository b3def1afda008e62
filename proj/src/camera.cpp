#include "vrm/camera.hpp"

namespace vrm {

Camera Camera::orthographic_window(Vec2 lo, Vec2 hi, int rows, int cols) {
  Camera cam;
  cam.mode = CameraMode::Orthographic;
  cam.rows = rows;
  cam.cols = cols;
  const double sx = cols / (hi.x - lo.x);
  const double sy = rows / (hi.y - lo.y);
  cam.affine = {sx, 0.0, -lo.x * sx, 0.0, -sy, hi.y * sy};
  return cam;
}

Camera Camera::perspective(Vec2 center, double height, double focal, int rows, int cols) {
  Camera cam;
  cam.mode = CameraMode::Perspective;
  cam.center = center;
  cam.height = height;
  cam.focal = focal;
  cam.rows = rows;
  cam.cols = cols;
  return cam;
}

void Camera::validate() const {
  if (rows < 8 || cols < 8) {
    throw Error(ErrorCode::DegenerateCamera, "image size must be at least 8x8");
  }
  if (mode == CameraMode::Orthographic) {
    const double det = affine[0] * affine[4] - affine[1] * affine[3];
    if (!(std::abs(det) > 1e-12) || !std::isfinite(det)) {
      throw Error(ErrorCode::DegenerateCamera, "orthographic view transform is not invertible");
    }
  } else if (!(height > 0.0) || !(focal > 0.0)) {
    throw Error(ErrorCode::DegenerateCamera, "perspective camera needs positive height and focal length");
  }
}

Vec2 Camera::project(Vec2 world, double z) const {
  if (mode == CameraMode::Orthographic) {
    return {affine[0] * world.x + affine[1] * world.y + affine[2],
            affine[3] * world.x + affine[4] * world.y + affine[5]};
  }
  const double depth = height - z;
  return {0.5 * cols + focal * (world.x - center.x) / depth,
          0.5 * rows - focal * (world.y - center.y) / depth};
}

double Camera::pixel_size() const {
  if (mode == CameraMode::Orthographic) {
    return 1.0 / std::sqrt(std::abs(affine[0] * affine[4] - affine[1] * affine[3]));
  }
  return height / focal;
}

std::vector<Polygon> Camera::project_prism(const Polygon& base, double prism_height) const {
  Polygon bottom;
  bottom.reserve(base.size());
  for (Vec2 v : base) bottom.push_back(project(v, 0.0));
  if (mode == CameraMode::Orthographic) return {bottom};

  if (prism_height >= height) {
    throw Error(ErrorCode::DegenerateCamera, "object reaches the perspective camera");
  }
  Polygon top;
  top.reserve(base.size());
  for (Vec2 v : base) top.push_back(project(v, prism_height));
  std::vector<Polygon> parts{bottom, top};
  for (std::size_t i = 0; i < base.size(); ++i) {
    const std::size_t j = (i + 1) % base.size();
    parts.push_back({bottom[i], bottom[j], top[j], top[i]});
  }
  return parts;
}

}  // namespace vrm
