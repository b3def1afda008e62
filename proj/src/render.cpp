#include "vrm/render.hpp"

#include <algorithm>

namespace vrm {

namespace {

void check_same_geometry(const ImageBuffer& a, const ImageBuffer& b) {
  if (!a.same_geometry(b)) throw Error(ErrorCode::GeometryMismatch, "raster geometry mismatch");
}

void paint(ImageBuffer& image, std::size_t pixel_offset, const std::vector<std::uint32_t>& pixels,
           Rgb color) {
  for (std::uint32_t p : pixels) image.set_pixel(pixel_offset + p, color);
}

std::vector<std::uint32_t> cover_prism(const Polygon& base, double height, const Camera& camera) {
  std::vector<std::uint32_t> pixels;
  const ViewGeometry view{camera.rows, camera.cols};
  for (const Polygon& part : camera.project_prism(base, height)) {
    rasterize_polygon(part, view, pixels);
  }
  if (camera.mode == CameraMode::Perspective) {
    std::sort(pixels.begin(), pixels.end());
    pixels.erase(std::unique(pixels.begin(), pixels.end()), pixels.end());
  }
  return pixels;
}

void paint_obstacles(ImageBuffer& image, std::size_t offset, const ObstacleSet& obstacles,
                     const Camera& camera) {
  for (const Obstacle& obs : obstacles) {
    paint(image, offset, cover_prism(obs.polygon, obs.height, camera), obs.color);
  }
}

void paint_robot(ImageBuffer& image, std::size_t offset, const Configuration& q,
                 const RobotSpec& spec, const Camera& camera) {
  const std::vector<Rgb> colors = link_colors(spec);
  const double height = robot_height(spec);
  for (const LinkPolygon& link : forward_kinematics(q, spec)) {
    paint(image, offset, cover_prism(link.vertices, height, camera), colors[link.link]);
  }
}

std::vector<ViewGeometry> scene_views(const Scene& scene) {
  std::vector<ViewGeometry> views;
  for (const Camera& c : scene.cameras) views.push_back({c.rows, c.cols});
  return views;
}

}  // namespace

void rasterize_polygon(const Polygon& pixel_poly, ViewGeometry view,
                       std::vector<std::uint32_t>& out) {
  if (pixel_poly.size() < 3) return;
  double ymin = pixel_poly.front().y;
  double ymax = ymin;
  for (Vec2 v : pixel_poly) {
    ymin = std::min(ymin, v.y);
    ymax = std::max(ymax, v.y);
  }
  const int r0 = std::max(0, static_cast<int>(std::ceil(ymin - 0.5)));
  const int r1 = std::min(view.rows - 1, static_cast<int>(std::ceil(ymax - 0.5)) - 1);
  std::vector<double> crossings;
  const std::size_t n = pixel_poly.size();
  for (int r = r0; r <= r1; ++r) {
    const double y = r + 0.5;
    crossings.clear();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 a = pixel_poly[i];
      const Vec2 b = pixel_poly[(i + 1) % n];
      if ((a.y <= y && y < b.y) || (b.y <= y && y < a.y)) {
        crossings.push_back(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
      }
    }
    std::sort(crossings.begin(), crossings.end());
    for (std::size_t k = 0; k + 1 < crossings.size(); k += 2) {
      const int c0 = std::max(0, static_cast<int>(std::ceil(crossings[k] - 0.5)));
      const int c1 = std::min(view.cols, static_cast<int>(std::ceil(crossings[k + 1] - 0.5)));
      for (int c = c0; c < c1; ++c) {
        out.push_back(static_cast<std::uint32_t>(r * view.cols + c));
      }
    }
  }
}

void rasterize_line(Vec2 a, Vec2 b, ViewGeometry view, std::vector<std::uint32_t>& out) {
  int x0 = static_cast<int>(std::floor(a.x));
  int y0 = static_cast<int>(std::floor(a.y));
  const int x1 = static_cast<int>(std::floor(b.x));
  const int y1 = static_cast<int>(std::floor(b.y));
  const int dx = std::abs(x1 - x0);
  const int dy = -std::abs(y1 - y0);
  const int sx = x0 < x1 ? 1 : -1;
  const int sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  while (true) {
    if (x0 >= 0 && x0 < view.cols && y0 >= 0 && y0 < view.rows) {
      out.push_back(static_cast<std::uint32_t>(y0 * view.cols + x0));
    }
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

RobotImage render(const Configuration& q, const RobotSpec& spec, const ObstacleSet& obstacles,
                  const Camera& camera, const ImageBuffer& background) {
  camera.validate();
  if (background.view_count() != 1 || background.rows() != camera.rows ||
      background.cols() != camera.cols) {
    throw Error(ErrorCode::GeometryMismatch, "background does not match the camera raster");
  }
  RobotImage out{background, q};
  paint_obstacles(out.pixels, 0, obstacles, camera);
  paint_robot(out.pixels, 0, q, spec, camera);
  return out;
}

RobotImage render_robot(const Configuration& q, const Scene& scene) {
  RobotImage out{render_background(scene), q};
  for (std::size_t v = 0; v < scene.cameras.size(); ++v) {
    paint_robot(out.pixels, out.pixels.view_pixel_offset(v), q, scene.robot, scene.cameras[v]);
  }
  return out;
}

ImageBuffer render_background(const Scene& scene) {
  ImageBuffer bg(scene_views(scene));
  for (std::size_t i = 0; i < bg.pixel_count(); ++i) bg.set_pixel(i, scene.background);
  return bg;
}

ImageBuffer render_obstacle_scene(const Scene& scene) {
  ImageBuffer img = render_background(scene);
  for (std::size_t v = 0; v < scene.cameras.size(); ++v) {
    paint_obstacles(img, img.view_pixel_offset(v), scene.obstacles, scene.cameras[v]);
  }
  return img;
}

ObstacleImage obstacle_image(const Scene& scene) {
  const RobotImage obstacles{render_obstacle_scene(scene), std::nullopt};
  return ObstacleImage{background_subtract(obstacles, render_background(scene)).pixels};
}

std::vector<std::uint32_t> robot_coverage(const Configuration& q, const Scene& scene) {
  std::vector<std::uint32_t> pixels;
  const double height = robot_height(scene.robot);
  const std::vector<LinkPolygon> links = forward_kinematics(q, scene.robot);
  std::uint32_t offset = 0;
  for (const Camera& cam : scene.cameras) {
    const std::size_t start = pixels.size();
    const ViewGeometry view{cam.rows, cam.cols};
    for (const LinkPolygon& link : links) {
      for (const Polygon& part : cam.project_prism(link.vertices, height)) {
        rasterize_polygon(part, view, pixels);
      }
    }
    for (std::size_t i = start; i < pixels.size(); ++i) pixels[i] += offset;
    offset += static_cast<std::uint32_t>(view.pixels());
  }
  std::sort(pixels.begin(), pixels.end());
  pixels.erase(std::unique(pixels.begin(), pixels.end()), pixels.end());
  return pixels;
}

ForegroundImage background_subtract(const RobotImage& x, const ImageBuffer& background,
                                    double threshold) {
  check_same_geometry(x.pixels, background);
  ForegroundImage fg{ImageBuffer(x.pixels.views())};
  const auto src = x.pixels.data();
  const auto bg = background.data();
  auto dst = fg.pixels.data();
  for (std::size_t i = 0; i < x.pixels.pixel_count(); ++i) {
    int diff = 0;
    for (int ch = 0; ch < 3; ++ch) {
      diff = std::max(diff, std::abs(int{src[3 * i + ch]} - int{bg[3 * i + ch]}));
    }
    if (diff / 255.0 > threshold) {
      for (int ch = 0; ch < 3; ++ch) dst[3 * i + ch] = src[3 * i + ch];
    }
  }
  return fg;
}

std::size_t overlap_count(const ImageBuffer& fg, const ImageBuffer& b) {
  check_same_geometry(fg, b);
  std::size_t count = 0;
  for (std::size_t i = 0; i < fg.pixel_count(); ++i) {
    if (fg.pixel_nonzero(i) && b.pixel_nonzero(i)) ++count;
  }
  return count;
}

bool hadamard_overlap(const ForegroundImage& fg, const ObstacleImage& b) {
  check_same_geometry(fg.pixels, b.pixels);
  for (std::size_t i = 0; i < fg.pixels.pixel_count(); ++i) {
    if (fg.pixels.pixel_nonzero(i) && b.pixels.pixel_nonzero(i)) return true;
  }
  return false;
}

ForegroundImage superimpose(std::span<const ForegroundImage> images) {
  if (images.empty()) throw Error(ErrorCode::EmptyInput, "superimpose needs at least one image");
  ForegroundImage out = images.front();
  auto dst = out.pixels.data();
  for (const ForegroundImage& img : images.subspan(1)) {
    check_same_geometry(out.pixels, img.pixels);
    const auto src = img.pixels.data();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = std::max(dst[i], src[i]);
  }
  return out;
}

RobotImage stitch_views(std::span<const RobotImage> views) {
  if (views.empty()) throw Error(ErrorCode::EmptyInput, "stitch_views needs at least one view");
  std::vector<ViewGeometry> geometry;
  for (const RobotImage& v : views) {
    geometry.insert(geometry.end(), v.pixels.views().begin(), v.pixels.views().end());
  }
  RobotImage out{ImageBuffer(geometry), views.front().source};
  auto dst = out.pixels.data();
  std::size_t pos = 0;
  for (const RobotImage& v : views) {
    std::copy(v.pixels.data().begin(), v.pixels.data().end(), dst.begin() + static_cast<std::ptrdiff_t>(pos));
    pos += v.pixels.size();
  }
  return out;
}

bool multi_view_free(std::span<const ForegroundImage> fg_views,
                     std::span<const ObstacleImage> b_views) {
  if (fg_views.empty()) throw Error(ErrorCode::EmptyInput, "multi_view_free needs at least one view");
  if (fg_views.size() != b_views.size()) {
    throw Error(ErrorCode::GeometryMismatch, "view counts differ");
  }
  bool free = false;
  for (std::size_t v = 0; v < fg_views.size(); ++v) {
    if (!hadamard_overlap(fg_views[v], b_views[v])) free = true;
  }
  return free;
}

bool support_collides(std::span<const std::uint32_t> pixels, const OccupancyMask& obstacle) {
  const std::size_t views = obstacle.view_count();
  if (views == 1) {
    for (std::uint32_t p : pixels) {
      if (obstacle.occupied(p)) return true;
    }
    return false;
  }
  std::vector<bool> hit(views, false);
  for (std::uint32_t p : pixels) {
    if (obstacle.occupied(p)) hit[obstacle.view_of_pixel(p)] = true;
  }
  return std::all_of(hit.begin(), hit.end(), [](bool h) { return h; });
}

std::size_t support_overlap(std::span<const std::uint32_t> pixels, const OccupancyMask& obstacle) {
  std::size_t count = 0;
  for (std::uint32_t p : pixels) count += obstacle.occupied(p) ? 1 : 0;
  return count;
}

}  // namespace vrm
