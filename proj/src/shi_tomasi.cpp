#include <algorithm>
#include <numeric>

#include "vrm/metrics.hpp"

namespace vrm {

namespace {

struct Crop {
  int r0 = 0, c0 = 0, rows = 0, cols = 0;
};

// Bounding box of the non-zero pixels grown by `margin`; everything outside is
// zero, so responses computed on the crop equal those on the full image.
Crop nonzero_crop(const GrayImage& img, int margin) {
  int rmin = img.rows, rmax = -1, cmin = img.cols, cmax = -1;
  for (int r = 0; r < img.rows; ++r) {
    for (int c = 0; c < img.cols; ++c) {
      if (img.at(r, c) != 0.0f) {
        rmin = std::min(rmin, r);
        rmax = std::max(rmax, r);
        cmin = std::min(cmin, c);
        cmax = std::max(cmax, c);
      }
    }
  }
  if (rmax < 0) return {};
  Crop crop;
  crop.r0 = std::max(0, rmin - margin);
  crop.c0 = std::max(0, cmin - margin);
  crop.rows = std::min(img.rows - 1, rmax + margin) - crop.r0 + 1;
  crop.cols = std::min(img.cols - 1, cmax + margin) - crop.c0 + 1;
  return crop;
}

GrayImage sub_image(const GrayImage& img, const Crop& crop) {
  GrayImage out{crop.rows, crop.cols, std::vector<float>(static_cast<std::size_t>(crop.rows) * crop.cols)};
  for (int r = 0; r < crop.rows; ++r) {
    for (int c = 0; c < crop.cols; ++c) {
      out.values[static_cast<std::size_t>(r) * crop.cols + c] = img.at(crop.r0 + r, crop.c0 + c);
    }
  }
  return out;
}

}  // namespace

GrayImage to_gray(const ImageBuffer& single_view) {
  GrayImage g{single_view.rows(), single_view.cols(), std::vector<float>(single_view.pixel_count())};
  const auto data = single_view.data();
  for (std::size_t i = 0; i < g.values.size(); ++i) {
    g.values[i] = static_cast<float>((int{data[3 * i]} + data[3 * i + 1] + data[3 * i + 2]) / (3.0 * 255.0));
  }
  return g;
}

GrayImage color_mask(const ImageBuffer& single_view, Rgb color) {
  GrayImage g{single_view.rows(), single_view.cols(), std::vector<float>(single_view.pixel_count())};
  for (std::size_t i = 0; i < g.values.size(); ++i) {
    g.values[i] = single_view.pixel(i) == color ? 1.0f : 0.0f;
  }
  return g;
}

std::vector<double> min_eigenvalue_map(const GrayImage& image, int window) {
  const int rows = image.rows;
  const int cols = image.cols;
  const auto px = [&](int r, int c) {
    return static_cast<double>(image.at(std::clamp(r, 0, rows - 1), std::clamp(c, 0, cols - 1)));
  };
  const std::size_t n = static_cast<std::size_t>(rows) * cols;
  std::vector<double> gxx(n), gxy(n), gyy(n);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const double gx = (px(r - 1, c + 1) + 2 * px(r, c + 1) + px(r + 1, c + 1)) -
                        (px(r - 1, c - 1) + 2 * px(r, c - 1) + px(r + 1, c - 1));
      const double gy = (px(r + 1, c - 1) + 2 * px(r + 1, c) + px(r + 1, c + 1)) -
                        (px(r - 1, c - 1) + 2 * px(r - 1, c) + px(r - 1, c + 1));
      const std::size_t i = static_cast<std::size_t>(r) * cols + c;
      gxx[i] = gx * gx;
      gxy[i] = gx * gy;
      gyy[i] = gy * gy;
    }
  }
  const int half = window / 2;
  std::vector<double> response(n, 0.0);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      double a = 0.0, b = 0.0, d = 0.0;
      for (int dr = -half; dr <= half; ++dr) {
        for (int dc = -half; dc <= half; ++dc) {
          const std::size_t j = static_cast<std::size_t>(std::clamp(r + dr, 0, rows - 1)) * cols +
                                static_cast<std::size_t>(std::clamp(c + dc, 0, cols - 1));
          a += gxx[j];
          b += gxy[j];
          d += gyy[j];
        }
      }
      const double mean = 0.5 * (a + d);
      const double dev = std::sqrt(0.25 * (a - d) * (a - d) + b * b);
      response[static_cast<std::size_t>(r) * cols + c] = std::max(0.0, mean - dev);
    }
  }
  return response;
}

std::vector<Vec2> shi_tomasi(const GrayImage& image, const ShiTomasiParams& params) {
  if (image.rows == 0 || image.cols == 0) return {};
  const Crop crop = nonzero_crop(image, params.window / 2 + 2);
  if (crop.rows == 0) return {};
  const GrayImage local = sub_image(image, crop);
  const std::vector<double> response = min_eigenvalue_map(local, params.window);

  const double strongest = *std::max_element(response.begin(), response.end());
  if (!(strongest > 0.0)) return {};
  const double threshold = params.quality * strongest;

  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < response.size(); ++i) {
    if (response[i] > threshold) candidates.push_back(i);
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](std::size_t a, std::size_t b) { return response[a] > response[b]; });

  std::vector<Vec2> accepted;
  const double min_sq = params.min_distance * params.min_distance;
  for (std::size_t idx : candidates) {
    if (accepted.size() >= params.max_features) break;
    const Vec2 p{static_cast<double>(crop.c0 + static_cast<int>(idx % local.cols)),
                 static_cast<double>(crop.r0 + static_cast<int>(idx / local.cols))};
    const bool clear = std::none_of(accepted.begin(), accepted.end(), [&](Vec2 q) {
      const Vec2 d = p - q;
      return d.x * d.x + d.y * d.y < min_sq;
    });
    if (clear) accepted.push_back(p);
  }
  return accepted;
}

std::vector<Vec2> shi_tomasi(const ForegroundImage& link_fg, const ShiTomasiParams& params) {
  if (link_fg.pixels.view_count() != 1) {
    throw Error(ErrorCode::InvalidArgument, "shi_tomasi expects a single-view foreground");
  }
  return shi_tomasi(to_gray(link_fg.pixels), params);
}

LinkFeatureSet link_features(const ImageBuffer& single_view, std::span<const Rgb> link_colors,
                             const ShiTomasiParams& params) {
  LinkFeatureSet out;
  out.links.reserve(link_colors.size());
  for (Rgb color : link_colors) out.links.push_back(shi_tomasi(color_mask(single_view, color), params));
  return out;
}

}  // namespace vrm
