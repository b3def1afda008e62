#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "vrm/common.hpp"
#include "vrm/robot.hpp"

namespace vrm {

struct ViewGeometry {
  int rows = 0;
  int cols = 0;

  std::size_t pixels() const { return static_cast<std::size_t>(rows) * cols; }
  friend bool operator==(ViewGeometry, ViewGeometry) = default;
};

/// 8-bit RGB raster, possibly several camera views stitched into one vector.
/// The flat layout is view-major, then row-major, then channel, so a single
/// view is exactly the r x c x 3 image flattened (p = 3rc). Intensities are
/// byte / 255.
class ImageBuffer {
 public:
  ImageBuffer() = default;
  ImageBuffer(int rows, int cols);
  explicit ImageBuffer(std::vector<ViewGeometry> views);

  static ImageBuffer filled(int rows, int cols, Rgb color);

  const std::vector<ViewGeometry>& views() const { return views_; }
  std::size_t view_count() const { return views_.size(); }
  /// First global pixel index of a view.
  std::size_t view_pixel_offset(std::size_t view) const { return pixel_offsets_[view]; }
  /// View owning a global pixel index.
  std::size_t view_of_pixel(std::size_t pixel) const;

  int rows() const { return views_.empty() ? 0 : views_.front().rows; }
  int cols() const { return views_.empty() ? 0 : views_.front().cols; }

  /// Vector length p.
  std::size_t size() const { return data_.size(); }
  std::size_t pixel_count() const { return data_.size() / 3; }

  std::span<std::uint8_t> data() { return data_; }
  std::span<const std::uint8_t> data() const { return data_; }

  Rgb pixel(std::size_t index) const {
    return {data_[3 * index], data_[3 * index + 1], data_[3 * index + 2]};
  }
  void set_pixel(std::size_t index, Rgb c) {
    data_[3 * index] = c.r;
    data_[3 * index + 1] = c.g;
    data_[3 * index + 2] = c.b;
  }
  bool pixel_nonzero(std::size_t index) const {
    return (data_[3 * index] | data_[3 * index + 1] | data_[3 * index + 2]) != 0;
  }
  double intensity(std::size_t i) const { return data_[i] / 255.0; }

  bool same_geometry(const ImageBuffer& other) const { return views_ == other.views_; }
  /// Copy of one view as a standalone single-view image.
  ImageBuffer view(std::size_t v) const;

  friend bool operator==(const ImageBuffer& a, const ImageBuffer& b) {
    return a.views_ == b.views_ && a.data_ == b.data_;
  }

 private:
  std::vector<ViewGeometry> views_;
  std::vector<std::size_t> pixel_offsets_;
  std::vector<std::uint8_t> data_;
};

/// A rendered pose. `source` is diagnostics only; planning code never reads it.
struct RobotImage {
  ImageBuffer pixels;
  std::optional<Configuration> source;
};

/// Non-zero exactly on robot pixels.
struct ForegroundImage {
  ImageBuffer pixels;
};

/// Non-zero exactly on obstacle pixels.
struct ObstacleImage {
  ImageBuffer pixels;
};

/// Pixel indices (ascending) that are non-zero.
std::vector<std::uint32_t> support(const ImageBuffer& image);

/// Sparse copy of a mostly-zero raster: ascending pixel indices and their RGB.
struct SparseImage {
  std::vector<ViewGeometry> views;
  std::vector<std::uint32_t> pixels;
  std::vector<Rgb> values;

  static SparseImage from(const ImageBuffer& image);
  ImageBuffer to_dense() const;
  std::size_t nnz() const { return pixels.size(); }
};

/// Dense per-pixel occupancy with per-view bookkeeping, for O(1) overlap lookups.
class OccupancyMask {
 public:
  OccupancyMask() = default;
  explicit OccupancyMask(const ImageBuffer& image);

  const std::vector<ViewGeometry>& views() const { return views_; }
  std::size_t view_count() const { return views_.size(); }
  std::size_t pixel_count() const { return occupied_.size(); }
  bool occupied(std::size_t pixel) const { return occupied_[pixel] != 0; }
  std::size_t view_of_pixel(std::size_t pixel) const;
  std::size_t view_pixel_offset(std::size_t view) const { return offsets_[view]; }
  bool empty() const { return count_ == 0; }
  std::size_t count() const { return count_; }

 private:
  std::vector<ViewGeometry> views_;
  std::vector<std::size_t> offsets_;
  std::vector<std::uint8_t> occupied_;
  std::size_t count_ = 0;
};

void write_png(const std::filesystem::path& path, const ImageBuffer& image);
/// Reads an 8-bit RGB (or RGBA/gray, converted) PNG as a single-view image.
ImageBuffer read_png(const std::filesystem::path& path);

}  // namespace vrm
