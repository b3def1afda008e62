#include "vrm/image.hpp"

#include <algorithm>

namespace vrm {

ImageBuffer::ImageBuffer(int rows, int cols) : ImageBuffer(std::vector<ViewGeometry>{{rows, cols}}) {}

ImageBuffer::ImageBuffer(std::vector<ViewGeometry> views) : views_(std::move(views)) {
  std::size_t total = 0;
  pixel_offsets_.reserve(views_.size());
  for (const ViewGeometry& v : views_) {
    if (v.rows <= 0 || v.cols <= 0) {
      throw Error(ErrorCode::InvalidArgument, "image views need positive size");
    }
    pixel_offsets_.push_back(total);
    total += v.pixels();
  }
  data_.assign(3 * total, 0);
}

ImageBuffer ImageBuffer::filled(int rows, int cols, Rgb color) {
  ImageBuffer img(rows, cols);
  for (std::size_t i = 0; i < img.pixel_count(); ++i) img.set_pixel(i, color);
  return img;
}

std::size_t ImageBuffer::view_of_pixel(std::size_t pixel) const {
  const auto it = std::upper_bound(pixel_offsets_.begin(), pixel_offsets_.end(), pixel);
  return static_cast<std::size_t>(it - pixel_offsets_.begin()) - 1;
}

ImageBuffer ImageBuffer::view(std::size_t v) const {
  ImageBuffer out(views_.at(v).rows, views_.at(v).cols);
  const auto first = data_.begin() + static_cast<std::ptrdiff_t>(3 * pixel_offsets_[v]);
  std::copy(first, first + static_cast<std::ptrdiff_t>(out.size()), out.data_.begin());
  return out;
}

std::vector<std::uint32_t> support(const ImageBuffer& image) {
  std::vector<std::uint32_t> out;
  for (std::size_t i = 0; i < image.pixel_count(); ++i) {
    if (image.pixel_nonzero(i)) out.push_back(static_cast<std::uint32_t>(i));
  }
  return out;
}

SparseImage SparseImage::from(const ImageBuffer& image) {
  SparseImage s;
  s.views = image.views();
  for (std::size_t i = 0; i < image.pixel_count(); ++i) {
    if (image.pixel_nonzero(i)) {
      s.pixels.push_back(static_cast<std::uint32_t>(i));
      s.values.push_back(image.pixel(i));
    }
  }
  return s;
}

ImageBuffer SparseImage::to_dense() const {
  ImageBuffer img(views);
  for (std::size_t k = 0; k < pixels.size(); ++k) img.set_pixel(pixels[k], values[k]);
  return img;
}

OccupancyMask::OccupancyMask(const ImageBuffer& image) : views_(image.views()) {
  for (std::size_t v = 0; v < views_.size(); ++v) offsets_.push_back(image.view_pixel_offset(v));
  occupied_.resize(image.pixel_count());
  for (std::size_t i = 0; i < occupied_.size(); ++i) {
    occupied_[i] = image.pixel_nonzero(i) ? 1 : 0;
    count_ += occupied_[i];
  }
}

std::size_t OccupancyMask::view_of_pixel(std::size_t pixel) const {
  const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), pixel);
  return static_cast<std::size_t>(it - offsets_.begin()) - 1;
}

}  // namespace vrm
