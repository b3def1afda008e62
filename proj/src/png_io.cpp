#include <png.h>

#include <cstring>

#include "vrm/image.hpp"

namespace vrm {

void write_png(const std::filesystem::path& path, const ImageBuffer& image) {
  if (image.view_count() != 1) {
    throw Error(ErrorCode::InvalidArgument, "write_png expects a single-view image");
  }
  png_image png;
  std::memset(&png, 0, sizeof png);
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(image.cols());
  png.height = static_cast<png_uint_32>(image.rows());
  png.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&png, path.string().c_str(), 0, image.data().data(), 0, nullptr)) {
    throw Error(ErrorCode::Io, "cannot write PNG " + path.string() + ": " + png.message);
  }
}

ImageBuffer read_png(const std::filesystem::path& path) {
  png_image png;
  std::memset(&png, 0, sizeof png);
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&png, path.string().c_str())) {
    throw Error(ErrorCode::Io, "cannot read PNG " + path.string() + ": " + png.message);
  }
  png.format = PNG_FORMAT_RGB;
  ImageBuffer image(static_cast<int>(png.height), static_cast<int>(png.width));
  if (!png_image_finish_read(&png, nullptr, image.data().data(), 0, nullptr)) {
    png_image_free(&png);
    throw Error(ErrorCode::Io, "cannot decode PNG " + path.string() + ": " + png.message);
  }
  return image;
}

}  // namespace vrm
