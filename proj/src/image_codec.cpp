#include "semground/image_codec.hpp"

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <vector>

#include <png.h>

#include "semground/error.hpp"

namespace semground {

namespace {

void append_bytes(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<std::string*>(png_get_io_ptr(png));
  out->append(reinterpret_cast<const char*>(data), length);
}

void no_flush(png_structp) {}

}  // namespace

std::string encode_png_grayscale(const InputSample& image) {
  if (image.kind != SampleKind::ImageGrayscale) {
    throw Error(ErrorCode::InvalidArgument, "PNG encoding needs a grayscale image");
  }
  const auto width = static_cast<png_uint_32>(image.width());
  const auto height = static_cast<png_uint_32>(image.height());
  std::vector<png_byte> pixels(image.values.size());
  std::transform(image.values.begin(), image.values.end(), pixels.begin(), [](double v) {
    return static_cast<png_byte>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
  });

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw Error(ErrorCode::Io, "png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw Error(ErrorCode::Io, "png_create_info_struct failed");
  }
  std::string out;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorCode::Io, "PNG encoding failed");
  }
  png_set_write_fn(png, &out, append_bytes, no_flush);
  png_set_IHDR(png, info, width, height, 8, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (png_uint_32 row = 0; row < height; ++row) {
    png_write_row(png, pixels.data() + static_cast<std::size_t>(row) * width);
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

}  // namespace semground
