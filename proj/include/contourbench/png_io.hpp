#pragma once

#include <png.h>

#include <cmath>
#include <cstdio>
#include <memory>
#include <string>

#include "contourbench/raster.hpp"

namespace contourbench {

struct PngError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Hard cap on either image dimension; larger files are rejected.
inline constexpr int kMaxPngDimension = 16384;

namespace detail {

struct FileCloser {
  void operator()(std::FILE* f) const { if (f) std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

struct GrayImage {
  int width = 0;
  int height = 0;
  int bit_depth = 0;                  // 8 or 16
  std::vector<uint16_t> pixels;       // row-major, native values
};

inline GrayImage read_gray_png(const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw PngError("cannot open PNG for reading: " + path);

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw PngError("png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw PngError("png_create_info_struct failed");
  }
  std::vector<png_bytep> row_ptrs;
  GrayImage img;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw PngError("malformed PNG: " + path);
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);

  const int color_type = png_get_color_type(png, info);
  int bit_depth = png_get_bit_depth(png, info);
  img.width = static_cast<int>(png_get_image_width(png, info));
  img.height = static_cast<int>(png_get_image_height(png, info));

  if (img.width > kMaxPngDimension || img.height > kMaxPngDimension) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw PngError("PNG dimensions exceed limit: " + path);
  }
  if (color_type != PNG_COLOR_TYPE_GRAY) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw PngError("expected single-channel grayscale PNG: " + path);
  }
  if (bit_depth < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
    bit_depth = 8;
  }
  png_set_interlace_handling(png);
  png_read_update_info(png, info);

  img.bit_depth = bit_depth;
  img.pixels.resize(static_cast<size_t>(img.width) * img.height);
  const size_t row_bytes = png_get_rowbytes(png, info);
  std::vector<uint8_t> raw(row_bytes * img.height);
  row_ptrs.resize(img.height);
  for (int y = 0; y < img.height; ++y) row_ptrs[y] = raw.data() + row_bytes * y;
  png_read_image(png, row_ptrs.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  for (int y = 0; y < img.height; ++y) {
    const uint8_t* row = raw.data() + row_bytes * y;
    for (int x = 0; x < img.width; ++x) {
      if (bit_depth == 8) {
        img.pixels[static_cast<size_t>(y) * img.width + x] = row[x];
      } else {
        // PNG stores 16-bit samples big-endian.
        img.pixels[static_cast<size_t>(y) * img.width + x] =
            static_cast<uint16_t>((row[2 * x] << 8) | row[2 * x + 1]);
      }
    }
  }
  return img;
}

inline void write_gray_png(const std::string& path, int width, int height, int bit_depth,
                           const std::vector<uint16_t>& pixels) {
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw PngError("cannot open PNG for writing: " + path);

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw PngError("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw PngError("png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw PngError("PNG write failed: " + path);
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, width, height, bit_depth, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);

  const size_t row_bytes = static_cast<size_t>(width) * (bit_depth / 8);
  std::vector<uint8_t> row(row_bytes);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const uint16_t v = pixels[static_cast<size_t>(y) * width + x];
      if (bit_depth == 8) {
        row[x] = static_cast<uint8_t>(v);
      } else {
        row[2 * x] = static_cast<uint8_t>(v >> 8);
        row[2 * x + 1] = static_cast<uint8_t>(v & 0xFF);
      }
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, info);
  png_destroy_write_struct(&png, &info);
}

}  // namespace detail

// Masks are raw 8-bit class indices.
inline SegMask load_mask_png(const std::string& path, std::optional<uint8_t> ignore_index = {}) {
  auto img = detail::read_gray_png(path);
  if (img.bit_depth != 8) throw PngError("mask PNG must be 8-bit: " + path);
  SegMask m;
  m.labels = Grid<uint8_t>(img.width, img.height);
  for (size_t i = 0; i < img.pixels.size(); ++i)
    m.labels.data[i] = static_cast<uint8_t>(img.pixels[i]);
  m.ignore_index = ignore_index;
  return m;
}

// Contours binarize on load: any nonzero pixel becomes 1.
inline ContourMap load_contour_png(const std::string& path) {
  auto img = detail::read_gray_png(path);
  if (img.bit_depth != 8) throw PngError("contour PNG must be 8-bit: " + path);
  ContourMap c(img.width, img.height);
  for (size_t i = 0; i < img.pixels.size(); ++i)
    c.bits.data[i] = img.pixels[i] ? 1 : 0;
  return c;
}

// Probability maps accept 8- or 16-bit grayscale, scaled linearly to [0,1].
inline ProbMap load_prob_png(const std::string& path) {
  auto img = detail::read_gray_png(path);
  const float denom = (img.bit_depth == 8) ? 255.0f : 65535.0f;
  ProbMap p(img.width, img.height);
  for (size_t i = 0; i < img.pixels.size(); ++i)
    p.probs.data[i] = static_cast<float>(img.pixels[i]) / denom;
  return p;
}

// Contours are written as 8-bit {0,255}.
inline void save_png(const ContourMap& c, const std::string& path) {
  std::vector<uint16_t> px(c.bits.size());
  for (size_t i = 0; i < px.size(); ++i) px[i] = c.bits.data[i] ? 255 : 0;
  detail::write_gray_png(path, c.width(), c.height(), 8, px);
}

// Probability maps are written as 16-bit round(p * 65535); the round trip is
// exact up to the quantization step 1/65535.
inline void save_png(const ProbMap& p, const std::string& path) {
  std::vector<uint16_t> px(p.probs.size());
  for (size_t i = 0; i < px.size(); ++i)
    px[i] = static_cast<uint16_t>(std::lround(static_cast<double>(p.probs.data[i]) * 65535.0));
  detail::write_gray_png(path, p.width(), p.height(), 16, px);
}

inline void save_mask_png(const SegMask& m, const std::string& path) {
  std::vector<uint16_t> px(m.labels.size());
  for (size_t i = 0; i < px.size(); ++i) px[i] = m.labels.data[i];
  detail::write_gray_png(path, m.width(), m.height(), 8, px);
}

}  // namespace contourbench
