//  Copyright 2026 The starenh Authors
//
//  Licensed under the Apache License, Version 2.0 (the "License");
//  you may not use this file except in compliance with the License.
//  You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
//  Unless required by applicable law or agreed to in writing, software
//  distributed under the License is distributed on an "AS IS" BASIS,
//  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//  See the License for the specific language governing permissions and
//  limitations under the License.

#include "starenh/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace starenh {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::kIo, "cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

double max_value(int depth) { return depth == 16 ? 65535.0 : 255.0; }

unsigned quantize(float v, double maxv) {
  const double c = std::clamp(static_cast<double>(v), 0.0, 1.0);
  return static_cast<unsigned>(std::lround(c * maxv));
}

// --- PNG -------------------------------------------------------------------

struct PngReader {
  const std::string& bytes;
  size_t pos = 8;
};

void png_error_fn(png_structp png, png_const_charp msg) {
  auto* text = static_cast<std::string*>(png_get_error_ptr(png));
  *text = msg;
  png_longjmp(png, 1);
}

void png_warning_fn(png_structp, png_const_charp) {}

void png_read_fn(png_structp png, png_bytep out, png_size_t n) {
  auto* r = static_cast<PngReader*>(png_get_io_ptr(png));
  if (r->bytes.size() - r->pos < n) png_error(png, "truncated PNG data");
  std::memcpy(out, r->bytes.data() + r->pos, n);
  r->pos += n;
}

void png_write_fn(png_structp png, png_bytep data, png_size_t n) {
  static_cast<std::string*>(png_get_io_ptr(png))->append(reinterpret_cast<const char*>(data), n);
}

void png_flush_fn(png_structp) {}

Image decode_png(const std::string& bytes) {
  std::string err;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, png_error_fn, png_warning_fn);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw Error(ErrorKind::kIo, "out of memory decoding PNG");
  }
  PngReader reader{bytes};
  Image img;
  std::vector<unsigned char> raw;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw_invalid("cannot decode PNG: " + err);
  }
  png_set_read_fn(png, &reader, png_read_fn);
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);
  const int color = png_get_color_type(png, info);
  int depth = png_get_bit_depth(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_gray_to_rgb(png);
  png_set_strip_alpha(png);
  if (depth == 16) png_set_swap(png);
  png_read_update_info(png, info);
  depth = png_get_bit_depth(png, info);
  const int h = static_cast<int>(png_get_image_height(png, info));
  const int w = static_cast<int>(png_get_image_width(png, info));
  const size_t stride = png_get_rowbytes(png, info);
  if (png_get_channels(png, info) != 3 || (depth != 8 && depth != 16)) png_error(png, "unsupported PNG layout");
  raw.resize(stride * static_cast<size_t>(h));
  rows.resize(static_cast<size_t>(h));
  for (int y = 0; y < h; ++y) rows[static_cast<size_t>(y)] = raw.data() + stride * static_cast<size_t>(y);
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  img = Image(h, w, depth);
  const float scale = static_cast<float>(1.0 / max_value(depth));
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c) {
        const size_t i = static_cast<size_t>(y) * stride + (static_cast<size_t>(x) * 3 + static_cast<size_t>(c)) * (depth / 8);
        unsigned v = raw[i];
        if (depth == 16) {
          std::uint16_t s;
          std::memcpy(&s, raw.data() + i, 2);
          v = s;
        }
        img.at(c, y, x) = static_cast<float>(v) * scale;
      }
  return img;
}

std::string encode_png(const Image& img) {
  const int depth = img.bit_depth == 16 ? 16 : 8;
  const double maxv = max_value(depth);
  const size_t stride = static_cast<size_t>(img.width) * 3 * static_cast<size_t>(depth / 8);
  std::vector<unsigned char> raw(stride * static_cast<size_t>(img.height));
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      for (int c = 0; c < 3; ++c) {
        const unsigned v = quantize(img.at(c, y, x), maxv);
        const size_t i = static_cast<size_t>(y) * stride + (static_cast<size_t>(x) * 3 + static_cast<size_t>(c)) * (depth / 8);
        if (depth == 16) {
          raw[i] = static_cast<unsigned char>(v >> 8);  // PNG is big-endian
          raw[i + 1] = static_cast<unsigned char>(v & 0xff);
        } else {
          raw[i] = static_cast<unsigned char>(v);
        }
      }

  std::string err, out;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, png_error_fn, png_warning_fn);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw Error(ErrorKind::kIo, "out of memory encoding PNG");
  }
  std::vector<png_bytep> rows(static_cast<size_t>(img.height));
  for (int y = 0; y < img.height; ++y) rows[static_cast<size_t>(y)] = raw.data() + stride * static_cast<size_t>(y);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorKind::kIo, "cannot encode PNG: " + err);
  }
  png_set_write_fn(png, &out, png_write_fn, png_flush_fn);
  png_set_IHDR(png, info, static_cast<png_uint_32>(img.width), static_cast<png_uint_32>(img.height), depth,
               PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_set_compression_level(png, 3);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

// --- PPM -------------------------------------------------------------------

Image decode_ppm(const std::string& bytes) {
  size_t pos = 2;
  auto next_int = [&]() {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
    long v = 0;
    const size_t start = pos;
    while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) v = v * 10 + (bytes[pos++] - '0');
    require(pos > start && v <= 1'000'000, "malformed PPM header");
    return static_cast<int>(v);
  };
  const int w = next_int(), h = next_int(), maxv = next_int();
  require(maxv == 255 || maxv == 65535, "PPM maxval must be 255 or 65535");
  require(pos < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[pos])), "malformed PPM header");
  ++pos;
  const int depth = maxv == 255 ? 8 : 16;
  const size_t bps = static_cast<size_t>(depth / 8);
  require(w >= 1 && h >= 1, "PPM dimensions must be positive");
  require(bytes.size() - pos >= static_cast<size_t>(w) * static_cast<size_t>(h) * 3 * bps, "truncated PPM data");
  Image img(h, w, depth);
  const float scale = static_cast<float>(1.0 / maxv);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c) {
        unsigned v = static_cast<unsigned char>(bytes[pos]);
        if (depth == 16) v = (v << 8) | static_cast<unsigned char>(bytes[pos + 1]);
        pos += bps;
        img.at(c, y, x) = static_cast<float>(v) * scale;
      }
  return img;
}

std::string encode_ppm(const Image& img) {
  const int depth = img.bit_depth == 16 ? 16 : 8;
  const double maxv = max_value(depth);
  std::string out = "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n" +
                    std::to_string(static_cast<int>(maxv)) + "\n";
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      for (int c = 0; c < 3; ++c) {
        const unsigned v = quantize(img.at(c, y, x), maxv);
        if (depth == 16) out += static_cast<char>(v >> 8);
        out += static_cast<char>(v & 0xff);
      }
  return out;
}

std::string lower_extension(const std::string& path) {
  const size_t dot = path.find_last_of('.');
  std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
  for (char& ch : ext) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return ext;
}

}  // namespace

Image decode_image(const std::string& bytes) {
  if (bytes.size() >= 8 && png_sig_cmp(reinterpret_cast<png_const_bytep>(bytes.data()), 0, 8) == 0)
    return decode_png(bytes);
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '6') return decode_ppm(bytes);
  throw_invalid("unrecognized image format (expected PNG or binary PPM)");
}

std::string encode_image(const Image& image, ImageFormat format) {
  require(!image.data.empty(), "cannot encode an empty image");
  return format == ImageFormat::kPng ? encode_png(image) : encode_ppm(image);
}

Image read_image(const std::string& path) {
  try {
    return decode_image(read_file(path));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kIo) throw;
    throw Error(e.kind(), path + ": " + e.what());
  }
}

void write_image(const std::string& path, const Image& image) {
  const std::string ext = lower_extension(path);
  ImageFormat fmt;
  if (ext == "png") {
    fmt = ImageFormat::kPng;
  } else if (ext == "ppm" || ext == "pnm") {
    fmt = ImageFormat::kPpm;
  } else {
    throw_invalid("unsupported output extension '." + ext + "' (use .png, .ppm or .pnm)");
  }
  const std::string bytes = encode_image(image, fmt);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::kIo, "cannot write " + path);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error(ErrorKind::kIo, "failed writing " + path);
}

}  // namespace starenh
