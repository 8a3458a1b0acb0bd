/**
 * Copyright 2026 The amcs Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "amcs/png_io.hpp"

#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

#include "amcs/error.hpp"

namespace amcs::png {
namespace {

// libpng reports failures through longjmp; everything touched between
// setjmp and a possible longjmp is plain C state owned by this struct.
struct Session {
  std::FILE* fp = nullptr;
  png_structp png = nullptr;
  png_infop info = nullptr;
  unsigned char* pixels = nullptr;
  png_bytep* rows = nullptr;
  char message[256] = {0};
  int height = 0;
  int width = 0;
  int channels = 0;
  int bit_depth = 0;
};

void OnError(png_structp png, png_const_charp msg) {
  auto* s = static_cast<Session*>(png_get_error_ptr(png));
  std::snprintf(s->message, sizeof(s->message), "%s", msg);
  png_longjmp(png, 1);
}

void OnWarning(png_structp, png_const_charp) {}

bool DecodeInto(Session& s) {
  if (setjmp(png_jmpbuf(s.png))) return false;
  png_init_io(s.png, s.fp);
  png_read_info(s.png, s.info);

  const int color = png_get_color_type(s.png, s.info);
  const int depth = png_get_bit_depth(s.png, s.info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(s.png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8)
    png_set_expand_gray_1_2_4_to_8(s.png);
  if (depth == 16) png_set_swap(s.png);  // host little-endian samples
  png_set_interlace_handling(s.png);
  png_read_update_info(s.png, s.info);

  s.height = static_cast<int>(png_get_image_height(s.png, s.info));
  s.width = static_cast<int>(png_get_image_width(s.png, s.info));
  s.channels = png_get_channels(s.png, s.info);
  s.bit_depth = png_get_bit_depth(s.png, s.info);
  const std::size_t row_bytes = png_get_rowbytes(s.png, s.info);

  s.pixels = static_cast<unsigned char*>(
      std::malloc(row_bytes * static_cast<std::size_t>(s.height)));
  s.rows = static_cast<png_bytep*>(
      std::malloc(sizeof(png_bytep) * static_cast<std::size_t>(s.height)));
  if (s.pixels == nullptr || s.rows == nullptr) {
    std::snprintf(s.message, sizeof(s.message), "out of memory");
    return false;
  }
  for (int r = 0; r < s.height; ++r) s.rows[r] = s.pixels + row_bytes * r;
  png_read_image(s.png, s.rows);
  png_read_end(s.png, nullptr);
  return true;
}

bool EncodeFrom(Session& s, const void* samples) {
  if (setjmp(png_jmpbuf(s.png))) return false;
  png_init_io(s.png, s.fp);
  int color = PNG_COLOR_TYPE_GRAY;
  if (s.channels == 2) color = PNG_COLOR_TYPE_GRAY_ALPHA;
  if (s.channels == 3) color = PNG_COLOR_TYPE_RGB;
  if (s.channels == 4) color = PNG_COLOR_TYPE_RGB_ALPHA;
  png_set_IHDR(s.png, s.info, static_cast<png_uint_32>(s.width),
               static_cast<png_uint_32>(s.height), s.bit_depth, color,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(s.png, s.info);
  if (s.bit_depth == 16) png_set_swap(s.png);

  const std::size_t row_bytes = static_cast<std::size_t>(s.width) *
                                s.channels * (s.bit_depth / 8);
  s.rows = static_cast<png_bytep*>(
      std::malloc(sizeof(png_bytep) * static_cast<std::size_t>(s.height)));
  if (s.rows == nullptr) {
    std::snprintf(s.message, sizeof(s.message), "out of memory");
    return false;
  }
  auto* base = static_cast<unsigned char*>(const_cast<void*>(samples));
  for (int r = 0; r < s.height; ++r) s.rows[r] = base + row_bytes * r;
  png_write_image(s.png, s.rows);
  png_write_end(s.png, nullptr);
  return true;
}

void WriteImpl(const std::filesystem::path& path, int height, int width,
               int channels, int bit_depth, const void* samples) {
  if (channels < 1 || channels > 4 || height <= 0 || width <= 0)
    Throw(ErrorCode::kInvalidInput, "bad PNG geometry for " + path.string());
  Session s;
  s.height = height;
  s.width = width;
  s.channels = channels;
  s.bit_depth = bit_depth;
  s.fp = std::fopen(path.c_str(), "wb");
  if (s.fp == nullptr) Throw(ErrorCode::kIoError, "cannot write " + path.string());
  s.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &s, OnError, OnWarning);
  s.info = s.png ? png_create_info_struct(s.png) : nullptr;
  const bool ok = s.info != nullptr && EncodeFrom(s, samples);
  png_destroy_write_struct(&s.png, &s.info);
  std::free(s.rows);
  const bool closed = std::fclose(s.fp) == 0;
  if (!ok || !closed) {
    Throw(ErrorCode::kIoError,
          "PNG encode failed for " + path.string() + ": " + s.message);
  }
}

}  // namespace

Image Read(const std::filesystem::path& path) {
  Session s;
  s.fp = std::fopen(path.c_str(), "rb");
  if (s.fp == nullptr) Throw(ErrorCode::kNotFound, path.string());

  unsigned char sig[8] = {0};
  const bool is_png = std::fread(sig, 1, 8, s.fp) == 8 && png_sig_cmp(sig, 0, 8) == 0;
  if (!is_png) {
    std::fclose(s.fp);
    Throw(ErrorCode::kCorruptFrame, "not a PNG file: " + path.string());
  }
  s.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &s, OnError, OnWarning);
  s.info = s.png ? png_create_info_struct(s.png) : nullptr;
  bool ok = false;
  if (s.info != nullptr) {
    png_set_sig_bytes(s.png, 8);
    ok = DecodeInto(s);
  }
  png_destroy_read_struct(&s.png, &s.info, nullptr);
  std::fclose(s.fp);

  Image img;
  if (ok) {
    img.height = s.height;
    img.width = s.width;
    img.channels = s.channels;
    img.bit_depth = s.bit_depth;
    const std::size_t n = static_cast<std::size_t>(s.height) * s.width * s.channels;
    img.samples.resize(n);
    if (s.bit_depth == 16) {
      std::memcpy(img.samples.data(), s.pixels, n * sizeof(std::uint16_t));
    } else {
      for (std::size_t i = 0; i < n; ++i) img.samples[i] = s.pixels[i];
    }
  }
  std::free(s.pixels);
  std::free(s.rows);
  if (!ok) {
    Throw(ErrorCode::kCorruptFrame,
          "PNG decode failed for " + path.string() + ": " + s.message);
  }
  return img;
}

void Write8(const std::filesystem::path& path, int height, int width,
            int channels, std::span<const std::uint8_t> samples) {
  if (samples.size() != static_cast<std::size_t>(height) * width * channels)
    Throw(ErrorCode::kInvalidInput, "sample count mismatch for " + path.string());
  WriteImpl(path, height, width, channels, 8, samples.data());
}

void Write16(const std::filesystem::path& path, int height, int width,
             int channels, std::span<const std::uint16_t> samples) {
  if (samples.size() != static_cast<std::size_t>(height) * width * channels)
    Throw(ErrorCode::kInvalidInput, "sample count mismatch for " + path.string());
  WriteImpl(path, height, width, channels, 16, samples.data());
}

}  // namespace amcs::png
