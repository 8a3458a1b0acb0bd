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
#ifndef AMCS_RASTER_HPP_
#define AMCS_RASTER_HPP_

#include <cassert>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace amcs {

/// Dense row-major raster with interleaved channels.
template <typename T>
class Raster {
 public:
  Raster() = default;
  Raster(int height, int width, int channels = 1, T fill = T{})
      : height_(height),
        width_(width),
        channels_(channels),
        data_(static_cast<std::size_t>(height) * width * channels, fill) {
    assert(height >= 0 && width >= 0 && channels > 0);
  }

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  int channels() const noexcept { return channels_; }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(height_) * width_;
  }
  bool empty() const noexcept { return data_.empty(); }

  bool same_shape(int height, int width) const noexcept {
    return height_ == height && width_ == width;
  }
  template <typename U>
  bool same_shape(const Raster<U>& other) const noexcept {
    return same_shape(other.height(), other.width());
  }

  T& at(int row, int col, int ch = 0) noexcept {
    return data_[index(row, col, ch)];
  }
  const T& at(int row, int col, int ch = 0) const noexcept {
    return data_[index(row, col, ch)];
  }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  std::size_t index(int row, int col, int ch) const noexcept {
    assert(row >= 0 && row < height_ && col >= 0 && col < width_);
    assert(ch >= 0 && ch < channels_);
    return (static_cast<std::size_t>(row) * width_ + col) * channels_ + ch;
  }

  int height_ = 0;
  int width_ = 0;
  int channels_ = 1;
  std::vector<T> data_;
};

/// RGB intensities in [0,1].
using RgbImage = Raster<float>;
/// Single-channel trainId map; 255 is the void / no-label sentinel.
using LabelMap = Raster<std::uint8_t>;
/// Cityscapes instance ids (rawClassId * 1000 + index, or rawClassId).
using InstanceMap = Raster<std::int32_t>;
/// 0/1 per pixel.
using BinaryMask = Raster<std::uint8_t>;

inline constexpr std::uint8_t kIgnoreLabel = 255;
inline constexpr int kNumClasses = 19;

}  // namespace amcs

#endif  // AMCS_RASTER_HPP_
