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
#ifndef AMCS_PNG_IO_HPP_
#define AMCS_PNG_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace amcs::png {

// Decoded samples widened to 16 bits; palettes are expanded to RGB and
// sub-byte grayscale to 8 bits.
struct Image {
  int height = 0;
  int width = 0;
  int channels = 0;
  int bit_depth = 0;  // 8 or 16
  std::vector<std::uint16_t> samples;

  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(height) * width;
  }
};

Image Read(const std::filesystem::path& path);

void Write8(const std::filesystem::path& path, int height, int width,
            int channels, std::span<const std::uint8_t> samples);

void Write16(const std::filesystem::path& path, int height, int width,
             int channels, std::span<const std::uint16_t> samples);

}  // namespace amcs::png

#endif  // AMCS_PNG_IO_HPP_
