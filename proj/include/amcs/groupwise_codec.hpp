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
#ifndef AMCS_GROUPWISE_CODEC_HPP_
#define AMCS_GROUPWISE_CODEC_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "amcs/cityscapes_io.hpp"
#include "amcs/raster.hpp"

namespace amcs {

// Groupwise amodal label representation.
//
// Each pixel carries a vector (p, q_0, ..., q_{K-1}) of length
// K + sum_k (g_k + 1): p is a K-way distribution over which group holds the
// visible class, and q_k is a distribution over the g_k classes of group k
// followed by one "absent" slot.

class GroupingScheme {
 public:
  struct Group {
    std::string name;
    std::vector<std::uint8_t> classes;  // slot order within the group
  };

  /// Validates that the groups partition trainIds 0..18; throws InvalidScheme.
  GroupingScheme(std::string name, std::vector<Group> groups);

  /// static / traffic objects / person-like / vehicle-like (L = 27).
  static GroupingScheme FourGroup();
  /// static / traffic objects / person- and vehicle-like fused (L = 25).
  static GroupingScheme ThreeGroup();
  static GroupingScheme Preset(int k);

  static GroupingScheme FromJson(std::string_view text);
  static GroupingScheme Load(const std::filesystem::path& path);
  std::string ToJson() const;

  const std::string& name() const noexcept { return name_; }
  int group_count() const noexcept { return static_cast<int>(groups_.size()); }
  const Group& group(int k) const;
  int group_size(int k) const { return static_cast<int>(group(k).classes.size()); }

  /// Vector length L.
  int vector_length() const noexcept { return length_; }
  /// Offset of q_k within the per-pixel vector.
  int block_offset(int k) const;
  /// Index of the absence slot within q_k (== g_k).
  int absence_slot(int k) const { return group_size(k); }

  int group_of(std::uint8_t train_id) const;
  int slot_of(std::uint8_t train_id) const;
  /// f_k: within-group slot -> trainId; the absence slot maps to 255.
  std::uint8_t class_at(int k, int slot) const;

 private:
  std::string name_;
  std::vector<Group> groups_;
  std::vector<int> offsets_;
  std::array<int, kNumClasses> group_of_{};
  std::array<int, kNumClasses> slot_of_{};
  int length_ = 0;
};

class GroupwiseTensor {
 public:
  GroupwiseTensor(int height, int width, std::shared_ptr<const GroupingScheme> scheme);
  GroupwiseTensor(int height, int width, std::shared_ptr<const GroupingScheme> scheme,
                  std::vector<float> values);

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  int length() const noexcept { return scheme_->vector_length(); }
  const GroupingScheme& scheme() const noexcept { return *scheme_; }
  std::shared_ptr<const GroupingScheme> scheme_ptr() const noexcept { return scheme_; }

  std::span<float> pixel(int row, int col);
  std::span<const float> pixel(int row, int col) const;
  std::span<const float> values() const noexcept { return values_; }
  std::span<float> values() noexcept { return values_; }

 private:
  int height_;
  int width_;
  std::shared_ptr<const GroupingScheme> scheme_;
  std::vector<float> values_;
};

struct EncodeStats {
  std::int64_t invalid_pixels = 0;        // visible == 255
  std::int64_t same_group_dropped = 0;    // occluded label unrepresentable
};

/// Ground-truth one-hot encoding of one pixel into `out` (length L).
/// Returns false for visible == 255 (p uniform, every q at absence).
/// A same-group occlusion keeps the visible class and sets *dropped.
bool EncodePixel(const GroupingScheme& scheme, std::uint8_t visible, std::uint8_t occluded,
                 std::span<float> out, bool* dropped = nullptr);

GroupwiseTensor Encode(const AmodalMask& mask, std::shared_ptr<const GroupingScheme> scheme,
                       EncodeStats* stats = nullptr);

struct PixelDecode {
  std::uint8_t visible = kIgnoreLabel;
  std::uint8_t occluded = kIgnoreLabel;
  int visible_group = 0;
  int occluded_group = 0;
  bool visible_fell_back = false;  // absence slot won in the visible group
};

/// Visible group = argmax p. Occluded group = the group with the second
/// largest p; among groups tied for that value, one whose q argmax is a
/// class slot is preferred, then the lowest index. All other ties resolve to
/// the lowest index.
PixelDecode DecodePixel(const GroupingScheme& scheme, std::span<const float> y);

/// argmax over all g_k + 1 slots of q_k, mapped through f_k (255 = absent).
std::uint8_t DecodeGroupPixel(const GroupingScheme& scheme, std::span<const float> y, int k);

LabelMap DecodeVisible(const GroupwiseTensor& tensor, std::int64_t* fallbacks = nullptr);
LabelMap DecodeOccluded(const GroupwiseTensor& tensor);
AmodalMask DecodeAmodal(const GroupwiseTensor& tensor, std::int64_t* fallbacks = nullptr);
/// Throws InvalidGroup for k outside [0, K).
LabelMap DecodeGroup(const GroupwiseTensor& tensor, int k);

// Tensor file: 16-byte header {magic "AMGT", uint32 H, uint32 W, uint32 L},
// then H*W*L float32 values, row-major, all little-endian.
inline constexpr std::array<char, 4> kTensorMagic = {'A', 'M', 'G', 'T'};

void WriteTensor(const std::filesystem::path& path, const GroupwiseTensor& tensor);
/// Throws InvalidInput when the stored L disagrees with `scheme`.
GroupwiseTensor ReadTensor(const std::filesystem::path& path,
                           std::shared_ptr<const GroupingScheme> scheme);

}  // namespace amcs

#endif  // AMCS_GROUPWISE_CODEC_HPP_
