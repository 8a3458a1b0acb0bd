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
#ifndef AMCS_INSTANCE_BANK_HPP_
#define AMCS_INSTANCE_BANK_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "amcs/cityscapes_io.hpp"
#include "amcs/raster.hpp"

namespace amcs {

struct BoundingBox {
  int top = 0;
  int left = 0;
  int height = 0;
  int width = 0;

  int bottom() const noexcept { return top + height - 1; }
  int right() const noexcept { return left + width - 1; }
  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

/// Pixel payload of a patch: the tight-bbox RGB crop (8-bit, as decoded from
/// the source image) and the binary instance mask over the same crop.
struct PatchPixels {
  Raster<std::uint8_t> rgb;  // bh x bw x 3
  BinaryMask mask;           // bh x bw, values 0/1

  friend bool operator==(const PatchPixels&, const PatchPixels&) = default;
};

/// An extracted occluder. `pixels` may be null for banks loaded from disk;
/// use InstanceBank::Pixels() to obtain the payload in either case.
struct InstancePatch {
  std::string source_frame;
  std::int32_t instance_id = 0;  // raw Cityscapes instance id, e.g. 26001
  std::uint8_t class_id = kIgnoreLabel;
  BoundingBox bbox;              // in source-frame coordinates
  int anchor_row = 0;            // == bbox.bottom()
  std::int64_t area = 0;         // mask popcount
  std::shared_ptr<const PatchPixels> pixels;

  /// "<frame stem>_<instance id>", stable across bank rebuilds.
  std::string id() const;
};

/// Minimum bbox extent for an instance to be kept as an occluder.
struct SizeFilter {
  int min_width = 10;
  int min_height = 20;

  bool Accepts(const BoundingBox& box) const noexcept {
    return box.width >= min_width && box.height >= min_height;
  }
};

struct Extraction {
  std::vector<InstancePatch> patches;  // sorted by instance id
  std::int64_t instances_seen = 0;     // instance-class ids before the filter
  std::int64_t filtered_out = 0;
};

/// One patch per distinct instance id (>= 1000) whose class is one of the
/// eight instance trainIds, minus those rejected by `filter`.
Extraction ExtractInstances(const LabeledFrame& frame, SizeFilter filter = {});

class InstanceBank {
 public:
  InstanceBank() = default;

  /// Appends a frame's extraction result. Duplicate frames throw
  /// InvalidInput. Patch order is frame insertion order, then instance id.
  void AddFrame(const std::string& frame_id, Extraction extraction);

  std::size_t size() const noexcept { return patches_.size(); }
  bool empty() const noexcept { return patches_.empty(); }
  const InstancePatch& patch(std::size_t index) const { return patches_.at(index); }
  std::span<const InstancePatch> patches() const noexcept { return patches_; }
  const std::vector<std::string>& frames() const noexcept { return frames_; }

  /// Patch indices contributed by a frame (empty if the frame is unknown).
  std::span<const std::size_t> BySource(std::string_view frame_id) const;

  /// Every patch not extracted from `target_frame`, in bank order.
  std::vector<std::size_t> CandidatesFor(std::string_view target_frame) const;

  std::optional<std::size_t> Find(std::string_view patch_id) const;

  /// In-memory payload if present, otherwise decoded from the bank directory.
  std::shared_ptr<const PatchPixels> Pixels(std::size_t index) const;

  std::int64_t instances_seen() const noexcept { return instances_seen_; }
  std::int64_t filtered_out() const noexcept { return filtered_out_; }
  const SizeFilter& size_filter() const noexcept { return filter_; }
  void set_size_filter(SizeFilter filter) noexcept { filter_ = filter; }

  /// Writes patches/<id>.png (RGBA, mask in alpha), index.jsonl and
  /// bank.json. Patches without an in-memory payload are skipped, which
  /// lets callers stream pixels out with SavePatchPixels() beforehand.
  void Save(const std::filesystem::path& dir) const;

  /// Loads metadata only; pixels are read lazily from `dir`.
  static InstanceBank Load(const std::filesystem::path& dir);

  /// Same as Load() but also decodes every patch into memory.
  static InstanceBank LoadWithPixels(const std::filesystem::path& dir);

 private:
  std::vector<InstancePatch> patches_;
  std::vector<std::string> frames_;
  std::map<std::string, std::vector<std::size_t>, std::less<>> by_source_;
  std::map<std::string, std::size_t, std::less<>> by_id_;
  std::int64_t instances_seen_ = 0;
  std::int64_t filtered_out_ = 0;
  SizeFilter filter_;
  std::filesystem::path dir_;
};

InstanceBank BuildBank(std::span<const LabeledFrame> frames, SizeFilter filter = {});

std::filesystem::path PatchPath(const std::filesystem::path& bank_dir,
                                const InstancePatch& patch);
void SavePatchPixels(const std::filesystem::path& bank_dir, const InstancePatch& patch);
PatchPixels LoadPatchPixels(const std::filesystem::path& bank_dir,
                            const InstancePatch& patch);

}  // namespace amcs

#endif  // AMCS_INSTANCE_BANK_HPP_
