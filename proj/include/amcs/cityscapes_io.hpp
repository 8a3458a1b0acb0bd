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
#ifndef AMCS_CITYSCAPES_IO_HPP_
#define AMCS_CITYSCAPES_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "amcs/raster.hpp"

namespace amcs {

// Cityscapes trainIds.
namespace label {
inline constexpr std::uint8_t kRoad = 0;
inline constexpr std::uint8_t kSidewalk = 1;
inline constexpr std::uint8_t kBuilding = 2;
inline constexpr std::uint8_t kWall = 3;
inline constexpr std::uint8_t kFence = 4;
inline constexpr std::uint8_t kPole = 5;
inline constexpr std::uint8_t kTrafficLight = 6;
inline constexpr std::uint8_t kTrafficSign = 7;
inline constexpr std::uint8_t kVegetation = 8;
inline constexpr std::uint8_t kTerrain = 9;
inline constexpr std::uint8_t kSky = 10;
inline constexpr std::uint8_t kPerson = 11;
inline constexpr std::uint8_t kRider = 12;
inline constexpr std::uint8_t kCar = 13;
inline constexpr std::uint8_t kTruck = 14;
inline constexpr std::uint8_t kBus = 15;
inline constexpr std::uint8_t kTrain = 16;
inline constexpr std::uint8_t kMotorcycle = 17;
inline constexpr std::uint8_t kBicycle = 18;
}  // namespace label

/// Maps a raw Cityscapes label id to its trainId; every id outside the 19
/// evaluated classes (including negative ids) maps to 255.
std::uint8_t RawToTrainId(int raw_id) noexcept;

/// Raw Cityscapes id of a trainId, or -1 for 255 and out-of-range values.
int TrainIdToRaw(std::uint8_t train_id) noexcept;

/// Person, rider and the six vehicle classes (trainIds 11..18).
bool IsInstanceClass(std::uint8_t train_id) noexcept;

const char* ClassName(std::uint8_t train_id) noexcept;

struct LabeledFrame {
  RgbImage image;        // H x W x 3, [0,1]
  LabelMap semantic;     // trainIds
  InstanceMap instances;
  std::string frame_id;
};

/// Two-channel amodal ground truth. occluded == 255 means no occluded class
/// is recorded at the pixel.
struct AmodalMask {
  LabelMap visible;
  LabelMap occluded;

  int height() const noexcept { return visible.height(); }
  int width() const noexcept { return visible.width(); }
  friend bool operator==(const AmodalMask&, const AmodalMask&) = default;
};

struct AmodalFrame {
  RgbImage image;
  AmodalMask mask;
};

struct SplitSpec {
  std::string name;
  std::vector<std::string> target_frames;
  std::vector<std::string> source_frames;
};

/// Last path component of a frame id ("train/aachen/aachen_000000_000019"
/// and "aachen_000000_000019" both give "aachen_000000_000019").
std::string FrameStem(std::string_view frame_id);

/// Loads image, labelIds and instanceIds for a frame. A bare frame name is
/// searched for under the train, val and test directories of its city; a
/// frame id with slashes is taken as "<split>/<city>/<name>".
LabeledFrame LoadFrame(const std::filesystem::path& root,
                       std::string_view frame_id);

/// Writes images/, labels_visible/ and labels_occluded/ PNGs for a frame.
void WriteAmodalFrame(const std::filesystem::path& out_root,
                      std::string_view frame_id, const RgbImage& image,
                      const AmodalMask& mask);

AmodalFrame LoadAmodalFrame(const std::filesystem::path& out_root,
                            std::string_view frame_id);

/// Reads only the two label channels (images/ is not touched).
AmodalMask LoadAmodalMask(const std::filesystem::path& out_root,
                          std::string_view frame_id);

/// One frame id per line. Blank lines are ignored; lines in the form
/// "leftImg8bit/<split>/<city>/<name>_leftImg8bit.png" are normalized to
/// "<split>/<city>/<name>". The split name is the file stem. Empty lists
/// and duplicates throw InvalidSplit unless `allow_empty` is set (which only
/// lifts the emptiness check).
SplitSpec LoadSplit(const std::filesystem::path& list_path, bool allow_empty = false);

void WriteSplit(const std::filesystem::path& list_path,
                const std::vector<std::string>& frame_ids);

std::vector<std::uint8_t> QuantizeImage(const RgbImage& image);
RgbImage ImageFromBytes(int height, int width,
                        std::span<const std::uint8_t> rgb);

RgbImage ReadRgbPng(const std::filesystem::path& path);
LabelMap ReadLabelPng(const std::filesystem::path& path);
void WriteRgbPng(const std::filesystem::path& path, const RgbImage& image);
void WriteLabelPng(const std::filesystem::path& path, const LabelMap& labels);

}  // namespace amcs

#endif  // AMCS_CITYSCAPES_IO_HPP_
