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
#include "amcs/cityscapes_io.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <unordered_set>

#include "amcs/error.hpp"
#include "amcs/png_io.hpp"

namespace fs = std::filesystem;

namespace amcs {
namespace {

// Raw Cityscapes ids 0..33 -> trainId.
constexpr std::array<std::uint8_t, 34> kRawToTrain = {
    255, 255, 255, 255, 255, 255, 255, 0,   1,   255, 255, 2,
    3,   4,   255, 255, 255, 5,   255, 6,   7,   8,   9,   10,
    11,  12,  13,  14,  15,  255, 255, 16,  17,  18};

constexpr std::array<int, kNumClasses> kTrainToRaw = {
    7, 8, 11, 12, 13, 17, 19, 20, 21, 22, 23, 24, 25, 26, 27, 28, 31, 32, 33};

constexpr std::array<const char*, kNumClasses> kClassNames = {
    "road",       "sidewalk", "building",      "wall",         "fence",
    "pole",       "traffic light", "traffic sign", "vegetation", "terrain",
    "sky",        "person",   "rider",         "car",          "truck",
    "bus",        "train",    "motorcycle",    "bicycle"};

constexpr std::array<const char*, 3> kSplitDirs = {"train", "val", "test"};

struct FramePaths {
  fs::path image;
  fs::path labels;
  fs::path instances;
};

FramePaths PathsFor(const fs::path& root, const std::string& rel) {
  return {root / "leftImg8bit" / (rel + "_leftImg8bit.png"),
          root / "gtFine" / (rel + "_gtFine_labelIds.png"),
          root / "gtFine" / (rel + "_gtFine_instanceIds.png")};
}

FramePaths LocateFrame(const fs::path& root, std::string_view frame_id) {
  const std::string id(frame_id);
  if (id.find('/') != std::string::npos) return PathsFor(root, id);
  const std::string city = id.substr(0, id.find('_'));
  for (const char* split : kSplitDirs) {
    const std::string rel = std::string(split) + "/" + city + "/" + id;
    FramePaths p = PathsFor(root, rel);
    if (fs::exists(p.image)) return p;
  }
  Throw(ErrorCode::kNotFound, "frame " + id + " not found under " +
                                  (root / "leftImg8bit").string());
}

std::string Trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::string NormalizeListEntry(std::string line) {
  constexpr std::string_view kPrefix = "leftImg8bit/";
  constexpr std::string_view kSuffix = "_leftImg8bit.png";
  if (line.starts_with(kPrefix)) line.erase(0, kPrefix.size());
  if (line.ends_with(kSuffix)) line.erase(line.size() - kSuffix.size());
  return line;
}

void EnsureParent(const fs::path& file) {
  std::error_code ec;
  fs::create_directories(file.parent_path(), ec);
  if (ec) Throw(ErrorCode::kIoError, "cannot create " + file.parent_path().string());
}

}  // namespace

std::uint8_t RawToTrainId(int raw_id) noexcept {
  if (raw_id < 0 || raw_id >= static_cast<int>(kRawToTrain.size())) return kIgnoreLabel;
  return kRawToTrain[static_cast<std::size_t>(raw_id)];
}

int TrainIdToRaw(std::uint8_t train_id) noexcept {
  return train_id < kNumClasses ? kTrainToRaw[train_id] : -1;
}

bool IsInstanceClass(std::uint8_t train_id) noexcept {
  return train_id >= label::kPerson && train_id <= label::kBicycle;
}

const char* ClassName(std::uint8_t train_id) noexcept {
  return train_id < kNumClasses ? kClassNames[train_id] : "void";
}

std::string FrameStem(std::string_view frame_id) {
  const auto slash = frame_id.rfind('/');
  return std::string(slash == std::string_view::npos ? frame_id
                                                     : frame_id.substr(slash + 1));
}

std::vector<std::uint8_t> QuantizeImage(const RgbImage& image) {
  std::vector<std::uint8_t> out(image.data().size());
  std::transform(image.data().begin(), image.data().end(), out.begin(), [](float v) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f));
  });
  return out;
}

RgbImage ImageFromBytes(int height, int width, std::span<const std::uint8_t> rgb) {
  RgbImage image(height, width, 3);
  std::transform(rgb.begin(), rgb.end(), image.data().begin(),
                 [](std::uint8_t v) { return static_cast<float>(v) / 255.0f; });
  return image;
}

RgbImage ReadRgbPng(const fs::path& path) {
  png::Image raw = png::Read(path);
  if (raw.channels < 3 || raw.bit_depth != 8)
    Throw(ErrorCode::kCorruptFrame, "expected 8-bit RGB image: " + path.string());
  RgbImage image(raw.height, raw.width, 3);
  auto dst = image.data();
  for (std::size_t i = 0, n = raw.pixel_count(); i < n; ++i) {
    for (int c = 0; c < 3; ++c) {
      dst[i * 3 + c] = static_cast<float>(raw.samples[i * raw.channels + c]) / 255.0f;
    }
  }
  return image;
}

LabelMap ReadLabelPng(const fs::path& path) {
  png::Image raw = png::Read(path);
  if (raw.channels != 1 || raw.bit_depth != 8)
    Throw(ErrorCode::kCorruptFrame, "expected 8-bit label image: " + path.string());
  LabelMap labels(raw.height, raw.width);
  std::copy(raw.samples.begin(), raw.samples.end(), labels.data().begin());
  return labels;
}

void WriteRgbPng(const fs::path& path, const RgbImage& image) {
  EnsureParent(path);
  const auto bytes = QuantizeImage(image);
  png::Write8(path, image.height(), image.width(), 3, bytes);
}

void WriteLabelPng(const fs::path& path, const LabelMap& labels) {
  EnsureParent(path);
  png::Write8(path, labels.height(), labels.width(), 1, labels.data());
}

LabeledFrame LoadFrame(const fs::path& root, std::string_view frame_id) {
  const FramePaths paths = LocateFrame(root, frame_id);
  for (const fs::path* p : {&paths.image, &paths.labels, &paths.instances}) {
    if (!fs::exists(*p)) Throw(ErrorCode::kNotFound, p->string());
  }

  LabeledFrame frame;
  frame.frame_id = std::string(frame_id);
  frame.image = ReadRgbPng(paths.image);

  png::Image raw_labels = png::Read(paths.labels);
  png::Image raw_instances = png::Read(paths.instances);
  const int h = frame.image.height();
  const int w = frame.image.width();
  if (raw_labels.height != h || raw_labels.width != w || raw_instances.height != h ||
      raw_instances.width != w) {
    Throw(ErrorCode::kCorruptFrame, "raster dimensions disagree for frame " + frame.frame_id);
  }
  if (raw_labels.channels != 1 || raw_instances.channels != 1)
    Throw(ErrorCode::kCorruptFrame, "label rasters must be single-channel: " + frame.frame_id);

  frame.semantic = LabelMap(h, w);
  frame.instances = InstanceMap(h, w);
  auto sem = frame.semantic.data();
  auto inst = frame.instances.data();
  for (std::size_t i = 0; i < sem.size(); ++i) {
    sem[i] = RawToTrainId(raw_labels.samples[i]);
    inst[i] = raw_instances.samples[i];
  }
  return frame;
}

void WriteAmodalFrame(const fs::path& out_root, std::string_view frame_id,
                      const RgbImage& image, const AmodalMask& mask) {
  if (!mask.visible.same_shape(image) || !mask.occluded.same_shape(image))
    Throw(ErrorCode::kInvalidInput, "image and mask dimensions disagree");
  const std::string file = FrameStem(frame_id) + ".png";
  WriteRgbPng(out_root / "images" / file, image);
  WriteLabelPng(out_root / "labels_visible" / file, mask.visible);
  WriteLabelPng(out_root / "labels_occluded" / file, mask.occluded);
}

AmodalMask LoadAmodalMask(const fs::path& out_root, std::string_view frame_id) {
  const std::string file = FrameStem(frame_id) + ".png";
  AmodalMask mask{ReadLabelPng(out_root / "labels_visible" / file),
                  ReadLabelPng(out_root / "labels_occluded" / file)};
  if (!mask.visible.same_shape(mask.occluded))
    Throw(ErrorCode::kCorruptFrame, "amodal channels disagree for " + file);
  return mask;
}

AmodalFrame LoadAmodalFrame(const fs::path& out_root, std::string_view frame_id) {
  AmodalFrame frame;
  frame.mask = LoadAmodalMask(out_root, frame_id);
  frame.image = ReadRgbPng(out_root / "images" / (FrameStem(frame_id) + ".png"));
  if (!frame.image.same_shape(frame.mask.visible))
    Throw(ErrorCode::kCorruptFrame, "image and labels disagree for " + std::string(frame_id));
  return frame;
}

SplitSpec LoadSplit(const fs::path& list_path, bool allow_empty) {
  std::ifstream in(list_path);
  if (!in) Throw(ErrorCode::kNotFound, "split list " + list_path.string());

  SplitSpec split;
  split.name = list_path.stem().string();
  std::unordered_set<std::string> seen;
  std::string line;
  while (std::getline(in, line)) {
    line = Trim(std::move(line));
    if (line.empty()) continue;
    line = NormalizeListEntry(std::move(line));
    if (!seen.insert(FrameStem(line)).second)
      Throw(ErrorCode::kInvalidSplit, "duplicate frame id " + line + " in " + list_path.string());
    split.target_frames.push_back(std::move(line));
  }
  if (split.target_frames.empty() && !allow_empty)
    Throw(ErrorCode::kInvalidSplit, "empty split list " + list_path.string());
  split.source_frames = split.target_frames;
  return split;
}

void WriteSplit(const fs::path& list_path, const std::vector<std::string>& frame_ids) {
  EnsureParent(list_path);
  std::ofstream out(list_path, std::ios::binary | std::ios::trunc);
  if (!out) Throw(ErrorCode::kIoError, "cannot write " + list_path.string());
  for (const auto& id : frame_ids) out << id << '\n';
  if (!out) Throw(ErrorCode::kIoError, "write failed: " + list_path.string());
}

}  // namespace amcs
