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
#include "amcs/instance_bank.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "amcs/error.hpp"
#include "amcs/png_io.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace amcs {
namespace {

struct Extent {
  int top = std::numeric_limits<int>::max();
  int left = std::numeric_limits<int>::max();
  int bottom = -1;
  int right = -1;
  std::int64_t area = 0;
};

ordered_json PatchRecord(const InstancePatch& p) {
  ordered_json j;
  j["frame"] = p.source_frame;
  j["instance_id"] = p.instance_id;
  j["class_id"] = p.class_id;
  j["class"] = ClassName(p.class_id);
  j["bbox"] = {{"top", p.bbox.top}, {"left", p.bbox.left},
               {"height", p.bbox.height}, {"width", p.bbox.width}};
  j["anchor_row"] = p.anchor_row;
  j["area"] = p.area;
  return j;
}

InstancePatch PatchFromRecord(const nlohmann::json& j) {
  InstancePatch p;
  p.source_frame = j.at("frame").get<std::string>();
  p.instance_id = j.at("instance_id").get<std::int32_t>();
  p.class_id = j.at("class_id").get<std::uint8_t>();
  const auto& b = j.at("bbox");
  p.bbox = {b.at("top").get<int>(), b.at("left").get<int>(), b.at("height").get<int>(),
            b.at("width").get<int>()};
  p.anchor_row = j.at("anchor_row").get<int>();
  p.area = j.at("area").get<std::int64_t>();
  if (!IsInstanceClass(p.class_id) || p.bbox.height <= 0 || p.bbox.width <= 0 ||
      p.anchor_row != p.bbox.bottom()) {
    Throw(ErrorCode::kInvalidInput, "malformed bank record for " + p.id());
  }
  return p;
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) Throw(ErrorCode::kIoError, "cannot write " + path.string());
}

}  // namespace

std::string InstancePatch::id() const {
  return FrameStem(source_frame) + "_" + std::to_string(instance_id);
}

Extraction ExtractInstances(const LabeledFrame& frame, SizeFilter filter) {
  const InstanceMap& ids = frame.instances;
  std::map<std::int32_t, Extent> extents;
  for (int r = 0; r < ids.height(); ++r) {
    for (int c = 0; c < ids.width(); ++c) {
      const std::int32_t id = ids.at(r, c);
      if (id < 1000 || !IsInstanceClass(RawToTrainId(id / 1000))) continue;
      Extent& e = extents[id];
      e.top = std::min(e.top, r);
      e.left = std::min(e.left, c);
      e.bottom = std::max(e.bottom, r);
      e.right = std::max(e.right, c);
      ++e.area;
    }
  }

  Extraction out;
  out.instances_seen = static_cast<std::int64_t>(extents.size());
  for (const auto& [id, e] : extents) {
    const BoundingBox box{e.top, e.left, e.bottom - e.top + 1, e.right - e.left + 1};
    if (!filter.Accepts(box)) {
      ++out.filtered_out;
      continue;
    }
    auto pixels = std::make_shared<PatchPixels>();
    pixels->rgb = Raster<std::uint8_t>(box.height, box.width, 3);
    pixels->mask = BinaryMask(box.height, box.width);
    for (int r = 0; r < box.height; ++r) {
      for (int c = 0; c < box.width; ++c) {
        for (int ch = 0; ch < 3; ++ch) {
          const float v = frame.image.at(box.top + r, box.left + c, ch);
          pixels->rgb.at(r, c, ch) =
              static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f));
        }
        pixels->mask.at(r, c) = ids.at(box.top + r, box.left + c) == id ? 1 : 0;
      }
    }

    InstancePatch patch;
    patch.source_frame = frame.frame_id;
    patch.instance_id = id;
    patch.class_id = RawToTrainId(id / 1000);
    patch.bbox = box;
    patch.anchor_row = box.bottom();
    patch.area = e.area;
    patch.pixels = std::move(pixels);
    out.patches.push_back(std::move(patch));
  }
  return out;
}

void InstanceBank::AddFrame(const std::string& frame_id, Extraction extraction) {
  const std::string stem = FrameStem(frame_id);
  if (by_source_.contains(stem))
    Throw(ErrorCode::kInvalidInput, "duplicate frame " + frame_id + " in bank");
  frames_.push_back(frame_id);
  auto& owned = by_source_[stem];
  for (auto& patch : extraction.patches) {
    const std::size_t index = patches_.size();
    if (!by_id_.emplace(patch.id(), index).second)
      Throw(ErrorCode::kInvalidInput, "duplicate patch id " + patch.id());
    owned.push_back(index);
    patches_.push_back(std::move(patch));
  }
  instances_seen_ += extraction.instances_seen;
  filtered_out_ += extraction.filtered_out;
}

std::span<const std::size_t> InstanceBank::BySource(std::string_view frame_id) const {
  const auto it = by_source_.find(FrameStem(frame_id));
  if (it == by_source_.end()) return {};
  return it->second;
}

std::vector<std::size_t> InstanceBank::CandidatesFor(std::string_view target_frame) const {
  const std::string stem = FrameStem(target_frame);
  std::vector<std::size_t> out;
  out.reserve(patches_.size());
  for (std::size_t i = 0; i < patches_.size(); ++i) {
    if (FrameStem(patches_[i].source_frame) != stem) out.push_back(i);
  }
  return out;
}

std::optional<std::size_t> InstanceBank::Find(std::string_view patch_id) const {
  const auto it = by_id_.find(patch_id);
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

std::shared_ptr<const PatchPixels> InstanceBank::Pixels(std::size_t index) const {
  const InstancePatch& p = patches_.at(index);
  if (p.pixels) return p.pixels;
  if (dir_.empty()) Throw(ErrorCode::kNotFound, "no pixel data for patch " + p.id());
  return std::make_shared<const PatchPixels>(LoadPatchPixels(dir_, p));
}

fs::path PatchPath(const fs::path& bank_dir, const InstancePatch& patch) {
  return bank_dir / "patches" / (patch.id() + ".png");
}

void SavePatchPixels(const fs::path& bank_dir, const InstancePatch& patch) {
  if (!patch.pixels) Throw(ErrorCode::kInvalidInput, "patch has no pixels: " + patch.id());
  const PatchPixels& px = *patch.pixels;
  const int h = px.mask.height();
  const int w = px.mask.width();
  std::vector<std::uint8_t> rgba(static_cast<std::size_t>(h) * w * 4);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      std::uint8_t* dst = &rgba[(static_cast<std::size_t>(r) * w + c) * 4];
      dst[0] = px.rgb.at(r, c, 0);
      dst[1] = px.rgb.at(r, c, 1);
      dst[2] = px.rgb.at(r, c, 2);
      dst[3] = px.mask.at(r, c) ? 255 : 0;
    }
  }
  std::error_code ec;
  fs::create_directories(bank_dir / "patches", ec);
  if (ec) Throw(ErrorCode::kIoError, "cannot create " + (bank_dir / "patches").string());
  png::Write8(PatchPath(bank_dir, patch), h, w, 4, rgba);
}

PatchPixels LoadPatchPixels(const fs::path& bank_dir, const InstancePatch& patch) {
  const png::Image img = png::Read(PatchPath(bank_dir, patch));
  if (img.channels != 4 || img.bit_depth != 8 || img.height != patch.bbox.height ||
      img.width != patch.bbox.width) {
    Throw(ErrorCode::kCorruptFrame, "patch image disagrees with index: " + patch.id());
  }
  PatchPixels px{Raster<std::uint8_t>(img.height, img.width, 3),
                 BinaryMask(img.height, img.width)};
  for (std::size_t i = 0, n = img.pixel_count(); i < n; ++i) {
    for (int ch = 0; ch < 3; ++ch) px.rgb.data()[i * 3 + ch] = img.samples[i * 4 + ch];
    px.mask.data()[i] = img.samples[i * 4 + 3] >= 128 ? 1 : 0;
  }
  return px;
}

void InstanceBank::Save(const fs::path& dir) const {
  std::error_code ec;
  fs::create_directories(dir / "patches", ec);
  if (ec) Throw(ErrorCode::kIoError, "cannot create bank directory " + dir.string());

  std::string index;
  std::int64_t pixels_total = 0;
  for (const auto& p : patches_) {
    if (p.pixels) SavePatchPixels(dir, p);
    index += PatchRecord(p).dump();
    index += '\n';
    pixels_total += p.area;
  }
  WriteText(dir / "index.jsonl", index);

  ordered_json summary;
  summary["format"] = "amcs-instance-bank/1";
  summary["size_filter"] = {{"min_width", filter_.min_width},
                            {"min_height", filter_.min_height}};
  summary["instances_seen"] = instances_seen_;
  summary["filtered_out"] = filtered_out_;
  summary["available"] = patches_.size();
  summary["mask_pixels"] = pixels_total;
  summary["frames"] = frames_;
  WriteText(dir / "bank.json", summary.dump(2) + "\n");
}

InstanceBank InstanceBank::Load(const fs::path& dir) {
  std::ifstream summary_in(dir / "bank.json");
  std::ifstream index_in(dir / "index.jsonl");
  if (!summary_in || !index_in) Throw(ErrorCode::kNotFound, "no instance bank at " + dir.string());

  InstanceBank bank;
  try {
    const auto summary = nlohmann::json::parse(summary_in);
    const auto frames = summary.at("frames").get<std::vector<std::string>>();
    const auto& f = summary.at("size_filter");
    bank.filter_ = {f.at("min_width").get<int>(), f.at("min_height").get<int>()};

    std::map<std::string, Extraction, std::less<>> per_frame;
    std::string line;
    std::size_t records = 0;
    while (std::getline(index_in, line)) {
      if (line.empty()) continue;
      ++records;
      InstancePatch p = PatchFromRecord(nlohmann::json::parse(line));
      per_frame[FrameStem(p.source_frame)].patches.push_back(std::move(p));
    }
    std::size_t placed = 0;
    for (const auto& frame : frames) {
      Extraction ex;
      if (auto it = per_frame.find(FrameStem(frame)); it != per_frame.end()) {
        ex = std::move(it->second);
        placed += ex.patches.size();
      }
      bank.AddFrame(frame, std::move(ex));
    }
    if (placed != records)
      Throw(ErrorCode::kInvalidInput, "index.jsonl references frames missing from bank.json");
    bank.instances_seen_ = summary.at("instances_seen").get<std::int64_t>();
    bank.filtered_out_ = summary.at("filtered_out").get<std::int64_t>();
  } catch (const nlohmann::json::exception& e) {
    Throw(ErrorCode::kInvalidInput, "malformed bank at " + dir.string() + ": " + e.what());
  }
  bank.dir_ = dir;
  return bank;
}

InstanceBank InstanceBank::LoadWithPixels(const fs::path& dir) {
  InstanceBank bank = Load(dir);
  for (auto& p : bank.patches_) {
    p.pixels = std::make_shared<const PatchPixels>(LoadPatchPixels(dir, p));
  }
  return bank;
}

InstanceBank BuildBank(std::span<const LabeledFrame> frames, SizeFilter filter) {
  InstanceBank bank;
  bank.set_size_filter(filter);
  for (const auto& frame : frames) bank.AddFrame(frame.frame_id, ExtractInstances(frame, filter));
  return bank;
}

}  // namespace amcs
