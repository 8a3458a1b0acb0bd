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
#include "amcs/groupwise_codec.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "amcs/error.hpp"
#include "json.hpp"

namespace amcs {
namespace {

// First index of the maximum (lowest index wins ties).
int ArgMax(std::span<const float> v) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(v.size()); ++i) {
    if (v[static_cast<std::size_t>(i)] > v[static_cast<std::size_t>(best)]) best = i;
  }
  return best;
}

std::uint32_t ToLittle(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    return ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
  }
}

std::string SlurpFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Throw(ErrorCode::kNotFound, path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

GroupingScheme::GroupingScheme(std::string name, std::vector<Group> groups)
    : name_(std::move(name)), groups_(std::move(groups)) {
  if (groups_.empty()) Throw(ErrorCode::kInvalidScheme, "scheme has no groups");
  group_of_.fill(-1);
  slot_of_.fill(-1);
  length_ = static_cast<int>(groups_.size());
  for (int k = 0; k < static_cast<int>(groups_.size()); ++k) {
    const Group& g = groups_[static_cast<std::size_t>(k)];
    if (g.classes.empty()) Throw(ErrorCode::kInvalidScheme, "group '" + g.name + "' is empty");
    offsets_.push_back(length_);
    for (int s = 0; s < static_cast<int>(g.classes.size()); ++s) {
      const std::uint8_t c = g.classes[static_cast<std::size_t>(s)];
      if (c >= kNumClasses)
        Throw(ErrorCode::kInvalidScheme, "class id " + std::to_string(c) + " out of range");
      if (group_of_[c] != -1)
        Throw(ErrorCode::kInvalidScheme,
              "class " + std::to_string(c) + " (" + ClassName(c) + ") assigned to two groups");
      group_of_[c] = k;
      slot_of_[c] = s;
    }
    length_ += static_cast<int>(g.classes.size()) + 1;
  }
  std::string missing;
  for (int c = 0; c < kNumClasses; ++c) {
    if (group_of_[static_cast<std::size_t>(c)] == -1) {
      missing += (missing.empty() ? "" : ", ") + std::to_string(c) + " (" +
                 ClassName(static_cast<std::uint8_t>(c)) + ")";
    }
  }
  if (!missing.empty()) Throw(ErrorCode::kInvalidScheme, "classes not covered: " + missing);
}

GroupingScheme GroupingScheme::FourGroup() {
  using namespace label;
  return GroupingScheme(
      "K4", {{"static", {kRoad, kSidewalk, kBuilding, kWall, kSky, kTerrain, kFence, kVegetation}},
             {"traffic objects", {kTrafficSign, kTrafficLight, kPole}},
             {"person-like", {kPerson, kRider}},
             {"vehicle-like", {kCar, kTruck, kBus, kTrain, kBicycle, kMotorcycle}}});
}

GroupingScheme GroupingScheme::ThreeGroup() {
  using namespace label;
  return GroupingScheme(
      "K3", {{"static", {kRoad, kSidewalk, kBuilding, kWall, kSky, kTerrain, kFence, kVegetation}},
             {"traffic objects", {kTrafficSign, kTrafficLight, kPole}},
             {"dynamic objects",
              {kPerson, kRider, kCar, kTruck, kBus, kTrain, kBicycle, kMotorcycle}}});
}

GroupingScheme GroupingScheme::Preset(int k) {
  if (k == 3) return ThreeGroup();
  if (k == 4) return FourGroup();
  Throw(ErrorCode::kInvalidScheme, "no preset scheme with K=" + std::to_string(k));
}

GroupingScheme GroupingScheme::FromJson(std::string_view text) {
  std::vector<Group> groups;
  std::string name;
  try {
    const auto j = nlohmann::json::parse(text);
    name = j.value("name", "custom");
    for (const auto& g : j.at("groups")) {
      Group group;
      group.name = g.value("name", "group" + std::to_string(groups.size()));
      for (const auto& c : g.at("classes")) {
        const int id = c.get<int>();
        if (id < 0 || id >= kNumClasses)
          Throw(ErrorCode::kInvalidScheme, "class id " + std::to_string(id) + " out of range");
        group.classes.push_back(static_cast<std::uint8_t>(id));
      }
      groups.push_back(std::move(group));
    }
  } catch (const nlohmann::json::exception& e) {
    Throw(ErrorCode::kInvalidScheme, std::string("malformed scheme: ") + e.what());
  }
  return GroupingScheme(std::move(name), std::move(groups));
}

GroupingScheme GroupingScheme::Load(const std::filesystem::path& path) {
  return FromJson(SlurpFile(path));
}

std::string GroupingScheme::ToJson() const {
  nlohmann::ordered_json j;
  j["name"] = name_;
  auto& groups = j["groups"] = nlohmann::ordered_json::array();
  for (const auto& g : groups_) {
    std::vector<int> classes(g.classes.begin(), g.classes.end());
    groups.push_back({{"name", g.name}, {"classes", classes}});
  }
  return j.dump(2) + "\n";
}

const GroupingScheme::Group& GroupingScheme::group(int k) const {
  if (k < 0 || k >= group_count())
    Throw(ErrorCode::kInvalidGroup, "group index " + std::to_string(k) + " out of range");
  return groups_[static_cast<std::size_t>(k)];
}

int GroupingScheme::block_offset(int k) const {
  group(k);
  return offsets_[static_cast<std::size_t>(k)];
}

int GroupingScheme::group_of(std::uint8_t train_id) const {
  return train_id < kNumClasses ? group_of_[train_id] : -1;
}

int GroupingScheme::slot_of(std::uint8_t train_id) const {
  return train_id < kNumClasses ? slot_of_[train_id] : -1;
}

std::uint8_t GroupingScheme::class_at(int k, int slot) const {
  const Group& g = group(k);
  if (slot == static_cast<int>(g.classes.size())) return kIgnoreLabel;
  return g.classes.at(static_cast<std::size_t>(slot));
}

GroupwiseTensor::GroupwiseTensor(int height, int width,
                                 std::shared_ptr<const GroupingScheme> scheme)
    : height_(height), width_(width), scheme_(std::move(scheme)) {
  values_.assign(static_cast<std::size_t>(height) * width * scheme_->vector_length(), 0.0f);
}

GroupwiseTensor::GroupwiseTensor(int height, int width,
                                 std::shared_ptr<const GroupingScheme> scheme,
                                 std::vector<float> values)
    : height_(height), width_(width), scheme_(std::move(scheme)), values_(std::move(values)) {
  if (values_.size() != static_cast<std::size_t>(height) * width * scheme_->vector_length())
    Throw(ErrorCode::kInvalidInput, "tensor value count does not match H*W*L");
}

std::span<float> GroupwiseTensor::pixel(int row, int col) {
  const std::size_t len = static_cast<std::size_t>(length());
  return std::span<float>(values_).subspan((static_cast<std::size_t>(row) * width_ + col) * len,
                                           len);
}

std::span<const float> GroupwiseTensor::pixel(int row, int col) const {
  const std::size_t len = static_cast<std::size_t>(length());
  return std::span<const float>(values_).subspan(
      (static_cast<std::size_t>(row) * width_ + col) * len, len);
}

bool EncodePixel(const GroupingScheme& scheme, std::uint8_t visible, std::uint8_t occluded,
                 std::span<float> out, bool* dropped) {
  const int K = scheme.group_count();
  std::fill(out.begin(), out.end(), 0.0f);
  for (int k = 0; k < K; ++k) {
    out[static_cast<std::size_t>(scheme.block_offset(k) + scheme.absence_slot(k))] = 1.0f;
  }
  if (dropped) *dropped = false;

  const int k1 = scheme.group_of(visible);
  if (k1 < 0) {
    for (int k = 0; k < K; ++k) out[static_cast<std::size_t>(k)] = 1.0f / static_cast<float>(K);
    return false;
  }
  auto set_class = [&](int k, std::uint8_t c) {
    const int base = scheme.block_offset(k);
    out[static_cast<std::size_t>(base + scheme.absence_slot(k))] = 0.0f;
    out[static_cast<std::size_t>(base + scheme.slot_of(c))] = 1.0f;
  };
  out[static_cast<std::size_t>(k1)] = 1.0f;
  set_class(k1, visible);

  const int k2 = scheme.group_of(occluded);
  if (k2 >= 0) {
    if (k2 != k1) {
      set_class(k2, occluded);
    } else if (dropped) {
      *dropped = true;
    }
  }
  return true;
}

GroupwiseTensor Encode(const AmodalMask& mask, std::shared_ptr<const GroupingScheme> scheme,
                       EncodeStats* stats) {
  if (!mask.visible.same_shape(mask.occluded))
    Throw(ErrorCode::kInvalidInput, "amodal channels disagree in shape");
  GroupwiseTensor tensor(mask.height(), mask.width(), std::move(scheme));
  EncodeStats local;
  for (int r = 0; r < mask.height(); ++r) {
    for (int c = 0; c < mask.width(); ++c) {
      bool dropped = false;
      if (!EncodePixel(tensor.scheme(), mask.visible.at(r, c), mask.occluded.at(r, c),
                       tensor.pixel(r, c), &dropped)) {
        ++local.invalid_pixels;
      }
      if (dropped) ++local.same_group_dropped;
    }
  }
  if (stats) *stats = local;
  return tensor;
}

std::uint8_t DecodeGroupPixel(const GroupingScheme& scheme, std::span<const float> y, int k) {
  const int base = scheme.block_offset(k);
  const auto q = y.subspan(static_cast<std::size_t>(base),
                           static_cast<std::size_t>(scheme.group_size(k) + 1));
  return scheme.class_at(k, ArgMax(q));
}

PixelDecode DecodePixel(const GroupingScheme& scheme, std::span<const float> y) {
  const int K = scheme.group_count();
  const auto p = y.first(static_cast<std::size_t>(K));
  PixelDecode out;

  out.visible_group = ArgMax(p);
  {
    const int k = out.visible_group;
    const int base = scheme.block_offset(k);
    const auto q = y.subspan(static_cast<std::size_t>(base),
                             static_cast<std::size_t>(scheme.group_size(k) + 1));
    int slot = ArgMax(q);
    if (slot == scheme.absence_slot(k)) {
      slot = ArgMax(q.first(static_cast<std::size_t>(scheme.group_size(k))));
      out.visible_fell_back = true;
    }
    out.visible = scheme.class_at(k, slot);
  }

  if (K < 2) return out;
  int second = -1;
  float second_value = 0.0f;
  for (int k = 0; k < K; ++k) {
    if (k == out.visible_group) continue;
    const float v = p[static_cast<std::size_t>(k)];
    if (second < 0 || v > second_value) {
      second = k;
      second_value = v;
    }
  }
  // Tie on the second-largest p: prefer a group that reports a present class.
  for (int k = 0; k < K; ++k) {
    if (k == out.visible_group || p[static_cast<std::size_t>(k)] != second_value) continue;
    if (DecodeGroupPixel(scheme, y, k) != kIgnoreLabel) {
      second = k;
      break;
    }
  }
  out.occluded_group = second;
  out.occluded = DecodeGroupPixel(scheme, y, second);
  return out;
}

LabelMap DecodeVisible(const GroupwiseTensor& tensor, std::int64_t* fallbacks) {
  LabelMap out(tensor.height(), tensor.width());
  std::int64_t n = 0;
  for (int r = 0; r < tensor.height(); ++r) {
    for (int c = 0; c < tensor.width(); ++c) {
      const PixelDecode d = DecodePixel(tensor.scheme(), tensor.pixel(r, c));
      out.at(r, c) = d.visible;
      n += d.visible_fell_back ? 1 : 0;
    }
  }
  if (fallbacks) *fallbacks = n;
  return out;
}

LabelMap DecodeOccluded(const GroupwiseTensor& tensor) {
  LabelMap out(tensor.height(), tensor.width());
  for (int r = 0; r < tensor.height(); ++r) {
    for (int c = 0; c < tensor.width(); ++c) {
      out.at(r, c) = DecodePixel(tensor.scheme(), tensor.pixel(r, c)).occluded;
    }
  }
  return out;
}

AmodalMask DecodeAmodal(const GroupwiseTensor& tensor, std::int64_t* fallbacks) {
  AmodalMask out{LabelMap(tensor.height(), tensor.width()),
                 LabelMap(tensor.height(), tensor.width())};
  std::int64_t n = 0;
  for (int r = 0; r < tensor.height(); ++r) {
    for (int c = 0; c < tensor.width(); ++c) {
      const PixelDecode d = DecodePixel(tensor.scheme(), tensor.pixel(r, c));
      out.visible.at(r, c) = d.visible;
      out.occluded.at(r, c) = d.occluded;
      n += d.visible_fell_back ? 1 : 0;
    }
  }
  if (fallbacks) *fallbacks = n;
  return out;
}

LabelMap DecodeGroup(const GroupwiseTensor& tensor, int k) {
  tensor.scheme().group(k);  // range check
  LabelMap out(tensor.height(), tensor.width());
  for (int r = 0; r < tensor.height(); ++r) {
    for (int c = 0; c < tensor.width(); ++c) {
      out.at(r, c) = DecodeGroupPixel(tensor.scheme(), tensor.pixel(r, c), k);
    }
  }
  return out;
}

void WriteTensor(const std::filesystem::path& path, const GroupwiseTensor& tensor) {
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Throw(ErrorCode::kIoError, "cannot write " + path.string());
  out.write(kTensorMagic.data(), kTensorMagic.size());
  for (std::uint32_t v : {static_cast<std::uint32_t>(tensor.height()),
                          static_cast<std::uint32_t>(tensor.width()),
                          static_cast<std::uint32_t>(tensor.length())}) {
    const std::uint32_t le = ToLittle(v);
    out.write(reinterpret_cast<const char*>(&le), sizeof(le));
  }
  for (float f : tensor.values()) {
    const std::uint32_t le = ToLittle(std::bit_cast<std::uint32_t>(f));
    out.write(reinterpret_cast<const char*>(&le), sizeof(le));
  }
  if (!out) Throw(ErrorCode::kIoError, "write failed: " + path.string());
}

GroupwiseTensor ReadTensor(const std::filesystem::path& path,
                           std::shared_ptr<const GroupingScheme> scheme) {
  const std::string bytes = SlurpFile(path);
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kTensorMagic.data(), 4) != 0)
    Throw(ErrorCode::kInvalidInput, "not a groupwise tensor file: " + path.string());
  auto word = [&](std::size_t offset) {
    std::uint32_t v;
    std::memcpy(&v, bytes.data() + offset, sizeof(v));
    return ToLittle(v);
  };
  const std::uint32_t h = word(4), w = word(8), l = word(12);
  if (static_cast<int>(l) != scheme->vector_length())
    Throw(ErrorCode::kInvalidInput, "tensor length " + std::to_string(l) +
                                        " does not match scheme length " +
                                        std::to_string(scheme->vector_length()));
  const std::size_t n = static_cast<std::size_t>(h) * w * l;
  if (bytes.size() != 16 + n * 4)
    Throw(ErrorCode::kInvalidInput, "truncated tensor file: " + path.string());
  std::vector<float> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = std::bit_cast<float>(word(16 + i * 4));
  return GroupwiseTensor(static_cast<int>(h), static_cast<int>(w), std::move(scheme),
                         std::move(values));
}

}  // namespace amcs
