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
#include "support/fixture.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

#include "amcs/png_io.hpp"

namespace fs = std::filesystem;

namespace amcs::testing {
namespace {

// Raw Cityscapes label ids.
constexpr int kRawRoad = 7;
constexpr int kRawSidewalk = 8;
constexpr int kRawBuilding = 11;
constexpr int kRawPole = 17;
constexpr int kRawVegetation = 21;
constexpr int kRawTerrain = 22;
constexpr int kRawSky = 23;
constexpr int kRawPerson = 24;
constexpr int kRawRider = 25;
constexpr int kRawCar = 26;
constexpr int kRawEgoVehicle = 1;

struct Color {
  int r, g, b;
};

Color ColorOf(int raw) {
  switch (raw) {
    case kRawRoad: return {128, 64, 128};
    case kRawSidewalk: return {244, 35, 232};
    case kRawBuilding: return {70, 70, 70};
    case kRawPole: return {153, 153, 153};
    case kRawVegetation: return {107, 142, 35};
    case kRawTerrain: return {152, 251, 152};
    case kRawSky: return {70, 130, 180};
    case kRawPerson: return {220, 20, 60};
    case kRawRider: return {255, 0, 0};
    case kRawCar: return {0, 0, 142};
    default: return {0, 0, 0};
  }
}

struct Frame {
  int h, w;
  std::vector<std::uint8_t> labels;
  std::vector<std::uint16_t> instances;

  Frame(int h_, int w_)
      : h(h_), w(w_), labels(static_cast<std::size_t>(h_) * w_), instances(labels.size()) {}

  void Set(int r, int c, int raw, int inst) {
    const auto i = static_cast<std::size_t>(r) * w + c;
    labels[i] = static_cast<std::uint8_t>(raw);
    instances[i] = static_cast<std::uint16_t>(inst);
  }
};

// Filled ellipse inscribed in the box, clipped to the frame.
void DrawEllipse(Frame& f, int top, int left, int bh, int bw, int raw, int inst) {
  const double cy = top + (bh - 1) / 2.0;
  const double cx = left + (bw - 1) / 2.0;
  const double ry = bh / 2.0;
  const double rx = bw / 2.0;
  for (int r = top; r < top + bh; ++r) {
    for (int c = left; c < left + bw; ++c) {
      if (r < 0 || r >= f.h || c < 0 || c >= f.w) continue;
      const double dy = (r - cy) / ry;
      const double dx = (c - cx) / rx;
      if (dy * dy + dx * dx <= 1.0) f.Set(r, c, raw, inst);
    }
  }
}

}  // namespace

Fixture MakeFixture(const fs::path& root, const FixtureOptions& opts) {
  Fixture fx;
  fx.root = root;
  std::mt19937_64 rng(opts.seed);
  const int h = opts.height;
  const int w = opts.width;
  const fs::path image_dir = root / "leftImg8bit" / opts.split / opts.city;
  const fs::path gt_dir = root / "gtFine" / opts.split / opts.city;
  fs::create_directories(image_dir);
  fs::create_directories(gt_dir);

  std::ostringstream list;
  for (int n = 0; n < opts.frames; ++n) {
    char name[64];
    std::snprintf(name, sizeof(name), "%s_000000_%06d", opts.city.c_str(), n);
    Frame f(h, w);

    const int sky_end = h * 3 / 10 + static_cast<int>(rng() % 3);
    const int building_end = h * 5 / 10;
    const int side_end = h * 6 / 10;
    const int void_start = h - 3;
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        int raw = kRawRoad;
        if (r < sky_end) {
          raw = kRawSky;
        } else if (r < building_end) {
          raw = c < w / 4 ? kRawVegetation : kRawBuilding;
        } else if (r < side_end) {
          raw = c > w * 3 / 4 ? kRawTerrain : kRawSidewalk;
        } else if (r >= void_start) {
          raw = kRawEgoVehicle;
        }
        f.Set(r, c, raw, raw);
      }
    }
    const int pole = 8 + static_cast<int>(rng() % static_cast<unsigned>(w - 16));
    for (int r = sky_end - 4; r < side_end; ++r) {
      f.Set(r, pole, kRawPole, kRawPole);
      f.Set(r, pole + 1, kRawPole, kRawPole);
    }

    // Instances, bottoms in the lower half of the frame.
    int next_index[3] = {0, 0, 0};
    auto instance = [&](int raw, int bh, int bw) {
      const int slot = raw == kRawPerson ? 0 : raw == kRawRider ? 1 : 2;
      const int bottom = h / 2 + static_cast<int>(rng() % static_cast<unsigned>(h / 2 - 4));
      const int top = std::max(0, bottom - bh + 1);
      const int left = static_cast<int>(rng() % static_cast<unsigned>(w - bw));
      DrawEllipse(f, top, left, bottom - top + 1, bw, raw, raw * 1000 + next_index[slot]++);
      ++fx.instances;
    };
    const int persons = 1 + static_cast<int>(rng() % 3);
    for (int i = 0; i < persons; ++i) instance(kRawPerson, 20 + static_cast<int>(rng() % 10), 10 + static_cast<int>(rng() % 6));
    if (rng() % 3 == 0) instance(kRawRider, 22, 12);
    const int cars = static_cast<int>(rng() % 2);
    for (int i = 0; i < cars; ++i) instance(kRawCar, 20 + static_cast<int>(rng() % 6), 24 + static_cast<int>(rng() % 12));
    if (opts.tiny_instances) instance(kRawPerson, 12, 6);

    // Count what survived overlaps and the default 10 x 20 filter.
    std::vector<std::uint16_t> ids(f.instances.begin(), f.instances.end());
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    for (std::uint16_t id : ids) {
      if (id < 1000) continue;
      int r0 = h, r1 = -1, c0 = w, c1 = -1;
      for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
          if (f.instances[static_cast<std::size_t>(r) * w + c] != id) continue;
          r0 = std::min(r0, r); r1 = std::max(r1, r);
          c0 = std::min(c0, c); c1 = std::max(c1, c);
        }
      }
      if (c1 - c0 + 1 >= 10 && r1 - r0 + 1 >= 20) ++fx.accepted;
    }

    std::vector<std::uint8_t> rgb(static_cast<std::size_t>(h) * w * 3);
    std::uniform_int_distribution<int> noise(-12, 12);
    for (std::size_t i = 0; i < f.labels.size(); ++i) {
      const Color col = ColorOf(f.labels[i]);
      rgb[3 * i + 0] = static_cast<std::uint8_t>(std::clamp(col.r + noise(rng), 0, 255));
      rgb[3 * i + 1] = static_cast<std::uint8_t>(std::clamp(col.g + noise(rng), 0, 255));
      rgb[3 * i + 2] = static_cast<std::uint8_t>(std::clamp(col.b + noise(rng), 0, 255));
    }
    png::Write8(image_dir / (std::string(name) + "_leftImg8bit.png"), h, w, 3, rgb);
    png::Write8(gt_dir / (std::string(name) + "_gtFine_labelIds.png"), h, w, 1, f.labels);
    png::Write16(gt_dir / (std::string(name) + "_gtFine_instanceIds.png"), h, w, 1, f.instances);

    const std::string id = opts.split + "/" + opts.city + "/" + name;
    fx.frame_ids.push_back(id);
    list << id << "\n";
  }
  fx.split_list = root / (opts.split + ".txt");
  std::ofstream(fx.split_list) << list.str();
  return fx;
}

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  path_ = fs::temp_directory_path() /
          ("amcs_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::pair<std::string, std::string>> SnapshotTree(const fs::path& dir) {
  std::vector<std::pair<std::string, std::string>> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    files.emplace_back(fs::relative(e.path(), dir).generic_string(), ReadFile(e.path()));
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace amcs::testing
