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
// Synthetic datasets in the Cityscapes directory layout for tests.
#ifndef AMCS_TESTS_SUPPORT_FIXTURE_HPP_
#define AMCS_TESTS_SUPPORT_FIXTURE_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace amcs::testing {

struct FixtureOptions {
  int frames = 50;
  int height = 64;
  int width = 128;
  std::string split = "train";
  std::string city = "synth";
  std::uint64_t seed = 7;
  bool tiny_instances = true;  // add instances the size filter rejects
};

struct Fixture {
  std::filesystem::path root;
  std::filesystem::path split_list;
  std::vector<std::string> frame_ids;  // "<split>/<city>/<name>"
  std::int64_t instances = 0;          // every written instance
  std::int64_t accepted = 0;           // of which pass the default size filter
};

/// Writes leftImg8bit/ and gtFine/ PNGs plus a split list at
/// root/<split>.txt. Each frame has horizontal bands of sky, building,
/// vegetation, sidewalk and road, a void strip at the bottom and a few
/// person, rider and car instances drawn as ellipses.
Fixture MakeFixture(const std::filesystem::path& root, const FixtureOptions& opts = {});

/// Fresh empty directory under the system temp dir, removed by the
/// destructor.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

 private:
  std::filesystem::path path_;
};

/// Relative path -> file bytes for every regular file below `dir`.
std::vector<std::pair<std::string, std::string>> SnapshotTree(const std::filesystem::path& dir);

std::string ReadFile(const std::filesystem::path& path);

}  // namespace amcs::testing

#endif  // AMCS_TESTS_SUPPORT_FIXTURE_HPP_
