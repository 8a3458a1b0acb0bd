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
#ifndef AMCS_PIPELINE_HPP_
#define AMCS_PIPELINE_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "amcs/compositor.hpp"
#include "amcs/instance_bank.hpp"

namespace amcs {

inline constexpr const char* kToolkitVersion = "0.1.0";

/// Runs fn(i) for i in [0, n) on `workers` threads (0 = hardware
/// concurrency). Items are claimed dynamically. Exceptions are caught per
/// item; the returned vector holds "<i>: <message>" entries in index order.
std::vector<std::string> ParallelFor(std::size_t n, int workers,
                                     const std::function<void(std::size_t)>& fn);

struct FrameError {
  std::string frame_id;
  std::string message;
};

struct ExtractOptions {
  std::filesystem::path root;
  std::filesystem::path split_list;
  std::filesystem::path bank_dir;
  SizeFilter filter;
  int workers = 0;
};

struct ExtractSummary {
  std::size_t frames = 0;
  std::int64_t instances_seen = 0;
  std::int64_t filtered_out = 0;
  std::size_t available = 0;
  std::vector<FrameError> errors;
};

/// Streams patch PNGs to the bank as frames are processed; the index is
/// written once, in split order. Frame failures are reported in the summary
/// and leave the index unwritten.
ExtractSummary RunExtract(const ExtractOptions& opts);

struct GenerateOptions {
  std::filesystem::path root;
  std::filesystem::path bank_dir;
  std::filesystem::path split_list;
  std::filesystem::path out;
  std::string split_name;  // defaults to the split list stem
  GenerationConfig config;
  bool seed_given = true;  // otherwise config.master_seed is drawn here
  int workers = 0;
};

struct GenerateSummary {
  std::size_t frames = 0;
  std::size_t pastes = 0;
  std::size_t warnings = 0;
  double mean_achieved_ratio = 0.0;
  std::uint64_t master_seed = 0;
  std::vector<FrameError> errors;
};

/// Writes images/, labels_visible/, labels_occluded/, manifests/ (one JSON
/// per frame plus _run.json) and splits/<name>.txt under `out`.
GenerateSummary RunGenerate(const GenerateOptions& opts);

enum class PredictionFormat { kPng, kTensor };

struct EvaluateOptions {
  std::filesystem::path ground_truth;  // a generated dataset directory
  std::filesystem::path predictions;
  std::filesystem::path split_list;
  std::filesystem::path out;  // report directory
  std::optional<std::filesystem::path> bank_dir;  // enables exact occluder regions
  std::optional<std::filesystem::path> scheme;    // tensor format; K=4 preset if absent
  PredictionFormat format = PredictionFormat::kPng;
  bool strict_mean = false;
  int workers = 0;
};

struct EvaluateSummary {
  std::size_t frames = 0;
  std::optional<double> miou_visible;
  std::optional<double> miou_invisible;
  std::optional<double> miou_total;
  std::vector<std::string> missing;
  std::vector<FrameError> errors;
  std::string text;  // plain-text table
};

/// Writes eval_report.json and eval_summary.txt into `out`.
EvaluateSummary RunEvaluate(const EvaluateOptions& opts);

struct StatsOptions {
  std::filesystem::path generated;
  std::filesystem::path split_list;
  std::filesystem::path out;
  std::optional<std::filesystem::path> original_root;
  std::optional<std::filesystem::path> bank_dir;
  std::uint8_t prior_class = 11;  // person
  int downsample = 8;
  bool svg = true;
  int workers = 0;
};

struct StatsSummary {
  std::size_t frames = 0;
  std::optional<double> spearman_visible;
  std::optional<double> prior_intersection;
  std::vector<FrameError> errors;
};

StatsSummary RunStats(const StatsOptions& opts);

struct EncodeOptions {
  std::filesystem::path masks;  // directory with labels_visible/ and labels_occluded/
  std::filesystem::path split_list;
  std::filesystem::path out;    // receives tensors/<frame>.amgt and scheme.json
  std::optional<std::filesystem::path> scheme;
  int preset_groups = 4;
  int workers = 0;
};

struct EncodeSummary {
  std::size_t frames = 0;
  int vector_length = 0;
  std::int64_t invalid_pixels = 0;
  std::int64_t same_group_dropped = 0;
  std::vector<FrameError> errors;
};

EncodeSummary RunEncode(const EncodeOptions& opts);

struct DecodeOptions {
  std::filesystem::path tensors;  // directory containing tensors/
  std::filesystem::path split_list;
  std::filesystem::path out;      // receives labels_visible/ and labels_occluded/
  std::optional<std::filesystem::path> scheme;
  int preset_groups = 4;
  int workers = 0;
};

struct DecodeSummary {
  std::size_t frames = 0;
  std::int64_t visible_fallbacks = 0;
  std::vector<FrameError> errors;
};

DecodeSummary RunDecode(const DecodeOptions& opts);

std::filesystem::path TensorPath(const std::filesystem::path& dir, const std::string& frame_id);
std::filesystem::path ManifestPath(const std::filesystem::path& dir, const std::string& frame_id);

}  // namespace amcs

#endif  // AMCS_PIPELINE_HPP_
