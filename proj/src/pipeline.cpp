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
#include "amcs/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "amcs/error.hpp"
#include "amcs/groupwise_codec.hpp"
#include "amcs/metrics.hpp"
#include "amcs/stats.hpp"
#include "json.hpp"

namespace fs = std::filesystem;

namespace amcs {
namespace {

void WriteText(const fs::path& path, const std::string& text) {
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) Throw(ErrorCode::kIoError, "cannot write " + path.string());
}

std::string ReadText(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Throw(ErrorCode::kNotFound, path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Runs `fn` for every frame of a split and gathers failures by frame id.
std::vector<FrameError> ForEachFrame(const std::vector<std::string>& frames, int workers,
                                     const std::function<void(std::size_t)>& fn) {
  std::vector<std::optional<std::string>> failures(frames.size());
  ParallelFor(frames.size(), workers, [&](std::size_t i) {
    try {
      fn(i);
    } catch (const std::exception& e) {
      failures[i] = e.what();
    }
  });
  std::vector<FrameError> errors;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (failures[i]) errors.push_back({frames[i], *failures[i]});
  }
  return errors;
}

std::shared_ptr<const GroupingScheme> ResolveScheme(const std::optional<fs::path>& path,
                                                    int preset) {
  if (path) return std::make_shared<const GroupingScheme>(GroupingScheme::Load(*path));
  return std::make_shared<const GroupingScheme>(GroupingScheme::Preset(preset));
}

void WriteErrorLog(const fs::path& path, const std::vector<FrameError>& errors) {
  if (errors.empty()) return;
  std::string text;
  for (const auto& e : errors) text += e.frame_id + "\t" + e.message + "\n";
  WriteText(path, text);
}

nlohmann::ordered_json ConfigJson(const GenerationConfig& cfg) {
  return {{"max_occlusion_ratio", cfg.max_occlusion_ratio},
          {"blend_kernel", cfg.blend_kernel},
          {"blend_sigma", cfg.blend_sigma},
          {"max_place_attempts", cfg.max_place_attempts},
          {"max_patch_redraws", cfg.max_patch_redraws}};
}

}  // namespace

std::vector<std::string> ParallelFor(std::size_t n, int workers,
                                     const std::function<void(std::size_t)>& fn) {
  std::vector<std::optional<std::string>> failures(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      try {
        fn(i);
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
    }
  };
  std::size_t threads = workers > 0 ? static_cast<std::size_t>(workers)
                                    : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, std::max<std::size_t>(n, 1));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  std::vector<std::string> errors;
  for (std::size_t i = 0; i < n; ++i) {
    if (failures[i]) errors.push_back(std::to_string(i) + ": " + *failures[i]);
  }
  return errors;
}

fs::path TensorPath(const fs::path& dir, const std::string& frame_id) {
  return dir / "tensors" / (FrameStem(frame_id) + ".amgt");
}

fs::path ManifestPath(const fs::path& dir, const std::string& frame_id) {
  return dir / "manifests" / (FrameStem(frame_id) + ".json");
}

ExtractSummary RunExtract(const ExtractOptions& opts) {
  const SplitSpec split = LoadSplit(opts.split_list, /*allow_empty=*/true);
  const auto& frames = split.source_frames;
  std::vector<Extraction> results(frames.size());

  ExtractSummary summary;
  summary.frames = frames.size();
  summary.errors = ForEachFrame(frames, opts.workers, [&](std::size_t i) {
    const LabeledFrame frame = LoadFrame(opts.root, frames[i]);
    Extraction ex = ExtractInstances(frame, opts.filter);
    for (auto& patch : ex.patches) {
      SavePatchPixels(opts.bank_dir, patch);
      patch.pixels.reset();
    }
    results[i] = std::move(ex);
  });
  if (!summary.errors.empty()) return summary;

  InstanceBank bank;
  bank.set_size_filter(opts.filter);
  for (std::size_t i = 0; i < frames.size(); ++i) bank.AddFrame(frames[i], std::move(results[i]));
  bank.Save(opts.bank_dir);
  summary.instances_seen = bank.instances_seen();
  summary.filtered_out = bank.filtered_out();
  summary.available = bank.size();
  return summary;
}

GenerateSummary RunGenerate(const GenerateOptions& opts) {
  GenerationConfig cfg = opts.config;
  if (!opts.seed_given) {
    std::random_device rd;
    cfg.master_seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  }
  cfg.Validate();
  const SplitSpec split = LoadSplit(opts.split_list);
  const InstanceBank bank = InstanceBank::Load(opts.bank_dir);
  const std::string split_name = opts.split_name.empty() ? split.name : opts.split_name;
  const auto& frames = split.target_frames;

  std::vector<GenerationManifest> manifests(frames.size());
  GenerateSummary summary;
  summary.master_seed = cfg.master_seed;
  summary.errors = ForEachFrame(frames, opts.workers, [&](std::size_t i) {
    const LabeledFrame target = LoadFrame(opts.root, frames[i]);
    ComposedFrame composed = ComposeFrame(target, bank, cfg);
    WriteAmodalFrame(opts.out, frames[i], composed.image, composed.mask);
    WriteText(ManifestPath(opts.out, frames[i]), ManifestToJson(composed.manifest));
    manifests[i] = std::move(composed.manifest);
  });

  std::vector<std::string> written;
  std::vector<bool> failed(frames.size(), false);
  for (const auto& e : summary.errors) {
    failed[static_cast<std::size_t>(std::find(frames.begin(), frames.end(), e.frame_id) -
                                    frames.begin())] = true;
  }
  double ratio_sum = 0.0;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (failed[i]) continue;
    written.push_back(frames[i]);
    summary.pastes += manifests[i].pastes.size();
    summary.warnings += manifests[i].warning ? 1 : 0;
    ratio_sum += manifests[i].achieved_ratio;
  }
  summary.frames = written.size();
  if (!written.empty()) summary.mean_achieved_ratio = ratio_sum / static_cast<double>(written.size());

  WriteSplit(opts.out / "splits" / (split_name + ".txt"), written);
  nlohmann::ordered_json run;
  run["toolkit_version"] = kToolkitVersion;
  run["master_seed"] = cfg.master_seed;
  run["config"] = ConfigJson(cfg);
  run["split"] = split_name;
  run["frames"] = written.size();
  run["bank_available"] = bank.size();
  run["bank_size_filter"] = {{"min_width", bank.size_filter().min_width},
                             {"min_height", bank.size_filter().min_height}};
  WriteText(opts.out / "manifests" / "_run.json", run.dump(2) + "\n");
  WriteErrorLog(opts.out / "generate_errors.log", summary.errors);
  return summary;
}

EvaluateSummary RunEvaluate(const EvaluateOptions& opts) {
  const SplitSpec split = LoadSplit(opts.split_list);
  const auto& frames = split.target_frames;
  std::optional<InstanceBank> bank;
  if (opts.bank_dir) bank = InstanceBank::Load(*opts.bank_dir);
  std::shared_ptr<const GroupingScheme> scheme;
  if (opts.format == PredictionFormat::kTensor) scheme = ResolveScheme(opts.scheme, 4);

  EvaluateSummary summary;
  for (const auto& id : frames) {
    const bool present = opts.format == PredictionFormat::kPng
                             ? fs::exists(opts.predictions / "labels_visible" / (FrameStem(id) + ".png")) &&
                                   fs::exists(opts.predictions / "labels_occluded" / (FrameStem(id) + ".png"))
                             : fs::exists(TensorPath(opts.predictions, id));
    if (!present) summary.missing.push_back(id);
  }

  std::vector<ConfusionAccumulator> per_frame(frames.size());
  summary.errors = ForEachFrame(frames, opts.workers, [&](std::size_t i) {
    const std::string& id = frames[i];
    if (std::find(summary.missing.begin(), summary.missing.end(), id) != summary.missing.end())
      return;
    const AmodalMask gt = LoadAmodalMask(opts.ground_truth, id);
    AmodalMask pred;
    if (opts.format == PredictionFormat::kPng) {
      pred = LoadAmodalMask(opts.predictions, id);
    } else {
      pred = DecodeAmodal(ReadTensor(TensorPath(opts.predictions, id), scheme));
    }
    std::optional<BinaryMask> region;
    if (bank) {
      const GenerationManifest m = ManifestFromJson(ReadText(ManifestPath(opts.ground_truth, id)));
      region = OccluderRegion(*bank, m, gt.height(), gt.width());
    }
    per_frame[i].AccumulateFrame(gt, pred, region ? &*region : nullptr);
  });

  ConfusionAccumulator acc;
  for (const auto& a : per_frame) acc.Merge(a);
  summary.frames = frames.size() - summary.missing.size() - summary.errors.size();
  const EvalReport report = Finalize(acc, opts.strict_mean);
  summary.miou_visible = report[Variant::kVisible].mean_iou;
  summary.miou_invisible = report[Variant::kInvisible].mean_iou;
  summary.miou_total = report[Variant::kTotal].mean_iou;
  summary.text = ReportToText(report);

  WriteText(opts.out / "eval_report.json", ReportToJson(report));
  std::string text = summary.text;
  for (const auto& id : summary.missing) text += "missing prediction: " + id + "\n";
  WriteText(opts.out / "eval_summary.txt", text);
  return summary;
}

StatsSummary RunStats(const StatsOptions& opts) {
  const SplitSpec split = LoadSplit(opts.split_list);
  const auto& frames = split.target_frames;
  const std::string cls = ClassName(opts.prior_class);

  std::vector<ClassFrequencyTable> gen_freq(frames.size());
  std::vector<LocationPrior> gen_prior(frames.size(), MakeLocationPrior(opts.prior_class, opts.downsample));
  std::vector<ClassFrequencyTable> orig_freq(frames.size());
  std::vector<LocationPrior> orig_prior(frames.size(), MakeLocationPrior(opts.prior_class, opts.downsample));
  std::vector<GenerationManifest> manifests(frames.size());

  StatsSummary summary;
  summary.errors = ForEachFrame(frames, opts.workers, [&](std::size_t i) {
    const AmodalMask mask = LoadAmodalMask(opts.generated, frames[i]);
    gen_freq[i].Add(mask);
    gen_prior[i].Add(mask.visible);
    if (opts.original_root) {
      const LabeledFrame orig = LoadFrame(*opts.original_root, frames[i]);
      orig_freq[i].Add({orig.semantic, LabelMap(orig.semantic.height(), orig.semantic.width(), 1, kIgnoreLabel)});
      orig_prior[i].Add(orig.semantic);
    }
    if (opts.bank_dir) manifests[i] = ManifestFromJson(ReadText(ManifestPath(opts.generated, frames[i])));
  });
  if (!summary.errors.empty()) return summary;
  summary.frames = frames.size();

  ClassFrequencyTable freq;
  LocationPrior prior = MakeLocationPrior(opts.prior_class, opts.downsample);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    freq.Merge(gen_freq[i]);
    prior.Merge(gen_prior[i]);
  }
  WriteText(opts.out / "class_frequencies.csv", FrequenciesToCsv(freq));
  WriteText(opts.out / "class_frequencies.json", FrequenciesToJson(freq));
  WriteText(opts.out / ("location_prior_" + cls + ".json"), PriorToJson(prior));
  if (opts.svg) {
    WriteText(opts.out / "class_frequencies.svg", FrequenciesToSvg(freq));
    WriteText(opts.out / ("location_prior_" + cls + ".svg"), PriorToSvg(prior));
  }

  nlohmann::ordered_json similarity;
  if (opts.original_root) {
    ClassFrequencyTable ofreq;
    LocationPrior oprior = MakeLocationPrior(opts.prior_class, opts.downsample);
    for (std::size_t i = 0; i < frames.size(); ++i) {
      ofreq.Merge(orig_freq[i]);
      oprior.Merge(orig_prior[i]);
    }
    std::vector<double> a, b;
    for (int s = 0; s < kNumClasses; ++s) {
      a.push_back(ofreq.visible_fraction(s));
      b.push_back(freq.visible_fraction(s));
    }
    summary.spearman_visible = SpearmanRho(a, b);
    similarity["visible_rank_correlation"] = *summary.spearman_visible;
    if (!prior.empty() && !oprior.empty()) {
      summary.prior_intersection = HistogramIntersection(oprior, prior);
      similarity["location_prior_intersection"] = *summary.prior_intersection;
    } else {
      similarity["location_prior_intersection"] = nullptr;
    }
    WriteText(opts.out / "original_class_frequencies.csv", FrequenciesToCsv(ofreq));
    WriteText(opts.out / "original_class_frequencies.json", FrequenciesToJson(ofreq));
    WriteText(opts.out / ("original_location_prior_" + cls + ".json"), PriorToJson(oprior));
    if (opts.svg) WriteText(opts.out / ("original_location_prior_" + cls + ".svg"), PriorToSvg(oprior));
    WriteText(opts.out / "similarity.json", similarity.dump(2) + "\n");
  }

  if (opts.bank_dir) {
    const InstanceBank bank = InstanceBank::Load(*opts.bank_dir);
    const auto rows = InstanceCensus(bank, manifests);
    WriteText(opts.out / "census.csv", CensusToCsv(rows));
    WriteText(opts.out / "census.json", CensusToJson(rows));
  }
  return summary;
}

EncodeSummary RunEncode(const EncodeOptions& opts) {
  const auto scheme = ResolveScheme(opts.scheme, opts.preset_groups);
  const SplitSpec split = LoadSplit(opts.split_list);
  const auto& frames = split.target_frames;
  std::vector<EncodeStats> stats(frames.size());

  EncodeSummary summary;
  summary.vector_length = scheme->vector_length();
  summary.errors = ForEachFrame(frames, opts.workers, [&](std::size_t i) {
    const AmodalMask mask = LoadAmodalMask(opts.masks, frames[i]);
    WriteTensor(TensorPath(opts.out, frames[i]), Encode(mask, scheme, &stats[i]));
  });
  for (const auto& s : stats) {
    summary.invalid_pixels += s.invalid_pixels;
    summary.same_group_dropped += s.same_group_dropped;
  }
  summary.frames = frames.size() - summary.errors.size();
  WriteText(opts.out / "scheme.json", scheme->ToJson());
  return summary;
}

DecodeSummary RunDecode(const DecodeOptions& opts) {
  const auto scheme = ResolveScheme(opts.scheme, opts.preset_groups);
  const SplitSpec split = LoadSplit(opts.split_list);
  const auto& frames = split.target_frames;
  std::vector<std::int64_t> fallbacks(frames.size(), 0);

  DecodeSummary summary;
  summary.errors = ForEachFrame(frames, opts.workers, [&](std::size_t i) {
    const AmodalMask mask =
        DecodeAmodal(ReadTensor(TensorPath(opts.tensors, frames[i]), scheme), &fallbacks[i]);
    const std::string file = FrameStem(frames[i]) + ".png";
    WriteLabelPng(opts.out / "labels_visible" / file, mask.visible);
    WriteLabelPng(opts.out / "labels_occluded" / file, mask.occluded);
  });
  for (auto n : fallbacks) summary.visible_fallbacks += n;
  summary.frames = frames.size() - summary.errors.size();
  return summary;
}

}  // namespace amcs
