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
#include "amcs/amcs.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <string>

#include "amcs/compositor.hpp"
#include "amcs/error.hpp"
#include "amcs/groupwise_codec.hpp"
#include "amcs/metrics.hpp"
#include "amcs/pipeline.hpp"

struct amcs_scheme {
  std::shared_ptr<const amcs::GroupingScheme> scheme;
};

struct amcs_accumulator {
  amcs::ConfusionAccumulator acc;
};

namespace {

thread_local std::string g_last_error;

amcs_status SetError(amcs_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Translates exceptions escaping `fn` into status codes.
template <typename Fn>
amcs_status Guard(Fn&& fn) noexcept {
  g_last_error.clear();
  try {
    return fn();
  } catch (const amcs::Error& e) {
    return SetError(static_cast<amcs_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return SetError(AMCS_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return SetError(AMCS_ERR_INTERNAL, e.what());
  } catch (...) {
    return SetError(AMCS_ERR_INTERNAL, "unknown error");
  }
}

void Require(bool ok, const char* what) {
  if (!ok) amcs::Throw(amcs::ErrorCode::kInvalidInput, what);
}

char* CopyString(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::optional<std::filesystem::path> OptionalPath(const char* p) {
  if (p == nullptr || *p == '\0') return std::nullopt;
  return std::filesystem::path(p);
}

// Failed frames turn an otherwise successful run into a partial failure.
amcs_status FinishRun(const std::vector<amcs::FrameError>& errors,
                      const std::vector<std::string>& missing = {}) {
  if (errors.empty() && missing.empty()) return AMCS_OK;
  std::string message;
  for (const auto& id : missing) message += id + "\tmissing prediction\n";
  for (const auto& e : errors) message += e.frame_id + "\t" + e.message + "\n";
  return SetError(AMCS_ERR_PARTIAL_FAILURE, message);
}

amcs::BinaryMask PlaneToRaster(int h, int w, const std::uint8_t* data) {
  amcs::LabelMap r(h, w);
  std::memcpy(r.data().data(), data, static_cast<std::size_t>(h) * static_cast<std::size_t>(w));
  return r;
}

}  // namespace

extern "C" {

const char* amcs_version(void) { return amcs::kToolkitVersion; }

const char* amcs_status_name(amcs_status status) {
  if (status == AMCS_OK) return "Ok";
  if (status == AMCS_ERR_INTERNAL) return "Internal";
  return amcs::ErrorCodeName(static_cast<amcs::ErrorCode>(status));
}

const char* amcs_last_error(void) { return g_last_error.c_str(); }

void amcs_string_free(char* s) { std::free(s); }

uint64_t amcs_derive_frame_seed(uint64_t master_seed, const char* frame_id) {
  return amcs::DeriveFrameSeed(master_seed, frame_id == nullptr ? "" : frame_id);
}

amcs_status amcs_scheme_preset(int groups, amcs_scheme** out) {
  return Guard([&] {
    Require(out != nullptr, "null output handle");
    *out = new amcs_scheme{std::make_shared<const amcs::GroupingScheme>(
        amcs::GroupingScheme::Preset(groups))};
    return AMCS_OK;
  });
}

amcs_status amcs_scheme_load(const char* path, amcs_scheme** out) {
  return Guard([&] {
    Require(out != nullptr && path != nullptr, "null argument");
    *out = new amcs_scheme{
        std::make_shared<const amcs::GroupingScheme>(amcs::GroupingScheme::Load(path))};
    return AMCS_OK;
  });
}

amcs_status amcs_scheme_from_json(const char* json, amcs_scheme** out) {
  return Guard([&] {
    Require(out != nullptr && json != nullptr, "null argument");
    *out = new amcs_scheme{
        std::make_shared<const amcs::GroupingScheme>(amcs::GroupingScheme::FromJson(json))};
    return AMCS_OK;
  });
}

void amcs_scheme_free(amcs_scheme* scheme) { delete scheme; }

int amcs_scheme_group_count(const amcs_scheme* scheme) {
  return scheme == nullptr ? 0 : scheme->scheme->group_count();
}

int amcs_scheme_vector_length(const amcs_scheme* scheme) {
  return scheme == nullptr ? 0 : scheme->scheme->vector_length();
}

amcs_status amcs_scheme_to_json(const amcs_scheme* scheme, char** out) {
  return Guard([&] {
    Require(scheme != nullptr && out != nullptr, "null argument");
    *out = CopyString(scheme->scheme->ToJson());
    return AMCS_OK;
  });
}

amcs_status amcs_encode(const amcs_scheme* scheme, const uint8_t* visible,
                        const uint8_t* occluded, size_t n, float* out, int64_t* invalid,
                        int64_t* dropped) {
  return Guard([&] {
    Require(scheme != nullptr, "null scheme");
    Require(n == 0 || (visible != nullptr && occluded != nullptr && out != nullptr),
            "null buffer");
    const auto& s = *scheme->scheme;
    const auto len = static_cast<std::size_t>(s.vector_length());
    std::int64_t bad = 0;
    std::int64_t lost = 0;
    for (std::size_t i = 0; i < n; ++i) {
      bool d = false;
      if (!amcs::EncodePixel(s, visible[i], occluded[i], {out + i * len, len}, &d)) ++bad;
      if (d) ++lost;
    }
    if (invalid != nullptr) *invalid = bad;
    if (dropped != nullptr) *dropped = lost;
    return AMCS_OK;
  });
}

amcs_status amcs_decode(const amcs_scheme* scheme, const float* y, size_t n, uint8_t* visible,
                        uint8_t* occluded, int64_t* fallbacks) {
  return Guard([&] {
    Require(scheme != nullptr, "null scheme");
    Require(n == 0 || (y != nullptr && visible != nullptr && occluded != nullptr),
            "null buffer");
    const auto& s = *scheme->scheme;
    const auto len = static_cast<std::size_t>(s.vector_length());
    std::int64_t fell = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto d = amcs::DecodePixel(s, {y + i * len, len});
      visible[i] = d.visible;
      occluded[i] = d.occluded;
      if (d.visible_fell_back) ++fell;
    }
    if (fallbacks != nullptr) *fallbacks = fell;
    return AMCS_OK;
  });
}

amcs_status amcs_decode_group(const amcs_scheme* scheme, const float* y, size_t n, int group,
                              uint8_t* out) {
  return Guard([&] {
    Require(scheme != nullptr, "null scheme");
    Require(n == 0 || (y != nullptr && out != nullptr), "null buffer");
    const auto& s = *scheme->scheme;
    s.group(group);  // validates k even when n == 0
    const auto len = static_cast<std::size_t>(s.vector_length());
    for (std::size_t i = 0; i < n; ++i) out[i] = amcs::DecodeGroupPixel(s, {y + i * len, len}, group);
    return AMCS_OK;
  });
}

amcs_status amcs_accumulator_create(amcs_accumulator** out) {
  return Guard([&] {
    Require(out != nullptr, "null output handle");
    *out = new amcs_accumulator{};
    return AMCS_OK;
  });
}

void amcs_accumulator_free(amcs_accumulator* acc) { delete acc; }

amcs_status amcs_accumulator_add(amcs_accumulator* acc, int height, int width,
                                 const uint8_t* gt_visible, const uint8_t* gt_occluded,
                                 const uint8_t* pred_visible, const uint8_t* pred_occluded,
                                 const uint8_t* region) {
  return Guard([&] {
    Require(acc != nullptr, "null accumulator");
    Require(height >= 0 && width >= 0, "negative frame size");
    Require(gt_visible && gt_occluded && pred_visible && pred_occluded, "null label plane");
    const amcs::AmodalMask gt{PlaneToRaster(height, width, gt_visible),
                              PlaneToRaster(height, width, gt_occluded)};
    const amcs::AmodalMask pred{PlaneToRaster(height, width, pred_visible),
                                PlaneToRaster(height, width, pred_occluded)};
    std::optional<amcs::BinaryMask> mask;
    if (region != nullptr) {
      mask = PlaneToRaster(height, width, region);
      for (auto& v : mask->data()) v = v != 0 ? 1 : 0;
    }
    acc->acc.AccumulateFrame(gt, pred, mask ? &*mask : nullptr);
    return AMCS_OK;
  });
}

amcs_status amcs_accumulator_merge(amcs_accumulator* dst, const amcs_accumulator* src) {
  return Guard([&] {
    Require(dst != nullptr && src != nullptr, "null accumulator");
    dst->acc.Merge(src->acc);
    return AMCS_OK;
  });
}

amcs_status amcs_accumulator_counts(const amcs_accumulator* acc, int variant, int class_id,
                                    int64_t* tp, int64_t* fp, int64_t* fn) {
  return Guard([&] {
    Require(acc != nullptr, "null accumulator");
    Require(variant >= 0 && variant < amcs::kNumVariants, "variant out of range");
    Require(class_id >= 0 && class_id < amcs::kNumClasses, "class out of range");
    const auto& c = acc->acc.counts(static_cast<amcs::Variant>(variant), class_id);
    if (tp != nullptr) *tp = static_cast<int64_t>(c.tp);
    if (fp != nullptr) *fp = static_cast<int64_t>(c.fp);
    if (fn != nullptr) *fn = static_cast<int64_t>(c.fn);
    return AMCS_OK;
  });
}

amcs_status amcs_accumulator_report(const amcs_accumulator* acc, int strict_mean,
                                    double miou[3], int defined[3], char** json) {
  return Guard([&] {
    Require(acc != nullptr, "null accumulator");
    const auto report = amcs::Finalize(acc->acc, strict_mean != 0);
    for (int v = 0; v < amcs::kNumVariants; ++v) {
      const auto& m = report[static_cast<amcs::Variant>(v)].mean_iou;
      if (miou != nullptr) miou[v] = m.value_or(0.0);
      if (defined != nullptr) defined[v] = m.has_value() ? 1 : 0;
    }
    if (json != nullptr) *json = CopyString(amcs::ReportToJson(report));
    return AMCS_OK;
  });
}

amcs_status amcs_run_extract(const amcs_extract_options* opts, amcs_extract_summary* summary) {
  return Guard([&] {
    Require(opts != nullptr && opts->root && opts->split_list && opts->bank_dir,
            "extract needs root, split list and bank directory");
    amcs::ExtractOptions o;
    o.root = opts->root;
    o.split_list = opts->split_list;
    o.bank_dir = opts->bank_dir;
    if (opts->min_width > 0) o.filter.min_width = opts->min_width;
    if (opts->min_height > 0) o.filter.min_height = opts->min_height;
    o.workers = opts->workers;
    const auto s = amcs::RunExtract(o);
    if (summary != nullptr) {
      *summary = {s.frames, s.instances_seen, s.filtered_out, s.available, s.errors.size()};
    }
    return FinishRun(s.errors);
  });
}

amcs_status amcs_run_generate(const amcs_generate_options* opts, amcs_generate_summary* summary) {
  return Guard([&] {
    Require(opts != nullptr && opts->root && opts->bank_dir && opts->split_list && opts->out,
            "generate needs root, bank, split list and output directory");
    amcs::GenerateOptions o;
    o.root = opts->root;
    o.bank_dir = opts->bank_dir;
    o.split_list = opts->split_list;
    o.out = opts->out;
    if (opts->split_name != nullptr) o.split_name = opts->split_name;
    if (opts->max_occlusion_ratio >= 0) o.config.max_occlusion_ratio = opts->max_occlusion_ratio;
    if (opts->blend_kernel > 0) o.config.blend_kernel = opts->blend_kernel;
    if (opts->blend_sigma > 0) o.config.blend_sigma = opts->blend_sigma;
    o.seed_given = opts->has_seed != 0;
    o.config.master_seed = opts->seed;
    o.workers = opts->workers;
    const auto s = amcs::RunGenerate(o);
    if (summary != nullptr) {
      *summary = {s.frames, s.pastes, s.warnings, s.mean_achieved_ratio, s.master_seed,
                  s.errors.size()};
    }
    return FinishRun(s.errors);
  });
}

amcs_status amcs_run_evaluate(const amcs_evaluate_options* opts, amcs_evaluate_summary* summary) {
  return Guard([&] {
    Require(opts != nullptr && opts->ground_truth && opts->predictions && opts->split_list &&
                opts->out,
            "evaluate needs ground truth, predictions, split list and output directory");
    Require(opts->format == AMCS_FORMAT_PNG || opts->format == AMCS_FORMAT_TENSOR,
            "unknown prediction format");
    amcs::EvaluateOptions o;
    o.ground_truth = opts->ground_truth;
    o.predictions = opts->predictions;
    o.split_list = opts->split_list;
    o.out = opts->out;
    o.bank_dir = OptionalPath(opts->bank_dir);
    o.scheme = OptionalPath(opts->scheme);
    o.format = opts->format == AMCS_FORMAT_TENSOR ? amcs::PredictionFormat::kTensor
                                                  : amcs::PredictionFormat::kPng;
    o.strict_mean = opts->strict_mean != 0;
    o.workers = opts->workers;
    const auto s = amcs::RunEvaluate(o);
    if (summary != nullptr) {
      *summary = {};
      summary->frames = s.frames;
      const std::optional<double> m[3] = {s.miou_visible, s.miou_invisible, s.miou_total};
      for (int v = 0; v < 3; ++v) {
        summary->miou[v] = m[v].value_or(0.0);
        summary->defined[v] = m[v].has_value() ? 1 : 0;
      }
      summary->missing = s.missing.size();
      summary->failed_frames = s.errors.size();
      summary->text = CopyString(s.text);
    }
    return FinishRun(s.errors, s.missing);
  });
}

amcs_status amcs_run_stats(const amcs_stats_options* opts, amcs_stats_summary* summary) {
  return Guard([&] {
    Require(opts != nullptr && opts->generated && opts->split_list && opts->out,
            "stats needs generated dataset, split list and output directory");
    amcs::StatsOptions o;
    o.generated = opts->generated;
    o.split_list = opts->split_list;
    o.out = opts->out;
    o.original_root = OptionalPath(opts->original_root);
    o.bank_dir = OptionalPath(opts->bank_dir);
    if (opts->prior_class >= 0) {
      Require(opts->prior_class < amcs::kNumClasses, "prior class out of range");
      o.prior_class = static_cast<std::uint8_t>(opts->prior_class);
    }
    if (opts->downsample > 0) o.downsample = opts->downsample;
    o.svg = opts->svg != 0;
    o.workers = opts->workers;
    const auto s = amcs::RunStats(o);
    if (summary != nullptr) {
      *summary = {};
      summary->frames = s.frames;
      summary->has_similarity = s.spearman_visible.has_value() ? 1 : 0;
      summary->spearman_visible = s.spearman_visible.value_or(0.0);
      summary->has_prior_intersection = s.prior_intersection.has_value() ? 1 : 0;
      summary->prior_intersection = s.prior_intersection.value_or(0.0);
      summary->failed_frames = s.errors.size();
    }
    return FinishRun(s.errors);
  });
}

amcs_status amcs_run_encode(const amcs_codec_options* opts, amcs_codec_summary* summary) {
  return Guard([&] {
    Require(opts != nullptr && opts->input && opts->split_list && opts->out,
            "encode needs masks, split list and output directory");
    amcs::EncodeOptions o;
    o.masks = opts->input;
    o.split_list = opts->split_list;
    o.out = opts->out;
    o.scheme = OptionalPath(opts->scheme);
    if (opts->preset_groups > 0) o.preset_groups = opts->preset_groups;
    o.workers = opts->workers;
    const auto s = amcs::RunEncode(o);
    if (summary != nullptr) {
      *summary = {};
      summary->frames = s.frames;
      summary->vector_length = s.vector_length;
      summary->invalid_pixels = s.invalid_pixels;
      summary->same_group_dropped = s.same_group_dropped;
      summary->failed_frames = s.errors.size();
    }
    return FinishRun(s.errors);
  });
}

amcs_status amcs_run_decode(const amcs_codec_options* opts, amcs_codec_summary* summary) {
  return Guard([&] {
    Require(opts != nullptr && opts->input && opts->split_list && opts->out,
            "decode needs tensors, split list and output directory");
    amcs::DecodeOptions o;
    o.tensors = opts->input;
    o.split_list = opts->split_list;
    o.out = opts->out;
    o.scheme = OptionalPath(opts->scheme);
    if (opts->preset_groups > 0) o.preset_groups = opts->preset_groups;
    o.workers = opts->workers;
    const auto s = amcs::RunDecode(o);
    if (summary != nullptr) {
      *summary = {};
      summary->frames = s.frames;
      summary->visible_fallbacks = s.visible_fallbacks;
      summary->failed_frames = s.errors.size();
    }
    return FinishRun(s.errors);
  });
}

}  // extern "C"
