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
// Command-line front end. Everything goes through the C API in libamcs.
#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "amcs/amcs.h"

namespace {

constexpr int kExitPartial = 1;
constexpr int kExitError = 2;

const char* OrNull(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

int Report(amcs_status status) {
  if (status == AMCS_OK) return 0;
  std::fprintf(stderr, "error (%s): %s\n", amcs_status_name(status), amcs_last_error());
  return status == AMCS_ERR_PARTIAL_FAILURE ? kExitPartial : kExitError;
}

void PrintMiou(const char* name, const amcs_evaluate_summary& s, int v) {
  if (s.defined[v]) {
    std::printf("%-11s %.4f\n", name, s.miou[v]);
  } else {
    std::printf("%-11s undefined\n", name);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Copy-paste amodal dataset toolkit"};
  app.set_version_flag("--version", std::string(amcs_version()));
  app.require_subcommand(1);

  int workers = 0;
  std::string root, bank, out, split, scheme, pred, original, split_name;
  int groups = 4;

  // extract
  amcs_extract_options ex{};
  auto* extract = app.add_subcommand("extract", "Build the instance bank from a split");
  extract->add_option("--root", root, "Cityscapes root")->required();
  extract->add_option("--split", split, "Split list of source frames")->required();
  extract->add_option("--bank", bank, "Bank directory to write")->required();
  extract->add_option("--min-width", ex.min_width, "Minimum bbox width")->default_val(10);
  extract->add_option("--min-height", ex.min_height, "Minimum bbox height")->default_val(20);
  extract->add_option("--workers", workers, "Worker threads (0 = all cores)");

  // generate
  amcs_generate_options gen{};
  gen.max_occlusion_ratio = 0.1;
  gen.blend_kernel = 5;
  gen.blend_sigma = 1.0;
  std::uint64_t seed = 0;
  auto* generate = app.add_subcommand("generate", "Compose amodal frames for a split");
  generate->add_option("--root", root, "Cityscapes root")->required();
  generate->add_option("--bank", bank, "Instance bank directory")->required();
  generate->add_option("--split", split, "Split list of target frames")->required();
  generate->add_option("--out", out, "Output dataset directory")->required();
  auto* seed_opt = generate->add_option("--seed", seed, "Master seed (drawn if absent)");
  generate->add_option("--max-occlusion-ratio", gen.max_occlusion_ratio,
                       "Upper bound of the per-frame occlusion ratio")
      ->default_val(0.1)
      ->check(CLI::Range(0.0, 1.0));
  generate->add_option("--blend-kernel", gen.blend_kernel, "Gaussian kernel size")->default_val(5);
  generate->add_option("--blend-sigma", gen.blend_sigma, "Gaussian sigma")->default_val(1.0);
  generate->add_option("--split-name", split_name, "Name of the written split list");
  generate->add_option("--workers", workers, "Worker threads (0 = all cores)");

  // evaluate
  amcs_evaluate_options ev{};
  std::string format = "png";
  bool strict = false;
  auto* evaluate = app.add_subcommand("evaluate", "Score predictions against a generated split");
  evaluate->add_option("--root", root, "Generated dataset (ground truth)")->required();
  evaluate->add_option("--pred", pred, "Prediction directory")->required();
  evaluate->add_option("--split", split, "Split list")->required();
  evaluate->add_option("--out", out, "Report directory")->required();
  evaluate->add_option("--bank", bank, "Bank used for generation (exact pasted regions)");
  evaluate->add_option("--scheme", scheme, "Grouping scheme JSON for tensor predictions");
  evaluate->add_option("--format", format, "Prediction format")
      ->check(CLI::IsMember({"png", "tensor"}));
  evaluate->add_flag("--strict-mean", strict, "Average over all 19 classes");
  evaluate->add_option("--workers", workers, "Worker threads (0 = all cores)");

  // stats
  amcs_stats_options st{};
  st.prior_class = 11;
  st.downsample = 8;
  bool no_svg = false;
  auto* stats = app.add_subcommand("stats", "Class frequency, location prior and census reports");
  stats->add_option("--root", root, "Generated dataset")->required();
  stats->add_option("--split", split, "Split list")->required();
  stats->add_option("--out", out, "Report directory")->required();
  stats->add_option("--original", original, "Cityscapes root for comparison");
  stats->add_option("--bank", bank, "Bank for the instance census");
  stats->add_option("--prior-class", st.prior_class, "trainId of the location prior")
      ->check(CLI::Range(0, 18));
  stats->add_option("--downsample", st.downsample, "Location prior cell size")
      ->check(CLI::PositiveNumber);
  stats->add_flag("--no-svg", no_svg, "Skip SVG figures");
  stats->add_option("--workers", workers, "Worker threads (0 = all cores)");

  // encode / decode
  auto* encode = app.add_subcommand("encode", "Write groupwise tensors for amodal masks");
  encode->add_option("--root", root, "Dataset with labels_visible/ and labels_occluded/")
      ->required();
  encode->add_option("--split", split, "Split list")->required();
  encode->add_option("--out", out, "Output directory")->required();
  encode->add_option("--scheme", scheme, "Grouping scheme JSON");
  encode->add_option("--groups", groups, "Preset scheme when --scheme is absent")
      ->check(CLI::IsMember({3, 4}));
  encode->add_option("--workers", workers, "Worker threads (0 = all cores)");

  auto* decode = app.add_subcommand("decode", "Turn groupwise tensors back into label PNGs");
  decode->add_option("--root", root, "Directory containing tensors/")->required();
  decode->add_option("--split", split, "Split list")->required();
  decode->add_option("--out", out, "Output directory")->required();
  decode->add_option("--scheme", scheme, "Grouping scheme JSON");
  decode->add_option("--groups", groups, "Preset scheme when --scheme is absent")
      ->check(CLI::IsMember({3, 4}));
  decode->add_option("--workers", workers, "Worker threads (0 = all cores)");

  CLI11_PARSE(app, argc, argv);

  if (extract->parsed()) {
    ex.root = root.c_str();
    ex.split_list = split.c_str();
    ex.bank_dir = bank.c_str();
    ex.workers = workers;
    amcs_extract_summary s{};
    const amcs_status status = amcs_run_extract(&ex, &s);
    std::printf("frames %zu\ninstances %lld\nfiltered %lld\navailable %zu\n", s.frames,
                static_cast<long long>(s.instances_seen), static_cast<long long>(s.filtered_out),
                s.available);
    return Report(status);
  }

  if (generate->parsed()) {
    gen.root = root.c_str();
    gen.bank_dir = bank.c_str();
    gen.split_list = split.c_str();
    gen.out = out.c_str();
    gen.split_name = OrNull(split_name);
    gen.has_seed = seed_opt->count() > 0 ? 1 : 0;
    gen.seed = seed;
    gen.workers = workers;
    amcs_generate_summary s{};
    const amcs_status status = amcs_run_generate(&gen, &s);
    std::printf("frames %zu\npastes %zu\nwarnings %zu\nmean_ratio %.6f\nseed %llu\n", s.frames,
                s.pastes, s.warnings, s.mean_achieved_ratio,
                static_cast<unsigned long long>(s.master_seed));
    if (s.failed_frames > 0) std::printf("failed %zu (see generate_errors.log)\n", s.failed_frames);
    return Report(status);
  }

  if (evaluate->parsed()) {
    ev.ground_truth = root.c_str();
    ev.predictions = pred.c_str();
    ev.split_list = split.c_str();
    ev.out = out.c_str();
    ev.bank_dir = OrNull(bank);
    ev.scheme = OrNull(scheme);
    ev.format = format == "tensor" ? AMCS_FORMAT_TENSOR : AMCS_FORMAT_PNG;
    ev.strict_mean = strict ? 1 : 0;
    ev.workers = workers;
    amcs_evaluate_summary s{};
    const amcs_status status = amcs_run_evaluate(&ev, &s);
    if (s.text != nullptr) {
      std::fputs(s.text, stdout);
      amcs_string_free(s.text);
    } else {
      PrintMiou("mIoU", s, AMCS_MIOU_VISIBLE);
      PrintMiou("mIoU_inv", s, AMCS_MIOU_INVISIBLE);
      PrintMiou("mIoU_total", s, AMCS_MIOU_TOTAL);
    }
    if (s.missing > 0) std::printf("missing predictions %zu\n", s.missing);
    return Report(status);
  }

  if (stats->parsed()) {
    st.generated = root.c_str();
    st.split_list = split.c_str();
    st.out = out.c_str();
    st.original_root = OrNull(original);
    st.bank_dir = OrNull(bank);
    st.svg = no_svg ? 0 : 1;
    st.workers = workers;
    amcs_stats_summary s{};
    const amcs_status status = amcs_run_stats(&st, &s);
    std::printf("frames %zu\n", s.frames);
    if (s.has_similarity) std::printf("visible_rank_correlation %.4f\n", s.spearman_visible);
    if (s.has_prior_intersection) {
      std::printf("location_prior_intersection %.4f\n", s.prior_intersection);
    }
    return Report(status);
  }

  amcs_codec_options co{};
  co.input = root.c_str();
  co.split_list = split.c_str();
  co.out = out.c_str();
  co.scheme = OrNull(scheme);
  co.preset_groups = groups;
  co.workers = workers;
  amcs_codec_summary s{};
  if (encode->parsed()) {
    const amcs_status status = amcs_run_encode(&co, &s);
    std::printf("frames %zu\nvector_length %d\ninvalid_pixels %lld\nsame_group_dropped %lld\n",
                s.frames, s.vector_length, static_cast<long long>(s.invalid_pixels),
                static_cast<long long>(s.same_group_dropped));
    return Report(status);
  }
  const amcs_status status = amcs_run_decode(&co, &s);
  std::printf("frames %zu\nvisible_fallbacks %lld\n", s.frames,
              static_cast<long long>(s.visible_fallbacks));
  return Report(status);
}
