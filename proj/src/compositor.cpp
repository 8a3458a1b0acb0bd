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
#include "amcs/compositor.hpp"

#include <cmath>

#include "amcs/error.hpp"
#include "json.hpp"

namespace amcs {
namespace {

std::uint64_t SplitMix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t Fnv1a64(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

bool FootprintOverlaps(const BinaryMask& footprint, const BinaryMask& occupied, int top,
                       int left) {
  for (int r = 0; r < footprint.height(); ++r) {
    for (int c = 0; c < footprint.width(); ++c) {
      if (footprint.at(r, c) && occupied.at(top + r, left + c)) return true;
    }
  }
  return false;
}

int TopRow(const InstancePatch& patch) { return patch.anchor_row - patch.bbox.height + 1; }

bool FitsVertically(const InstancePatch& patch, int image_height) {
  return TopRow(patch) >= 0 && patch.anchor_row < image_height;
}

// Stamps a paste into the working state. Returns the footprint pixel count.
std::int64_t ApplyPaste(RgbImage& image, AmodalMask& mask, BinaryMask& occupied,
                        const PatchPixels& px, std::uint8_t class_id, int top, int left,
                        const GenerationConfig& cfg) {
  const Raster<float> alpha = BlendAlpha(px.mask, cfg.blend_kernel, cfg.blend_sigma);
  BlendPasteInPlace(image, px, alpha, top, left);
  std::int64_t count = 0;
  for (int r = 0; r < px.mask.height(); ++r) {
    for (int c = 0; c < px.mask.width(); ++c) {
      if (!px.mask.at(r, c)) continue;
      const int y = top + r;
      const int x = left + c;
      if (mask.occluded.at(y, x) == kIgnoreLabel) mask.occluded.at(y, x) = mask.visible.at(y, x);
      mask.visible.at(y, x) = class_id;
      occupied.at(y, x) = 1;
      ++count;
    }
  }
  return count;
}

}  // namespace

void GenerationConfig::Validate() const {
  if (!(max_occlusion_ratio >= 0.0 && max_occlusion_ratio < 1.0))
    Throw(ErrorCode::kInvalidInput, "max_occlusion_ratio must lie in [0,1)");
  if (blend_kernel < 3 || blend_kernel % 2 == 0)
    Throw(ErrorCode::kInvalidInput, "blend_kernel must be odd and >= 3");
  if (!(blend_sigma > 0.0)) Throw(ErrorCode::kInvalidInput, "blend_sigma must be positive");
  if (max_place_attempts < 1) Throw(ErrorCode::kInvalidInput, "max_place_attempts must be >= 1");
  if (max_patch_redraws < 0) Throw(ErrorCode::kInvalidInput, "max_patch_redraws must be >= 0");
}

std::uint64_t DeriveFrameSeed(std::uint64_t master_seed, std::string_view frame_id) noexcept {
  const std::string stem = FrameStem(frame_id);
  return SplitMix64(SplitMix64(master_seed) ^ Fnv1a64(stem));
}

double SampleOcclusionRatio(Rng& rng, double max_ratio) {
  std::uniform_real_distribution<double> dist(0.0, max_ratio);
  return max_ratio > 0.0 ? dist(rng) : 0.0;
}

Placement PlaceOccluder(Rng& rng, const InstancePatch& patch, const BinaryMask& footprint,
                        const BinaryMask& occupied, int max_attempts) {
  Placement result;
  const int width = occupied.width();
  if (patch.bbox.width > width || !FitsVertically(patch, occupied.height())) return result;
  const int top = TopRow(patch);
  std::uniform_int_distribution<int> column(0, width - patch.bbox.width);
  while (result.attempts < max_attempts) {
    ++result.attempts;
    const int left = column(rng);
    if (!FootprintOverlaps(footprint, occupied, top, left)) {
      result.col = left;
      break;
    }
  }
  return result;
}

std::vector<double> GaussianKernel1D(int size, double sigma) {
  std::vector<double> w(static_cast<std::size_t>(size));
  const int radius = size / 2;
  double sum = 0.0;
  for (int i = 0; i < size; ++i) {
    const double d = i - radius;
    w[static_cast<std::size_t>(i)] = std::exp(-d * d / (2.0 * sigma * sigma));
    sum += w[static_cast<std::size_t>(i)];
  }
  for (double& v : w) v /= sum;
  return w;
}

Raster<float> BlendAlpha(const BinaryMask& mask, int kernel, double sigma) {
  const int h = mask.height();
  const int w = mask.width();
  const int radius = kernel / 2;
  const std::vector<double> weights = GaussianKernel1D(kernel, sigma);

  // Summed-area table of the mask detects saturated windows exactly.
  std::vector<int> sat(static_cast<std::size_t>(h + 1) * (w + 1), 0);
  auto sat_at = [&](int r, int c) -> int& {
    return sat[static_cast<std::size_t>(r) * (w + 1) + c];
  };
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      sat_at(r + 1, c + 1) = mask.at(r, c) + sat_at(r, c + 1) + sat_at(r + 1, c) - sat_at(r, c);
    }
  }

  Raster<double> horizontal(h, w);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) {
        const int x = c + k;
        if (x >= 0 && x < w && mask.at(r, x)) acc += weights[static_cast<std::size_t>(k + radius)];
      }
      horizontal.at(r, c) = acc;
    }
  }

  Raster<float> alpha(h, w);
  const int full = kernel * kernel;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const int r0 = std::max(r - radius, 0), r1 = std::min(r + radius + 1, h);
      const int c0 = std::max(c - radius, 0), c1 = std::min(c + radius + 1, w);
      const int ones = sat_at(r1, c1) - sat_at(r0, c1) - sat_at(r1, c0) + sat_at(r0, c0);
      if (ones == 0) continue;
      if (ones == full) {
        alpha.at(r, c) = 1.0f;
        continue;
      }
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) {
        const int y = r + k;
        if (y >= 0 && y < h) acc += weights[static_cast<std::size_t>(k + radius)] * horizontal.at(y, c);
      }
      alpha.at(r, c) = static_cast<float>(std::clamp(acc, 0.0, 1.0));
    }
  }
  return alpha;
}

void BlendPasteInPlace(RgbImage& image, const PatchPixels& patch, const Raster<float>& alpha,
                       int top, int left) {
  const int h = patch.mask.height();
  const int w = patch.mask.width();
  if (top < 0 || left < 0 || top + h > image.height() || left + w > image.width())
    Throw(ErrorCode::kInvalidInput, "paste footprint outside image bounds");
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const float a = alpha.at(r, c);
      if (a == 0.0f) continue;
      for (int ch = 0; ch < 3; ++ch) {
        const float src = static_cast<float>(patch.rgb.at(r, c, ch)) / 255.0f;
        float& dst = image.at(top + r, left + c, ch);
        dst = a * src + (1.0f - a) * dst;
      }
    }
  }
}

RgbImage BlendPaste(const RgbImage& image, const PatchPixels& patch, int top, int left,
                    int kernel, double sigma) {
  RgbImage out = image;
  BlendPasteInPlace(out, patch, BlendAlpha(patch.mask, kernel, sigma), top, left);
  return out;
}

ComposedFrame ComposeFrame(const LabeledFrame& target, const InstanceBank& bank,
                           const GenerationConfig& cfg) {
  cfg.Validate();
  const int h = target.image.height();
  const int w = target.image.width();

  ComposedFrame out;
  out.image = target.image;
  out.mask = {target.semantic, LabelMap(h, w, 1, kIgnoreLabel)};
  GenerationManifest& m = out.manifest;
  m.frame_id = target.frame_id;
  m.seed = DeriveFrameSeed(cfg.master_seed, target.frame_id);
  m.image_pixels = static_cast<std::int64_t>(h) * w;

  Rng rng(m.seed);
  m.drawn_ratio = SampleOcclusionRatio(rng, cfg.max_occlusion_ratio);
  const std::vector<std::size_t> candidates = bank.CandidatesFor(target.frame_id);
  BinaryMask occupied(h, w);
  const double total = static_cast<double>(m.image_pixels);

  if (m.drawn_ratio > 0.0 && candidates.empty()) m.ratio_reached = false;
  if (m.drawn_ratio > 0.0 && !candidates.empty()) {
    std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
    while (static_cast<double>(m.pasted_pixels) / total <= m.drawn_ratio) {
      bool pasted = false;
      for (int draw = 0; draw <= cfg.max_patch_redraws && !pasted; ++draw) {
        const std::size_t index = candidates[pick(rng)];
        const InstancePatch& patch = bank.patch(index);
        if (patch.bbox.width > w || !FitsVertically(patch, h)) continue;
        const auto px = bank.Pixels(index);
        const Placement place =
            PlaceOccluder(rng, patch, px->mask, occupied, cfg.max_place_attempts);
        if (!place.col) continue;
        const std::int64_t n = ApplyPaste(out.image, out.mask, occupied, *px, patch.class_id,
                                          TopRow(patch), *place.col, cfg);
        m.pastes.push_back({patch.id(), patch.class_id, patch.anchor_row, *place.col, n,
                            place.attempts});
        m.pasted_pixels += n;
        pasted = true;
      }
      if (!pasted) {
        m.ratio_reached = false;
        break;
      }
    }
  }
  m.warning = !m.ratio_reached;
  m.achieved_ratio = static_cast<double>(m.pasted_pixels) / total;
  return out;
}

AmodalFrame ReplayManifest(const LabeledFrame& target, const InstanceBank& bank,
                           const GenerationManifest& manifest, const GenerationConfig& cfg) {
  const int h = target.image.height();
  const int w = target.image.width();
  AmodalFrame out{target.image, {target.semantic, LabelMap(h, w, 1, kIgnoreLabel)}};
  BinaryMask occupied(h, w);
  for (const PasteRecord& rec : manifest.pastes) {
    const auto index = bank.Find(rec.patch_id);
    if (!index) Throw(ErrorCode::kManifestMismatch, "patch " + rec.patch_id + " not in bank");
    const InstancePatch& patch = bank.patch(*index);
    if (patch.class_id != rec.class_id || patch.anchor_row != rec.row)
      Throw(ErrorCode::kManifestMismatch, "patch " + rec.patch_id + " disagrees with bank");
    const int top = TopRow(patch);
    if (top < 0 || rec.row >= h || rec.col < 0 || rec.col + patch.bbox.width > w)
      Throw(ErrorCode::kManifestMismatch, "paste " + rec.patch_id + " outside frame");
    const auto px = bank.Pixels(*index);
    const std::int64_t n =
        ApplyPaste(out.image, out.mask, occupied, *px, patch.class_id, top, rec.col, cfg);
    if (n != rec.pixel_count)
      Throw(ErrorCode::kManifestMismatch, "pixel count differs for " + rec.patch_id);
  }
  return out;
}

BinaryMask OccluderRegion(const InstanceBank& bank, const GenerationManifest& manifest,
                          int height, int width) {
  BinaryMask region(height, width);
  for (const PasteRecord& rec : manifest.pastes) {
    const auto index = bank.Find(rec.patch_id);
    if (!index) Throw(ErrorCode::kManifestMismatch, "patch " + rec.patch_id + " not in bank");
    const InstancePatch& patch = bank.patch(*index);
    const auto px = bank.Pixels(*index);
    const int top = TopRow(patch);
    for (int r = 0; r < px->mask.height(); ++r) {
      for (int c = 0; c < px->mask.width(); ++c) {
        const int y = top + r, x = rec.col + c;
        if (px->mask.at(r, c) && y >= 0 && y < height && x >= 0 && x < width) region.at(y, x) = 1;
      }
    }
  }
  return region;
}

std::string ManifestToJson(const GenerationManifest& m) {
  nlohmann::ordered_json j;
  j["frame_id"] = m.frame_id;
  j["seed"] = m.seed;
  j["drawn_ratio"] = m.drawn_ratio;
  j["achieved_ratio"] = m.achieved_ratio;
  j["pasted_pixels"] = m.pasted_pixels;
  j["image_pixels"] = m.image_pixels;
  j["num_occluders"] = m.pastes.size();
  j["ratio_reached"] = m.ratio_reached;
  j["warning"] = m.warning;
  auto& pastes = j["pastes"] = nlohmann::ordered_json::array();
  for (const auto& p : m.pastes) {
    pastes.push_back({{"patch_id", p.patch_id},
                      {"class_id", p.class_id},
                      {"row", p.row},
                      {"col", p.col},
                      {"pixel_count", p.pixel_count},
                      {"attempts", p.attempts}});
  }
  return j.dump(2) + "\n";
}

GenerationManifest ManifestFromJson(std::string_view text) {
  GenerationManifest m;
  try {
    const auto j = nlohmann::json::parse(text);
    m.frame_id = j.at("frame_id").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.drawn_ratio = j.at("drawn_ratio").get<double>();
    m.achieved_ratio = j.at("achieved_ratio").get<double>();
    m.pasted_pixels = j.at("pasted_pixels").get<std::int64_t>();
    m.image_pixels = j.at("image_pixels").get<std::int64_t>();
    m.ratio_reached = j.at("ratio_reached").get<bool>();
    m.warning = j.at("warning").get<bool>();
    for (const auto& p : j.at("pastes")) {
      m.pastes.push_back({p.at("patch_id").get<std::string>(), p.at("class_id").get<std::uint8_t>(),
                          p.at("row").get<int>(), p.at("col").get<int>(),
                          p.at("pixel_count").get<std::int64_t>(), p.at("attempts").get<int>()});
    }
  } catch (const nlohmann::json::exception& e) {
    Throw(ErrorCode::kManifestMismatch, std::string("malformed manifest: ") + e.what());
  }
  return m;
}

}  // namespace amcs
