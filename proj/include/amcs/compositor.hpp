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
#ifndef AMCS_COMPOSITOR_HPP_
#define AMCS_COMPOSITOR_HPP_

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "amcs/cityscapes_io.hpp"
#include "amcs/instance_bank.hpp"
#include "amcs/raster.hpp"

namespace amcs {

using Rng = std::mt19937_64;

struct GenerationConfig {
  double max_occlusion_ratio = 0.1;
  int blend_kernel = 5;
  double blend_sigma = 1.0;
  int max_place_attempts = 50;
  int max_patch_redraws = 10;
  std::uint64_t master_seed = 0;

  /// Throws InvalidInput. A ratio of 0 is accepted and disables pasting.
  void Validate() const;
};

struct PasteRecord {
  std::string patch_id;
  std::uint8_t class_id = kIgnoreLabel;
  int row = 0;  // bottom row of the pasted bbox; equals the patch anchor_row
  int col = 0;  // left edge
  std::int64_t pixel_count = 0;
  int attempts = 0;

  friend bool operator==(const PasteRecord&, const PasteRecord&) = default;
};

struct GenerationManifest {
  std::string frame_id;
  std::uint64_t seed = 0;
  double drawn_ratio = 0.0;
  double achieved_ratio = 0.0;
  std::int64_t pasted_pixels = 0;
  std::int64_t image_pixels = 0;
  bool ratio_reached = true;
  // Set when the drawn ratio was positive but placement gave up first.
  bool warning = false;
  std::vector<PasteRecord> pastes;

  friend bool operator==(const GenerationManifest&, const GenerationManifest&) = default;
};

struct ComposedFrame {
  RgbImage image;
  AmodalMask mask;
  GenerationManifest manifest;
};

/// splitmix64 over the master seed and an FNV-1a hash of the frame stem.
std::uint64_t DeriveFrameSeed(std::uint64_t master_seed, std::string_view frame_id) noexcept;

/// Uniform draw in [0, max_ratio].
double SampleOcclusionRatio(Rng& rng, double max_ratio);

struct Placement {
  std::optional<int> col;  // empty when rejected
  int attempts = 0;
};

/// Samples left-edge columns uniformly from [0, W - bbox_width] with the row
/// pinned to the patch anchor row, and accepts the first one whose mask
/// footprint avoids `occupied`.
Placement PlaceOccluder(Rng& rng, const InstancePatch& patch, const BinaryMask& footprint,
                        const BinaryMask& occupied, int max_attempts);

/// Normalized discrete Gaussian weights, `size` taps centred on size/2.
std::vector<double> GaussianKernel1D(int size, double sigma);

/// Mask (zero-padded outside the crop) convolved with the separable
/// Gaussian. Windows that are entirely inside or outside the mask give
/// exactly 1 or 0.
Raster<float> BlendAlpha(const BinaryMask& mask, int kernel, double sigma);

/// out = alpha * patch + (1 - alpha) * image over the patch crop placed with
/// its top-left corner at (top, left).
void BlendPasteInPlace(RgbImage& image, const PatchPixels& patch, const Raster<float>& alpha,
                       int top, int left);

RgbImage BlendPaste(const RgbImage& image, const PatchPixels& patch, int top, int left,
                    int kernel = 5, double sigma = 1.0);

/// Synthesizes one amodal frame from `target` using occluders from other
/// frames in `bank`.
ComposedFrame ComposeFrame(const LabeledFrame& target, const InstanceBank& bank,
                           const GenerationConfig& cfg);

/// Re-applies the recorded pastes. Only the blend settings of `cfg` are used.
AmodalFrame ReplayManifest(const LabeledFrame& target, const InstanceBank& bank,
                           const GenerationManifest& manifest, const GenerationConfig& cfg);

/// Union of the binary-mask footprints recorded in a manifest.
BinaryMask OccluderRegion(const InstanceBank& bank, const GenerationManifest& manifest,
                          int height, int width);

std::string ManifestToJson(const GenerationManifest& manifest);
GenerationManifest ManifestFromJson(std::string_view text);

}  // namespace amcs

#endif  // AMCS_COMPOSITOR_HPP_
