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
#ifndef AMCS_METRICS_HPP_
#define AMCS_METRICS_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "amcs/cityscapes_io.hpp"
#include "amcs/raster.hpp"

namespace amcs {

enum class Variant : int { kVisible = 0, kInvisible = 1, kTotal = 2 };
inline constexpr int kNumVariants = 3;
const char* VariantName(Variant v) noexcept;

struct ClassCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;

  std::uint64_t denominator() const noexcept { return tp + fp + fn; }
  friend bool operator==(const ClassCounts&, const ClassCounts&) = default;
};

/// Per-class TP/FP/FN for the three mIoU variants. Additive across frames.
class ConfusionAccumulator {
 public:
  /// Standard per-class counting on the visible channels; gt 255 skipped.
  void AccumulateVisible(const AmodalMask& gt, const AmodalMask& pred);

  /// Occluded channels restricted to `region` (pasted footprints), skipping
  /// pixels whose gt occluded label is 255.
  void AccumulateInvisible(const AmodalMask& gt, const AmodalMask& pred,
                           const BinaryMask& region);

  /// Joint disjunctive predicates over both channels. A pixel may count
  /// toward several classes; channel slots with gt 255 are left out.
  void AccumulateTotal(const AmodalMask& gt, const AmodalMask& pred);

  /// All three; `region` may be null, in which case the full frame is used
  /// for the invisible variant.
  void AccumulateFrame(const AmodalMask& gt, const AmodalMask& pred, const BinaryMask* region);

  void Merge(const ConfusionAccumulator& other);

  const ClassCounts& counts(Variant v, int class_id) const {
    return counts_[static_cast<std::size_t>(v)][static_cast<std::size_t>(class_id)];
  }
  std::uint64_t evaluated_pixels(Variant v) const {
    return pixels_[static_cast<std::size_t>(v)];
  }

  friend bool operator==(const ConfusionAccumulator&, const ConfusionAccumulator&) = default;

 private:
  ClassCounts& at(Variant v, int class_id) {
    return counts_[static_cast<std::size_t>(v)][static_cast<std::size_t>(class_id)];
  }

  std::array<std::array<ClassCounts, kNumClasses>, kNumVariants> counts_{};
  std::array<std::uint64_t, kNumVariants> pixels_{};
};

struct VariantReport {
  std::array<std::optional<double>, kNumClasses> iou{};  // empty: zero denominator
  std::optional<double> mean_iou;                        // empty: undefined variant
  std::uint64_t evaluated_pixels = 0;
  std::vector<int> excluded_classes;
};

struct EvalReport {
  std::array<VariantReport, kNumVariants> variants;
  bool strict_mean = false;

  const VariantReport& operator[](Variant v) const {
    return variants[static_cast<std::size_t>(v)];
  }
};

/// IoU = TP / (TP + FP + FN). By default zero-denominator classes are left
/// out of the mean and listed; with `strict_mean` they count as 0 and the
/// mean divides by all 19 classes.
EvalReport Finalize(const ConfusionAccumulator& acc, bool strict_mean = false);

std::string ReportToJson(const EvalReport& report);
/// Three-column plain-text summary (mIoU, mIoU^inv, mIoU^total).
std::string ReportToText(const EvalReport& report);

}  // namespace amcs

#endif  // AMCS_METRICS_HPP_
