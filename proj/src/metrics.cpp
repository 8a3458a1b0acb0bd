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
#include "amcs/metrics.hpp"

#include <cstdio>

#include "amcs/error.hpp"
#include "json.hpp"

namespace amcs {
namespace {

bool IsClass(std::uint8_t v) { return v < kNumClasses; }

void CheckShapes(const AmodalMask& gt, const AmodalMask& pred) {
  if (!gt.visible.same_shape(gt.occluded) || !pred.visible.same_shape(pred.occluded) ||
      !gt.visible.same_shape(pred.visible)) {
    Throw(ErrorCode::kEvalError, "prediction and ground truth shapes disagree");
  }
}

std::string Percent(const std::optional<double>& v) {
  if (!v) return "undefined";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f%%", *v * 100.0);
  return buf;
}

}  // namespace

const char* VariantName(Variant v) noexcept {
  switch (v) {
    case Variant::kVisible: return "mIoU";
    case Variant::kInvisible: return "mIoU_inv";
    case Variant::kTotal: return "mIoU_total";
  }
  return "?";
}

void ConfusionAccumulator::AccumulateVisible(const AmodalMask& gt, const AmodalMask& pred) {
  CheckShapes(gt, pred);
  const auto g = gt.visible.data();
  const auto p = pred.visible.data();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!IsClass(g[i])) continue;
    ++pixels_[0];
    if (g[i] == p[i]) {
      ++at(Variant::kVisible, g[i]).tp;
    } else {
      ++at(Variant::kVisible, g[i]).fn;
      if (IsClass(p[i])) ++at(Variant::kVisible, p[i]).fp;
    }
  }
}

void ConfusionAccumulator::AccumulateInvisible(const AmodalMask& gt, const AmodalMask& pred,
                                               const BinaryMask& region) {
  CheckShapes(gt, pred);
  if (!region.same_shape(gt.visible))
    Throw(ErrorCode::kEvalError, "occluder region does not match frame dimensions");
  const auto g = gt.occluded.data();
  const auto p = pred.occluded.data();
  const auto in = region.data();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!in[i] || !IsClass(g[i])) continue;
    ++pixels_[1];
    if (g[i] == p[i]) {
      ++at(Variant::kInvisible, g[i]).tp;
    } else {
      ++at(Variant::kInvisible, g[i]).fn;
      if (IsClass(p[i])) ++at(Variant::kInvisible, p[i]).fp;
    }
  }
}

void ConfusionAccumulator::AccumulateTotal(const AmodalMask& gt, const AmodalMask& pred) {
  CheckShapes(gt, pred);
  const auto g1 = gt.visible.data();
  const auto g2 = gt.occluded.data();
  const auto p1 = pred.visible.data();
  const auto p2 = pred.occluded.data();
  for (std::size_t i = 0; i < g1.size(); ++i) {
    const bool use1 = IsClass(g1[i]);
    const bool use2 = IsClass(g2[i]);
    if (!use1 && !use2) continue;
    ++pixels_[2];
    // Only classes appearing in an active slot can satisfy a predicate.
    std::uint8_t touched[4];
    int n = 0;
    auto add = [&](std::uint8_t s) {
      if (!IsClass(s)) return;
      for (int j = 0; j < n; ++j) {
        if (touched[j] == s) return;
      }
      touched[n++] = s;
    };
    if (use1) {
      add(g1[i]);
      add(p1[i]);
    }
    if (use2) {
      add(g2[i]);
      add(p2[i]);
    }
    for (int j = 0; j < n; ++j) {
      const std::uint8_t s = touched[j];
      const bool tp = (use1 && g1[i] == s && p1[i] == s) || (use2 && g2[i] == s && p2[i] == s);
      const bool fp = (use1 && g1[i] != s && p1[i] == s) || (use2 && g2[i] != s && p2[i] == s);
      const bool fn = (use1 && g1[i] == s && p1[i] != s) || (use2 && g2[i] == s && p2[i] != s);
      ClassCounts& c = at(Variant::kTotal, s);
      c.tp += tp;
      c.fp += fp;
      c.fn += fn;
    }
  }
}

void ConfusionAccumulator::AccumulateFrame(const AmodalMask& gt, const AmodalMask& pred,
                                           const BinaryMask* region) {
  AccumulateVisible(gt, pred);
  if (region) {
    AccumulateInvisible(gt, pred, *region);
  } else {
    AccumulateInvisible(gt, pred, BinaryMask(gt.height(), gt.width(), 1, 1));
  }
  AccumulateTotal(gt, pred);
}

void ConfusionAccumulator::Merge(const ConfusionAccumulator& other) {
  for (std::size_t v = 0; v < counts_.size(); ++v) {
    pixels_[v] += other.pixels_[v];
    for (std::size_t s = 0; s < counts_[v].size(); ++s) {
      counts_[v][s].tp += other.counts_[v][s].tp;
      counts_[v][s].fp += other.counts_[v][s].fp;
      counts_[v][s].fn += other.counts_[v][s].fn;
    }
  }
}

EvalReport Finalize(const ConfusionAccumulator& acc, bool strict_mean) {
  EvalReport report;
  report.strict_mean = strict_mean;
  for (int v = 0; v < kNumVariants; ++v) {
    VariantReport& vr = report.variants[static_cast<std::size_t>(v)];
    const Variant variant = static_cast<Variant>(v);
    vr.evaluated_pixels = acc.evaluated_pixels(variant);
    double sum = 0.0;
    int included = 0;
    for (int s = 0; s < kNumClasses; ++s) {
      const ClassCounts& c = acc.counts(variant, s);
      if (c.denominator() == 0) {
        vr.excluded_classes.push_back(s);
        continue;
      }
      const double iou = static_cast<double>(c.tp) / static_cast<double>(c.denominator());
      vr.iou[static_cast<std::size_t>(s)] = iou;
      sum += iou;
      ++included;
    }
    if (vr.evaluated_pixels == 0) continue;
    if (strict_mean) {
      vr.mean_iou = sum / kNumClasses;
    } else if (included > 0) {
      vr.mean_iou = sum / included;
    }
  }
  return report;
}

std::string ReportToJson(const EvalReport& report) {
  nlohmann::ordered_json j;
  j["mean_mode"] = report.strict_mean ? "strict" : "present";
  for (int v = 0; v < kNumVariants; ++v) {
    const VariantReport& vr = report.variants[static_cast<std::size_t>(v)];
    nlohmann::ordered_json jv;
    jv["mean_iou"] = vr.mean_iou ? nlohmann::ordered_json(*vr.mean_iou) : nullptr;
    jv["evaluated_pixels"] = vr.evaluated_pixels;
    jv["excluded_classes"] = vr.excluded_classes;
    auto& per_class = jv["per_class"] = nlohmann::ordered_json::array();
    for (int s = 0; s < kNumClasses; ++s) {
      const auto& iou = vr.iou[static_cast<std::size_t>(s)];
      per_class.push_back({{"class_id", s},
                           {"class", ClassName(static_cast<std::uint8_t>(s))},
                           {"iou", iou ? nlohmann::ordered_json(*iou) : nullptr}});
    }
    j[VariantName(static_cast<Variant>(v))] = std::move(jv);
  }
  return j.dump(2) + "\n";
}

std::string ReportToText(const EvalReport& report) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-14s %12s %12s %12s\n", "class", "mIoU", "mIoU_inv",
                "mIoU_total");
  out += line;
  for (int s = 0; s < kNumClasses; ++s) {
    std::snprintf(line, sizeof(line), "%-14s %12s %12s %12s\n",
                  ClassName(static_cast<std::uint8_t>(s)),
                  Percent(report[Variant::kVisible].iou[static_cast<std::size_t>(s)]).c_str(),
                  Percent(report[Variant::kInvisible].iou[static_cast<std::size_t>(s)]).c_str(),
                  Percent(report[Variant::kTotal].iou[static_cast<std::size_t>(s)]).c_str());
    out += line;
  }
  std::snprintf(line, sizeof(line), "%-14s %12s %12s %12s\n",
                report.strict_mean ? "mean (1/S)" : "mean",
                Percent(report[Variant::kVisible].mean_iou).c_str(),
                Percent(report[Variant::kInvisible].mean_iou).c_str(),
                Percent(report[Variant::kTotal].mean_iou).c_str());
  out += line;
  return out;
}

}  // namespace amcs
