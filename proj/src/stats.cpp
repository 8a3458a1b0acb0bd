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
#include "amcs/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>

#include "amcs/error.hpp"
#include "json.hpp"

namespace amcs {
namespace {

std::vector<double> AverageRanks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

std::string Fmt(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

}  // namespace

void ClassFrequencyTable::Add(const AmodalMask& mask) {
  for (std::uint8_t v : mask.visible.data()) {
    if (v < kNumClasses) {
      ++visible[v];
      ++visible_total;
    }
  }
  for (std::uint8_t v : mask.occluded.data()) {
    if (v < kNumClasses) {
      ++occluded[v];
      ++occluded_total;
    }
  }
}

void ClassFrequencyTable::Merge(const ClassFrequencyTable& other) {
  for (int s = 0; s < kNumClasses; ++s) {
    visible[static_cast<std::size_t>(s)] += other.visible[static_cast<std::size_t>(s)];
    occluded[static_cast<std::size_t>(s)] += other.occluded[static_cast<std::size_t>(s)];
  }
  visible_total += other.visible_total;
  occluded_total += other.occluded_total;
}

double ClassFrequencyTable::visible_fraction(int class_id) const {
  if (visible_total == 0) return 0.0;
  return static_cast<double>(visible.at(static_cast<std::size_t>(class_id))) /
         static_cast<double>(visible_total);
}

double ClassFrequencyTable::occluded_fraction(int class_id) const {
  if (occluded_total == 0) return 0.0;
  return static_cast<double>(occluded.at(static_cast<std::size_t>(class_id))) /
         static_cast<double>(occluded_total);
}

ClassFrequencyTable ClassFrequencies(std::span<const AmodalMask> frames) {
  ClassFrequencyTable table;
  for (const auto& f : frames) table.Add(f);
  return table;
}

Raster<double> LocationPrior::Density() const {
  Raster<double> d(counts.height(), counts.width());
  if (occurrences == 0) return d;
  for (std::size_t i = 0; i < d.data().size(); ++i) {
    d.data()[i] = static_cast<double>(counts.data()[i]) / static_cast<double>(occurrences);
  }
  return d;
}

void LocationPrior::Add(const LabelMap& visible) {
  const int h = (visible.height() + downsample - 1) / downsample;
  const int w = (visible.width() + downsample - 1) / downsample;
  if (counts.empty()) {
    counts = Raster<std::uint64_t>(h, w);
  } else if (!counts.same_shape(h, w)) {
    Throw(ErrorCode::kInvalidInput, "location prior frames differ in size");
  }
  for (int r = 0; r < visible.height(); ++r) {
    for (int c = 0; c < visible.width(); ++c) {
      if (visible.at(r, c) != class_id) continue;
      ++counts.at(r / downsample, c / downsample);
      ++occurrences;
    }
  }
}

void LocationPrior::Merge(const LocationPrior& other) {
  if (other.counts.empty()) return;
  if (counts.empty()) {
    counts = other.counts;
    occurrences = other.occurrences;
    return;
  }
  if (!counts.same_shape(other.counts) || class_id != other.class_id ||
      downsample != other.downsample) {
    Throw(ErrorCode::kInvalidInput, "cannot merge incompatible location priors");
  }
  for (std::size_t i = 0; i < counts.data().size(); ++i) counts.data()[i] += other.counts.data()[i];
  occurrences += other.occurrences;
}

LocationPrior MakeLocationPrior(std::uint8_t class_id, int downsample) {
  if (downsample < 1) Throw(ErrorCode::kInvalidInput, "downsample factor must be >= 1");
  LocationPrior prior;
  prior.class_id = class_id;
  prior.downsample = downsample;
  return prior;
}

LocationPrior ComputeLocationPrior(std::span<const AmodalMask> frames, std::uint8_t class_id,
                                   int downsample) {
  LocationPrior prior = MakeLocationPrior(class_id, downsample);
  for (const auto& f : frames) prior.Add(f.visible);
  return prior;
}

double HistogramIntersection(const LocationPrior& a, const LocationPrior& b) {
  if (!a.counts.same_shape(b.counts))
    Throw(ErrorCode::kInvalidInput, "location priors differ in shape");
  const Raster<double> da = a.Density();
  const Raster<double> db = b.Density();
  double sum = 0.0;
  for (std::size_t i = 0; i < da.data().size(); ++i) sum += std::min(da.data()[i], db.data()[i]);
  return sum;
}

double SpearmanRho(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2)
    Throw(ErrorCode::kInvalidInput, "rank correlation needs two equal-length samples");
  const auto ra = AverageRanks(a);
  const auto rb = AverageRanks(b);
  const double n = static_cast<double>(a.size());
  const double mean = (n + 1.0) / 2.0;
  double cov = 0.0, va = 0.0, vb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    cov += (ra[i] - mean) * (rb[i] - mean);
    va += (ra[i] - mean) * (ra[i] - mean);
    vb += (rb[i] - mean) * (rb[i] - mean);
  }
  if (va == 0.0 || vb == 0.0) return 0.0;
  return cov / std::sqrt(va * vb);
}

std::vector<CensusRow> InstanceCensus(const InstanceBank& bank,
                                      std::span<const GenerationManifest> manifests) {
  std::map<std::uint8_t, CensusRow> rows;
  for (std::uint8_t c = label::kPerson; c <= label::kBicycle; ++c) rows[c].class_id = c;
  for (const auto& p : bank.patches()) ++rows.at(p.class_id).original;
  for (auto& [c, row] : rows) row.generated = row.original;
  for (const auto& m : manifests) {
    for (const auto& paste : m.pastes) {
      auto it = rows.find(paste.class_id);
      if (it == rows.end())
        Throw(ErrorCode::kInvalidInput, "manifest pastes non-instance class " +
                                            std::to_string(paste.class_id));
      ++it->second.generated;
    }
  }
  std::int64_t orig_total = 0, gen_total = 0;
  for (const auto& [c, row] : rows) {
    orig_total += row.original;
    gen_total += row.generated;
  }
  std::vector<CensusRow> out;
  for (auto& [c, row] : rows) {
    if (orig_total > 0) row.original_percent = 100.0 * static_cast<double>(row.original) / static_cast<double>(orig_total);
    if (gen_total > 0) row.generated_percent = 100.0 * static_cast<double>(row.generated) / static_cast<double>(gen_total);
    out.push_back(row);
  }
  return out;
}

std::string FrequenciesToCsv(const ClassFrequencyTable& table) {
  std::string out = "class_id,class,visible_pixels,visible_fraction,occluded_pixels,occluded_fraction\n";
  for (int s = 0; s < kNumClasses; ++s) {
    out += std::to_string(s) + "," + ClassName(static_cast<std::uint8_t>(s)) + "," +
           std::to_string(table.visible[static_cast<std::size_t>(s)]) + "," +
           Fmt("%.9f", table.visible_fraction(s)) + "," +
           std::to_string(table.occluded[static_cast<std::size_t>(s)]) + "," +
           Fmt("%.9f", table.occluded_fraction(s)) + "\n";
  }
  return out;
}

std::string FrequenciesToJson(const ClassFrequencyTable& table) {
  nlohmann::ordered_json j;
  j["visible_total"] = table.visible_total;
  j["occluded_total"] = table.occluded_total;
  auto& classes = j["classes"] = nlohmann::ordered_json::array();
  for (int s = 0; s < kNumClasses; ++s) {
    classes.push_back({{"class_id", s},
                       {"class", ClassName(static_cast<std::uint8_t>(s))},
                       {"visible_pixels", table.visible[static_cast<std::size_t>(s)]},
                       {"visible_fraction", table.visible_fraction(s)},
                       {"occluded_pixels", table.occluded[static_cast<std::size_t>(s)]},
                       {"occluded_fraction", table.occluded_fraction(s)}});
  }
  return j.dump(2) + "\n";
}

std::string CensusToCsv(const std::vector<CensusRow>& rows) {
  std::string out = "class_id,class,original,original_percent,generated,generated_percent\n";
  for (const auto& r : rows) {
    out += std::to_string(r.class_id) + "," + ClassName(r.class_id) + "," +
           std::to_string(r.original) + "," + Fmt("%.2f", r.original_percent) + "," +
           std::to_string(r.generated) + "," + Fmt("%.2f", r.generated_percent) + "\n";
  }
  return out;
}

std::string CensusToJson(const std::vector<CensusRow>& rows) {
  auto j = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    j.push_back({{"class_id", r.class_id},
                 {"class", ClassName(r.class_id)},
                 {"original", r.original},
                 {"original_percent", r.original_percent},
                 {"generated", r.generated},
                 {"generated_percent", r.generated_percent}});
  }
  return j.dump(2) + "\n";
}

std::string PriorToJson(const LocationPrior& prior) {
  nlohmann::ordered_json j;
  j["class_id"] = prior.class_id;
  j["class"] = ClassName(prior.class_id);
  j["downsample"] = prior.downsample;
  j["occurrences"] = prior.occurrences;
  j["empty"] = prior.empty();
  j["height"] = prior.counts.height();
  j["width"] = prior.counts.width();
  const Raster<double> d = prior.Density();
  j["density"] = std::vector<double>(d.data().begin(), d.data().end());
  return j.dump() + "\n";
}

std::string FrequenciesToSvg(const ClassFrequencyTable& table) {
  constexpr int kBar = 14, kGap = 6, kLeft = 40, kHeight = 260, kPlot = 200;
  const int width = kLeft + kNumClasses * (2 * kBar + kGap) + 20;
  double peak = 0.0;
  for (int s = 0; s < kNumClasses; ++s)
    peak = std::max({peak, table.visible_fraction(s), table.occluded_fraction(s)});
  if (peak == 0.0) peak = 1.0;
  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
                    "\" height=\"" + std::to_string(kHeight + 90) + "\">\n";
  for (int s = 0; s < kNumClasses; ++s) {
    const int x = kLeft + s * (2 * kBar + kGap);
    const double hv = kPlot * table.visible_fraction(s) / peak;
    const double ho = kPlot * table.occluded_fraction(s) / peak;
    svg += "<rect x=\"" + std::to_string(x) + "\" y=\"" + Fmt("%.2f", kHeight - hv) +
           "\" width=\"" + std::to_string(kBar) + "\" height=\"" + Fmt("%.2f", hv) +
           "\" fill=\"green\"/>\n";
    svg += "<rect x=\"" + std::to_string(x + kBar) + "\" y=\"" + Fmt("%.2f", kHeight - ho) +
           "\" width=\"" + std::to_string(kBar) + "\" height=\"" + Fmt("%.2f", ho) +
           "\" fill=\"red\"/>\n";
    svg += "<text x=\"" + std::to_string(x + kBar) + "\" y=\"" + std::to_string(kHeight + 12) +
           "\" font-size=\"9\" transform=\"rotate(60 " + std::to_string(x + kBar) + " " +
           std::to_string(kHeight + 12) + ")\">" + ClassName(static_cast<std::uint8_t>(s)) +
           "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

std::string PriorToSvg(const LocationPrior& prior) {
  const Raster<double> d = prior.Density();
  double peak = 0.0;
  for (double v : d.data()) peak = std::max(peak, v);
  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                    std::to_string(d.width()) + "\" height=\"" + std::to_string(d.height()) +
                    "\" shape-rendering=\"crispEdges\">\n";
  for (int r = 0; r < d.height(); ++r) {
    for (int c = 0; c < d.width(); ++c) {
      if (d.at(r, c) == 0.0) continue;
      const int level = static_cast<int>(std::lround(255.0 * d.at(r, c) / peak));
      svg += "<rect x=\"" + std::to_string(c) + "\" y=\"" + std::to_string(r) +
             "\" width=\"1\" height=\"1\" fill=\"rgb(" + std::to_string(level) + ",0," +
             std::to_string(255 - level) + ")\"/>\n";
    }
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace amcs
