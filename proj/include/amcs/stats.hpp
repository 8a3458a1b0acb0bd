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
#ifndef AMCS_STATS_HPP_
#define AMCS_STATS_HPP_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "amcs/cityscapes_io.hpp"
#include "amcs/compositor.hpp"
#include "amcs/instance_bank.hpp"
#include "amcs/raster.hpp"

namespace amcs {

struct ClassFrequencyTable {
  std::array<std::uint64_t, kNumClasses> visible{};
  std::array<std::uint64_t, kNumClasses> occluded{};
  std::uint64_t visible_total = 0;
  std::uint64_t occluded_total = 0;

  void Add(const AmodalMask& mask);
  void Merge(const ClassFrequencyTable& other);

  /// Fraction of labelled pixels; 0 when the column is empty.
  double visible_fraction(int class_id) const;
  double occluded_fraction(int class_id) const;

  friend bool operator==(const ClassFrequencyTable&, const ClassFrequencyTable&) = default;
};

ClassFrequencyTable ClassFrequencies(std::span<const AmodalMask> frames);

struct LocationPrior {
  std::uint8_t class_id = 0;
  int downsample = 1;
  Raster<std::uint64_t> counts;  // ceil(H/ds) x ceil(W/ds)
  std::uint64_t occurrences = 0;

  bool empty() const noexcept { return occurrences == 0; }
  /// counts / occurrences; all zeros when empty.
  Raster<double> Density() const;

  /// Accumulates the visible channel. The first frame fixes the shape;
  /// later frames must match (InvalidInput otherwise).
  void Add(const LabelMap& visible);
  void Merge(const LocationPrior& other);
};

LocationPrior MakeLocationPrior(std::uint8_t class_id, int downsample = 8);
LocationPrior ComputeLocationPrior(std::span<const AmodalMask> frames, std::uint8_t class_id,
                                   int downsample = 8);

/// sum_i min(a_i, b_i) over the two densities; 1 for identical priors.
double HistogramIntersection(const LocationPrior& a, const LocationPrior& b);

/// Spearman rank correlation with average ranks for ties.
double SpearmanRho(std::span<const double> a, std::span<const double> b);

struct CensusRow {
  std::uint8_t class_id = 0;
  std::int64_t original = 0;
  double original_percent = 0.0;
  std::int64_t generated = 0;  // original + pastes of this class
  double generated_percent = 0.0;
};

/// One row per instance class (trainIds 11..18).
std::vector<CensusRow> InstanceCensus(const InstanceBank& bank,
                                      std::span<const GenerationManifest> manifests);

std::string FrequenciesToCsv(const ClassFrequencyTable& table);
std::string FrequenciesToJson(const ClassFrequencyTable& table);
std::string CensusToCsv(const std::vector<CensusRow>& rows);
std::string CensusToJson(const std::vector<CensusRow>& rows);
std::string PriorToJson(const LocationPrior& prior);
std::string FrequenciesToSvg(const ClassFrequencyTable& table);
std::string PriorToSvg(const LocationPrior& prior);

}  // namespace amcs

#endif  // AMCS_STATS_HPP_
