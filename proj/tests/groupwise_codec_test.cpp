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
#include "amcs/groupwise_codec.hpp"

#include <algorithm>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "amcs/error.hpp"
#include "support/fixture.hpp"

namespace amcs {
namespace {

using testing::TempDir;

std::vector<float> EncodeOne(const GroupingScheme& s, std::uint8_t v, std::uint8_t o,
                             bool* dropped = nullptr) {
  std::vector<float> y(static_cast<std::size_t>(s.vector_length()));
  EncodePixel(s, v, o, y, dropped);
  return y;
}

TEST(SchemeTest, PresetLengths) {
  EXPECT_EQ(GroupingScheme::FourGroup().vector_length(), 27);
  EXPECT_EQ(GroupingScheme::ThreeGroup().vector_length(), 25);
  EXPECT_EQ(GroupingScheme::Preset(4).group_count(), 4);
  EXPECT_EQ(GroupingScheme::Preset(3).group_count(), 3);
  EXPECT_THROW(GroupingScheme::Preset(5), Error);
}

TEST(SchemeTest, LengthIsKPlusSumOfGroupSizesPlusOne) {
  for (int k : {3, 4}) {
    const GroupingScheme s = GroupingScheme::Preset(k);
    int expected = s.group_count();
    for (int g = 0; g < s.group_count(); ++g) expected += s.group_size(g) + 1;
    EXPECT_EQ(s.vector_length(), expected);
    int covered = 0;
    for (int g = 0; g < s.group_count(); ++g) covered += s.group_size(g);
    EXPECT_EQ(covered, kNumClasses);
  }
}

TEST(SchemeTest, FourGroupSlotOrder) {
  const GroupingScheme s = GroupingScheme::FourGroup();
  const std::vector<std::vector<std::uint8_t>> groups = {
      {0, 1, 2, 3, 10, 9, 4, 8}, {7, 6, 5}, {11, 12}, {13, 14, 15, 16, 18, 17}};
  for (int k = 0; k < 4; ++k) {
    EXPECT_EQ(s.group(k).classes, groups[static_cast<std::size_t>(k)]);
    EXPECT_EQ(s.class_at(k, s.absence_slot(k)), kIgnoreLabel);
  }
  EXPECT_EQ(s.block_offset(0), 4);
  EXPECT_EQ(s.block_offset(1), 13);
  EXPECT_EQ(s.block_offset(2), 17);
  EXPECT_EQ(s.block_offset(3), 20);
}

TEST(SchemeTest, InvalidPartitionsNameTheProblem) {
  using G = GroupingScheme::Group;
  std::vector<G> groups = {{"a", {0, 1, 2, 3, 4, 5, 6, 7, 8, 9}}, {"b", {10, 11, 12, 13, 14, 15, 16, 17}}};
  try {
    GroupingScheme("missing", groups);
    FAIL() << "expected InvalidScheme";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidScheme);
    EXPECT_NE(std::string(e.what()).find("18 (bicycle)"), std::string::npos) << e.what();
  }
  groups[1].classes.push_back(18);
  EXPECT_NO_THROW(GroupingScheme("ok", groups));
  groups[1].classes.push_back(3);
  EXPECT_THROW(GroupingScheme("dup", groups), Error);
  groups[1].classes.back() = 19;
  EXPECT_THROW(GroupingScheme("range", groups), Error);
  groups.push_back({"empty", {}});
  EXPECT_THROW(GroupingScheme("empty", groups), Error);
}

TEST(SchemeTest, JsonRoundTripAndFile) {
  TempDir tmp("scheme");
  const GroupingScheme s = GroupingScheme::ThreeGroup();
  const GroupingScheme back = GroupingScheme::FromJson(s.ToJson());
  EXPECT_EQ(back.vector_length(), 25);
  for (int k = 0; k < 3; ++k) EXPECT_EQ(back.group(k).classes, s.group(k).classes);
  std::ofstream(tmp / "s.json") << s.ToJson();
  EXPECT_EQ(GroupingScheme::Load(tmp / "s.json").group_count(), 3);
  EXPECT_THROW(GroupingScheme::FromJson("{\"groups\": 5}"), Error);
  try {
    GroupingScheme::Load(tmp / "absent.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotFound);
  }
}

TEST(EncodeTest, FigureExampleRiderOverTerrain) {
  const GroupingScheme s = GroupingScheme::FourGroup();
  const auto y = EncodeOne(s, label::kRider, label::kTerrain);
  const std::vector<float> expected = {
      0, 0, 1, 0,                    // p
      0, 0, 0, 0, 0, 1, 0, 0, 0,     // q0: terrain at slot 5
      0, 0, 0, 1,                    // q1: absent
      0, 1, 0,                       // q2: rider
      0, 0, 0, 0, 0, 0, 1};          // q3: absent
  EXPECT_EQ(y, expected);
  const PixelDecode d = DecodePixel(s, y);
  EXPECT_EQ(d.visible, label::kRider);
  EXPECT_EQ(d.occluded, label::kTerrain);
  EXPECT_EQ(d.visible_group, 2);
  EXPECT_EQ(d.occluded_group, 0);
}

TEST(EncodeTest, VoidVisibleAndSameGroupOcclusion) {
  const GroupingScheme s = GroupingScheme::FourGroup();
  std::vector<float> y(27);
  EXPECT_FALSE(EncodePixel(s, kIgnoreLabel, label::kRoad, y));
  for (int k = 0; k < 4; ++k) {
    EXPECT_FLOAT_EQ(y[static_cast<std::size_t>(k)], 0.25f);
    EXPECT_EQ(y[static_cast<std::size_t>(s.block_offset(k) + s.absence_slot(k))], 1.0f);
  }
  bool dropped = false;
  const auto z = EncodeOne(s, label::kCar, label::kTruck, &dropped);
  EXPECT_TRUE(dropped);
  EXPECT_EQ(z, EncodeOne(s, label::kCar, kIgnoreLabel));
  const PixelDecode d = DecodePixel(s, z);
  EXPECT_EQ(d.visible, label::kCar);
  EXPECT_EQ(d.occluded, kIgnoreLabel);
}

TEST(EncodeTest, ExhaustiveRoundTrip) {
  for (int k : {3, 4}) {
    const GroupingScheme s = GroupingScheme::Preset(k);
    int checked = 0;
    for (int v = 0; v < kNumClasses; ++v) {
      for (int o = 0; o <= kNumClasses; ++o) {
        const auto occ = static_cast<std::uint8_t>(o == kNumClasses ? 255 : o);
        if (occ != 255 && s.group_of(occ) == s.group_of(static_cast<std::uint8_t>(v))) continue;
        const PixelDecode d = DecodePixel(s, EncodeOne(s, static_cast<std::uint8_t>(v), occ));
        ASSERT_EQ(d.visible, v) << "K=" << k << " o=" << o;
        ASSERT_EQ(d.occluded, occ) << "K=" << k << " v=" << v;
        ASSERT_FALSE(d.visible_fell_back);
        ++checked;
      }
    }
    EXPECT_GT(checked, 19 * 10);
  }
}

// Straightforward reading of the decoding rule.
PixelDecode OracleDecode(const GroupingScheme& s, const std::vector<float>& y) {
  const int K = s.group_count();
  auto block_argmax = [&](int k, bool skip_absence) {
    const int base = s.block_offset(k);
    const int n = s.group_size(k) + (skip_absence ? 0 : 1);
    return static_cast<int>(std::max_element(y.begin() + base, y.begin() + base + n) -
                            (y.begin() + base));
  };
  PixelDecode d;
  d.visible_group = static_cast<int>(std::max_element(y.begin(), y.begin() + K) - y.begin());
  int slot = block_argmax(d.visible_group, false);
  if (slot == s.group_size(d.visible_group)) {
    slot = block_argmax(d.visible_group, true);
    d.visible_fell_back = true;
  }
  d.visible = s.class_at(d.visible_group, slot);

  std::vector<int> others;
  for (int k = 0; k < K; ++k)
    if (k != d.visible_group) others.push_back(k);
  float best = y[static_cast<std::size_t>(others[0])];
  for (int k : others) best = std::max(best, y[static_cast<std::size_t>(k)]);
  std::vector<int> tied;
  for (int k : others)
    if (y[static_cast<std::size_t>(k)] == best) tied.push_back(k);
  d.occluded_group = tied[0];
  for (int k : tied) {
    if (block_argmax(k, false) != s.group_size(k)) {
      d.occluded_group = k;
      break;
    }
  }
  d.occluded = s.class_at(d.occluded_group, block_argmax(d.occluded_group, false));
  return d;
}

TEST(DecodeTest, MatchesOracleOnRandomVectors) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<float> cont(0.0f, 1.0f);
  for (int k : {3, 4}) {
    const GroupingScheme s = GroupingScheme::Preset(k);
    for (int trial = 0; trial < 10000; ++trial) {
      std::vector<float> y(static_cast<std::size_t>(s.vector_length()));
      // Half the trials use a coarse grid so that ties are common.
      const bool coarse = trial % 2 == 0;
      for (float& v : y) v = coarse ? static_cast<float>(rng() % 3) * 0.5f : cont(rng);
      const PixelDecode got = DecodePixel(s, y);
      const PixelDecode want = OracleDecode(s, y);
      ASSERT_EQ(got.visible, want.visible) << trial;
      ASSERT_EQ(got.occluded, want.occluded) << trial;
      ASSERT_EQ(got.visible_group, want.visible_group) << trial;
      ASSERT_EQ(got.occluded_group, want.occluded_group) << trial;
      ASSERT_EQ(got.visible_fell_back, want.visible_fell_back) << trial;
    }
  }
}

TEST(DecodeTest, SoftmaxLikeScoresDecodeLikeOneHot) {
  // Monotone per-block rescaling of a one-hot encoding keeps every argmax.
  const GroupingScheme s = GroupingScheme::FourGroup();
  auto y = EncodeOne(s, label::kCar, label::kPerson);
  for (float& v : y) v = 0.1f + 0.8f * v;
  const PixelDecode d = DecodePixel(s, y);
  EXPECT_EQ(d.visible, label::kCar);
  EXPECT_EQ(d.occluded, label::kPerson);
}

TEST(DecodeTest, AbsenceInVisibleGroupFallsBack) {
  const GroupingScheme s = GroupingScheme::FourGroup();
  std::vector<float> y(27, 0.0f);
  y[1] = 1.0f;               // traffic group
  y[13 + 3] = 0.9f;          // absent wins
  y[13 + 1] = 0.4f;          // traffic light is the best class
  const PixelDecode d = DecodePixel(s, y);
  EXPECT_TRUE(d.visible_fell_back);
  EXPECT_EQ(d.visible, label::kTrafficLight);
}

TEST(TensorTest, EncodeDecodeFramesAndGroups) {
  auto s = std::make_shared<const GroupingScheme>(GroupingScheme::FourGroup());
  AmodalMask m{LabelMap(2, 3, 1, label::kRoad), LabelMap(2, 3, 1, kIgnoreLabel)};
  m.visible.at(0, 1) = label::kPerson;
  m.occluded.at(0, 1) = label::kRoad;
  m.visible.at(1, 2) = label::kCar;
  m.occluded.at(1, 2) = label::kPole;
  m.visible.at(1, 0) = kIgnoreLabel;
  m.visible.at(0, 2) = label::kBus;
  m.occluded.at(0, 2) = label::kTruck;  // same group, dropped
  EncodeStats stats;
  const GroupwiseTensor t = Encode(m, s, &stats);
  EXPECT_EQ(stats.invalid_pixels, 1);
  EXPECT_EQ(stats.same_group_dropped, 1);
  const AmodalMask back = DecodeAmodal(t);
  AmodalMask expected = m;
  expected.occluded.at(0, 2) = kIgnoreLabel;
  // The void pixel decodes to the first static class; only labelled pixels
  // are promised to round trip.
  expected.visible.at(1, 0) = back.visible.at(1, 0);
  EXPECT_EQ(back, expected);

  const LabelMap g3 = DecodeGroup(t, 3);
  EXPECT_EQ(g3.at(1, 2), label::kCar);
  EXPECT_EQ(g3.at(0, 0), kIgnoreLabel);
  EXPECT_EQ(DecodeGroup(t, 0).at(0, 1), label::kRoad);
  try {
    DecodeGroup(t, 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidGroup);
  }
}

TEST(TensorTest, FileRoundTripAndLengthCheck) {
  TempDir tmp("tensor");
  auto s4 = std::make_shared<const GroupingScheme>(GroupingScheme::FourGroup());
  auto s3 = std::make_shared<const GroupingScheme>(GroupingScheme::ThreeGroup());
  GroupwiseTensor t(3, 2, s4);
  for (std::size_t i = 0; i < t.values().size(); ++i) t.values()[i] = static_cast<float>(i) * 0.5f - 3.0f;
  WriteTensor(tmp / "t.amgt", t);
  const std::string bytes = testing::ReadFile(tmp / "t.amgt");
  ASSERT_EQ(bytes.size(), 16u + 3 * 2 * 27 * 4);
  EXPECT_EQ(bytes.substr(0, 4), "AMGT");
  EXPECT_EQ(static_cast<unsigned char>(bytes[12]), 27);
  const GroupwiseTensor back = ReadTensor(tmp / "t.amgt", s4);
  EXPECT_EQ(back.height(), 3);
  EXPECT_EQ(back.width(), 2);
  EXPECT_TRUE(std::equal(back.values().begin(), back.values().end(), t.values().begin()));
  EXPECT_THROW(ReadTensor(tmp / "t.amgt", s3), Error);
  std::ofstream(tmp / "bad.amgt", std::ios::binary) << "NOPE";
  EXPECT_THROW(ReadTensor(tmp / "bad.amgt", s4), Error);
}

}  // namespace
}  // namespace amcs
