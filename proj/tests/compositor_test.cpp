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
#include <set>
#include <unordered_set>

#include <gtest/gtest.h>

#include "amcs/error.hpp"
#include "support/fixture.hpp"
#include "support/oracles.hpp"

namespace amcs {
namespace {

using testing::TempDir;

InstancePatch SquarePatch(int size, int anchor_row) {
  InstancePatch p;
  p.source_frame = "s_000000_000000";
  p.instance_id = 24000;
  p.class_id = label::kPerson;
  p.bbox = {anchor_row - size + 1, 0, size, size};
  p.anchor_row = anchor_row;
  p.area = static_cast<std::int64_t>(size) * size;
  return p;
}

TEST(SeedTest, DependsOnMasterSeedAndStemOnly) {
  EXPECT_EQ(DeriveFrameSeed(1, "train/a/a_000000_000001"), DeriveFrameSeed(1, "a_000000_000001"));
  EXPECT_NE(DeriveFrameSeed(1, "a_000000_000001"), DeriveFrameSeed(2, "a_000000_000001"));
  EXPECT_NE(DeriveFrameSeed(1, "a_000000_000001"), DeriveFrameSeed(1, "a_000000_000002"));
}

TEST(SeedTest, NoCollisionsAcrossManyFrames) {
  std::unordered_set<std::uint64_t> seen;
  for (int city = 0; city < 10; ++city) {
    for (int n = 0; n < 3000; ++n) {
      char id[64];
      std::snprintf(id, sizeof(id), "city%d_%06d_%06d", city, n / 100, n);
      ASSERT_TRUE(seen.insert(DeriveFrameSeed(12345, id)).second) << id;
    }
  }
}

TEST(OcclusionRatioTest, UniformOnZeroToMax) {
  Rng rng(99);
  double sum = 0.0;
  constexpr int kDraws = 100000;
  for (int i = 0; i < kDraws; ++i) {
    const double r = SampleOcclusionRatio(rng, 0.1);
    ASSERT_GE(r, 0.0);
    ASSERT_LE(r, 0.1);
    sum += r;
  }
  const double mean = sum / kDraws;
  EXPECT_GE(mean, 0.048);
  EXPECT_LE(mean, 0.052);
  EXPECT_EQ(SampleOcclusionRatio(rng, 0.0), 0.0);
}

TEST(ConfigTest, Validation) {
  GenerationConfig cfg;
  EXPECT_NO_THROW(cfg.Validate());
  cfg.max_occlusion_ratio = 0.0;
  EXPECT_NO_THROW(cfg.Validate());
  for (double bad : {-0.1, 1.0, 2.0}) {
    cfg.max_occlusion_ratio = bad;
    EXPECT_THROW(cfg.Validate(), Error) << bad;
  }
  cfg = {};
  cfg.blend_kernel = 4;
  EXPECT_THROW(cfg.Validate(), Error);
}

TEST(KernelTest, NormalizedSymmetricGaussian) {
  const auto w = GaussianKernel1D(5, 1.0);
  ASSERT_EQ(w.size(), 5u);
  const double z = 1.0 + 2.0 * std::exp(-0.5) + 2.0 * std::exp(-2.0);
  EXPECT_NEAR(w[2], 1.0 / z, 1e-15);
  EXPECT_NEAR(w[1], std::exp(-0.5) / z, 1e-15);
  EXPECT_NEAR(w[0], std::exp(-2.0) / z, 1e-15);
  EXPECT_DOUBLE_EQ(w[0], w[4]);
  EXPECT_DOUBLE_EQ(w[1], w[3]);
}

TEST(BlendAlphaTest, MatchesDirectTwoDimensionalSum) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const int h = 4 + static_cast<int>(rng() % 20);
    const int w = 4 + static_cast<int>(rng() % 20);
    BinaryMask mask(h, w);
    std::vector<std::uint8_t> flat;
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        mask.at(r, c) = static_cast<std::uint8_t>(rng() % 3 != 0);
        flat.push_back(mask.at(r, c));
      }
    }
    const auto alpha = BlendAlpha(mask, 5, 1.0);
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        ASSERT_NEAR(alpha.at(r, c), testing::DirectAlpha(flat, h, w, r, c, 5, 1.0), 1e-6)
            << r << "," << c;
      }
    }
  }
}

TEST(BlendAlphaTest, FarFromTheBoundaryIsExact) {
  BinaryMask mask(20, 20);
  for (int r = 0; r < 20; ++r)
    for (int c = 0; c < 10; ++c) mask.at(r, c) = 1;
  const auto alpha = BlendAlpha(mask, 5, 1.0);
  for (int r = 0; r < 20; ++r) {
    // Column 9 is the last mask column; distance 3 puts us at 6 and 13.
    for (int c = 2; c <= 6; ++c) {
      // Pixels near the crop border see the zero padding.
      if (r >= 2 && r <= 17) EXPECT_EQ(alpha.at(r, c), 1.0f) << r << "," << c;
    }
    for (int c = 13; c < 20; ++c) EXPECT_EQ(alpha.at(r, c), 0.0f) << r << "," << c;
  }
}

TEST(BlendPasteTest, AlphaOneCopiesAndZeroKeeps) {
  RgbImage image(8, 8, 3, 0.25f);
  PatchPixels px{Raster<std::uint8_t>(2, 2, 3, 255), BinaryMask(2, 2, 1, 1)};
  Raster<float> alpha(2, 2);
  alpha.at(0, 0) = 1.0f;
  alpha.at(1, 1) = 0.5f;
  BlendPasteInPlace(image, px, alpha, 3, 4);
  EXPECT_EQ(image.at(3, 4, 0), 1.0f);
  EXPECT_EQ(image.at(3, 5, 1), 0.25f);
  EXPECT_FLOAT_EQ(image.at(4, 5, 2), 0.625f);
  EXPECT_EQ(image.at(0, 0, 0), 0.25f);
  EXPECT_THROW(BlendPasteInPlace(image, px, alpha, 7, 7), Error);
}

TEST(PlaceOccluderTest, RowPinnedColumnsInRange) {
  Rng rng(3);
  const InstancePatch p = SquarePatch(4, 9);
  const BinaryMask footprint(4, 4, 1, 1);
  BinaryMask occupied(10, 12);
  std::set<int> cols;
  for (int i = 0; i < 2000; ++i) {
    const Placement pl = PlaceOccluder(rng, p, footprint, occupied, 1);
    ASSERT_TRUE(pl.col);
    cols.insert(*pl.col);
  }
  EXPECT_EQ(*cols.begin(), 0);
  EXPECT_EQ(*cols.rbegin(), 12 - 4);
  EXPECT_EQ(cols.size(), 9u);
}

TEST(PlaceOccluderTest, RejectsWhenEverythingIsTaken) {
  Rng rng(3);
  const InstancePatch p = SquarePatch(4, 9);
  const BinaryMask footprint(4, 4, 1, 1);
  BinaryMask occupied(10, 12);
  for (int c = 0; c < 12; c += 3) occupied.at(8, c) = 1;  // every window hits one
  const Placement pl = PlaceOccluder(rng, p, footprint, occupied, 25);
  EXPECT_FALSE(pl.col);
  EXPECT_EQ(pl.attempts, 25);
  // Patches taller than the frame above their anchor never fit.
  EXPECT_FALSE(PlaceOccluder(rng, SquarePatch(4, 2), footprint, BinaryMask(10, 12), 5).col);
}

class ComposeTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    tmp_ = new TempDir("compose");
    testing::FixtureOptions opts;
    opts.frames = 12;
    fx_ = new testing::Fixture(testing::MakeFixture(tmp_->path(), opts));
    frames_ = new std::vector<LabeledFrame>;
    for (const auto& id : fx_->frame_ids) frames_->push_back(LoadFrame(fx_->root, id));
    bank_ = new InstanceBank(BuildBank(*frames_));
  }
  static void TearDownTestSuite() {
    delete bank_;
    delete frames_;
    delete fx_;
    delete tmp_;
  }

  static TempDir* tmp_;
  static testing::Fixture* fx_;
  static std::vector<LabeledFrame>* frames_;
  static InstanceBank* bank_;
};

TempDir* ComposeTest::tmp_ = nullptr;
testing::Fixture* ComposeTest::fx_ = nullptr;
std::vector<LabeledFrame>* ComposeTest::frames_ = nullptr;
InstanceBank* ComposeTest::bank_ = nullptr;

TEST_F(ComposeTest, InvariantsHoldOnEveryFrame) {
  GenerationConfig cfg;
  cfg.master_seed = 2024;
  for (const LabeledFrame& target : *frames_) {
    const ComposedFrame out = ComposeFrame(target, *bank_, cfg);
    const GenerationManifest& m = out.manifest;
    const int h = target.semantic.height(), w = target.semantic.width();
    Raster<int> owner(h, w, 1, -1);
    std::int64_t last = 0;
    for (std::size_t k = 0; k < m.pastes.size(); ++k) {
      const PasteRecord& rec = m.pastes[k];
      const std::size_t idx = *bank_->Find(rec.patch_id);
      const InstancePatch& patch = bank_->patch(idx);
      EXPECT_NE(FrameStem(patch.source_frame), FrameStem(target.frame_id));
      EXPECT_EQ(rec.row, patch.anchor_row);
      const auto px = bank_->Pixels(idx);
      std::int64_t count = 0;
      for (int r = 0; r < px->mask.height(); ++r) {
        for (int c = 0; c < px->mask.width(); ++c) {
          if (!px->mask.at(r, c)) continue;
          const int y = rec.row - patch.bbox.height + 1 + r, x = rec.col + c;
          ASSERT_EQ(owner.at(y, x), -1) << "overlap in " << target.frame_id;
          owner.at(y, x) = static_cast<int>(k);
          ++count;
        }
      }
      EXPECT_EQ(count, rec.pixel_count);
      last = rec.pixel_count;
    }
    const double n = static_cast<double>(h) * w;
    EXPECT_EQ(m.image_pixels, h * w);
    if (m.ratio_reached && m.drawn_ratio > 0) {
      EXPECT_GT(m.pasted_pixels / n, m.drawn_ratio);
      EXPECT_LE((m.pasted_pixels - last) / n, m.drawn_ratio);
    }
    EXPECT_DOUBLE_EQ(m.achieved_ratio, m.pasted_pixels / n);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const int k = owner.at(y, x);
        if (k < 0) {
          ASSERT_EQ(out.mask.visible.at(y, x), target.semantic.at(y, x));
          ASSERT_EQ(out.mask.occluded.at(y, x), kIgnoreLabel);
        } else {
          ASSERT_EQ(out.mask.visible.at(y, x), m.pastes[static_cast<std::size_t>(k)].class_id);
          ASSERT_EQ(out.mask.occluded.at(y, x), target.semantic.at(y, x));
        }
      }
    }
  }
}

TEST_F(ComposeTest, ZeroRatioLeavesFramesUntouched) {
  GenerationConfig cfg;
  cfg.max_occlusion_ratio = 0.0;
  const ComposedFrame out = ComposeFrame((*frames_)[0], *bank_, cfg);
  EXPECT_TRUE(out.manifest.pastes.empty());
  EXPECT_TRUE(out.manifest.ratio_reached);
  EXPECT_EQ(out.image, (*frames_)[0].image);
  EXPECT_EQ(out.mask.visible, (*frames_)[0].semantic);
}

TEST_F(ComposeTest, EmptyBankWarns) {
  GenerationConfig cfg;
  cfg.master_seed = 1;
  const ComposedFrame out = ComposeFrame((*frames_)[0], InstanceBank{}, cfg);
  EXPECT_TRUE(out.manifest.pastes.empty());
  EXPECT_FALSE(out.manifest.ratio_reached);
  EXPECT_TRUE(out.manifest.warning);
}

TEST_F(ComposeTest, ReplayReproducesAndDetectsEdits) {
  GenerationConfig cfg;
  const LabeledFrame& target = (*frames_)[3];
  // First seed giving at least two occluders.
  ComposedFrame out;
  for (cfg.master_seed = 77; cfg.master_seed < 177; ++cfg.master_seed) {
    out = ComposeFrame(target, *bank_, cfg);
    if (out.manifest.pastes.size() >= 2) break;
  }
  ASSERT_GE(out.manifest.pastes.size(), 2u);
  const AmodalFrame replay = ReplayManifest(target, *bank_, out.manifest, cfg);
  EXPECT_EQ(replay.image, out.image);
  EXPECT_EQ(replay.mask, out.mask);

  // Dropping one record changes exactly that occluder's footprint labels.
  GenerationManifest edited = out.manifest;
  edited.pastes.erase(edited.pastes.begin());
  const AmodalFrame partial = ReplayManifest(target, *bank_, edited, cfg);
  GenerationManifest only_first = out.manifest;
  only_first.pastes.resize(1);
  const BinaryMask first = OccluderRegion(*bank_, only_first, target.semantic.height(),
                                          target.semantic.width());
  for (int y = 0; y < first.height(); ++y) {
    for (int x = 0; x < first.width(); ++x) {
      const bool differs = partial.mask.visible.at(y, x) != out.mask.visible.at(y, x) ||
                           partial.mask.occluded.at(y, x) != out.mask.occluded.at(y, x);
      if (!first.at(y, x)) ASSERT_FALSE(differs) << y << "," << x;
    }
  }
  EXPECT_NE(partial.mask, out.mask);

  GenerationManifest bogus = out.manifest;
  bogus.pastes[0].patch_id = "nope_1";
  try {
    ReplayManifest(target, *bank_, bogus, cfg);
    FAIL() << "expected ManifestMismatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kManifestMismatch);
  }
  bogus = out.manifest;
  bogus.pastes[0].pixel_count += 1;
  EXPECT_THROW(ReplayManifest(target, *bank_, bogus, cfg), Error);
}

TEST_F(ComposeTest, ManifestJsonRoundTrip) {
  GenerationConfig cfg;
  cfg.master_seed = 0xdeadbeefcafef00dULL;
  const ComposedFrame out = ComposeFrame((*frames_)[1], *bank_, cfg);
  const GenerationManifest back = ManifestFromJson(ManifestToJson(out.manifest));
  EXPECT_EQ(back, out.manifest);
  EXPECT_THROW(ManifestFromJson("{\"frame_id\": 3}"), Error);
}

TEST_F(ComposeTest, SameSeedSameFrame) {
  GenerationConfig cfg;
  cfg.master_seed = 5;
  const ComposedFrame a = ComposeFrame((*frames_)[2], *bank_, cfg);
  const ComposedFrame b = ComposeFrame((*frames_)[2], *bank_, cfg);
  EXPECT_EQ(a.manifest, b.manifest);
  EXPECT_EQ(a.image, b.image);
  cfg.master_seed = 6;
  const ComposedFrame c = ComposeFrame((*frames_)[2], *bank_, cfg);
  EXPECT_NE(a.manifest.seed, c.manifest.seed);
}

}  // namespace
}  // namespace amcs
