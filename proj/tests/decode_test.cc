/* Copyright 2026 The ctckit Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "ctckit/decode.h"

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "ctckit/lattice.h"
#include "oracles.h"

namespace ctckit {
namespace {

Matrix Rows(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(rows.size(), rows.begin()->size());
  Eigen::Index r = 0;
  for (const auto& row : rows) {
    Eigen::Index c = 0;
    for (double v : row) m(r, c++) = v;
    ++r;
  }
  return m;
}

// a:0.4 / blank:0.6 on both frames.
Matrix Divergent() { return Rows({{0.4, 0.6}, {0.4, 0.6}}); }

Matrix OneHot(const std::vector<int>& path, std::size_t classes) {
  Matrix m = Matrix::Zero(path.size(), classes);
  for (std::size_t t = 0; t < path.size(); ++t) m(t, path[t]) = 1.0;
  return m;
}

void ExpectSortedAndUnique(const DecodeResult& r) {
  for (std::size_t i = 1; i < r.paths.size(); ++i) {
    EXPECT_GE(r.paths[i - 1].score, r.paths[i].score);
    for (std::size_t j = 0; j < i; ++j) {
      EXPECT_NE(r.paths[i].labels, r.paths[j].labels);
    }
  }
}

TEST(ExactDecodeTest, DivergentInstance) {
  const DecodeResult r = exact_decode(Divergent(), 2, 2);
  ASSERT_EQ(r.paths.size(), 2u);
  EXPECT_EQ(r.best().labels, LabelSequence{0});
  EXPECT_NEAR(std::exp(r.best().score), 0.64, 1e-12);
  EXPECT_EQ(r.paths[1].labels, LabelSequence{});
  EXPECT_NEAR(std::exp(r.paths[1].score), 0.36, 1e-12);
}

TEST(ExactDecodeTest, SingleFrame) {
  const DecodeResult r = exact_decode(Rows({{0.7, 0.3}}), 1, 1);
  EXPECT_EQ(r.best().labels, LabelSequence{0});
  EXPECT_NEAR(r.best().score, std::log(0.7), 1e-12);
}

TEST(ExactDecodeTest, OneHotIsForced) {
  const DecodeResult r = exact_decode(OneHot({0, 2, 2, 1, 1, 0}, 3), 6, 3);
  ASSERT_EQ(r.paths.size(), 1u);
  EXPECT_EQ(r.best().labels, (LabelSequence{0, 1, 0}));
  EXPECT_EQ(r.best().score, 0.0);
}

TEST(ExactDecodeTest, BudgetExceeded) {
  const Matrix probs = Matrix::Constant(12, 4, 0.25);
  EXPECT_THROW(exact_decode(probs, 12, 1), BudgetExceeded);
  EXPECT_THROW(exact_decode(probs, 6, 1, 4095), BudgetExceeded);
  EXPECT_NO_THROW(exact_decode(probs, 6, 1, 4096));
}

TEST(ExactDecodeTest, ScoresAgreeWithLoss) {
  std::mt19937_64 rng(4);
  const Matrix probs = oracle::RandomPosteriors(rng, 5, 3);
  const DecodeResult r = exact_decode(probs, 5, 10);
  ExpectSortedAndUnique(r);
  for (const Hypothesis& h : r.paths) {
    EXPECT_NEAR(h.score, -ctc_loss(probs, h.labels, 5, h.labels.size()), 1e-12);
  }
}

TEST(BestPathTest, ArgmaxThenCollapse) {
  const Matrix probs = Rows({{0.6, 0.1, 0.3}, {0.5, 0.2, 0.3}, {0.1, 0.1, 0.8}});
  const DecodeResult r = best_path_decode(probs, 3);
  EXPECT_EQ(r.best().labels, LabelSequence{0});
  EXPECT_NEAR(r.best().score, std::log(0.6 * 0.5 * 0.8), 1e-12);
}

TEST(BestPathTest, DivergesFromExact) {
  EXPECT_EQ(best_path_decode(Divergent(), 2).best().labels, LabelSequence{});
  EXPECT_EQ(exact_decode(Divergent(), 2, 1).best().labels, LabelSequence{0});
}

TEST(BestPathTest, TieGoesToLowerClass) {
  const Matrix probs = Rows({{0.4, 0.4, 0.2}});
  EXPECT_EQ(best_path_decode(probs, 1).best().labels, LabelSequence{0});
}

TEST(BestPathTest, IgnoresPaddedFrames) {
  const Matrix probs = Rows({{0.1, 0.9}, {0.9, 0.1}});
  EXPECT_EQ(best_path_decode(probs, 1).best().labels, LabelSequence{});
}

TEST(BestPathTest, OneHotMatchesExact) {
  const Matrix probs = OneHot({1, 1, 0, 2, 0}, 3);
  EXPECT_EQ(best_path_decode(probs, 5).best(), exact_decode(probs, 5, 1).best());
}

TEST(PrefixSearchTest, MatchesExactOnSmallInstances) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t k = 2 + rng() % 3;
    const std::size_t frames = 1 + rng() % 6;
    const Matrix probs = oracle::RandomPosteriors(rng, frames, k);
    const DecodeResult got = prefix_search_decode(probs, frames, 1.0,
                                                  kUnlimitedNodes);
    const auto [labels, p] = oracle::BestSequence(probs, frames);
    EXPECT_FALSE(got.approximate);
    ASSERT_EQ(got.best().labels, labels) << "trial " << trial;
    EXPECT_NEAR(got.best().score, std::log(p), 1e-10);
  }
}

TEST(PrefixSearchTest, CertainBlankSplitsSegments) {
  const Matrix left = Rows({{0.4, 0.1, 0.5}, {0.3, 0.3, 0.4}});
  const Matrix right = Rows({{0.1, 0.5, 0.4}, {0.2, 0.2, 0.6}});
  Matrix probs(5, 3);
  probs << left, Rows({{0.0, 0.0, 1.0}}), right;
  const DecodeResult r = prefix_search_decode(probs, 5);
  LabelSequence expected = oracle::BestSequence(left, 2).first;
  const LabelSequence tail = oracle::BestSequence(right, 2).first;
  expected.insert(expected.end(), tail.begin(), tail.end());
  EXPECT_EQ(r.best().labels, expected);
  EXPECT_FALSE(r.approximate);
}

TEST(PrefixSearchTest, OneHotIsForced) {
  const DecodeResult r = prefix_search_decode(OneHot({0, 0, 2, 0, 1}, 3), 5);
  EXPECT_EQ(r.best().labels, (LabelSequence{0, 0, 1}));
  EXPECT_EQ(r.best().score, 0.0);
}

TEST(PrefixSearchTest, BudgetFallsBackToBeam) {
  std::mt19937_64 rng(8);
  const Matrix probs = oracle::RandomPosteriors(rng, 12, 5);
  const DecodeResult r = prefix_search_decode(probs, 12, 1.0, 2);
  EXPECT_TRUE(r.approximate);
  EXPECT_EQ(r.best().labels,
            beam_search_decode(probs, 12, kFallbackBeamWidth).best().labels);
}

TEST(PrefixSearchTest, RejectsThresholdOutsideRange) {
  const Matrix probs = Divergent();
  EXPECT_THROW(prefix_search_decode(probs, 2, 0.5), DomainError);
  EXPECT_THROW(prefix_search_decode(probs, 2, 1.5), DomainError);
}

TEST(BeamSearchTest, DivergentInstance) {
  const DecodeResult r = beam_search_decode(Divergent(), 2, 2, 2);
  EXPECT_EQ(r.best().labels, LabelSequence{0});
  EXPECT_NEAR(r.best().score, std::log(0.64), 1e-12);
  EXPECT_EQ(r.paths[1].labels, LabelSequence{});
}

TEST(BeamSearchTest, OneHotWidthOne) {
  const DecodeResult r = beam_search_decode(OneHot({2, 1, 1, 2, 1}, 3), 5, 1);
  EXPECT_EQ(r.best().labels, (LabelSequence{1, 1}));
  EXPECT_EQ(r.best().score, 0.0);
}

TEST(BeamSearchTest, TopPathsBeyondWidthRejected) {
  EXPECT_THROW(beam_search_decode(Divergent(), 2, 2, 3), DomainError);
  EXPECT_THROW(beam_search_decode(Divergent(), 2, 0, 0), DomainError);
}

TEST(BeamSearchTest, SaturatedBeamReproducesExactRanking) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t k = 2 + rng() % 2;
    const std::size_t frames = 1 + rng() % 5;
    const Matrix probs = oracle::RandomPosteriors(rng, frames, k);
    const auto truth = oracle::SequenceProbabilities(probs, frames);
    const DecodeResult exact = exact_decode(probs, frames, truth.size());
    const DecodeResult beam =
        beam_search_decode(probs, frames, 1000, truth.size());
    ASSERT_EQ(beam.paths.size(), exact.paths.size());
    ExpectSortedAndUnique(beam);
    for (std::size_t i = 0; i < exact.paths.size(); ++i) {
      EXPECT_NEAR(beam.paths[i].score, exact.paths[i].score, 1e-10);
      EXPECT_NEAR(std::exp(beam.paths[i].score), truth.at(beam.paths[i].labels),
                  1e-12);
    }
    EXPECT_EQ(beam.best().labels, exact.best().labels);
  }
}

TEST(BeamSearchTest, GreedyAndNarrowBeamEachMatchTheirOracle) {
  std::mt19937_64 rng(30);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t frames = 1 + rng() % 5;
    const Matrix probs = oracle::RandomPosteriors(rng, frames, 3);
    // Greedy: the collapse of the argmax path.
    std::vector<int> path;
    for (std::size_t t = 0; t < frames; ++t) {
      Eigen::Index arg;
      probs.row(t).maxCoeff(&arg);
      path.push_back(static_cast<int>(arg));
    }
    EXPECT_EQ(best_path_decode(probs, frames).best().labels,
              oracle::Collapse(path, 2));
    for (std::size_t width : {1, 2}) {
      const DecodeResult beam = beam_search_decode(probs, frames, width, width);
      const auto expected = oracle::BeamSearch(probs, frames, width);
      ASSERT_EQ(beam.paths.size(), expected.size());
      for (std::size_t i = 0; i < expected.size(); ++i) {
        EXPECT_EQ(beam.paths[i].labels, expected[i].first);
        EXPECT_NEAR(std::exp(beam.paths[i].score), expected[i].second, 1e-12);
      }
    }
  }
}

TEST(BeamSearchTest, IgnoresPaddedFrames) {
  const Matrix probs = Rows({{0.9, 0.1}, {0.0, 1.0}});
  EXPECT_EQ(beam_search_decode(probs, 1, 4).best().labels, LabelSequence{0});
}

}  // namespace
}  // namespace ctckit
