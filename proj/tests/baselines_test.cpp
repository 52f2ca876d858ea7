// Copyright 2026 The cddted Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cddted/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "cddted/errors.hpp"
#include "test_util.hpp"

namespace cddted {
namespace {

using testing::Words;

const Tokenizer kTok = Tokenizer::WhitespacePunct();

TEST(NgramOverlapTest, Examples) {
  const std::string x = Words("t", 20);
  EXPECT_DOUBLE_EQ(NgramOverlap(x, x, 13, NgramLevel::kToken, kTok), 1.0);
  EXPECT_EQ(ThresholdVerdict(BaselineMethod::kNgramToken, 1.0, 0.0),
            Verdict::kLeaked);
  EXPECT_DOUBLE_EQ(
      NgramOverlap(Words("a", 20), Words("b", 20), 13, NgramLevel::kToken, kTok),
      0.0);
  EXPECT_EQ(ThresholdVerdict(BaselineMethod::kNgramToken, 0.0, 0.0),
            Verdict::kUnleaked);
  EXPECT_DOUBLE_EQ(NgramOverlap("abcdefghijklmnopqrst", "ABCDEFGHIJKLMNOPQRST",
                                13, NgramLevel::kChar, kTok),
                   0.0);
}

TEST(NgramOverlapTest, OnlyFirstWindowShared) {
  // Windows at offsets 0, 1, 2; only offset 0 occurs in the reference.
  const std::string ref = Words("t", 13) + " " + Words("r", 5);
  const std::string cand = Words("t", 13) + " " + Words("c", 2);
  EXPECT_DOUBLE_EQ(NgramOverlap(cand, ref, 13, NgramLevel::kToken, kTok),
                   1.0 / 3.0);
}

TEST(NgramOverlapTest, ShortCandidateFallsBackToExactMatch) {
  EXPECT_DOUBLE_EQ(NgramOverlap("a b c", "a b c", 13, NgramLevel::kToken, kTok),
                   1.0);
  EXPECT_DOUBLE_EQ(NgramOverlap("a b c", "a b c d", 13, NgramLevel::kToken, kTok),
                   0.0);
  EXPECT_DOUBLE_EQ(NgramOverlap("héllo", "héllo", 13, NgramLevel::kChar, kTok),
                   1.0);
  EXPECT_THROW(NgramOverlap("a", "a", 0, NgramLevel::kToken, kTok), DomainError);
}

TEST(NgramOverlapTest, CharLevelCountsCodePoints) {
  // 13 code points, 26 bytes: exactly one character window.
  const std::string cand = "ééééééééééééé";
  EXPECT_DOUBLE_EQ(NgramOverlap(cand, "x" + cand + "y", 13, NgramLevel::kChar,
                                kTok),
                   1.0);
}

TEST(NgramOverlapPropertyTest, SelfOverlapIsOne) {
  std::mt19937 gen(1);
  std::uniform_int_distribution<int> len(13, 60), sym(0, 4);
  for (int i = 0; i < 100; ++i) {
    std::string s;
    for (int k = len(gen); k > 0; --k) s += "s" + std::to_string(sym(gen)) + " ";
    EXPECT_DOUBLE_EQ(NgramOverlap(s, s, 13, NgramLevel::kToken, kTok), 1.0);
    EXPECT_DOUBLE_EQ(NgramOverlap(s, s, 13, NgramLevel::kChar, kTok), 1.0);
  }
}

TEST(PerplexityTest, Examples) {
  const double ln2 = std::log(2.0);
  const std::vector<double> halves(7, -ln2);
  EXPECT_NEAR(PerplexityScore(halves), 2.0, 1e-12);
  EXPECT_DOUBLE_EQ(PerplexityScore(std::vector<double>{0.0, 0.0}), 1.0);
  EXPECT_NEAR(PerplexityScore(std::vector<double>{-1.0, -3.0}), std::exp(2.0),
              1e-12);
  EXPECT_THROW(PerplexityScore(std::vector<double>{}), DomainError);
  EXPECT_THROW(PerplexityScore(std::vector<double>{-1.0, 0.5}), DomainError);
  EXPECT_FALSE(HigherIsSuspicious(BaselineMethod::kPerplexity));
  EXPECT_EQ(ThresholdVerdict(BaselineMethod::kPerplexity, 1.5, 2.0),
            Verdict::kLeaked);
  EXPECT_EQ(ThresholdVerdict(BaselineMethod::kPerplexity, 2.5, 2.0),
            Verdict::kUnleaked);
}

TEST(MinKProbTest, Examples) {
  EXPECT_DOUBLE_EQ(MinKProb(std::vector<double>{-0.7}, 5.0), -0.7);
  EXPECT_DOUBLE_EQ(
      MinKProb(std::vector<double>{-0.1, -5.0, -0.2, -4.0, -0.3}, 40.0), -4.5);
  EXPECT_DOUBLE_EQ(MinKProb(std::vector<double>(9, -1.25), 20.0), -1.25);
  EXPECT_DOUBLE_EQ(MinKProb(std::vector<double>(9, -1.25), 100.0), -1.25);
  EXPECT_THROW(MinKProb(std::vector<double>{}), DomainError);
  EXPECT_THROW(MinKProb(std::vector<double>{-1.0}, 0.0), DomainError);
  EXPECT_THROW(MinKProb(std::vector<double>{-1.0}, 101.0), DomainError);
}

TEST(LogprobPropertyTest, PermutationInvariant) {
  std::mt19937 gen(2);
  std::uniform_real_distribution<double> lp(-8.0, 0.0);
  for (int i = 0; i < 50; ++i) {
    std::vector<double> v(1 + i % 17);
    for (double& x : v) x = lp(gen);
    std::vector<double> w = v;
    std::shuffle(w.begin(), w.end(), gen);
    EXPECT_NEAR(PerplexityScore(v), PerplexityScore(w), 1e-9);
    EXPECT_DOUBLE_EQ(MinKProb(v), MinKProb(w));
    EXPECT_GT(PerplexityScore(v), 0.0);
    EXPECT_LE(MinKProb(v), 0.0);
  }
}

TEST(EmbeddingSimilarityTest, Examples) {
  const std::vector<double> a{0.3, -1.0, 2.0};
  EXPECT_NEAR(EmbeddingSimilarity(a, a), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(EmbeddingSimilarity(std::vector<double>{1, 0},
                                       std::vector<double>{0, 1}),
                   0.0);
  EXPECT_NEAR(EmbeddingSimilarity(std::vector<double>{1, 1},
                                  std::vector<double>{1, 0}),
              1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_THROW(EmbeddingSimilarity(std::vector<double>{1, 0},
                                   std::vector<double>{1, 0, 0}),
               DomainError);
  EXPECT_THROW(EmbeddingSimilarity(std::vector<double>{0, 0},
                                   std::vector<double>{1, 0}),
               DomainError);
}

TEST(EmbeddingSimilarityPropertyTest, SymmetricAndScaleInvariant) {
  std::mt19937 gen(4);
  std::normal_distribution<double> x;
  for (int i = 0; i < 100; ++i) {
    std::vector<double> a(8), b(8), ca(8);
    for (auto& v : a) v = x(gen);
    for (auto& v : b) v = x(gen);
    const double c = 0.1 + std::abs(x(gen)) * 10;
    for (int k = 0; k < 8; ++k) ca[k] = c * a[k];
    const double s = EmbeddingSimilarity(a, b);
    EXPECT_DOUBLE_EQ(s, EmbeddingSimilarity(b, a));
    EXPECT_NEAR(s, EmbeddingSimilarity(ca, b), 1e-12);
    EXPECT_GE(s, -1.0);
    EXPECT_LE(s, 1.0);
  }
}

TEST(BaselineMethodTest, NamesRoundTrip) {
  for (auto m : {BaselineMethod::kNgramChar, BaselineMethod::kNgramToken,
                 BaselineMethod::kPerplexity, BaselineMethod::kMinKProb,
                 BaselineMethod::kEmbeddingSim}) {
    EXPECT_EQ(ParseBaselineMethod(BaselineMethodName(m)), m);
  }
  EXPECT_EQ(ParseBaselineMethod("min_k_prob"), BaselineMethod::kMinKProb);
  EXPECT_FALSE(ParseBaselineMethod("bogus").has_value());
}

}  // namespace
}  // namespace cddted
