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

// Comparison detectors: n-gram overlap, perplexity, Min-k% probability and
// embedding similarity.

#ifndef CDDTED_BASELINES_HPP_
#define CDDTED_BASELINES_HPP_

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "cddted/detector.hpp"
#include "cddted/textdist.hpp"

namespace cddted {

enum class BaselineMethod {
  kNgramChar,
  kNgramToken,
  kPerplexity,
  kMinKProb,
  kEmbeddingSim,
  // Reserved for a judge-model comparison; not implemented.
  kLlmDecontaminator,
};

std::string_view BaselineMethodName(BaselineMethod m);
// "ngram_char", "ngram_token", "perplexity", "min_k_prob", "embedding_sim".
std::optional<BaselineMethod> ParseBaselineMethod(std::string_view name);

// True when a larger score means "more likely contaminated". Perplexity is
// the only inverted score.
bool HigherIsSuspicious(BaselineMethod m);

struct BaselineScore {
  std::string task_id;
  BaselineMethod method = BaselineMethod::kNgramToken;
  double score = 0.0;
  std::optional<Verdict> verdict;
  std::optional<double> threshold_used;
};

enum class NgramLevel { kChar, kToken };

inline constexpr std::size_t kDefaultNgram = 13;

// Fraction of the candidate's n-grams found in the reference's n-gram set.
// Candidates shorter than n fall back to exact equality (1 or 0). Char
// level counts Unicode code points.
double NgramOverlap(std::string_view candidate, std::string_view reference,
                    std::size_t n, NgramLevel level, const Tokenizer& tok);

// exp(-mean(logprobs)); needs a non-empty list with every entry <= 0.
double PerplexityScore(std::span<const double> token_logprobs);

// Mean of the max(1, floor(k% * len)) smallest log-probabilities.
double MinKProb(std::span<const double> token_logprobs,
                double k_percent = 20.0);

// Cosine similarity of two same-length non-zero vectors.
double EmbeddingSimilarity(std::span<const double> a,
                           std::span<const double> b);

// Verdict for a score against a threshold, honouring score direction.
Verdict ThresholdVerdict(BaselineMethod m, double score, double threshold);

}  // namespace cddted

#endif  // CDDTED_BASELINES_HPP_
