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
#include <set>
#include <vector>

#include "cddted/errors.hpp"

namespace cddted {
namespace {

// Code points as integers; malformed bytes map to 0x110000 + byte.
std::vector<TokenId> CodePoints(std::string_view s) {
  std::vector<TokenId> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const auto lead = static_cast<unsigned char>(s[i]);
    std::size_t len = lead < 0x80           ? 1
                      : (lead & 0xE0) == 0xC0 ? 2
                      : (lead & 0xF0) == 0xE0 ? 3
                      : (lead & 0xF8) == 0xF0 ? 4
                                              : 0;
    bool ok = len > 0 && i + len <= s.size();
    TokenId cp = len == 1 ? lead : len == 2 ? (lead & 0x1F)
                                 : len == 3 ? (lead & 0x0F)
                                            : (lead & 0x07);
    for (std::size_t k = 1; ok && k < len; ++k) {
      const auto c = static_cast<unsigned char>(s[i + k]);
      if ((c & 0xC0) != 0x80) ok = false;
      cp = (cp << 6) | (c & 0x3F);
    }
    if (!ok) {
      out.push_back(0x110000 + lead);
      ++i;
    } else {
      out.push_back(cp);
      i += len;
    }
  }
  return out;
}

void CheckLogprobs(std::span<const double> lp) {
  if (lp.empty()) throw DomainError("token log-probabilities are empty");
  for (double v : lp) {
    if (!(v <= 0.0)) {
      throw DomainError("token log-probability " + std::to_string(v) +
                        " is not <= 0");
    }
  }
}

}  // namespace

std::string_view BaselineMethodName(BaselineMethod m) {
  switch (m) {
    case BaselineMethod::kNgramChar: return "ngram_char";
    case BaselineMethod::kNgramToken: return "ngram_token";
    case BaselineMethod::kPerplexity: return "perplexity";
    case BaselineMethod::kMinKProb: return "min_k_prob";
    case BaselineMethod::kEmbeddingSim: return "embedding_sim";
    case BaselineMethod::kLlmDecontaminator: return "llm_decontaminator";
  }
  return "unknown";
}

std::optional<BaselineMethod> ParseBaselineMethod(std::string_view name) {
  for (auto m : {BaselineMethod::kNgramChar, BaselineMethod::kNgramToken,
                 BaselineMethod::kPerplexity, BaselineMethod::kMinKProb,
                 BaselineMethod::kEmbeddingSim}) {
    if (BaselineMethodName(m) == name) return m;
  }
  return std::nullopt;
}

bool HigherIsSuspicious(BaselineMethod m) {
  return m != BaselineMethod::kPerplexity;
}

double NgramOverlap(std::string_view candidate, std::string_view reference,
                    std::size_t n, NgramLevel level, const Tokenizer& tok) {
  if (n == 0) throw DomainError("n-gram order must be >= 1");
  std::vector<TokenId> cand;
  std::vector<TokenId> ref;
  if (level == NgramLevel::kChar) {
    cand = CodePoints(candidate);
    ref = CodePoints(reference);
  } else {
    cand = Tokenize(candidate, tok).tokens;
    ref = Tokenize(reference, tok).tokens;
  }
  if (cand.size() < n) return cand == ref ? 1.0 : 0.0;

  std::set<std::vector<TokenId>> ref_grams;
  for (std::size_t i = 0; i + n <= ref.size(); ++i) {
    ref_grams.emplace(ref.begin() + i, ref.begin() + i + n);
  }
  const std::size_t windows = cand.size() - n + 1;
  std::size_t hits = 0;
  std::vector<TokenId> gram(n);
  for (std::size_t i = 0; i < windows; ++i) {
    std::copy(cand.begin() + i, cand.begin() + i + n, gram.begin());
    if (ref_grams.count(gram)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(windows);
}

double PerplexityScore(std::span<const double> token_logprobs) {
  CheckLogprobs(token_logprobs);
  double sum = 0.0;
  for (double v : token_logprobs) sum += v;
  return std::exp(-sum / static_cast<double>(token_logprobs.size()));
}

double MinKProb(std::span<const double> token_logprobs, double k_percent) {
  CheckLogprobs(token_logprobs);
  if (!(k_percent > 0.0 && k_percent <= 100.0)) {
    throw DomainError("k_percent must lie in (0, 100]");
  }
  std::vector<double> sorted(token_logprobs.begin(), token_logprobs.end());
  std::sort(sorted.begin(), sorted.end());
  const auto m = std::max<std::size_t>(
      1, static_cast<std::size_t>(
             std::floor(k_percent / 100.0 * static_cast<double>(sorted.size()) +
                        1e-9)));
  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) sum += sorted[i];
  return sum / static_cast<double>(m);
}

double EmbeddingSimilarity(std::span<const double> a,
                           std::span<const double> b) {
  if (a.size() != b.size()) {
    throw DomainError("embedding dimensions differ (" +
                      std::to_string(a.size()) + " vs " +
                      std::to_string(b.size()) + ")");
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) {
    throw DomainError("cosine similarity of a zero vector");
  }
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

Verdict ThresholdVerdict(BaselineMethod m, double score, double threshold) {
  const bool leaked =
      HigherIsSuspicious(m) ? score > threshold : score < threshold;
  return leaked ? Verdict::kLeaked : Verdict::kUnleaked;
}

}  // namespace cddted
