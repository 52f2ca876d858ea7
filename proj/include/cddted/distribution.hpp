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

// Edit-distance distributions over a task's sampled outputs and the
// peakedness statistic derived from them.

#ifndef CDDTED_DISTRIBUTION_HPP_
#define CDDTED_DISTRIBUTION_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "cddted/sample_set.hpp"
#include "cddted/textdist.hpp"

namespace cddted {

enum class DistributionKind {
  kPairwise,     // all unordered sample pairs
  kVsReference,  // each sample against the reference answer
  kVsGreedy,     // each sample against the greedy completion
};

std::string_view DistributionKindName(DistributionKind kind);

// Histogram over integer edit distances. density(d) = counts[d] / total.
struct EDDistribution {
  DistributionKind kind = DistributionKind::kVsGreedy;
  std::map<std::size_t, std::uint64_t> counts;
  std::uint64_t total = 0;

  double Density(std::size_t d) const;
  // (d, density) rows in increasing d.
  std::vector<std::pair<std::size_t, double>> Histogram() const;
  // Number of observations at distance <= d.
  std::uint64_t CountAtMost(std::size_t d) const;
};

// Tokenizes a SampleSet once and memoizes every distance it is asked for,
// so repeated density or peakedness queries (e.g. alpha sweeps) reuse a
// single distance pass.
class DistanceProfile {
 public:
  // Throws TokenizerMismatchError if the set declares a different
  // tokenizer id.
  DistanceProfile(const SampleSet& set, Tokenizer tokenizer);

  const SampleSet& set() const { return *set_; }
  const Tokenizer& tokenizer() const { return tokenizer_; }
  std::size_t sample_count() const { return samples_.size(); }
  const TokenSeq& sample_tokens(std::size_t i) const { return samples_[i]; }
  // Throws MissingFieldError when the set has no greedy text.
  const TokenSeq& greedy_tokens() const;

  // ED(s_i, greedy) for every sample, in sample order.
  const std::vector<std::size_t>& DistancesToGreedy();
  // ED(s_i, reference) for every sample.
  const std::vector<std::size_t>& DistancesToReference();
  // ED(s_i, s_j) for i < j, row-major over i.
  const std::vector<std::size_t>& PairwiseDistances();

  // Longest token sequence among the samples and the greedy text.
  std::size_t MaxTokenLength() const;

 private:
  const SampleSet* set_;
  Tokenizer tokenizer_;
  std::vector<TokenSeq> samples_;
  std::optional<TokenSeq> greedy_;
  std::optional<TokenSeq> reference_;
  std::optional<std::vector<std::size_t>> to_greedy_;
  std::optional<std::vector<std::size_t>> to_reference_;
  std::optional<std::vector<std::size_t>> pairwise_;
};

EDDistribution DensityPairwise(DistanceProfile& profile);
EDDistribution DensityVsReference(DistanceProfile& profile);
EDDistribution DensityVsGreedy(DistanceProfile& profile);

EDDistribution DensityPairwise(const SampleSet& set, const Tokenizer& tok);
EDDistribution DensityVsReference(const SampleSet& set, const Tokenizer& tok);
EDDistribution DensityVsGreedy(const SampleSet& set, const Tokenizer& tok);

inline constexpr std::size_t kDefaultLengthCap = 100;

// min(cap, longest token length over the samples and the greedy text).
// Texts are never truncated; only the window scale is capped.
std::size_t LengthScale(const DistanceProfile& profile,
                        std::size_t cap = kDefaultLengthCap);
std::size_t LengthScale(const SampleSet& set, const Tokenizer& tok,
                        std::size_t cap = kDefaultLengthCap);

// Largest distance inside the peak window: floor(alpha * l). A product
// that is integral up to rounding noise counts as integral.
std::size_t PeakWindow(std::size_t length_scale, double alpha);

// Cumulative density at d <= floor(alpha * l). alpha must lie in [0, 1].
double Peakedness(const EDDistribution& dist, std::size_t length_scale,
                  double alpha);

}  // namespace cddted

#endif  // CDDTED_DISTRIBUTION_HPP_
