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

#include "cddted/distribution.hpp"

#include <algorithm>
#include <cmath>

#include "cddted/errors.hpp"

namespace cddted {
namespace {

EDDistribution Tally(DistributionKind kind,
                     const std::vector<std::size_t>& distances) {
  EDDistribution dist;
  dist.kind = kind;
  for (std::size_t d : distances) ++dist.counts[d];
  dist.total = distances.size();
  return dist;
}

}  // namespace

std::string_view DistributionKindName(DistributionKind kind) {
  switch (kind) {
    case DistributionKind::kPairwise: return "pairwise";
    case DistributionKind::kVsReference: return "vs_reference";
    case DistributionKind::kVsGreedy: return "vs_greedy";
  }
  return "unknown";
}

double EDDistribution::Density(std::size_t d) const {
  if (total == 0) return 0.0;
  auto it = counts.find(d);
  if (it == counts.end()) return 0.0;
  return static_cast<double>(it->second) / static_cast<double>(total);
}

std::vector<std::pair<std::size_t, double>> EDDistribution::Histogram()
    const {
  std::vector<std::pair<std::size_t, double>> rows;
  rows.reserve(counts.size());
  for (const auto& [d, c] : counts) {
    rows.emplace_back(d, static_cast<double>(c) / static_cast<double>(total));
  }
  return rows;
}

std::uint64_t EDDistribution::CountAtMost(std::size_t d) const {
  std::uint64_t n = 0;
  for (auto it = counts.begin(); it != counts.end() && it->first <= d; ++it) {
    n += it->second;
  }
  return n;
}

DistanceProfile::DistanceProfile(const SampleSet& set, Tokenizer tokenizer)
    : set_(&set), tokenizer_(std::move(tokenizer)) {
  if (!set.tokenizer_id.empty() && set.tokenizer_id != tokenizer_.id) {
    throw TokenizerMismatchError("task '" + set.task_id +
                                 "' declares tokenizer '" + set.tokenizer_id +
                                 "' but '" + tokenizer_.id + "' was requested");
  }
  samples_.reserve(set.samples.size());
  for (const Sample& s : set.samples) {
    samples_.push_back(Tokenize(s.text, tokenizer_));
  }
  if (set.greedy_text) greedy_ = Tokenize(*set.greedy_text, tokenizer_);
  if (set.reference_answer) {
    reference_ = Tokenize(*set.reference_answer, tokenizer_);
  }
}

const TokenSeq& DistanceProfile::greedy_tokens() const {
  if (!greedy_) {
    throw MissingFieldError("task '" + set_->task_id +
                            "' has no greedy completion");
  }
  return *greedy_;
}

const std::vector<std::size_t>& DistanceProfile::DistancesToGreedy() {
  if (!to_greedy_) {
    const TokenSeq& g = greedy_tokens();
    std::vector<std::size_t> d;
    d.reserve(samples_.size());
    for (const TokenSeq& s : samples_) d.push_back(EditDistance(s, g));
    to_greedy_ = std::move(d);
  }
  return *to_greedy_;
}

const std::vector<std::size_t>& DistanceProfile::DistancesToReference() {
  if (!to_reference_) {
    if (!reference_) {
      throw MissingFieldError("task '" + set_->task_id +
                              "' has no reference answer");
    }
    std::vector<std::size_t> d;
    d.reserve(samples_.size());
    for (const TokenSeq& s : samples_) d.push_back(EditDistance(s, *reference_));
    to_reference_ = std::move(d);
  }
  return *to_reference_;
}

const std::vector<std::size_t>& DistanceProfile::PairwiseDistances() {
  if (!pairwise_) {
    const std::size_t n = samples_.size();
    std::vector<std::size_t> d;
    d.reserve(n * (n > 0 ? n - 1 : 0) / 2);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        d.push_back(EditDistance(samples_[i], samples_[j]));
      }
    }
    pairwise_ = std::move(d);
  }
  return *pairwise_;
}

std::size_t DistanceProfile::MaxTokenLength() const {
  std::size_t longest = greedy_ ? greedy_->size() : 0;
  for (const TokenSeq& s : samples_) longest = std::max(longest, s.size());
  return longest;
}

EDDistribution DensityPairwise(DistanceProfile& profile) {
  if (profile.sample_count() < 2) {
    throw InsufficientSamplesError(
        "pairwise density needs at least 2 samples, task '" +
        profile.set().task_id + "' has " +
        std::to_string(profile.sample_count()));
  }
  return Tally(DistributionKind::kPairwise, profile.PairwiseDistances());
}

EDDistribution DensityVsReference(DistanceProfile& profile) {
  if (profile.sample_count() < 1) {
    throw InsufficientSamplesError("task '" + profile.set().task_id +
                                   "' has no samples");
  }
  return Tally(DistributionKind::kVsReference,
               profile.DistancesToReference());
}

EDDistribution DensityVsGreedy(DistanceProfile& profile) {
  if (profile.sample_count() < 1) {
    throw InsufficientSamplesError("task '" + profile.set().task_id +
                                   "' has no samples");
  }
  return Tally(DistributionKind::kVsGreedy, profile.DistancesToGreedy());
}

EDDistribution DensityPairwise(const SampleSet& set, const Tokenizer& tok) {
  DistanceProfile profile(set, tok);
  return DensityPairwise(profile);
}

EDDistribution DensityVsReference(const SampleSet& set, const Tokenizer& tok) {
  DistanceProfile profile(set, tok);
  return DensityVsReference(profile);
}

EDDistribution DensityVsGreedy(const SampleSet& set, const Tokenizer& tok) {
  DistanceProfile profile(set, tok);
  return DensityVsGreedy(profile);
}

std::size_t LengthScale(const DistanceProfile& profile, std::size_t cap) {
  return std::min(cap, profile.MaxTokenLength());
}

std::size_t LengthScale(const SampleSet& set, const Tokenizer& tok,
                        std::size_t cap) {
  return LengthScale(DistanceProfile(set, tok), cap);
}

std::size_t PeakWindow(std::size_t length_scale, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw DomainError("alpha must lie in [0, 1], got " +
                      std::to_string(alpha));
  }
  const double product = alpha * static_cast<double>(length_scale);
  const double nearest = std::round(product);
  if (std::fabs(product - nearest) <= 1e-9 * std::max(1.0, nearest)) {
    return static_cast<std::size_t>(nearest);
  }
  return static_cast<std::size_t>(std::floor(product));
}

double Peakedness(const EDDistribution& dist, std::size_t length_scale,
                  double alpha) {
  const std::size_t window = PeakWindow(length_scale, alpha);
  if (dist.total == 0) return 0.0;
  return static_cast<double>(dist.CountAtMost(window)) /
         static_cast<double>(dist.total);
}

}  // namespace cddted
