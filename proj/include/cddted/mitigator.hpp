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

// Metric correction by filtering the sampled output distribution: drop
// samples within tau edits of the greedy completion, drop repeated texts,
// then score what is left.

#ifndef CDDTED_MITIGATOR_HPP_
#define CDDTED_MITIGATOR_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cddted/sample_set.hpp"
#include "cddted/textdist.hpp"

namespace cddted {

struct TedConfig {
  std::size_t tau = 2;
  friend bool operator==(const TedConfig&, const TedConfig&) = default;
};

// Which filters to apply. kTed is the intersection of the other two.
enum class FilterVariant {
  kRaw,
  kRemoveDuplicates,
  kExcludePeakedness,
  kTed,
};

std::string_view FilterVariantName(FilterVariant v);
inline constexpr FilterVariant kAllVariants[] = {
    FilterVariant::kRaw, FilterVariant::kRemoveDuplicates,
    FilterVariant::kExcludePeakedness, FilterVariant::kTed};

struct MitigationResult {
  std::string task_id;
  // Strictly increasing indices into SampleSet::samples.
  std::vector<std::size_t> retained_indices;
  std::size_t n_before = 0;
  std::size_t n_after = 0;
  double metric_raw = 0.0;
  double metric_corrected = 0.0;
  bool empty_after_filter = false;
};

// Indices whose edit distance to the greedy completion is > tau.
std::vector<std::size_t> ExcludePeakedness(const SampleSet& set,
                                           std::size_t tau,
                                           const Tokenizer& tok);

// First occurrence of every distinct raw text.
std::vector<std::size_t> RemoveDuplicates(const SampleSet& set);

// Both filters; metric fields are left at zero.
MitigationResult TedFilter(const SampleSet& set, const TedConfig& config,
                           const Tokenizer& tok);

MitigationResult ApplyVariant(const SampleSet& set, FilterVariant variant,
                              const TedConfig& config, const Tokenizer& tok);

// Mean pass rate over all samples (raw) and over the TED-retained samples
// (corrected). An empty retained set scores 0 and sets the flag. Every
// sample must carry a pass flag.
MitigationResult CorrectedPassAt1(const SampleSet& set,
                                  const TedConfig& config,
                                  const Tokenizer& tok);

// Same, for any filter variant.
MitigationResult CorrectedPassAt1(const SampleSet& set, FilterVariant variant,
                                  const TedConfig& config,
                                  const Tokenizer& tok);

// Unbiased pass@k estimator 1 - C(n-c, k) / C(n, k), product form.
double PassAtK(std::int64_t n, std::int64_t c, std::int64_t k);

struct Fraction {
  std::uint64_t num = 0;
  std::uint64_t den = 1;
  friend bool operator==(const Fraction&, const Fraction&) = default;
};

// Exact reduced value of the same estimator; n <= 60.
Fraction PassAtKExact(std::int64_t n, std::int64_t c, std::int64_t k);

}  // namespace cddted

#endif  // CDDTED_MITIGATOR_HPP_
