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

#include "cddted/mitigator.hpp"

#include <algorithm>
#include <iterator>
#include <numeric>
#include <unordered_set>

#include "cddted/errors.hpp"

namespace cddted {
namespace {

void RequireGreedy(const SampleSet& set) {
  if (!set.greedy_text) {
    throw MissingFieldError("task '" + set.task_id +
                            "' has no greedy completion");
  }
}

void CheckTokenizer(const SampleSet& set, const Tokenizer& tok) {
  if (!set.tokenizer_id.empty() && set.tokenizer_id != tok.id) {
    throw TokenizerMismatchError("task '" + set.task_id +
                                 "' declares tokenizer '" + set.tokenizer_id +
                                 "' but '" + tok.id + "' was requested");
  }
}

std::vector<std::size_t> Intersect(const std::vector<std::size_t>& a,
                                   const std::vector<std::size_t>& b) {
  std::vector<std::size_t> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
  return out;
}

std::vector<std::size_t> AllIndices(std::size_t n) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return idx;
}

void CheckPassAtKDomain(std::int64_t n, std::int64_t c, std::int64_t k) {
  if (n < 1 || c < 0 || c > n || k < 1 || k > n) {
    throw DomainError("pass@k requires 0 <= c <= n and 1 <= k <= n (n=" +
                      std::to_string(n) + ", c=" + std::to_string(c) +
                      ", k=" + std::to_string(k) + ")");
  }
}

std::uint64_t Binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    // r * (n - k + i) / i stays exact; divide through the gcd first.
    const std::uint64_t g = std::gcd(r, i);
    r = (r / g) * ((n - k + i) / (i / g));
  }
  return r;
}

}  // namespace

std::string_view FilterVariantName(FilterVariant v) {
  switch (v) {
    case FilterVariant::kRaw: return "raw";
    case FilterVariant::kRemoveDuplicates: return "rd";
    case FilterVariant::kExcludePeakedness: return "ep";
    case FilterVariant::kTed: return "ted";
  }
  return "unknown";
}

std::vector<std::size_t> ExcludePeakedness(const SampleSet& set,
                                           std::size_t tau,
                                           const Tokenizer& tok) {
  RequireGreedy(set);
  CheckTokenizer(set, tok);
  const TokenSeq greedy = Tokenize(*set.greedy_text, tok);
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < set.samples.size(); ++i) {
    const TokenSeq s = Tokenize(set.samples[i].text, tok);
    if (!EditDistanceBounded(s, greedy, tau)) kept.push_back(i);
  }
  return kept;
}

std::vector<std::size_t> RemoveDuplicates(const SampleSet& set) {
  std::unordered_set<std::string_view> seen;
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < set.samples.size(); ++i) {
    if (seen.insert(set.samples[i].text).second) kept.push_back(i);
  }
  return kept;
}

MitigationResult ApplyVariant(const SampleSet& set, FilterVariant variant,
                              const TedConfig& config, const Tokenizer& tok) {
  RequireGreedy(set);
  MitigationResult r;
  r.task_id = set.task_id;
  r.n_before = set.samples.size();
  switch (variant) {
    case FilterVariant::kRaw:
      r.retained_indices = AllIndices(set.samples.size());
      break;
    case FilterVariant::kRemoveDuplicates:
      r.retained_indices = RemoveDuplicates(set);
      break;
    case FilterVariant::kExcludePeakedness:
      r.retained_indices = ExcludePeakedness(set, config.tau, tok);
      break;
    case FilterVariant::kTed:
      r.retained_indices = Intersect(ExcludePeakedness(set, config.tau, tok),
                                     RemoveDuplicates(set));
      break;
  }
  r.n_after = r.retained_indices.size();
  r.empty_after_filter = r.retained_indices.empty();
  return r;
}

MitigationResult TedFilter(const SampleSet& set, const TedConfig& config,
                           const Tokenizer& tok) {
  return ApplyVariant(set, FilterVariant::kTed, config, tok);
}

MitigationResult CorrectedPassAt1(const SampleSet& set, FilterVariant variant,
                                  const TedConfig& config,
                                  const Tokenizer& tok) {
  std::vector<std::size_t> missing;
  for (std::size_t i = 0; i < set.samples.size(); ++i) {
    if (!set.samples[i].passed) missing.push_back(i);
  }
  if (!missing.empty()) {
    std::string list;
    for (std::size_t i : missing) {
      if (!list.empty()) list += ",";
      list += std::to_string(i);
    }
    throw MissingFieldError("task '" + set.task_id +
                            "' lacks pass flags at sample indices [" + list +
                            "]");
  }
  if (set.samples.empty()) {
    throw InsufficientSamplesError("task '" + set.task_id +
                                   "' has no samples");
  }

  MitigationResult r = ApplyVariant(set, variant, config, tok);
  std::size_t passed_all = 0;
  for (const Sample& s : set.samples) passed_all += *s.passed ? 1 : 0;
  r.metric_raw = static_cast<double>(passed_all) /
                 static_cast<double>(set.samples.size());
  if (r.empty_after_filter) {
    r.metric_corrected = 0.0;
  } else {
    std::size_t passed_kept = 0;
    for (std::size_t i : r.retained_indices) {
      passed_kept += *set.samples[i].passed ? 1 : 0;
    }
    r.metric_corrected = static_cast<double>(passed_kept) /
                         static_cast<double>(r.n_after);
  }
  return r;
}

MitigationResult CorrectedPassAt1(const SampleSet& set,
                                  const TedConfig& config,
                                  const Tokenizer& tok) {
  return CorrectedPassAt1(set, FilterVariant::kTed, config, tok);
}

double PassAtK(std::int64_t n, std::int64_t c, std::int64_t k) {
  CheckPassAtKDomain(n, c, k);
  if (n - c < k) return 1.0;
  // C(n-c, k) / C(n, k) = prod_{i=n-c+1}^{n} (1 - k / i)
  double miss = 1.0;
  for (std::int64_t i = n - c + 1; i <= n; ++i) {
    miss *= 1.0 - static_cast<double>(k) / static_cast<double>(i);
  }
  return 1.0 - miss;
}

Fraction PassAtKExact(std::int64_t n, std::int64_t c, std::int64_t k) {
  CheckPassAtKDomain(n, c, k);
  if (n > 60) throw DomainError("exact pass@k supports n <= 60");
  const std::uint64_t total = Binomial(n, k);
  const std::uint64_t miss = Binomial(n - c, k);
  Fraction f{total - miss, total};
  const std::uint64_t g = std::gcd(f.num, f.den);
  if (g > 1) {
    f.num /= g;
    f.den /= g;
  }
  if (f.num == 0) f.den = 1;
  return f;
}

}  // namespace cddted
