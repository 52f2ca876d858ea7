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

// Independent reference implementations used only by tests. None of them
// shares code with the library paths they check.

#ifndef CDDTED_TESTS_ORACLES_HPP_
#define CDDTED_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

namespace cddted::testing {

// Literal recursion over Len/Head/Tail; exponential, short inputs only.
inline std::size_t NaiveEditDistance(std::span<const std::uint64_t> a,
                                     std::span<const std::uint64_t> b) {
  if (b.empty()) return a.size();
  if (a.empty()) return b.size();
  if (a.front() == b.front()) {
    return NaiveEditDistance(a.subspan(1), b.subspan(1));
  }
  return 1 + std::min({NaiveEditDistance(a.subspan(1), b),
                       NaiveEditDistance(a, b.subspan(1)),
                       NaiveEditDistance(a.subspan(1), b.subspan(1))});
}

// The same recursion, memoized on (suffix of a, suffix of b).
inline std::size_t RecursiveEditDistance(std::span<const std::uint64_t> a,
                                         std::span<const std::uint64_t> b) {
  const std::size_t m = a.size(), n = b.size();
  std::vector<std::size_t> memo((m + 1) * (n + 1), SIZE_MAX);
  auto rec = [&](auto&& self, std::size_t i, std::size_t j) -> std::size_t {
    std::size_t& slot = memo[i * (n + 1) + j];
    if (slot != SIZE_MAX) return slot;
    if (j == n) return slot = m - i;
    if (i == m) return slot = n - j;
    if (a[i] == b[j]) return slot = self(self, i + 1, j + 1);
    return slot = 1 + std::min({self(self, i + 1, j), self(self, i, j + 1),
                                self(self, i + 1, j + 1)});
  };
  return rec(rec, 0, 0);
}

// Mann-Whitney over all positive/negative pairs, ties 1/2.
inline double PairwiseAuc(const std::vector<double>& positives,
                          const std::vector<double>& negatives) {
  double wins = 0.0;
  for (double p : positives) {
    for (double q : negatives) wins += p > q ? 1.0 : (p == q ? 0.5 : 0.0);
  }
  return wins / (static_cast<double>(positives.size()) *
                 static_cast<double>(negatives.size()));
}

struct Ratio {
  std::uint64_t num;
  std::uint64_t den;
};

// Share of the k-subsets of n items (the first c marked) that contain at
// least one marked item, reduced.
inline Ratio EnumeratePassAtK(int n, int c, int k) {
  std::uint64_t hit = 0, total = 0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (__builtin_popcount(mask) != k) continue;
    ++total;
    if (mask & ((1u << c) - 1)) ++hit;
  }
  const std::uint64_t g = std::gcd(hit, total);
  if (hit == 0) return {0, 1};
  return {hit / g, total / g};
}

}  // namespace cddted::testing

#endif  // CDDTED_TESTS_ORACLES_HPP_
