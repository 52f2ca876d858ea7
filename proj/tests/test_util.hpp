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

#ifndef CDDTED_TESTS_TEST_UTIL_HPP_
#define CDDTED_TESTS_TEST_UTIL_HPP_

#include <string>
#include <vector>

#include "cddted/sample_set.hpp"

namespace cddted::testing {

// `n` distinct words starting at `prefix`0: "p0 p1 ... p{n-1}".
inline std::string Words(const std::string& prefix, int n) {
  std::string s;
  for (int i = 0; i < n; ++i) {
    if (i) s += ' ';
    s += prefix + std::to_string(i);
  }
  return s;
}

inline SampleSet MakeSet(std::vector<std::string> texts,
                         std::optional<std::string> greedy = std::nullopt,
                         std::optional<std::string> reference = std::nullopt,
                         std::string task_id = "t") {
  SampleSet s;
  s.task_id = std::move(task_id);
  s.greedy_text = std::move(greedy);
  s.reference_answer = std::move(reference);
  for (auto& t : texts) s.samples.push_back(Sample{std::move(t)});
  return s;
}

inline SampleSet WithPassFlags(SampleSet s, const std::vector<bool>& passed) {
  for (std::size_t i = 0; i < s.samples.size(); ++i) {
    s.samples[i].passed = passed[i];
  }
  return s;
}

}  // namespace cddted::testing

#endif  // CDDTED_TESTS_TEST_UTIL_HPP_
