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

#ifndef CDDTED_SAMPLE_SET_HPP_
#define CDDTED_SAMPLE_SET_HPP_

#include <optional>
#include <string>
#include <vector>

namespace cddted {

// One stochastic completion with optional auxiliary data.
struct Sample {
  std::string text;
  // Natural-log probabilities per generated token, all <= 0.
  std::optional<std::vector<double>> token_logprobs;
  std::optional<std::vector<double>> embedding;
  // External functional-correctness verdict.
  std::optional<bool> passed;
  // The endpoint stopped on its token limit.
  bool truncated = false;

  friend bool operator==(const Sample&, const Sample&) = default;
};

// A task's greedy completion plus n stochastic completions in draw order.
// The greedy text is held apart and is never a member of `samples`.
struct SampleSet {
  std::string task_id;
  std::string prompt;
  std::optional<std::string> reference_answer;
  std::optional<std::string> greedy_text;
  std::vector<Sample> samples;
  std::optional<double> sampling_temperature;
  // Empty means "not declared"; otherwise must match the tokenizer used.
  std::string tokenizer_id;
  // Free-form provenance notes (e.g. greedy nondeterminism).
  std::vector<std::string> notes;

  friend bool operator==(const SampleSet&, const SampleSet&) = default;
};

// Checks the per-sample invariants (log-probabilities <= 0, embeddings
// non-empty and finite). Throws ValidationError naming the sample index.
void ValidateSampleSet(const SampleSet& set);

}  // namespace cddted

#endif  // CDDTED_SAMPLE_SET_HPP_
