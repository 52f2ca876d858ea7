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

// Synthetic contamination simulator. A task has a canonical answer; each
// stochastic sample is, with probability m, a copy of it with a Poisson
// number of token substitutions, and otherwise an i.i.d. background text.

#ifndef CDDTED_SYNTHLAB_HPP_
#define CDDTED_SYNTHLAB_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "cddted/dataset.hpp"
#include "cddted/sample_set.hpp"

namespace cddted {

struct PassModel {
  double memorized_pass_prob = 1.0;
  double background_pass_prob = 0.2;
  friend bool operator==(const PassModel&, const PassModel&) = default;
};

struct ScenarioSpec {
  std::string task_id = "sim-0";
  // Probability that a sample is a noised copy of the canonical answer.
  double memorization_strength = 0.0;
  // Mean number of substitutions applied to each memorized copy.
  double edit_noise_rate = 0.0;
  std::uint32_t canonical_answer_length = 100;
  std::uint32_t background_vocab = 1000;
  std::uint32_t background_length = 100;
  std::uint32_t n_samples = 50;
  PassModel pass_model;
  // 0: the reference answer is the memorized canonical answer. k > 0: the
  // model memorized a variant of the reference in which every k-th token
  // differs, so the two share no contiguous run of k or more tokens.
  std::uint32_t variant_stride = 0;
  std::uint64_t seed = 0;

  // Throws ValidationError.
  void Validate() const;
  friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

nlohmann::json ScenarioToJson(const ScenarioSpec& spec);
// Missing fields keep their defaults; unknown fields are rejected.
ScenarioSpec ScenarioFromJson(const nlohmann::json& j);

// Text rendering of simulator token ids ("w17 w402 ...").
std::string RenderTokens(const std::vector<std::uint32_t>& tokens);

// Deterministic given the scenario (seed included). Integer-only draws for tokens.
SampleSet Generate(const ScenarioSpec& spec);

struct ScenarioSweep {
  ScenarioSpec base;
  // Any numeric ScenarioSpec field name; "m" and "lambda" are aliases.
  std::string axis = "memorization_strength";
  std::vector<double> values;
  std::uint32_t seeds_per_point = 1;

  void Validate() const;
};

nlohmann::json SweepToJson(const ScenarioSweep& sweep);
ScenarioSweep SweepFromJson(const nlohmann::json& j);

// base with `axis` set to `value`.
ScenarioSpec ApplyAxis(ScenarioSpec base, std::string_view axis, double value);

// One labeled record per (value, seed index), in that order. Label is
// contaminated iff the point's memorization strength is > 0.
std::vector<DatasetRecord> GenerateLabeledCorpus(const ScenarioSweep& sweep);

}  // namespace cddted

#endif  // CDDTED_SYNTHLAB_HPP_
