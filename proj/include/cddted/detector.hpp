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

// Contamination detection from the peakedness of the sample distribution
// around the greedy completion.

#ifndef CDDTED_DETECTOR_HPP_
#define CDDTED_DETECTOR_HPP_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "cddted/distribution.hpp"
#include "cddted/sample_set.hpp"
#include "cddted/textdist.hpp"

namespace cddted {

enum class Verdict { kUnleaked, kLeaked };

std::string_view VerdictName(Verdict v);

struct CddConfig {
  double alpha = 0.05;
  double xi = 0.01;
  std::size_t l_cap = kDefaultLengthCap;
  std::size_t n_samples_expected = 50;

  // Exact-match-only window with a high threshold, for closed endpoints.
  static CddConfig StrictRealWorld();
  // "default" or "strict-realworld"; ValidationError otherwise.
  static CddConfig FromPreset(std::string_view name);

  // Throws ValidationError on out-of-range fields.
  void Validate() const;

  friend bool operator==(const CddConfig&, const CddConfig&) = default;
};

struct DetectionOutcome {
  std::string task_id;
  // Continuous score, also used for ranking.
  double peak = 0.0;
  Verdict verdict = Verdict::kUnleaked;
  CddConfig config_used;
  std::size_t n_actual = 0;
  std::string tokenizer_id;
  std::size_t length_scale = 0;
  // The vs-greedy distribution the peak was read from.
  EDDistribution distribution;
  std::vector<std::string> warnings;
};

// Leaked iff peak > xi.
Verdict ClassifyPeak(double peak, double xi);

DetectionOutcome CddDetect(const SampleSet& set, const CddConfig& config,
                           const Tokenizer& tok);
DetectionOutcome CddDetect(DistanceProfile& profile, const CddConfig& config);

struct ItemError {
  std::size_t index = 0;
  std::string task_id;
  std::string message;
};

struct DetectionBatch {
  // Successful outcomes in input order.
  std::vector<DetectionOutcome> outcomes;
  std::vector<ItemError> errors;
};

// Scores every set; a failing task produces an ItemError and the batch
// continues. `workers` > 1 evaluates tasks on that many threads; output
// order never depends on scheduling.
DetectionBatch CddScoreBatch(const std::vector<SampleSet>& sets,
                             const CddConfig& config, const Tokenizer& tok,
                             std::size_t workers = 1);

}  // namespace cddted

#endif  // CDDTED_DETECTOR_HPP_
