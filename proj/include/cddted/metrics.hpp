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

// Detection-quality metrics: accuracy, F1 for the contaminated class, and
// Mann-Whitney AUC with ties counted as one half.

#ifndef CDDTED_METRICS_HPP_
#define CDDTED_METRICS_HPP_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cddted/dataset.hpp"
#include "cddted/detector.hpp"

namespace cddted {

struct ScoredExample {
  // Oriented so that larger means "more likely contaminated".
  double score = 0.0;
  std::optional<Verdict> verdict;
  Label label = Label::kUncontaminated;
};

struct DetectionMetrics {
  std::optional<double> accuracy;
  std::optional<double> f1;
  // Absent when only one class is present.
  std::optional<double> auc;
  // "verdict" when every example carried a verdict, "best-threshold" when
  // the threshold was chosen on the evaluated set.
  std::string threshold_policy = "verdict";
  // Oriented score threshold chosen under best-threshold.
  std::optional<double> threshold;
  std::size_t n = 0;
};

double Accuracy(std::span<const Verdict> verdicts, std::span<const Label> labels);
double F1Score(std::span<const Verdict> verdicts, std::span<const Label> labels);

// Probability that a random contaminated score exceeds a random
// uncontaminated one, ties 1/2. O(n log n) via midranks.
std::optional<double> Auc(std::span<const double> scores,
                          std::span<const Label> labels);

struct ThresholdChoice {
  // Leaked iff score > threshold. -inf flags everything.
  double threshold;
  double accuracy;
  double f1;
};

// Threshold among {-inf} and the observed scores maximizing accuracy;
// the smallest such threshold wins ties.
ThresholdChoice BestThreshold(std::span<const double> scores,
                              std::span<const Label> labels);

// Accuracy/F1 from the verdicts when all examples carry one, otherwise at
// the best threshold. Empty input gives all-absent metrics.
DetectionMetrics ComputeDetectionMetrics(std::span<const ScoredExample> scored);

}  // namespace cddted

#endif  // CDDTED_METRICS_HPP_
