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

#include "cddted/metrics.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "cddted/errors.hpp"

namespace cddted {
namespace {

void CheckSizes(std::size_t a, std::size_t b) {
  if (a != b) throw DomainError("score and label counts differ");
}

bool Positive(Label l) { return l == Label::kContaminated; }

}  // namespace

double Accuracy(std::span<const Verdict> verdicts,
                std::span<const Label> labels) {
  CheckSizes(verdicts.size(), labels.size());
  if (verdicts.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < verdicts.size(); ++i) {
    correct += (verdicts[i] == Verdict::kLeaked) == Positive(labels[i]);
  }
  return static_cast<double>(correct) / static_cast<double>(verdicts.size());
}

double F1Score(std::span<const Verdict> verdicts,
               std::span<const Label> labels) {
  CheckSizes(verdicts.size(), labels.size());
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < verdicts.size(); ++i) {
    const bool flagged = verdicts[i] == Verdict::kLeaked;
    const bool positive = Positive(labels[i]);
    tp += flagged && positive;
    fp += flagged && !positive;
    fn += !flagged && positive;
  }
  if (tp == 0) return 0.0;
  return 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
}

std::optional<double> Auc(std::span<const double> scores,
                          std::span<const Label> labels) {
  CheckSizes(scores.size(), labels.size());
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double positive_rank_sum = 0.0;
  std::size_t positives = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    // Ranks i+1..j share their mean.
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (Positive(labels[order[k]])) {
        positive_rank_sum += midrank;
        ++positives;
      }
    }
    i = j;
  }
  const std::size_t negatives = scores.size() - positives;
  if (positives == 0 || negatives == 0) return std::nullopt;
  const double p = static_cast<double>(positives);
  const double u = positive_rank_sum - p * (p + 1.0) / 2.0;
  return u / (p * static_cast<double>(negatives));
}

ThresholdChoice BestThreshold(std::span<const double> scores,
                              std::span<const Label> labels) {
  CheckSizes(scores.size(), labels.size());
  std::vector<double> candidates(scores.begin(), scores.end());
  candidates.push_back(-std::numeric_limits<double>::infinity());
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()),
                   candidates.end());

  ThresholdChoice best{candidates.front(), -1.0, 0.0};
  std::vector<Verdict> verdicts(scores.size());
  for (double t : candidates) {
    for (std::size_t i = 0; i < scores.size(); ++i) {
      verdicts[i] = scores[i] > t ? Verdict::kLeaked : Verdict::kUnleaked;
    }
    const double acc = Accuracy(verdicts, labels);
    if (acc > best.accuracy) best = {t, acc, F1Score(verdicts, labels)};
  }
  return best;
}

DetectionMetrics ComputeDetectionMetrics(
    std::span<const ScoredExample> scored) {
  DetectionMetrics m;
  m.n = scored.size();
  if (scored.empty()) return m;
  std::vector<double> scores;
  std::vector<Label> labels;
  std::vector<Verdict> verdicts;
  bool all_verdicts = true;
  for (const auto& s : scored) {
    scores.push_back(s.score);
    labels.push_back(s.label);
    if (s.verdict) {
      verdicts.push_back(*s.verdict);
    } else {
      all_verdicts = false;
    }
  }
  if (all_verdicts) {
    m.threshold_policy = "verdict";
    m.accuracy = Accuracy(verdicts, labels);
    m.f1 = F1Score(verdicts, labels);
  } else {
    m.threshold_policy = "best-threshold";
    const ThresholdChoice t = BestThreshold(scores, labels);
    m.accuracy = t.accuracy;
    m.f1 = t.f1;
    m.threshold = t.threshold;
  }
  m.auc = Auc(scores, labels);
  return m;
}

}  // namespace cddted
