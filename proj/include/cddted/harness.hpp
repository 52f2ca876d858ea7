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

// End-to-end drivers over a dataset: detection (CDD or a baseline),
// mitigation (raw / duplicates removed / peak excluded / both), and report
// serialization.

#ifndef CDDTED_HARNESS_HPP_
#define CDDTED_HARNESS_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "cddted/baselines.hpp"
#include "cddted/dataset.hpp"
#include "cddted/detector.hpp"
#include "cddted/metrics.hpp"
#include "cddted/mitigator.hpp"

namespace cddted {

struct DetectOptions {
  // "cdd" or a baseline method name.
  std::string method = "cdd";
  CddConfig cdd;
  Tokenizer tokenizer = Tokenizer::WhitespacePunct();
  // Fixed verdict threshold for baselines. n-gram methods default to 0.
  std::optional<double> threshold;
  double k_percent = 20.0;
  std::size_t ngram_n = kDefaultNgram;
  std::size_t workers = 1;

  nlohmann::json Echo() const;
};

struct TaskDetection {
  std::string task_id;
  double score = 0.0;
  std::optional<Verdict> verdict;
  std::optional<Label> label;
  // (d, density) rows of the vs-greedy distribution; CDD only.
  std::vector<std::pair<std::size_t, double>> histogram;
  std::vector<std::string> warnings;
};

struct DetectorReport {
  std::string method;
  std::string tokenizer_id;
  // Sorted by task id.
  std::vector<TaskDetection> per_task;
  std::vector<ItemError> errors;
  DetectionMetrics aggregate;
  nlohmann::json config_echo = nlohmann::json::object();
};

struct VariantAggregate {
  FilterVariant variant = FilterVariant::kRaw;
  double mean_raw = 0.0;
  double mean_corrected = 0.0;
  std::size_t n_tasks = 0;
  std::size_t n_empty_after_filter = 0;
};

struct TaskMitigation {
  std::string task_id;
  // One entry per FilterVariant, in kAllVariants order.
  std::vector<MitigationResult> variants;
};

struct MitigationReport {
  TedConfig ted;
  std::string tokenizer_id;
  std::vector<TaskMitigation> per_task;
  std::vector<VariantAggregate> aggregate;
  std::vector<ItemError> errors;
  nlohmann::json config_echo = nlohmann::json::object();
};

struct ReportBundle {
  std::vector<DetectorReport> detectors;
  std::vector<MitigationReport> mitigations;
};

// Scores one record under `options` (used by RunDetect; exposed for tests).
TaskDetection ScoreRecord(const DatasetRecord& record,
                          const DetectOptions& options);

DetectorReport RunDetect(const std::vector<DatasetRecord>& records,
                         const DetectOptions& options);

MitigationReport RunMitigate(const std::vector<DatasetRecord>& records,
                             const TedConfig& ted, const Tokenizer& tokenizer,
                             std::size_t workers = 1);

nlohmann::json BundleToJson(const ReportBundle& bundle);
ReportBundle BundleFromJson(const nlohmann::json& j);
ReportBundle LoadBundle(const std::filesystem::path& path);

enum class ReportFormat { kJson, kCsv };

// JSON writes one file. CSV writes `path` (one aggregate row per
// method/variant), `<path>.tasks.csv` and `<path>.hist.csv` (task, d,
// density rows for CDD). Output is byte-stable for equal bundles.
void EmitReport(const ReportBundle& bundle, ReportFormat format,
                const std::filesystem::path& path);

}  // namespace cddted

#endif  // CDDTED_HARNESS_HPP_
