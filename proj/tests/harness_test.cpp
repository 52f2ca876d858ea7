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

#include "cddted/harness.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "gtest/gtest.h"
#include "cddted/errors.hpp"
#include "cddted/synthlab.hpp"
#include "test_util.hpp"

namespace cddted {
namespace {

namespace fs = std::filesystem;
using testing::MakeSet;
using testing::WithPassFlags;
using testing::Words;

const Tokenizer kTok = Tokenizer::WhitespacePunct();

DatasetRecord Record(SampleSet set, std::optional<Label> label = {}) {
  DatasetRecord r;
  r.set = std::move(set);
  r.label = label;
  r.sample_extra.assign(r.set.samples.size(), nlohmann::json::object());
  return r;
}

std::vector<DatasetRecord> SimCorpus(std::uint32_t seeds, double m_hi = 0.9) {
  ScenarioSweep sweep;
  sweep.values = {0.0, m_hi};
  sweep.base.edit_noise_rate = 1.0;
  sweep.base.n_samples = 20;
  sweep.base.canonical_answer_length = 40;
  sweep.base.background_length = 40;
  sweep.seeds_per_point = seeds;
  return GenerateLabeledCorpus(sweep);
}

fs::path TempPath(const std::string& name) {
  static std::atomic<int> counter{0};
  return fs::temp_directory_path() /
         ("cddted_harness_" + std::to_string(::getpid()) + "_" +
          std::to_string(counter++) + "_" + name);
}

std::string ReadAll(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(RunDetectTest, CddSeparatesSimulatedCorpus) {
  DetectOptions opt;
  auto report = RunDetect(SimCorpus(10), opt);
  EXPECT_EQ(report.method, "cdd");
  EXPECT_EQ(report.per_task.size(), 20u);
  EXPECT_TRUE(report.errors.empty());
  ASSERT_TRUE(report.aggregate.auc.has_value());
  EXPECT_GE(*report.aggregate.auc, 0.95);
  EXPECT_GE(*report.aggregate.accuracy, 0.9);
  EXPECT_EQ(report.aggregate.threshold_policy, "verdict");
  for (std::size_t i = 1; i < report.per_task.size(); ++i) {
    EXPECT_LT(report.per_task[i - 1].task_id, report.per_task[i].task_id);
  }
  EXPECT_FALSE(report.per_task[0].histogram.empty());
  EXPECT_EQ(report.config_echo["alpha"], 0.05);
}

TEST(RunDetectTest, PerplexityWithoutLogprobsFailsEveryTask) {
  DetectOptions opt;
  opt.method = "perplexity";
  auto report = RunDetect(SimCorpus(2), opt);
  EXPECT_TRUE(report.per_task.empty());
  EXPECT_EQ(report.errors.size(), 4u);
  EXPECT_FALSE(report.aggregate.auc.has_value());
  EXPECT_FALSE(report.aggregate.accuracy.has_value());
}

TEST(RunDetectTest, NgramFlagsGreedyEqualToReference) {
  std::vector<DatasetRecord> records;
  for (int i = 0; i < 4; ++i) {
    const std::string g = Words("x" + std::to_string(i) + "_", 20);
    records.push_back(Record(MakeSet({"a"}, g, g, "t" + std::to_string(i))));
  }
  for (std::string method : {"ngram_token", "ngram_char"}) {
    DetectOptions opt;
    opt.method = method;
    auto report = RunDetect(records, opt);
    ASSERT_EQ(report.per_task.size(), 4u);
    for (const auto& t : report.per_task) {
      EXPECT_EQ(t.verdict, Verdict::kLeaked) << method;
      EXPECT_DOUBLE_EQ(t.score, 1.0);
    }
  }
}

TEST(RunDetectTest, LogprobBaselinesUseBestThreshold) {
  std::vector<DatasetRecord> records;
  for (int i = 0; i < 6; ++i) {
    const bool c = i % 2 == 0;
    SampleSet s = MakeSet({"a", "b"}, "g", "r", "t" + std::to_string(i));
    const double lp = c ? -0.1 - 0.01 * i : -2.0 - 0.1 * i;
    for (auto& smp : s.samples) smp.token_logprobs = std::vector<double>{lp, lp};
    records.push_back(
        Record(s, c ? Label::kContaminated : Label::kUncontaminated));
  }
  for (std::string method : {"perplexity", "min_k_prob"}) {
    DetectOptions opt;
    opt.method = method;
    auto report = RunDetect(records, opt);
    EXPECT_EQ(report.aggregate.threshold_policy, "best-threshold") << method;
    EXPECT_DOUBLE_EQ(*report.aggregate.auc, 1.0) << method;
    EXPECT_DOUBLE_EQ(*report.aggregate.accuracy, 1.0) << method;
  }
}

TEST(RunDetectTest, ReferenceLogprobsTakePrecedence) {
  SampleSet s = MakeSet({"a"}, "g", "r");
  s.samples[0].token_logprobs = std::vector<double>{-3.0};
  DatasetRecord r = Record(s);
  DetectOptions opt;
  opt.method = "perplexity";
  EXPECT_NEAR(ScoreRecord(r, opt).score, std::exp(3.0), 1e-12);
  r.extra["reference_token_logprobs"] = {-1.0, -3.0};
  EXPECT_NEAR(ScoreRecord(r, opt).score, std::exp(2.0), 1e-12);
  opt.method = "min_k_prob";
  opt.k_percent = 50.0;
  EXPECT_DOUBLE_EQ(ScoreRecord(r, opt).score, -3.0);
}

TEST(RunDetectTest, EmbeddingUsesReferenceEmbedding) {
  SampleSet s = MakeSet({"a", "b"}, "g", "r");
  s.samples[0].embedding = std::vector<double>{1, 0};
  s.samples[1].embedding = std::vector<double>{0, 1};
  DatasetRecord with_ref = Record(s);
  with_ref.extra["reference_embedding"] = {1.0, 0.0};
  DetectOptions opt;
  opt.method = "embedding_sim";
  EXPECT_DOUBLE_EQ(ScoreRecord(with_ref, opt).score, 0.5);
  EXPECT_DOUBLE_EQ(ScoreRecord(Record(s), opt).score, 0.0);
}

TEST(RunDetectTest, MixedTokenizerIsRetaggedWithWarning) {
  SampleSet s = MakeSet({"a b", "a b"}, "a b");
  s.tokenizer_id = "byte-level";
  DetectOptions opt;
  const auto t = ScoreRecord(Record(s), opt);
  ASSERT_FALSE(t.warnings.empty());
  EXPECT_NE(t.warnings.front().find("byte-level"), std::string::npos);
}

TEST(RunDetectTest, AucIsAntisymmetric) {
  auto records = SimCorpus(6, 0.3);
  DetectOptions opt;
  auto report = RunDetect(records, opt);
  for (auto& r : records) {
    r.label = *r.label == Label::kContaminated ? Label::kUncontaminated
                                               : Label::kContaminated;
  }
  auto flipped = RunDetect(records, opt);
  EXPECT_NEAR(*report.aggregate.auc + *flipped.aggregate.auc, 1.0, 1e-12);
}

TEST(RunMitigateTest, FiltersAreNoOpsOnFarDistinctSamples) {
  std::vector<DatasetRecord> records = {
      Record(WithPassFlags(MakeSet({Words("a", 6), Words("b", 6), Words("c", 6)},
                                   Words("g", 6), {}, "t1"),
                           {true, false, true}))};
  auto report = RunMitigate(records, {}, kTok);
  ASSERT_EQ(report.aggregate.size(), 4u);
  for (const auto& a : report.aggregate) {
    EXPECT_DOUBLE_EQ(a.mean_corrected, 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(a.mean_raw, 2.0 / 3.0);
  }
}

TEST(RunMitigateTest, FullyMemorizedEmptiesTed) {
  std::vector<DatasetRecord> records;
  for (int i = 0; i < 3; ++i) {
    const std::string g = Words("g", 8);
    records.push_back(Record(WithPassFlags(
        MakeSet({g, g, g}, g, {}, "t" + std::to_string(i)), {true, true, true})));
  }
  auto report = RunMitigate(records, {}, kTok);
  const auto& ted = report.aggregate[3];
  EXPECT_EQ(ted.variant, FilterVariant::kTed);
  EXPECT_DOUBLE_EQ(ted.mean_corrected, 0.0);
  EXPECT_DOUBLE_EQ(ted.mean_raw, 1.0);
  EXPECT_EQ(ted.n_empty_after_filter, 3u);
  EXPECT_EQ(report.aggregate[1].n_empty_after_filter, 0u);
}

TEST(RunMitigateTest, MissingPassFlagsAreCollected) {
  std::vector<DatasetRecord> records = {
      Record(MakeSet({"a"}, "g", {}, "bad")),
      Record(WithPassFlags(MakeSet({Words("a", 5)}, "g", {}, "good"), {true}))};
  auto report = RunMitigate(records, {}, kTok);
  ASSERT_EQ(report.errors.size(), 1u);
  EXPECT_EQ(report.errors[0].task_id, "bad");
  EXPECT_EQ(report.per_task.size(), 1u);
  EXPECT_EQ(report.aggregate[0].n_tasks, 1u);
}

ReportBundle SampleBundle() {
  auto records = SimCorpus(3);
  ReportBundle b;
  DetectOptions cdd;
  b.detectors.push_back(RunDetect(records, cdd));
  DetectOptions ng;
  ng.method = "ngram_token";
  b.detectors.push_back(RunDetect(records, ng));
  b.mitigations.push_back(RunMitigate(records, {}, kTok));
  return b;
}

TEST(EmitReportTest, JsonRoundTripsAndIsStable) {
  const ReportBundle b = SampleBundle();
  const auto p1 = TempPath("a.json");
  const auto p2 = TempPath("b.json");
  EmitReport(b, ReportFormat::kJson, p1);
  EmitReport(b, ReportFormat::kJson, p2);
  EXPECT_EQ(ReadAll(p1), ReadAll(p2));
  const ReportBundle loaded = LoadBundle(p1);
  EXPECT_EQ(BundleToJson(loaded), BundleToJson(b));
  const auto p3 = TempPath("c.json");
  EmitReport(loaded, ReportFormat::kJson, p3);
  EXPECT_EQ(ReadAll(p1), ReadAll(p3));
  for (const auto& p : {p1, p2, p3}) fs::remove(p);
}

TEST(EmitReportTest, CsvHasOneAggregateRowPerMethodAndVariant) {
  const ReportBundle b = SampleBundle();
  const auto p = TempPath("r.csv");
  EmitReport(b, ReportFormat::kCsv, p);
  std::istringstream agg(ReadAll(p));
  std::string line;
  int rows = 0;
  std::getline(agg, line);
  while (std::getline(agg, line)) ++rows;
  EXPECT_EQ(rows, 2 + 4);
  const std::string hist = ReadAll(p.string() + ".hist.csv");
  EXPECT_EQ(hist.rfind("method,task_id,d,density\n", 0), 0u) << hist.substr(0, 40);
  EXPECT_FALSE(ReadAll(p.string() + ".tasks.csv").empty());
  const auto again = TempPath("r2.csv");
  EmitReport(b, ReportFormat::kCsv, again);
  EXPECT_EQ(ReadAll(p), ReadAll(again));
  for (const auto& base : {p, again}) {
    for (const char* suffix : {"", ".tasks.csv", ".hist.csv"}) {
      fs::remove(base.string() + suffix);
    }
  }
}

TEST(EmitReportTest, UnwritablePathThrows) {
  EXPECT_THROW(EmitReport(SampleBundle(), ReportFormat::kJson,
                          "/nonexistent-dir/x/report.json"),
               Error);
}

}  // namespace
}  // namespace cddted
