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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <variant>

#include "cddted/errors.hpp"
#include "parallel.hpp"

namespace cddted {
namespace {

using nlohmann::json;

// Shortest round-trip rendering.
std::string Num(double v) {
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  return json(v).dump();
}

json NumOrNull(const std::optional<double>& v) {
  if (!v) return nullptr;
  if (std::isinf(*v)) return *v < 0 ? "-inf" : "inf";
  return *v;
}

std::optional<double> ReadNum(const json& j) {
  if (j.is_null()) return std::nullopt;
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    throw ValidationError("expected a number, got '" + s + "'");
  }
  return j.get<double>();
}

// A record whose declared tokenizer differs from the requested one is
// re-declared; the override is surfaced as a warning.
const SampleSet& Retag(const DatasetRecord& record, const Tokenizer& tok,
                       SampleSet& scratch, std::vector<std::string>& warnings) {
  const SampleSet& set = record.set;
  if (set.tokenizer_id.empty() || set.tokenizer_id == tok.id) return set;
  warnings.push_back("declared tokenizer '" + set.tokenizer_id +
                     "' overridden by '" + tok.id + "'");
  scratch = set;
  scratch.tokenizer_id = tok.id;
  return scratch;
}

std::vector<const Sample*> WithLogprobs(const SampleSet& set) {
  std::vector<const Sample*> out;
  for (const Sample& s : set.samples) {
    if (s.token_logprobs && !s.token_logprobs->empty()) out.push_back(&s);
  }
  if (out.empty()) {
    throw MissingFieldError("task '" + set.task_id +
                            "' has no samples with token_logprobs");
  }
  return out;
}

double EmbeddingScore(const DatasetRecord& record) {
  const SampleSet& set = record.set;
  std::vector<const std::vector<double>*> embs;
  for (const Sample& s : set.samples) {
    if (s.embedding) embs.push_back(&*s.embedding);
  }
  if (auto it = record.extra.find("reference_embedding");
      it != record.extra.end() && it->is_array()) {
    const auto ref = it->get<std::vector<double>>();
    if (embs.empty()) {
      throw MissingFieldError("task '" + set.task_id +
                              "' has no sample embeddings");
    }
    double sum = 0.0;
    for (const auto* e : embs) sum += EmbeddingSimilarity(*e, ref);
    return sum / static_cast<double>(embs.size());
  }
  if (embs.size() < 2) {
    throw MissingFieldError("task '" + set.task_id +
                            "' needs at least 2 sample embeddings or a "
                            "reference_embedding");
  }
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < embs.size(); ++i) {
    for (std::size_t j = i + 1; j < embs.size(); ++j) {
      sum += EmbeddingSimilarity(*embs[i], *embs[j]);
      ++pairs;
    }
  }
  return sum / static_cast<double>(pairs);
}

double Oriented(const std::string& method, double score) {
  if (auto m = ParseBaselineMethod(method); m && !HigherIsSuspicious(*m)) {
    return -score;
  }
  return score;
}

json ErrorsToJson(const std::vector<ItemError>& errors) {
  json a = json::array();
  for (const auto& e : errors) {
    a.push_back({{"index", e.index}, {"task_id", e.task_id},
                 {"message", e.message}});
  }
  return a;
}

std::vector<ItemError> ErrorsFromJson(const json& a) {
  std::vector<ItemError> out;
  for (const auto& e : a) {
    out.push_back({e.at("index").get<std::size_t>(),
                   e.at("task_id").get<std::string>(),
                   e.at("message").get<std::string>()});
  }
  return out;
}

json MitigationToJson(const MitigationResult& r, FilterVariant v) {
  return {{"variant", std::string(FilterVariantName(v))},
          {"retained_indices", r.retained_indices},
          {"n_before", r.n_before},
          {"n_after", r.n_after},
          {"metric_raw", r.metric_raw},
          {"metric_corrected", r.metric_corrected},
          {"empty_after_filter", r.empty_after_filter}};
}

FilterVariant ParseVariant(const std::string& name) {
  for (FilterVariant v : kAllVariants) {
    if (FilterVariantName(v) == name) return v;
  }
  throw ValidationError("unknown filter variant '" + name + "'");
}

std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string OptNum(const std::optional<double>& v) {
  return v ? Num(*v) : std::string();
}

void WriteFile(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << body;
  if (!out) throw Error("write failed for " + path.string());
}

}  // namespace

json DetectOptions::Echo() const {
  json j = {{"method", method},
            {"tokenizer", tokenizer.id},
            {"workers", workers}};
  if (method == "cdd") {
    j["alpha"] = cdd.alpha;
    j["xi"] = cdd.xi;
    j["l_cap"] = cdd.l_cap;
    j["n_samples_expected"] = cdd.n_samples_expected;
  } else {
    j["threshold"] = NumOrNull(threshold);
    if (method == "min_k_prob") j["k_percent"] = k_percent;
    if (method == "ngram_char" || method == "ngram_token") j["ngram_n"] = ngram_n;
  }
  return j;
}

TaskDetection ScoreRecord(const DatasetRecord& record,
                          const DetectOptions& options) {
  TaskDetection t;
  t.task_id = record.set.task_id;
  t.label = record.label;
  SampleSet scratch;
  const SampleSet& set =
      Retag(record, options.tokenizer, scratch, t.warnings);

  if (options.method == "cdd") {
    DetectionOutcome o = CddDetect(set, options.cdd, options.tokenizer);
    t.score = o.peak;
    t.verdict = o.verdict;
    t.histogram = o.distribution.Histogram();
    for (auto& w : o.warnings) t.warnings.push_back(std::move(w));
    return t;
  }

  const auto method = ParseBaselineMethod(options.method);
  if (!method) {
    throw ValidationError("unknown method '" + options.method + "'", 0,
                          "method");
  }
  std::optional<double> threshold = options.threshold;
  switch (*method) {
    case BaselineMethod::kNgramChar:
    case BaselineMethod::kNgramToken: {
      if (!set.reference_answer) {
        throw MissingFieldError("task '" + set.task_id +
                                "' has no reference answer");
      }
      if (!set.greedy_text) {
        throw MissingFieldError("task '" + set.task_id +
                                "' has no greedy completion");
      }
      const NgramLevel level = *method == BaselineMethod::kNgramChar
                                   ? NgramLevel::kChar
                                   : NgramLevel::kToken;
      t.score = NgramOverlap(*set.greedy_text, *set.reference_answer,
                             options.ngram_n, level, options.tokenizer);
      if (!threshold) threshold = 0.0;
      break;
    }
    case BaselineMethod::kPerplexity:
    case BaselineMethod::kMinKProb: {
      auto score = [&](const std::vector<double>& lp) {
        return *method == BaselineMethod::kPerplexity
                   ? PerplexityScore(lp)
                   : MinKProb(lp, options.k_percent);
      };
      if (auto it = record.extra.find("reference_token_logprobs");
          it != record.extra.end() && it->is_array() && !it->empty()) {
        t.score = score(it->get<std::vector<double>>());
        break;
      }
      const auto samples = WithLogprobs(set);
      double sum = 0.0;
      for (const Sample* s : samples) sum += score(*s->token_logprobs);
      t.score = sum / static_cast<double>(samples.size());
      break;
    }
    case BaselineMethod::kEmbeddingSim:
      t.score = EmbeddingScore(record);
      break;
    case BaselineMethod::kLlmDecontaminator:
      throw ValidationError("llm_decontaminator is not implemented", 0,
                            "method");
  }
  if (threshold) t.verdict = ThresholdVerdict(*method, t.score, *threshold);
  return t;
}

DetectorReport RunDetect(const std::vector<DatasetRecord>& records,
                         const DetectOptions& options) {
  if (options.method == "cdd") {
    options.cdd.Validate();
  } else if (!ParseBaselineMethod(options.method)) {
    throw ValidationError("unknown method '" + options.method + "'", 0,
                          "method");
  }

  std::vector<std::variant<TaskDetection, std::string>> slots(records.size());
  internal::ParallelFor(records.size(), options.workers, [&](std::size_t i) {
    try {
      slots[i] = ScoreRecord(records[i], options);
    } catch (const Error& e) {
      slots[i] = std::string(e.what());
    }
  });

  DetectorReport report;
  report.method = options.method;
  report.tokenizer_id = options.tokenizer.id;
  report.config_echo = options.Echo();
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (auto* t = std::get_if<TaskDetection>(&slots[i])) {
      report.per_task.push_back(std::move(*t));
    } else {
      report.errors.push_back(
          {i, records[i].set.task_id, std::get<std::string>(slots[i])});
    }
  }
  std::sort(report.per_task.begin(), report.per_task.end(),
            [](const TaskDetection& a, const TaskDetection& b) {
              return a.task_id < b.task_id;
            });

  std::vector<ScoredExample> scored;
  bool all_labeled = !report.per_task.empty();
  for (const auto& t : report.per_task) {
    if (!t.label) {
      all_labeled = false;
      break;
    }
    scored.push_back({Oriented(options.method, t.score), t.verdict, *t.label});
  }
  if (all_labeled) {
    report.aggregate = ComputeDetectionMetrics(scored);
    if (report.aggregate.threshold && !HigherIsSuspicious(
            ParseBaselineMethod(options.method)
                .value_or(BaselineMethod::kNgramToken))) {
      // Back to the method's own score scale.
      report.aggregate.threshold = -*report.aggregate.threshold;
    }
  } else {
    report.aggregate.n = report.per_task.size();
    report.aggregate.threshold_policy = "unlabeled";
  }
  return report;
}

MitigationReport RunMitigate(const std::vector<DatasetRecord>& records,
                             const TedConfig& ted, const Tokenizer& tokenizer,
                             std::size_t workers) {
  std::vector<std::variant<TaskMitigation, std::string>> slots(records.size());
  internal::ParallelFor(records.size(), workers, [&](std::size_t i) {
    try {
      std::vector<std::string> ignored;
      SampleSet scratch;
      const SampleSet& set = Retag(records[i], tokenizer, scratch, ignored);
      TaskMitigation t;
      t.task_id = set.task_id;
      for (FilterVariant v : kAllVariants) {
        t.variants.push_back(CorrectedPassAt1(set, v, ted, tokenizer));
      }
      slots[i] = std::move(t);
    } catch (const Error& e) {
      slots[i] = std::string(e.what());
    }
  });

  MitigationReport report;
  report.ted = ted;
  report.tokenizer_id = tokenizer.id;
  report.config_echo = {{"tau", ted.tau}, {"tokenizer", tokenizer.id},
                        {"workers", workers}};
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (auto* t = std::get_if<TaskMitigation>(&slots[i])) {
      report.per_task.push_back(std::move(*t));
    } else {
      report.errors.push_back(
          {i, records[i].set.task_id, std::get<std::string>(slots[i])});
    }
  }
  std::sort(report.per_task.begin(), report.per_task.end(),
            [](const TaskMitigation& a, const TaskMitigation& b) {
              return a.task_id < b.task_id;
            });

  for (std::size_t k = 0; k < std::size(kAllVariants); ++k) {
    VariantAggregate agg;
    agg.variant = kAllVariants[k];
    for (const auto& t : report.per_task) {
      const MitigationResult& r = t.variants[k];
      agg.mean_raw += r.metric_raw;
      agg.mean_corrected += r.metric_corrected;
      agg.n_empty_after_filter += r.empty_after_filter ? 1 : 0;
      ++agg.n_tasks;
    }
    if (agg.n_tasks) {
      agg.mean_raw /= static_cast<double>(agg.n_tasks);
      agg.mean_corrected /= static_cast<double>(agg.n_tasks);
    }
    report.aggregate.push_back(agg);
  }
  return report;
}

json BundleToJson(const ReportBundle& bundle) {
  json detectors = json::array();
  for (const auto& d : bundle.detectors) {
    json tasks = json::array();
    for (const auto& t : d.per_task) {
      json row = {{"task_id", t.task_id}, {"method", d.method},
                  {"score", t.score}};
      row["verdict"] = t.verdict ? json(std::string(VerdictName(*t.verdict)))
                                 : json(nullptr);
      row["label"] =
          t.label ? json(std::string(LabelName(*t.label))) : json(nullptr);
      if (!t.histogram.empty()) {
        json h = json::array();
        for (const auto& [dist, density] : t.histogram) {
          h.push_back(json::array({dist, density}));
        }
        row["histogram"] = std::move(h);
      }
      if (!t.warnings.empty()) row["warnings"] = t.warnings;
      tasks.push_back(std::move(row));
    }
    const auto& a = d.aggregate;
    detectors.push_back(
        {{"method", d.method},
         {"tokenizer_id", d.tokenizer_id},
         {"per_task", std::move(tasks)},
         {"errors", ErrorsToJson(d.errors)},
         {"aggregate",
          {{"accuracy", NumOrNull(a.accuracy)},
           {"f1", NumOrNull(a.f1)},
           {"auc", a.auc ? json(*a.auc) : json("undefined")},
           {"threshold_policy", a.threshold_policy},
           {"threshold", NumOrNull(a.threshold)},
           {"n_scored", a.n},
           {"n_failed", d.errors.size()}}},
         {"config", d.config_echo}});
  }

  json mitigations = json::array();
  for (const auto& m : bundle.mitigations) {
    json tasks = json::array();
    for (const auto& t : m.per_task) {
      json variants = json::array();
      for (std::size_t k = 0; k < t.variants.size(); ++k) {
        variants.push_back(MitigationToJson(t.variants[k], kAllVariants[k]));
      }
      tasks.push_back({{"task_id", t.task_id}, {"variants", variants}});
    }
    json agg = json::array();
    for (const auto& a : m.aggregate) {
      agg.push_back({{"variant", std::string(FilterVariantName(a.variant))},
                     {"mean_raw", a.mean_raw},
                     {"mean_corrected", a.mean_corrected},
                     {"n_tasks", a.n_tasks},
                     {"n_empty_after_filter", a.n_empty_after_filter}});
    }
    mitigations.push_back({{"tau", m.ted.tau},
                           {"tokenizer_id", m.tokenizer_id},
                           {"per_task", std::move(tasks)},
                           {"aggregate", std::move(agg)},
                           {"errors", ErrorsToJson(m.errors)},
                           {"config", m.config_echo}});
  }
  return {{"detectors", std::move(detectors)},
          {"mitigations", std::move(mitigations)}};
}

ReportBundle BundleFromJson(const json& j) {
  ReportBundle bundle;
  try {
    for (const auto& d : j.value("detectors", json::array())) {
      DetectorReport r;
      r.method = d.at("method").get<std::string>();
      r.tokenizer_id = d.at("tokenizer_id").get<std::string>();
      r.errors = ErrorsFromJson(d.at("errors"));
      r.config_echo = d.at("config");
      for (const auto& row : d.at("per_task")) {
        TaskDetection t;
        t.task_id = row.at("task_id").get<std::string>();
        t.score = row.at("score").get<double>();
        if (const auto& v = row.at("verdict"); !v.is_null()) {
          t.verdict = v.get<std::string>() == "Leaked" ? Verdict::kLeaked
                                                       : Verdict::kUnleaked;
        }
        if (const auto& l = row.at("label"); !l.is_null()) {
          t.label = l.get<std::string>() == "contaminated"
                        ? Label::kContaminated
                        : Label::kUncontaminated;
        }
        if (auto h = row.find("histogram"); h != row.end()) {
          for (const auto& pair : *h) {
            t.histogram.emplace_back(pair.at(0).get<std::size_t>(),
                                     pair.at(1).get<double>());
          }
        }
        if (auto w = row.find("warnings"); w != row.end()) {
          t.warnings = w->get<std::vector<std::string>>();
        }
        r.per_task.push_back(std::move(t));
      }
      const json& a = d.at("aggregate");
      r.aggregate.accuracy = ReadNum(a.at("accuracy"));
      r.aggregate.f1 = ReadNum(a.at("f1"));
      if (a.at("auc").is_number()) r.aggregate.auc = a.at("auc").get<double>();
      r.aggregate.threshold_policy = a.at("threshold_policy").get<std::string>();
      r.aggregate.threshold = ReadNum(a.at("threshold"));
      r.aggregate.n = a.at("n_scored").get<std::size_t>();
      bundle.detectors.push_back(std::move(r));
    }
    for (const auto& m : j.value("mitigations", json::array())) {
      MitigationReport r;
      r.ted.tau = m.at("tau").get<std::size_t>();
      r.tokenizer_id = m.at("tokenizer_id").get<std::string>();
      r.errors = ErrorsFromJson(m.at("errors"));
      r.config_echo = m.at("config");
      for (const auto& row : m.at("per_task")) {
        TaskMitigation t;
        t.task_id = row.at("task_id").get<std::string>();
        for (const auto& v : row.at("variants")) {
          MitigationResult res;
          res.task_id = t.task_id;
          res.retained_indices =
              v.at("retained_indices").get<std::vector<std::size_t>>();
          res.n_before = v.at("n_before").get<std::size_t>();
          res.n_after = v.at("n_after").get<std::size_t>();
          res.metric_raw = v.at("metric_raw").get<double>();
          res.metric_corrected = v.at("metric_corrected").get<double>();
          res.empty_after_filter = v.at("empty_after_filter").get<bool>();
          t.variants.push_back(std::move(res));
        }
        r.per_task.push_back(std::move(t));
      }
      for (const auto& a : m.at("aggregate")) {
        VariantAggregate agg;
        agg.variant = ParseVariant(a.at("variant").get<std::string>());
        agg.mean_raw = a.at("mean_raw").get<double>();
        agg.mean_corrected = a.at("mean_corrected").get<double>();
        agg.n_tasks = a.at("n_tasks").get<std::size_t>();
        agg.n_empty_after_filter = a.at("n_empty_after_filter").get<std::size_t>();
        r.aggregate.push_back(agg);
      }
      bundle.mitigations.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed report: ") + e.what());
  }
  return bundle;
}

ReportBundle LoadBundle(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open report " + path.string());
  try {
    return BundleFromJson(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ValidationError("report " + path.string() + ": " + e.what());
  }
}

void EmitReport(const ReportBundle& bundle, ReportFormat format,
                const std::filesystem::path& path) {
  if (format == ReportFormat::kJson) {
    WriteFile(path, BundleToJson(bundle).dump(2) + "\n");
    return;
  }

  std::ostringstream agg;
  agg << "kind,method,variant,n_tasks,n_failed,accuracy,f1,auc,"
         "threshold_policy,threshold,mean_raw,mean_corrected,"
         "n_empty_after_filter\n";
  std::ostringstream tasks;
  tasks << "kind,method,variant,task_id,score,verdict,label,metric_raw,"
           "metric_corrected,n_before,n_after,empty_after_filter\n";
  std::ostringstream hist;
  hist << "method,task_id,d,density\n";

  for (const auto& d : bundle.detectors) {
    const auto& a = d.aggregate;
    agg << "detect," << CsvField(d.method) << ",," << a.n << ","
        << d.errors.size() << "," << OptNum(a.accuracy) << ","
        << OptNum(a.f1) << "," << (a.auc ? Num(*a.auc) : "undefined") << ","
        << CsvField(a.threshold_policy) << "," << OptNum(a.threshold)
        << ",,,\n";
    for (const auto& t : d.per_task) {
      tasks << "detect," << CsvField(d.method) << ",," << CsvField(t.task_id)
            << "," << Num(t.score) << ","
            << (t.verdict ? std::string(VerdictName(*t.verdict)) : "") << ","
            << (t.label ? std::string(LabelName(*t.label)) : "")
            << ",,,,,\n";
      for (const auto& [dist, density] : t.histogram) {
        hist << CsvField(d.method) << "," << CsvField(t.task_id) << ","
             << dist << "," << Num(density) << "\n";
      }
    }
  }
  for (const auto& m : bundle.mitigations) {
    const std::string method = "ted(tau=" + std::to_string(m.ted.tau) + ")";
    for (const auto& a : m.aggregate) {
      agg << "mitigate," << CsvField(method) << ","
          << FilterVariantName(a.variant) << "," << a.n_tasks << ","
          << m.errors.size() << ",,,,,," << Num(a.mean_raw) << ","
          << Num(a.mean_corrected) << "," << a.n_empty_after_filter << "\n";
    }
    for (const auto& t : m.per_task) {
      for (std::size_t k = 0; k < t.variants.size(); ++k) {
        const auto& r = t.variants[k];
        tasks << "mitigate," << CsvField(method) << ","
              << FilterVariantName(kAllVariants[k]) << ","
              << CsvField(t.task_id) << ",,,," << Num(r.metric_raw) << ","
              << Num(r.metric_corrected) << "," << r.n_before << ","
              << r.n_after << "," << (r.empty_after_filter ? "true" : "false")
              << "\n";
      }
    }
  }
  WriteFile(path, agg.str());
  WriteFile(path.string() + ".tasks.csv", tasks.str());
  WriteFile(path.string() + ".hist.csv", hist.str());
}

}  // namespace cddted
