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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pybind11/pybind11.h"
#include "pybind11/stl.h"
#include "json.hpp"

#include "cddted/baselines.hpp"
#include "cddted/dataset.hpp"
#include "cddted/detector.hpp"
#include "cddted/distribution.hpp"
#include "cddted/errors.hpp"
#include "cddted/harness.hpp"
#include "cddted/metrics.hpp"
#include "cddted/mitigator.hpp"
#include "cddted/synthlab.hpp"
#include "cddted/textdist.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace cddted {
namespace {

std::vector<DatasetRecord> RecordsFromJson(const std::string& text) {
  const json j = json::parse(text);
  std::vector<DatasetRecord> out;
  std::size_t i = 0;
  for (const json& r : j) out.push_back(RecordFromJson(r, ++i));
  return out;
}

std::string RecordsToJson(const std::vector<DatasetRecord>& records) {
  json out = json::array();
  for (const auto& r : records) out.push_back(RecordToJson(r));
  return out.dump();
}

CddConfig MakeCdd(const std::string& preset, std::optional<double> alpha,
                  std::optional<double> xi, std::optional<std::size_t> l_cap,
                  std::optional<std::size_t> n_expected) {
  CddConfig c = CddConfig::FromPreset(preset);
  if (alpha) c.alpha = *alpha;
  if (xi) c.xi = *xi;
  if (l_cap) c.l_cap = *l_cap;
  if (n_expected) c.n_samples_expected = *n_expected;
  c.Validate();
  return c;
}

FilterVariant ParseVariant(const std::string& name) {
  for (FilterVariant v : kAllVariants) {
    if (FilterVariantName(v) == name) return v;
  }
  throw ValidationError("unknown filter variant '" + name + "'");
}

std::string Detect(const std::string& record_json, const std::string& preset,
                   std::optional<double> alpha, std::optional<double> xi,
                   std::optional<std::size_t> l_cap,
                   std::optional<std::size_t> n_expected,
                   const std::string& tokenizer) {
  const DatasetRecord r = RecordFromJson(json::parse(record_json));
  const DetectionOutcome o =
      CddDetect(r.set, MakeCdd(preset, alpha, xi, l_cap, n_expected),
                Tokenizer::FromName(tokenizer));
  json hist = json::array();
  for (const auto& [d, p] : o.distribution.Histogram()) hist.push_back({d, p});
  return json{{"task_id", o.task_id},
              {"peak", o.peak},
              {"verdict", VerdictName(o.verdict)},
              {"n_actual", o.n_actual},
              {"length_scale", o.length_scale},
              {"tokenizer_id", o.tokenizer_id},
              {"histogram", hist},
              {"warnings", o.warnings}}
      .dump();
}

std::string Mitigate(const std::string& record_json, std::size_t tau,
                     const std::string& variant, const std::string& tokenizer) {
  const DatasetRecord r = RecordFromJson(json::parse(record_json));
  const MitigationResult m = CorrectedPassAt1(
      r.set, ParseVariant(variant), TedConfig{tau}, Tokenizer::FromName(tokenizer));
  return json{{"task_id", m.task_id},
              {"retained_indices", m.retained_indices},
              {"n_before", m.n_before},
              {"n_after", m.n_after},
              {"metric_raw", m.metric_raw},
              {"metric_corrected", m.metric_corrected},
              {"empty_after_filter", m.empty_after_filter}}
      .dump();
}

std::vector<std::size_t> Retained(const std::string& record_json,
                                  std::size_t tau, const std::string& variant,
                                  const std::string& tokenizer) {
  const DatasetRecord r = RecordFromJson(json::parse(record_json));
  return ApplyVariant(r.set, ParseVariant(variant), TedConfig{tau},
                      Tokenizer::FromName(tokenizer))
      .retained_indices;
}

std::string RunDetectJson(const std::string& records_json,
                          const std::string& method, const std::string& preset,
                          std::optional<double> alpha, std::optional<double> xi,
                          std::optional<std::size_t> l_cap,
                          std::optional<std::size_t> n_expected,
                          const std::string& tokenizer,
                          std::optional<double> threshold, double k_percent,
                          std::size_t ngram_n, std::size_t workers) {
  DetectOptions opt;
  opt.method = method;
  opt.cdd = MakeCdd(preset, alpha, xi, l_cap, n_expected);
  opt.tokenizer = Tokenizer::FromName(tokenizer);
  opt.threshold = threshold;
  opt.k_percent = k_percent;
  opt.ngram_n = ngram_n;
  opt.workers = workers;
  if (method != "cdd" && !ParseBaselineMethod(method)) {
    throw ValidationError("unknown method '" + method + "'");
  }
  ReportBundle b;
  b.detectors.push_back(RunDetect(RecordsFromJson(records_json), opt));
  return BundleToJson(b).at("detectors").at(0).dump();
}

std::string RunMitigateJson(const std::string& records_json, std::size_t tau,
                            const std::string& tokenizer, std::size_t workers) {
  ReportBundle b;
  b.mitigations.push_back(RunMitigate(RecordsFromJson(records_json),
                                      TedConfig{tau},
                                      Tokenizer::FromName(tokenizer), workers));
  return BundleToJson(b).at("mitigations").at(0).dump();
}

std::string Simulate(const std::string& spec_json) {
  DatasetRecord r;
  const ScenarioSpec spec = ScenarioFromJson(json::parse(spec_json));
  r.set = Generate(spec);
  r.label = spec.memorization_strength > 0 ? Label::kContaminated
                                           : Label::kUncontaminated;
  return RecordToJson(r).dump();
}

std::string Corpus(const std::string& sweep_json) {
  return RecordsToJson(GenerateLabeledCorpus(SweepFromJson(json::parse(sweep_json))));
}

std::optional<double> AucOf(const std::vector<double>& scores,
                            const std::vector<bool>& contaminated) {
  std::vector<Label> labels;
  for (bool c : contaminated) {
    labels.push_back(c ? Label::kContaminated : Label::kUncontaminated);
  }
  return Auc(scores, labels);
}

}  // namespace
}  // namespace cddted

PYBIND11_MODULE(_core, m) {
  using namespace cddted;
  m.doc() = "Native core of the cddted package.";

  auto& error = py::register_exception<Error>(m, "Error");
  auto& validation =
      py::register_exception<ValidationError>(m, "ValidationError", error.ptr());
  py::register_exception<DomainError>(m, "DomainError", error.ptr());
  py::register_exception<MissingFieldError>(m, "MissingFieldError", error.ptr());
  py::register_exception<InsufficientSamplesError>(
      m, "InsufficientSamplesError", error.ptr());
  py::register_exception<TokenizerMismatchError>(m, "TokenizerMismatchError",
                                                 error.ptr());
  static PyObject* validation_type = validation.ptr();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const nlohmann::json::exception& e) {
      PyErr_SetString(validation_type, e.what());
    }
  });

  m.def(
      "tokenize",
      [](const std::string& text, const std::string& tokenizer) {
        return Tokenize(text, Tokenizer::FromName(tokenizer)).tokens;
      },
      py::arg("text"), py::arg("tokenizer") = "whitespace-punct");
  m.def(
      "edit_distance",
      [](const std::vector<TokenId>& a, const std::vector<TokenId>& b) {
        return EditDistance(a, b);
      },
      py::arg("a"), py::arg("b"));
  m.def(
      "edit_distance_bounded",
      [](const std::vector<TokenId>& a, const std::vector<TokenId>& b,
         std::size_t bound) { return EditDistanceBounded(a, b, bound); },
      py::arg("a"), py::arg("b"), py::arg("bound"));
  m.def("pass_at_k", &PassAtK, py::arg("n"), py::arg("c"), py::arg("k"));
  m.def(
      "pass_at_k_exact",
      [](std::int64_t n, std::int64_t c, std::int64_t k) {
        const Fraction f = PassAtKExact(n, c, k);
        return std::make_pair(f.num, f.den);
      },
      py::arg("n"), py::arg("c"), py::arg("k"));
  m.def(
      "ngram_overlap",
      [](const std::string& cand, const std::string& ref, std::size_t n,
         const std::string& level, const std::string& tokenizer) {
        return NgramOverlap(cand, ref, n,
                            level == "char" ? NgramLevel::kChar
                                            : NgramLevel::kToken,
                            Tokenizer::FromName(tokenizer));
      },
      py::arg("candidate"), py::arg("reference"), py::arg("n") = kDefaultNgram,
      py::arg("level") = "token", py::arg("tokenizer") = "whitespace-punct");
  m.def(
      "perplexity",
      [](const std::vector<double>& lp) { return PerplexityScore(lp); },
      py::arg("token_logprobs"));
  m.def(
      "min_k_prob",
      [](const std::vector<double>& lp, double k) { return MinKProb(lp, k); },
      py::arg("token_logprobs"), py::arg("k_percent") = 20.0);
  m.def(
      "embedding_similarity",
      [](const std::vector<double>& a, const std::vector<double>& b) {
        return EmbeddingSimilarity(a, b);
      },
      py::arg("a"), py::arg("b"));
  m.def("auc", &AucOf, py::arg("scores"), py::arg("contaminated"));

  m.def("_detect", &Detect);
  m.def("_mitigate", &Mitigate);
  m.def("_retained", &Retained);
  m.def("_run_detect", &RunDetectJson);
  m.def("_run_mitigate", &RunMitigateJson);
  m.def("_simulate", &Simulate);
  m.def("_corpus", &Corpus);
  m.def("_default_scenario",
        [] { return ScenarioToJson(ScenarioSpec{}).dump(); });
  m.def("_load_dataset", [](const std::string& path) {
    return RecordsToJson(LoadDataset(path));
  });
  m.def("_save_dataset", [](const std::string& path, const std::string& j) {
    SaveDataset(path, RecordsFromJson(j));
  });
}
