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

// Command-line front end: sample, simulate, detect, evaluate-detector,
// mitigate and report.

#include <cstdlib>
#include <deque>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cddted/dataset.hpp"
#include "cddted/detector.hpp"
#include "cddted/errors.hpp"
#include "cddted/harness.hpp"
#include "cddted/sampler.hpp"
#include "cddted/synthlab.hpp"

namespace {

using nlohmann::json;
using namespace cddted;

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitConfig = 2;

enum class Kind { kNumber, kInteger, kString, kBool, kList, kNumberList };

// Flags that were given on the command line override the config file, which
// overrides the preset. Each flag writes one JSON pointer in the resolved
// configuration.
class FlagSet {
 public:
  explicit FlagSet(CLI::App* app) : app_(app) {}

  CLI::Option* Add(const std::string& flag, const std::string& pointer,
                   Kind kind, const std::string& help) {
    Entry& e = entries_.emplace_back();
    e.pointer = json::json_pointer(pointer);
    e.kind = kind;
    switch (kind) {
      case Kind::kBool:
        e.option = app_->add_flag(flag, e.flag, help);
        break;
      case Kind::kList:
      case Kind::kNumberList:
        e.option = app_->add_option(flag, e.list, help);
        break;
      default:
        e.option = app_->add_option(flag, e.scalar, help);
    }
    if (kind == Kind::kNumber || kind == Kind::kNumberList) {
      e.option->check(CLI::Number);
    } else if (kind == Kind::kInteger) {
      e.option->check(CLI::NonNegativeNumber & CLI::TypeValidator<long long>());
    }
    return e.option;
  }

  bool Given(const std::string& pointer) const {
    for (const Entry& e : entries_) {
      if (e.pointer.to_string() == pointer) return e.option->count() > 0;
    }
    return false;
  }

  void ApplyTo(json& resolved) const {
    for (const Entry& e : entries_) {
      if (e.option->count() == 0) continue;
      json v;
      switch (e.kind) {
        case Kind::kNumber: v = std::stod(e.scalar); break;
        case Kind::kInteger: v = std::stoull(e.scalar); break;
        case Kind::kString: v = e.scalar; break;
        case Kind::kBool: v = e.flag; break;
        case Kind::kList: v = e.list; break;
        case Kind::kNumberList:
          v = json::array();
          for (const auto& s : e.list) v.push_back(std::stod(s));
          break;
      }
      resolved[e.pointer] = v;
    }
  }

 private:
  struct Entry {
    json::json_pointer pointer;
    Kind kind;
    CLI::Option* option = nullptr;
    std::string scalar;
    std::vector<std::string> list;
    bool flag = false;
  };
  CLI::App* app_;
  std::deque<Entry> entries_;
};

json ReadJsonFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open config file " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("config file " + path + ": " + e.what());
  }
}

std::string Normalize(std::string key) {
  for (char& c : key) {
    if (c == '-') c = '_';
  }
  return key;
}

// Overlays a flat config file onto `resolved`; unknown keys are errors.
void OverlayFlat(json& resolved, const json& file, const std::string& path) {
  if (!file.is_object()) {
    throw ValidationError("config file " + path + " must hold an object");
  }
  for (auto it = file.begin(); it != file.end(); ++it) {
    const std::string key = Normalize(it.key());
    if (key == "preset") continue;
    if (!resolved.contains(key)) {
      throw ValidationError("config file " + path + ": unknown key '" +
                            it.key() + "'");
    }
    resolved[key] = it.value();
  }
}

template <typename T>
T Get(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config '") + key + "': " + e.what());
  }
}

std::optional<double> GetOptionalNumber(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return Get<double>(j, key);
}

void PrintResolved(const std::string& command, const json& resolved) {
  std::cerr << json{{"command", command}, {"config", resolved}}.dump(2)
            << "\n";
}

void WriteBundle(const ReportBundle& bundle, const std::string& format,
                 const std::string& output) {
  if (output.empty()) {
    if (format == "csv") {
      throw ValidationError("--format csv needs --output");
    }
    std::cout << BundleToJson(bundle).dump(2) << "\n";
    return;
  }
  EmitReport(bundle,
             format == "csv" ? ReportFormat::kCsv : ReportFormat::kJson,
             output);
}

void ReportErrors(const std::vector<ItemError>& errors) {
  for (const ItemError& e : errors) {
    std::cerr << "task " << e.task_id << " (record " << e.index
              << "): " << e.message << "\n";
  }
}

// ---------------------------------------------------------------- detect

struct DetectCommand {
  CLI::App* app = nullptr;
  std::unique_ptr<FlagSet> flags;
  std::string config_path;
  std::string input;
  std::string output;
  bool require_labels = false;

  void Register(CLI::App& root, const std::string& name,
                const std::string& help, bool labels) {
    require_labels = labels;
    app = root.add_subcommand(name, help);
    flags = std::make_unique<FlagSet>(app);
    app->add_option("-i,--input", input, "dataset file (JSONL)")->required();
    app->add_option("-o,--output", output, "report path (stdout if omitted)");
    app->add_option("--config", config_path, "JSON config file");
    flags->Add("--method", "/methods", Kind::kList,
               "cdd or a baseline: ngram_char, ngram_token, perplexity, "
               "min_k_prob, embedding_sim (repeatable)");
    flags->Add("--preset", "/preset", Kind::kString, "parameter preset")
        ->check(CLI::IsMember({"default", "strict-realworld"}));
    flags->Add("--alpha", "/alpha", Kind::kNumber, "peak window fraction");
    flags->Add("--xi", "/xi", Kind::kNumber, "peak threshold");
    flags->Add("--l-cap", "/l_cap", Kind::kInteger, "length scale cap");
    flags->Add("--n-samples", "/n_samples", Kind::kInteger,
               "expected samples per task");
    flags->Add("--tokenizer", "/tokenizer", Kind::kString, "tokenizer")
        ->check(CLI::IsMember({"whitespace-punct", "byte-level", "pretokenized"}));
    flags->Add("--threshold", "/threshold", Kind::kNumber,
               "fixed baseline threshold");
    flags->Add("--k-percent", "/k_percent", Kind::kNumber, "min-k% percent");
    flags->Add("--ngram-n", "/ngram_n", Kind::kInteger, "n-gram order");
    flags->Add("--workers", "/workers", Kind::kInteger, "worker threads");
    flags->Add("--format", "/format", Kind::kString, "report format")
        ->check(CLI::IsMember({"json", "csv"}));
  }

  json Resolve() const {
    json file = config_path.empty() ? json::object() : ReadJsonFile(config_path);
    std::string preset = "default";
    if (file.is_object() && file.contains("preset")) {
      preset = Get<std::string>(file, "preset");
    }
    json flagged = json::object();
    flags->ApplyTo(flagged);
    if (flagged.contains("preset")) preset = flagged["preset"];
    const CddConfig cdd = CddConfig::FromPreset(preset);
    json r = {{"preset", preset},
              {"methods", {"cdd"}},
              {"alpha", cdd.alpha},
              {"xi", cdd.xi},
              {"l_cap", cdd.l_cap},
              {"n_samples", cdd.n_samples_expected},
              {"tokenizer", "whitespace-punct"},
              {"threshold", nullptr},
              {"k_percent", 20.0},
              {"ngram_n", kDefaultNgram},
              {"workers", 1},
              {"format", "json"}};
    OverlayFlat(r, file, config_path);
    flags->ApplyTo(r);
    if (r["methods"].is_string()) r["methods"] = json::array({r["methods"]});
    return r;
  }

  int Run() const {
    const json r = Resolve();
    PrintResolved(app->get_name(), r);
    DetectOptions base;
    base.cdd.alpha = Get<double>(r, "alpha");
    base.cdd.xi = Get<double>(r, "xi");
    base.cdd.l_cap = Get<std::size_t>(r, "l_cap");
    base.cdd.n_samples_expected = Get<std::size_t>(r, "n_samples");
    base.cdd.Validate();
    base.tokenizer = Tokenizer::FromName(Get<std::string>(r, "tokenizer"));
    base.threshold = GetOptionalNumber(r, "threshold");
    base.k_percent = Get<double>(r, "k_percent");
    base.ngram_n = Get<std::size_t>(r, "ngram_n");
    base.workers = std::max<std::size_t>(1, Get<std::size_t>(r, "workers"));
    const auto methods = Get<std::vector<std::string>>(r, "methods");
    for (const auto& m : methods) {
      if (m != "cdd" && !ParseBaselineMethod(m)) {
        throw ValidationError("unknown method '" + m + "'");
      }
    }

    const auto records = LoadDataset(input);
    if (require_labels) {
      for (const auto& rec : records) {
        if (!rec.label) {
          throw ValidationError("task " + rec.set.task_id +
                                " has no label; evaluate-detector needs "
                                "labeled records");
        }
      }
    }
    ReportBundle bundle;
    bool partial = false;
    for (const auto& m : methods) {
      DetectOptions opt = base;
      opt.method = m;
      bundle.detectors.push_back(RunDetect(records, opt));
      const auto& rep = bundle.detectors.back();
      ReportErrors(rep.errors);
      partial = partial || !rep.errors.empty();
      if (require_labels) {
        std::cerr << m << ": accuracy="
                  << (rep.aggregate.accuracy
                          ? std::to_string(*rep.aggregate.accuracy)
                          : "undefined")
                  << " f1="
                  << (rep.aggregate.f1 ? std::to_string(*rep.aggregate.f1)
                                       : "undefined")
                  << " auc="
                  << (rep.aggregate.auc ? std::to_string(*rep.aggregate.auc)
                                        : "undefined")
                  << " (" << rep.aggregate.threshold_policy << ")\n";
      }
    }
    WriteBundle(bundle, Get<std::string>(r, "format"), output);
    return partial ? kExitPartial : kExitOk;
  }
};

// -------------------------------------------------------------- mitigate

struct MitigateCommand {
  CLI::App* app = nullptr;
  std::unique_ptr<FlagSet> flags;
  std::string config_path, input, output;

  void Register(CLI::App& root) {
    app = root.add_subcommand(
        "mitigate", "corrected Pass@1 under raw, rd, ep and ted filters");
    flags = std::make_unique<FlagSet>(app);
    app->add_option("-i,--input", input, "dataset file (JSONL)")->required();
    app->add_option("-o,--output", output, "report path (stdout if omitted)");
    app->add_option("--config", config_path, "JSON config file");
    flags->Add("--tau", "/tau", Kind::kInteger, "edit-distance exclusion bound");
    flags->Add("--tokenizer", "/tokenizer", Kind::kString, "tokenizer")
        ->check(CLI::IsMember({"whitespace-punct", "byte-level", "pretokenized"}));
    flags->Add("--workers", "/workers", Kind::kInteger, "worker threads");
    flags->Add("--format", "/format", Kind::kString, "report format")
        ->check(CLI::IsMember({"json", "csv"}));
  }

  int Run() const {
    json r = {{"tau", TedConfig{}.tau},
              {"tokenizer", "whitespace-punct"},
              {"workers", 1},
              {"format", "json"}};
    if (!config_path.empty()) {
      OverlayFlat(r, ReadJsonFile(config_path), config_path);
    }
    flags->ApplyTo(r);
    PrintResolved("mitigate", r);
    TedConfig ted;
    ted.tau = Get<std::size_t>(r, "tau");
    const Tokenizer tok = Tokenizer::FromName(Get<std::string>(r, "tokenizer"));
    const auto records = LoadDataset(input);
    ReportBundle bundle;
    bundle.mitigations.push_back(RunMitigate(
        records, ted, tok, std::max<std::size_t>(1, Get<std::size_t>(r, "workers"))));
    const auto& rep = bundle.mitigations.back();
    ReportErrors(rep.errors);
    for (const auto& a : rep.aggregate) {
      std::cerr << FilterVariantName(a.variant) << ": raw=" << a.mean_raw
                << " corrected=" << a.mean_corrected << " tasks=" << a.n_tasks
                << " empty=" << a.n_empty_after_filter << "\n";
    }
    WriteBundle(bundle, Get<std::string>(r, "format"), output);
    return rep.errors.empty() ? kExitOk : kExitPartial;
  }
};

// -------------------------------------------------------------- simulate

struct SimulateCommand {
  CLI::App* app = nullptr;
  std::unique_ptr<FlagSet> flags;
  std::string config_path, output;

  void Register(CLI::App& root) {
    app = root.add_subcommand("simulate",
                              "generate a labeled synthetic dataset");
    flags = std::make_unique<FlagSet>(app);
    app->add_option("-o,--output", output, "dataset path (JSONL)")->required();
    app->add_option("--config", config_path,
                    "scenario or sweep JSON ({base, axis, values, "
                    "seeds_per_point})");
    flags->Add("--seed", "/base/seed", Kind::kInteger, "base seed");
    flags->Add("--n-samples", "/base/n_samples", Kind::kInteger,
               "samples per task");
    flags->Add("--m,--memorization", "/base/memorization_strength",
               Kind::kNumber, "memorization strength");
    flags->Add("--lambda,--edit-noise", "/base/edit_noise_rate", Kind::kNumber,
               "mean substitutions per memorized copy");
    flags->Add("--variant-stride", "/base/variant_stride", Kind::kInteger,
               "reference/canonical variant stride (0 = identical)");
    flags->Add("--answer-length", "/base/canonical_answer_length",
               Kind::kInteger, "canonical answer length");
    flags->Add("--background-vocab", "/base/background_vocab", Kind::kInteger,
               "background vocabulary size");
    flags->Add("--background-length", "/base/background_length",
               Kind::kInteger, "background text length");
    flags->Add("--memorized-pass-prob",
               "/base/pass_model/memorized_pass_prob", Kind::kNumber,
               "pass probability of memorized samples");
    flags->Add("--background-pass-prob",
               "/base/pass_model/background_pass_prob", Kind::kNumber,
               "pass probability of background samples");
    flags->Add("--task-id", "/base/task_id", Kind::kString, "task id prefix");
    flags->Add("--axis", "/axis", Kind::kString, "sweep axis");
    flags->Add("--values", "/values", Kind::kNumberList, "sweep values");
    flags->Add("--seeds-per-point", "/seeds_per_point", Kind::kInteger,
               "seeds per sweep value");
  }

  int Run() const {
    json r = SweepToJson(ScenarioSweep{});
    if (!config_path.empty()) {
      json file = ReadJsonFile(config_path);
      if (!file.is_object()) {
        throw ValidationError("config file must hold an object");
      }
      if (!file.contains("base") && !file.contains("values")) {
        file = json{{"base", file}};
      }
      r.merge_patch(file);
    }
    flags->ApplyTo(r);
    if (r["values"].empty()) {
      r["values"] = json::array({r["base"]["memorization_strength"]});
      if (!flags->Given("/axis")) r["axis"] = "memorization_strength";
    }
    PrintResolved("simulate", r);
    const ScenarioSweep sweep = SweepFromJson(r);
    const auto records = GenerateLabeledCorpus(sweep);
    SaveDataset(output, records);
    std::cerr << "wrote " << records.size() << " records to " << output
              << "\n";
    return kExitOk;
  }
};

// ---------------------------------------------------------------- sample

struct SampleCommand {
  CLI::App* app = nullptr;
  std::unique_ptr<FlagSet> flags;
  std::string config_path, input, output;

  void Register(CLI::App& root) {
    app = root.add_subcommand(
        "sample", "collect greedy and sampled completions from an endpoint");
    flags = std::make_unique<FlagSet>(app);
    app->add_option("-i,--input", input,
                    "prompts file (JSONL: task_id, prompt, "
                    "reference_answer?, label?)")
        ->required();
    app->add_option("-o,--output", output, "dataset path (JSONL)")->required();
    app->add_option("--config", config_path, "JSON config file");
    flags->Add("--base-url", "/base_url", Kind::kString, "endpoint base URL");
    flags->Add("--model", "/model", Kind::kString, "model name");
    flags->Add("--api-key-env", "/api_key_env", Kind::kString,
               "environment variable holding the API key");
    flags->Add("--api-style", "/api_style", Kind::kString, "request shape")
        ->check(CLI::IsMember({"chat", "completions"}));
    flags->Add("--max-in-flight", "/max_in_flight", Kind::kInteger,
               "concurrent requests");
    flags->Add("--timeout-ms", "/timeout_ms", Kind::kInteger,
               "request timeout");
    flags->Add("--max-attempts", "/max_attempts", Kind::kInteger,
               "attempts per request");
    flags->Add("--backoff-ms", "/backoff_ms", Kind::kInteger,
               "base retry backoff");
    flags->Add("--cache-dir", "/cache_dir", Kind::kString, "response cache");
    flags->Add("--n-samples", "/n_samples", Kind::kInteger,
               "sampled completions per task");
    flags->Add("--temperature", "/temperature", Kind::kNumber,
               "sampling temperature");
    flags->Add("--max-tokens", "/max_tokens", Kind::kInteger,
               "completion token limit");
    flags->Add("--top-p", "/top_p", Kind::kNumber, "nucleus sampling");
    flags->Add("--stop", "/stop", Kind::kList, "stop sequence (repeatable)");
    flags->Add("--logprobs", "/logprobs", Kind::kBool,
               "request token log-probabilities");
    flags->Add("--n-way", "/n_way", Kind::kBool,
               "one request with n choices");
    flags->Add("--verify-greedy", "/verify_greedy", Kind::kBool,
               "request the greedy decode twice");
  }

  int Run() const {
    const EndpointConfig de;
    const SamplingPlan dp;
    json r = {{"base_url", ""},
              {"model", ""},
              {"api_key_env", de.api_key_env},
              {"api_style", "chat"},
              {"max_in_flight", de.max_in_flight},
              {"timeout_ms", de.timeout.count()},
              {"max_attempts", de.retry.max_attempts},
              {"backoff_ms", de.retry.base_backoff.count()},
              {"cache_dir", ".cddted-cache"},
              {"n_samples", dp.n_samples},
              {"temperature", dp.temperature},
              {"max_tokens", dp.max_tokens},
              {"top_p", nullptr},
              {"stop", json::array()},
              {"logprobs", false},
              {"n_way", false},
              {"verify_greedy", false}};
    if (!config_path.empty()) {
      OverlayFlat(r, ReadJsonFile(config_path), config_path);
    }
    flags->ApplyTo(r);
    PrintResolved("sample", r);

    EndpointConfig endpoint;
    endpoint.base_url = Get<std::string>(r, "base_url");
    endpoint.model_name = Get<std::string>(r, "model");
    endpoint.api_key_env = Get<std::string>(r, "api_key_env");
    endpoint.api_style = Get<std::string>(r, "api_style") == "completions"
                             ? ApiStyle::kCompletions
                             : ApiStyle::kChat;
    endpoint.max_in_flight = Get<std::size_t>(r, "max_in_flight");
    endpoint.timeout = std::chrono::milliseconds(Get<long long>(r, "timeout_ms"));
    endpoint.retry.max_attempts = Get<int>(r, "max_attempts");
    endpoint.retry.base_backoff =
        std::chrono::milliseconds(Get<long long>(r, "backoff_ms"));
    endpoint.request_logprobs = Get<bool>(r, "logprobs");
    endpoint.n_way = Get<bool>(r, "n_way");
    endpoint.Validate();
    SamplingPlan plan;
    plan.n_samples = Get<std::size_t>(r, "n_samples");
    plan.temperature = Get<double>(r, "temperature");
    plan.max_tokens = Get<std::size_t>(r, "max_tokens");
    plan.top_p = GetOptionalNumber(r, "top_p");
    plan.stop_sequences = Get<std::vector<std::string>>(r, "stop");
    plan.verify_greedy = Get<bool>(r, "verify_greedy");
    plan.Validate();

    auto transport =
        std::make_shared<HttpTransport>(endpoint.base_url, endpoint.timeout);
    Sampler sampler(endpoint, plan, transport,
                    Get<std::string>(r, "cache_dir"));
    const CorpusResult result = GatherCorpus(input, sampler, output);
    ReportErrors(result.failures);
    std::cerr << "wrote " << result.records_written << " records, "
              << result.failures.size() << " failed, "
              << sampler.network_calls() << " network calls\n";
    return result.failures.empty() ? kExitOk : kExitPartial;
  }
};

// ---------------------------------------------------------------- report

struct ReportCommand {
  CLI::App* app = nullptr;
  std::vector<std::string> inputs;
  std::string output;
  std::string format = "json";

  void Register(CLI::App& root) {
    app = root.add_subcommand(
        "report", "merge JSON reports and re-emit them as JSON or CSV");
    app->add_option("-i,--input", inputs, "JSON report files")->required();
    app->add_option("-o,--output", output, "output path (stdout if omitted)");
    app->add_option("--format", format, "output format")
        ->check(CLI::IsMember({"json", "csv"}));
  }

  int Run() const {
    PrintResolved("report", json{{"inputs", inputs}, {"format", format}});
    ReportBundle merged;
    for (const auto& path : inputs) {
      ReportBundle b = LoadBundle(path);
      for (auto& d : b.detectors) merged.detectors.push_back(std::move(d));
      for (auto& m : b.mitigations) merged.mitigations.push_back(std::move(m));
    }
    WriteBundle(merged, format, output);
    return kExitOk;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contamination detection and mitigation for code benchmarks",
               "cddted"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "cddted 0.1.0");

  SampleCommand sample;
  SimulateCommand simulate;
  DetectCommand detect;
  DetectCommand evaluate;
  MitigateCommand mitigate;
  ReportCommand report;
  sample.Register(app);
  simulate.Register(app);
  detect.Register(app, "detect", "score tasks for contamination", false);
  evaluate.Register(app, "evaluate-detector",
                    "score labeled tasks and report accuracy, F1 and AUC",
                    true);
  mitigate.Register(app);
  report.Register(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*sample.app) return sample.Run();
    if (*simulate.app) return simulate.Run();
    if (*detect.app) return detect.Run();
    if (*evaluate.app) return evaluate.Run();
    if (*mitigate.app) return mitigate.Run();
    if (*report.app) return report.Run();
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPartial;
  }
  return kExitConfig;
}
