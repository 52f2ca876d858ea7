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

// Collects SampleSets from a chat/completions-style HTTP endpoint: one
// greedy decode at temperature 0 and n stochastic decodes, with retries,
// a bound on in-flight requests and a content-addressed response cache.

#ifndef CDDTED_SAMPLER_HPP_
#define CDDTED_SAMPLER_HPP_

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "cddted/dataset.hpp"
#include "cddted/detector.hpp"
#include "cddted/sample_set.hpp"

namespace cddted {

struct RetryPolicy {
  int max_attempts = 4;
  std::chrono::milliseconds base_backoff{500};
};

enum class ApiStyle {
  kChat,         // POST {base}/chat/completions with messages
  kCompletions,  // POST {base}/completions with prompt
};

struct EndpointConfig {
  std::string base_url;
  std::string model_name;
  // Name of the environment variable holding the bearer token. The token
  // itself is never stored, logged or cached.
  std::string api_key_env = "OPENAI_API_KEY";
  std::size_t max_in_flight = 4;
  std::chrono::milliseconds timeout{60000};
  RetryPolicy retry;
  ApiStyle api_style = ApiStyle::kChat;
  // Ask the endpoint for per-token log-probabilities.
  bool request_logprobs = false;
  // One request with "n" choices instead of n single requests.
  bool n_way = false;

  void Validate() const;
  nlohmann::json Echo() const;
};

struct SamplingPlan {
  std::size_t n_samples = 50;
  double temperature = 0.8;
  static constexpr double kGreedyTemperature = 0.0;
  std::size_t max_tokens = 512;
  std::vector<std::string> stop_sequences;
  std::optional<double> top_p;
  // Re-request the greedy decode and note any difference.
  bool verify_greedy = false;

  void Validate() const;
  nlohmann::json Echo() const;
};

struct HttpResponse {
  // 0 on transport failure.
  int status = 0;
  std::string body;
  std::string error;
};

using Headers = std::vector<std::pair<std::string, std::string>>;

class Transport {
 public:
  virtual ~Transport() = default;
  // `path` is appended to the endpoint base URL. Must be callable from
  // several threads at once.
  virtual HttpResponse Post(const std::string& path, const std::string& body,
                            const Headers& headers) = 0;
};

// cpp-httplib backed transport; one connection per request.
class HttpTransport : public Transport {
 public:
  HttpTransport(std::string base_url, std::chrono::milliseconds timeout);
  HttpResponse Post(const std::string& path, const std::string& body,
                    const Headers& headers) override;

 private:
  std::string origin_;  // scheme://host[:port]
  std::string prefix_;  // path prefix, e.g. "/v1"
  std::chrono::milliseconds timeout_;
};

// One file per request, named by the hex SHA-256 of the request identity,
// plus index.json mapping task ids to their request keys.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir);

  std::optional<nlohmann::json> Get(const std::string& key) const;
  void Put(const std::string& key, const nlohmann::json& entry);
  void RecordTask(const std::string& task_id,
                  const std::vector<std::string>& keys);
  nlohmann::json Index() const;
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  mutable std::mutex mu_;
};

std::string Sha256Hex(const std::string& data);

// Returns the value of an environment variable, nullopt when unset.
using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
using SleepFn = std::function<void(std::chrono::milliseconds)>;

class Sampler {
 public:
  Sampler(EndpointConfig endpoint, SamplingPlan plan,
          std::shared_ptr<Transport> transport,
          std::filesystem::path cache_dir, EnvLookup env = {},
          SleepFn sleep = {});

  // Throws SamplingError when any request fails after retries; a partial
  // set is never returned.
  SampleSet Gather(const std::string& task_id, const std::string& prompt);

  std::size_t network_calls() const { return network_calls_.load(); }
  std::size_t peak_in_flight() const { return peak_in_flight_.load(); }
  const EndpointConfig& endpoint() const { return endpoint_; }
  const SamplingPlan& plan() const { return plan_; }

  // Cache key of request `index` ("greedy", "greedy-verify", "nway" or a
  // sample number) for `prompt`.
  std::string RequestKey(const std::string& prompt,
                         const std::string& index) const;

 private:
  struct Completion {
    std::string text;
    std::optional<std::vector<double>> token_logprobs;
    bool truncated = false;
  };

  std::vector<Completion> Fetch(const std::string& prompt,
                                const std::string& index, double temperature,
                                std::size_t n_choices,
                                std::vector<std::string>& keys);
  HttpResponse PostWithRetry(const std::string& body);
  nlohmann::json BuildRequest(const std::string& prompt, double temperature,
                              std::size_t n_choices) const;
  std::vector<Completion> ParseResponse(const std::string& body) const;

  EndpointConfig endpoint_;
  SamplingPlan plan_;
  std::shared_ptr<Transport> transport_;
  ResponseCache cache_;
  EnvLookup env_;
  SleepFn sleep_;
  std::mutex slot_mu_;
  std::condition_variable slot_cv_;
  std::size_t in_flight_ = 0;
  std::atomic<std::size_t> network_calls_{0};
  std::atomic<std::size_t> peak_in_flight_{0};
};

struct CorpusResult {
  std::size_t records_written = 0;
  std::vector<ItemError> failures;
};

// Reads a prompts file (one {"task_id", "prompt", "reference_answer"?,
// "label"?} object per line), gathers each task in order and writes the
// successful ones as dataset records. Cached requests are not re-sent, so
// an interrupted run can simply be restarted.
CorpusResult GatherCorpus(const std::filesystem::path& prompts_file,
                          Sampler& sampler,
                          const std::filesystem::path& samples_file);

}  // namespace cddted

#endif  // CDDTED_SAMPLER_HPP_
