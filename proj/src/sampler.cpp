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

#include "cddted/sampler.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <condition_variable>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include "cddted/errors.hpp"
#include "parallel.hpp"

namespace cddted {
namespace {

using nlohmann::json;

bool Retryable(int status) {
  return status == 0 || status == 408 || status == 409 || status == 429 ||
         (status >= 500 && status <= 599);
}

std::string ApiStyleName(ApiStyle s) {
  return s == ApiStyle::kChat ? "chat" : "completions";
}

void AtomicWrite(const std::filesystem::path& path, const std::string& body) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << body;
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

double Jitter() {
  thread_local std::mt19937 gen{std::random_device{}()};
  return std::uniform_real_distribution<double>(0.0, 1.0)(gen);
}

}  // namespace

void EndpointConfig::Validate() const {
  if (base_url.empty()) {
    throw ValidationError("endpoint base_url is empty", 0, "base_url");
  }
  if (model_name.empty()) {
    throw ValidationError("endpoint model name is empty", 0, "model");
  }
  if (max_in_flight == 0) {
    throw ValidationError("max_in_flight must be >= 1", 0, "max_in_flight");
  }
  if (retry.max_attempts < 1) {
    throw ValidationError("retry.max_attempts must be >= 1", 0, "retry");
  }
}

json EndpointConfig::Echo() const {
  return {{"base_url", base_url},
          {"model", model_name},
          {"api_key_env", api_key_env},
          {"max_in_flight", max_in_flight},
          {"timeout_ms", timeout.count()},
          {"retry",
           {{"max_attempts", retry.max_attempts},
            {"base_backoff_ms", retry.base_backoff.count()}}},
          {"api_style", ApiStyleName(api_style)},
          {"logprobs", request_logprobs},
          {"n_way", n_way}};
}

void SamplingPlan::Validate() const {
  if (n_samples == 0) {
    throw ValidationError("n_samples must be >= 1", 0, "n_samples");
  }
  if (!(temperature > 0.0)) {
    throw ValidationError("sampling temperature must be > 0", 0,
                          "temperature");
  }
  if (max_tokens == 0) {
    throw ValidationError("max_tokens must be >= 1", 0, "max_tokens");
  }
}

json SamplingPlan::Echo() const {
  json j = {{"n_samples", n_samples},
            {"temperature", temperature},
            {"greedy_temperature", kGreedyTemperature},
            {"max_tokens", max_tokens},
            {"stop", stop_sequences},
            {"verify_greedy", verify_greedy}};
  j["top_p"] = top_p ? json(*top_p) : json(nullptr);
  return j;
}

HttpTransport::HttpTransport(std::string base_url,
                             std::chrono::milliseconds timeout)
    : timeout_(timeout) {
  const auto scheme_end = base_url.find("://");
  const auto path_start = base_url.find(
      '/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  if (path_start == std::string::npos) {
    origin_ = base_url;
  } else {
    origin_ = base_url.substr(0, path_start);
    prefix_ = base_url.substr(path_start);
    while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
  }
}

HttpResponse HttpTransport::Post(const std::string& path,
                                 const std::string& body,
                                 const Headers& headers) {
  httplib::Client client(origin_);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
  const auto usecs =
      std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());
  httplib::Headers h;
  for (const auto& [k, v] : headers) h.emplace(k, v);
  auto res = client.Post(prefix_ + path, h, body, "application/json");
  if (!res) return {0, {}, httplib::to_string(res.error())};
  return {res->status, res->body, {}};
}

std::string Sha256Hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(),
                 nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

ResponseCache::ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

std::optional<json> ResponseCache::Get(const std::string& key) const {
  std::ifstream in(dir_ / (key + ".json"), std::ios::binary);
  if (!in) return std::nullopt;
  try {
    return json::parse(in);
  } catch (const json::parse_error&) {
    return std::nullopt;
  }
}

void ResponseCache::Put(const std::string& key, const json& entry) {
  AtomicWrite(dir_ / (key + ".json"), entry.dump(2) + "\n");
}

json ResponseCache::Index() const {
  std::lock_guard lock(mu_);
  std::ifstream in(dir_ / "index.json", std::ios::binary);
  if (!in) return json::object();
  try {
    return json::parse(in);
  } catch (const json::parse_error&) {
    return json::object();
  }
}

void ResponseCache::RecordTask(const std::string& task_id,
                               const std::vector<std::string>& keys) {
  json index = Index();
  std::lock_guard lock(mu_);
  index[task_id] = keys;
  AtomicWrite(dir_ / "index.json", index.dump(2) + "\n");
}

Sampler::Sampler(EndpointConfig endpoint, SamplingPlan plan,
                 std::shared_ptr<Transport> transport,
                 std::filesystem::path cache_dir, EnvLookup env, SleepFn sleep)
    : endpoint_(std::move(endpoint)),
      plan_(std::move(plan)),
      transport_(std::move(transport)),
      cache_(std::move(cache_dir)),
      env_(std::move(env)),
      sleep_(std::move(sleep)) {
  endpoint_.Validate();
  plan_.Validate();
  if (!env_) {
    env_ = [](const std::string& name) -> std::optional<std::string> {
      const char* v = std::getenv(name.c_str());
      if (!v) return std::nullopt;
      return std::string(v);
    };
  }
  if (!sleep_) {
    sleep_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }
}

json Sampler::BuildRequest(const std::string& prompt, double temperature,
                           std::size_t n_choices) const {
  json req = {{"model", endpoint_.model_name},
              {"temperature", temperature},
              {"max_tokens", plan_.max_tokens}};
  if (endpoint_.api_style == ApiStyle::kChat) {
    req["messages"] = json::array({{{"role", "user"}, {"content", prompt}}});
    if (endpoint_.request_logprobs) req["logprobs"] = true;
  } else {
    req["prompt"] = prompt;
    if (endpoint_.request_logprobs) req["logprobs"] = 1;
  }
  if (!plan_.stop_sequences.empty()) req["stop"] = plan_.stop_sequences;
  if (plan_.top_p) req["top_p"] = *plan_.top_p;
  if (n_choices != 1) req["n"] = n_choices;
  return req;
}

std::string Sampler::RequestKey(const std::string& prompt,
                                const std::string& index) const {
  const bool greedy = index == "greedy" || index == "greedy-verify";
  const json identity = {
      {"base_url", endpoint_.base_url},
      {"model", endpoint_.model_name},
      {"api_style", ApiStyleName(endpoint_.api_style)},
      {"logprobs", endpoint_.request_logprobs},
      {"temperature",
       greedy ? SamplingPlan::kGreedyTemperature : plan_.temperature},
      {"max_tokens", plan_.max_tokens},
      {"stop", plan_.stop_sequences},
      {"top_p", plan_.top_p ? json(*plan_.top_p) : json(nullptr)},
      {"n", index == "nway" ? plan_.n_samples : 1},
      {"prompt", prompt},
      {"request_index", index}};
  return Sha256Hex(identity.dump());
}

HttpResponse Sampler::PostWithRetry(const std::string& body) {
  Headers headers = {{"Content-Type", "application/json"}};
  if (!endpoint_.api_key_env.empty()) {
    auto key = env_(endpoint_.api_key_env);
    if (!key) {
      throw SamplingError("environment variable " + endpoint_.api_key_env +
                          " is not set");
    }
    headers.emplace_back("Authorization", "Bearer " + *key);
  }
  const std::string path = endpoint_.api_style == ApiStyle::kChat
                               ? "/chat/completions"
                               : "/completions";
  HttpResponse last;
  for (int attempt = 1; attempt <= endpoint_.retry.max_attempts; ++attempt) {
    {
      std::unique_lock lock(slot_mu_);
      slot_cv_.wait(lock, [&] { return in_flight_ < endpoint_.max_in_flight; });
      ++in_flight_;
      std::size_t peak = peak_in_flight_.load();
      while (in_flight_ > peak &&
             !peak_in_flight_.compare_exchange_weak(peak, in_flight_)) {
      }
      lock.unlock();
      ++network_calls_;
      try {
        last = transport_->Post(path, body, headers);
      } catch (const std::exception& e) {
        last = {0, {}, e.what()};
      }
      lock.lock();
      --in_flight_;
      slot_cv_.notify_all();
    }
    if (last.status >= 200 && last.status < 300) return last;
    if (!Retryable(last.status) || attempt == endpoint_.retry.max_attempts) {
      break;
    }
    const double scale = static_cast<double>(1 << std::min(attempt - 1, 16));
    sleep_(std::chrono::milliseconds(static_cast<long long>(
        static_cast<double>(endpoint_.retry.base_backoff.count()) * scale *
        (1.0 + Jitter()))));
  }
  std::string why = last.status == 0 ? "transport error: " + last.error
                                     : "HTTP " + std::to_string(last.status);
  throw SamplingError("request to " + endpoint_.base_url + " failed (" + why +
                      ")");
}

std::vector<Sampler::Completion> Sampler::ParseResponse(
    const std::string& body) const {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::parse_error& e) {
    throw SamplingError(std::string("unparseable endpoint response: ") +
                        e.what());
  }
  auto choices = doc.find("choices");
  if (choices == doc.end() || !choices->is_array() || choices->empty()) {
    throw SamplingError("endpoint response has no choices");
  }
  std::vector<json> ordered(choices->begin(), choices->end());
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const json& a, const json& b) {
                     return a.value("index", 0) < b.value("index", 0);
                   });
  std::vector<Completion> out;
  for (const json& c : ordered) {
    Completion comp;
    if (endpoint_.api_style == ApiStyle::kChat) {
      const json& content = c.at("message").at("content");
      comp.text = content.is_string() ? content.get<std::string>() : "";
    } else {
      comp.text = c.value("text", "");
    }
    comp.truncated = c.value("finish_reason", "") == "length";
    if (auto lp = c.find("logprobs"); lp != c.end() && lp->is_object()) {
      std::vector<double> values;
      if (auto content = lp->find("content");
          content != lp->end() && content->is_array()) {
        for (const auto& t : *content) values.push_back(t.at("logprob"));
      } else if (auto tl = lp->find("token_logprobs");
                 tl != lp->end() && tl->is_array()) {
        for (const auto& v : *tl) {
          if (v.is_number()) values.push_back(v.get<double>());
        }
      }
      for (double& v : values) v = std::min(v, 0.0);
      if (!values.empty()) comp.token_logprobs = std::move(values);
    }
    out.push_back(std::move(comp));
  }
  return out;
}

std::vector<Sampler::Completion> Sampler::Fetch(
    const std::string& prompt, const std::string& index, double temperature,
    std::size_t n_choices, std::vector<std::string>& keys) {
  const std::string key = RequestKey(prompt, index);
  keys.push_back(key);
  std::optional<json> cached = cache_.Get(key);
  if (!cached) {
    const json request = BuildRequest(prompt, temperature, n_choices);
    const HttpResponse resp = PostWithRetry(request.dump());
    std::vector<Completion> parsed = ParseResponse(resp.body);
    json completions = json::array();
    for (const auto& c : parsed) {
      json o = {{"text", c.text}, {"truncated", c.truncated}};
      if (c.token_logprobs) o["token_logprobs"] = *c.token_logprobs;
      completions.push_back(std::move(o));
    }
    cached = json{{"request", request}, {"completions", completions}};
    cache_.Put(key, *cached);
  }
  std::vector<Completion> out;
  for (const auto& o : cached->at("completions")) {
    Completion c;
    c.text = o.at("text").get<std::string>();
    c.truncated = o.value("truncated", false);
    if (auto lp = o.find("token_logprobs"); lp != o.end()) {
      c.token_logprobs = lp->get<std::vector<double>>();
    }
    out.push_back(std::move(c));
  }
  if (out.size() < n_choices) {
    throw SamplingError("endpoint returned " + std::to_string(out.size()) +
                        " choices, expected " + std::to_string(n_choices));
  }
  out.resize(n_choices);
  return out;
}

SampleSet Sampler::Gather(const std::string& task_id,
                          const std::string& prompt) {
  struct Job {
    std::string index;
    double temperature;
    std::size_t n_choices;
  };
  std::vector<Job> jobs;
  jobs.push_back({"greedy", SamplingPlan::kGreedyTemperature, 1});
  if (plan_.verify_greedy) {
    jobs.push_back({"greedy-verify", SamplingPlan::kGreedyTemperature, 1});
  }
  const std::size_t first_sample_job = jobs.size();
  if (endpoint_.n_way) {
    jobs.push_back({"nway", plan_.temperature, plan_.n_samples});
  } else {
    for (std::size_t i = 0; i < plan_.n_samples; ++i) {
      jobs.push_back({std::to_string(i), plan_.temperature, 1});
    }
  }

  std::vector<std::vector<Completion>> results(jobs.size());
  std::vector<std::vector<std::string>> job_keys(jobs.size());
  internal::ParallelFor(jobs.size(), endpoint_.max_in_flight,
                        [&](std::size_t j) {
                          results[j] = Fetch(prompt, jobs[j].index,
                                             jobs[j].temperature,
                                             jobs[j].n_choices, job_keys[j]);
                        });

  SampleSet set;
  set.task_id = task_id;
  set.prompt = prompt;
  set.sampling_temperature = plan_.temperature;
  const Completion& greedy = results[0].front();
  set.greedy_text = greedy.text;
  if (greedy.truncated) set.notes.push_back("greedy completion truncated");
  if (plan_.verify_greedy && results[1].front().text != greedy.text) {
    set.notes.push_back(
        "greedy decode is nondeterministic; first response kept");
  }
  for (std::size_t j = first_sample_job; j < jobs.size(); ++j) {
    for (auto& c : results[j]) {
      Sample s;
      s.text = std::move(c.text);
      s.token_logprobs = std::move(c.token_logprobs);
      s.truncated = c.truncated;
      set.samples.push_back(std::move(s));
    }
  }
  std::size_t truncated = 0;
  for (const auto& s : set.samples) truncated += s.truncated ? 1 : 0;
  if (truncated) {
    set.notes.push_back(std::to_string(truncated) +
                        " samples hit the max_tokens limit");
  }

  std::vector<std::string> keys;
  for (auto& k : job_keys) keys.insert(keys.end(), k.begin(), k.end());
  cache_.RecordTask(task_id, keys);
  return set;
}

CorpusResult GatherCorpus(const std::filesystem::path& prompts_file,
                          Sampler& sampler,
                          const std::filesystem::path& samples_file) {
  std::ifstream in(prompts_file, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + prompts_file.string());

  struct PromptRow {
    std::string task_id;
    std::string prompt;
    std::optional<std::string> reference;
    std::optional<Label> label;
  };
  std::vector<PromptRow> rows;
  std::set<std::string> ids;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ValidationError(std::string("malformed JSON: ") + e.what(), line);
    }
    PromptRow row;
    if (!j.is_object() || !j.contains("task_id") ||
        !j["task_id"].is_string()) {
      throw ValidationError("field 'task_id': missing or not a string", line,
                            "task_id");
    }
    if (!j.contains("prompt") || !j["prompt"].is_string()) {
      throw ValidationError("field 'prompt': missing or not a string", line,
                            "prompt");
    }
    row.task_id = j["task_id"].get<std::string>();
    row.prompt = j["prompt"].get<std::string>();
    if (j.contains("reference_answer") && j["reference_answer"].is_string()) {
      row.reference = j["reference_answer"].get<std::string>();
    }
    if (j.contains("label") && j["label"].is_string()) {
      const auto l = j["label"].get<std::string>();
      if (l == "contaminated") row.label = Label::kContaminated;
      if (l == "uncontaminated") row.label = Label::kUncontaminated;
    }
    if (!ids.insert(row.task_id).second) {
      throw ValidationError("duplicate task id '" + row.task_id + "'", line,
                            "task_id");
    }
    rows.push_back(std::move(row));
  }

  CorpusResult result;
  std::vector<DatasetRecord> records;
  const json sampling = {{"model", sampler.endpoint().model_name},
                         {"plan", sampler.plan().Echo()}};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const PromptRow& row = rows[i];
    try {
      DatasetRecord r;
      r.set = sampler.Gather(row.task_id, row.prompt);
      r.set.reference_answer = row.reference;
      r.label = row.label;
      r.extra = json{{"sampling", sampling}};
      r.sample_extra.assign(r.set.samples.size(), json::object());
      records.push_back(std::move(r));
      std::cerr << "[" << i + 1 << "/" << rows.size() << "] " << row.task_id
                << " ok\n";
    } catch (const Error& e) {
      result.failures.push_back({i, row.task_id, e.what()});
      std::cerr << "[" << i + 1 << "/" << rows.size() << "] " << row.task_id
                << " FAILED: " << e.what() << "\n";
    }
  }
  std::ostringstream body;
  WriteDataset(body, records);
  AtomicWrite(samples_file, body.str());
  result.records_written = records.size();
  std::cerr << result.records_written << " records written, "
            << result.failures.size() << " failures, "
            << sampler.network_calls() << " network calls\n";
  return result;
}

}  // namespace cddted
