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

#include "cddted/dataset.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include "cddted/errors.hpp"

namespace cddted {
namespace {

using nlohmann::json;

const std::set<std::string, std::less<>> kRecordFields = {
    "task_id",     "prompt",    "reference_answer", "greedy_completion",
    "samples",     "label",     "tokenizer_id",     "sampling_temperature",
    "notes"};
const std::set<std::string, std::less<>> kSampleFields = {
    "text", "token_logprobs", "embedding", "passed", "truncated"};

[[noreturn]] void Fail(std::size_t line, const std::string& field,
                       const std::string& what) {
  throw ValidationError("field '" + field + "': " + what, line, field);
}

std::string RequireString(const json& j, const char* field, std::size_t line) {
  auto it = j.find(field);
  if (it == j.end() || it->is_null()) Fail(line, field, "missing");
  if (!it->is_string()) Fail(line, field, "expected a string");
  return it->get<std::string>();
}

std::optional<std::string> OptionalString(const json& j, const char* field,
                                          std::size_t line) {
  auto it = j.find(field);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) Fail(line, field, "expected a string");
  return it->get<std::string>();
}

std::optional<std::vector<double>> OptionalNumbers(const json& j,
                                                   const std::string& field,
                                                   std::size_t line) {
  auto it = j.find(field);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_array()) Fail(line, field, "expected an array of numbers");
  std::vector<double> v;
  v.reserve(it->size());
  for (const auto& x : *it) {
    if (!x.is_number()) Fail(line, field, "expected an array of numbers");
    v.push_back(x.get<double>());
  }
  return v;
}

}  // namespace

std::string_view LabelName(Label l) {
  return l == Label::kContaminated ? "contaminated" : "uncontaminated";
}

json RecordToJson(const DatasetRecord& r) {
  json j = r.extra.is_object() ? r.extra : json::object();
  const SampleSet& s = r.set;
  j["task_id"] = s.task_id;
  j["prompt"] = s.prompt;
  if (s.reference_answer) j["reference_answer"] = *s.reference_answer;
  if (s.greedy_text) j["greedy_completion"] = *s.greedy_text;
  if (!s.tokenizer_id.empty()) j["tokenizer_id"] = s.tokenizer_id;
  if (s.sampling_temperature) {
    j["sampling_temperature"] = *s.sampling_temperature;
  }
  if (!s.notes.empty()) j["notes"] = s.notes;
  if (r.label) j["label"] = std::string(LabelName(*r.label));

  json samples = json::array();
  for (std::size_t i = 0; i < s.samples.size(); ++i) {
    const Sample& smp = s.samples[i];
    json o = (i < r.sample_extra.size() && r.sample_extra[i].is_object())
                 ? r.sample_extra[i]
                 : json::object();
    o["text"] = smp.text;
    if (smp.token_logprobs) o["token_logprobs"] = *smp.token_logprobs;
    if (smp.embedding) o["embedding"] = *smp.embedding;
    if (smp.passed) o["passed"] = *smp.passed;
    if (smp.truncated) o["truncated"] = true;
    samples.push_back(std::move(o));
  }
  j["samples"] = std::move(samples);
  return j;
}

DatasetRecord RecordFromJson(const json& j, std::size_t line) {
  if (!j.is_object()) {
    throw ValidationError("record is not a JSON object", line);
  }
  DatasetRecord r;
  SampleSet& s = r.set;
  s.task_id = RequireString(j, "task_id", line);
  if (s.task_id.empty()) Fail(line, "task_id", "empty");
  s.prompt = OptionalString(j, "prompt", line).value_or("");
  s.reference_answer = OptionalString(j, "reference_answer", line);
  s.greedy_text = RequireString(j, "greedy_completion", line);
  s.tokenizer_id = OptionalString(j, "tokenizer_id", line).value_or("");
  if (auto it = j.find("sampling_temperature");
      it != j.end() && !it->is_null()) {
    if (!it->is_number()) Fail(line, "sampling_temperature", "not a number");
    s.sampling_temperature = it->get<double>();
  }
  if (auto it = j.find("notes"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) Fail(line, "notes", "expected an array of strings");
    for (const auto& n : *it) {
      if (!n.is_string()) Fail(line, "notes", "expected an array of strings");
      s.notes.push_back(n.get<std::string>());
    }
  }
  if (auto label = OptionalString(j, "label", line)) {
    if (*label == "contaminated") {
      r.label = Label::kContaminated;
    } else if (*label == "uncontaminated") {
      r.label = Label::kUncontaminated;
    } else {
      Fail(line, "label", "expected 'contaminated' or 'uncontaminated'");
    }
  }

  auto it = j.find("samples");
  if (it == j.end() || !it->is_array()) {
    Fail(line, "samples", "missing or not an array");
  }
  for (std::size_t i = 0; i < it->size(); ++i) {
    const json& o = (*it)[i];
    const std::string where = "samples[" + std::to_string(i) + "]";
    if (!o.is_object()) Fail(line, where, "expected an object");
    Sample smp;
    auto text = o.find("text");
    if (text == o.end() || !text->is_string()) {
      Fail(line, where + ".text", "missing or not a string");
    }
    smp.text = text->get<std::string>();
    smp.token_logprobs = OptionalNumbers(o, "token_logprobs", line);
    if (smp.token_logprobs) {
      for (double v : *smp.token_logprobs) {
        if (!(v <= 0.0)) Fail(line, where + ".token_logprobs", "entry > 0");
      }
    }
    smp.embedding = OptionalNumbers(o, "embedding", line);
    if (smp.embedding && smp.embedding->empty()) {
      Fail(line, where + ".embedding", "empty");
    }
    if (auto p = o.find("passed"); p != o.end() && !p->is_null()) {
      if (!p->is_boolean()) Fail(line, where + ".passed", "not a boolean");
      smp.passed = p->get<bool>();
    }
    if (auto t = o.find("truncated"); t != o.end() && !t->is_null()) {
      if (!t->is_boolean()) Fail(line, where + ".truncated", "not a boolean");
      smp.truncated = t->get<bool>();
    }
    json extra = json::object();
    for (auto f = o.begin(); f != o.end(); ++f) {
      if (!kSampleFields.count(f.key())) extra[f.key()] = f.value();
    }
    s.samples.push_back(std::move(smp));
    r.sample_extra.push_back(std::move(extra));
  }

  for (auto f = j.begin(); f != j.end(); ++f) {
    if (!kRecordFields.count(f.key())) r.extra[f.key()] = f.value();
  }
  return r;
}

std::vector<DatasetRecord> ReadDataset(std::istream& in) {
  std::vector<DatasetRecord> records;
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
    DatasetRecord r = RecordFromJson(j, line);
    if (!ids.insert(r.set.task_id).second) {
      Fail(line, "task_id", "duplicate task id '" + r.set.task_id + "'");
    }
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<DatasetRecord> LoadDataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open dataset " + path.string());
  return ReadDataset(in);
}

void WriteDataset(std::ostream& out,
                  const std::vector<DatasetRecord>& records) {
  for (const auto& r : records) out << RecordToJson(r).dump() << '\n';
}

void SaveDataset(const std::filesystem::path& path,
                 const std::vector<DatasetRecord>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  WriteDataset(out, records);
  if (!out) throw Error("write failed for " + path.string());
}

}  // namespace cddted
