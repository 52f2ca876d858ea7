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

#include "cddted/synthlab.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include "cddted/errors.hpp"

namespace cddted {
namespace {

using nlohmann::json;

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

class SimRng {
 public:
  explicit SimRng(std::uint64_t seed) : engine_(SplitMix64(seed)) {}

  std::uint64_t Below(std::uint64_t n) {
    const std::uint64_t reject_under = (0 - n) % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x < reject_under);
    return x % n;
  }

  double Unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool Bernoulli(double p) { return Unit() < p; }

  std::uint64_t Poisson(double lambda) {
    std::uint64_t total = 0;
    while (lambda > 0.0) {
      const double chunk = std::min(lambda, 16.0);
      lambda -= chunk;
      const double limit = std::exp(-chunk);
      double product = Unit();
      while (product > limit) {
        ++total;
        product *= Unit();
      }
    }
    return total;
  }

 private:
  std::mt19937_64 engine_;
};

std::vector<std::uint32_t> DrawText(SimRng& rng, std::uint32_t length,
                                    std::uint32_t vocab) {
  std::vector<std::uint32_t> t(length);
  for (auto& x : t) x = static_cast<std::uint32_t>(rng.Below(vocab));
  return t;
}

std::uint32_t DrawOther(SimRng& rng, std::uint32_t current,
                        std::uint32_t vocab) {
  auto t = static_cast<std::uint32_t>(rng.Below(vocab - 1));
  return t >= current ? t + 1 : t;
}

// Substitutes `count` distinct positions (all of them if count >= size).
void Corrupt(SimRng& rng, std::vector<std::uint32_t>& text,
             std::uint64_t count, std::uint32_t vocab) {
  const std::size_t n = text.size();
  const std::size_t k = static_cast<std::size_t>(std::min<std::uint64_t>(count, n));
  std::vector<std::size_t> pos(n);
  for (std::size_t i = 0; i < n; ++i) pos[i] = i;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.Below(n - i));
    std::swap(pos[i], pos[j]);
    text[pos[i]] = DrawOther(rng, text[pos[i]], vocab);
  }
}

bool IsProbability(double p) { return p >= 0.0 && p <= 1.0; }

std::string FormatValue(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string CanonicalAxis(std::string_view axis) {
  if (axis == "m") return "memorization_strength";
  if (axis == "lambda") return "edit_noise_rate";
  return std::string(axis);
}

std::uint32_t AsCount(std::string_view field, double v) {
  if (!(v >= 0.0) || v != std::floor(v) || v > 4294967295.0) {
    throw ValidationError(std::string(field) +
                              " must be a non-negative integer",
                          0, std::string(field));
  }
  return static_cast<std::uint32_t>(v);
}

}  // namespace

void ScenarioSpec::Validate() const {
  auto bad = [](const char* field, const std::string& what) {
    throw ValidationError(std::string(field) + " " + what, 0, field);
  };
  if (!IsProbability(memorization_strength)) {
    bad("memorization_strength", "must lie in [0, 1]");
  }
  if (!(edit_noise_rate >= 0.0) || !std::isfinite(edit_noise_rate)) {
    bad("edit_noise_rate", "must be a finite non-negative number");
  }
  if (!IsProbability(pass_model.memorized_pass_prob)) {
    bad("memorized_pass_prob", "must lie in [0, 1]");
  }
  if (!IsProbability(pass_model.background_pass_prob)) {
    bad("background_pass_prob", "must lie in [0, 1]");
  }
  if (canonical_answer_length == 0) bad("canonical_answer_length", "must be > 0");
  if (background_length == 0) bad("background_length", "must be > 0");
  if (background_vocab < 2) bad("background_vocab", "must be >= 2");
  if (n_samples == 0) bad("n_samples", "must be > 0");
  if (task_id.empty()) bad("task_id", "must not be empty");
}

json ScenarioToJson(const ScenarioSpec& s) {
  return json{
      {"task_id", s.task_id},
      {"memorization_strength", s.memorization_strength},
      {"edit_noise_rate", s.edit_noise_rate},
      {"canonical_answer_length", s.canonical_answer_length},
      {"background_vocab", s.background_vocab},
      {"background_length", s.background_length},
      {"n_samples", s.n_samples},
      {"pass_model",
       {{"memorized_pass_prob", s.pass_model.memorized_pass_prob},
        {"background_pass_prob", s.pass_model.background_pass_prob}}},
      {"variant_stride", s.variant_stride},
      {"seed", s.seed},
  };
}

ScenarioSpec ScenarioFromJson(const json& j) {
  if (!j.is_object()) throw ValidationError("scenario must be an object");
  ScenarioSpec s;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    const json& v = it.value();
    try {
      if (key == "task_id") {
        s.task_id = v.get<std::string>();
      } else if (key == "pass_model") {
        for (auto p = v.begin(); p != v.end(); ++p) {
          if (p.key() == "memorized_pass_prob") {
            s.pass_model.memorized_pass_prob = p.value().get<double>();
          } else if (p.key() == "background_pass_prob") {
            s.pass_model.background_pass_prob = p.value().get<double>();
          } else {
            throw ValidationError("unknown pass_model field '" + p.key() + "'",
                                  0, "pass_model");
          }
        }
      } else if (key == "seed") {
        s.seed = v.get<std::uint64_t>();
      } else {
        if (!v.is_number()) {
          throw ValidationError(key + " must be a number", 0, key);
        }
        s = ApplyAxis(s, key, v.get<double>());
      }
    } catch (const json::exception& e) {
      throw ValidationError("scenario field '" + key + "': " + e.what(), 0,
                            key);
    }
  }
  s.Validate();
  return s;
}

std::string RenderTokens(const std::vector<std::uint32_t>& tokens) {
  std::string out;
  out.reserve(tokens.size() * 5);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out.push_back('w');
    out += std::to_string(tokens[i]);
  }
  return out;
}

SampleSet Generate(const ScenarioSpec& spec) {
  spec.Validate();
  SimRng rng(spec.seed);
  const std::uint32_t vocab = spec.background_vocab;

  std::vector<std::uint32_t> reference =
      DrawText(rng, spec.canonical_answer_length, vocab);
  std::vector<std::uint32_t> canonical = reference;
  if (spec.variant_stride > 0) {
    for (std::size_t i = spec.variant_stride - 1; i < canonical.size();
         i += spec.variant_stride) {
      canonical[i] = DrawOther(rng, canonical[i], vocab);
    }
  }

  SampleSet set;
  set.task_id = spec.task_id;
  set.prompt = "Synthetic task " + spec.task_id;
  set.reference_answer = RenderTokens(reference);
  set.tokenizer_id = "whitespace-punct";

  const double m = spec.memorization_strength;
  set.greedy_text = m > 0.5 ? RenderTokens(canonical)
                            : RenderTokens(DrawText(
                                  rng, spec.background_length, vocab));

  set.samples.reserve(spec.n_samples);
  for (std::uint32_t i = 0; i < spec.n_samples; ++i) {
    Sample s;
    const bool memorized = rng.Bernoulli(m);
    if (memorized) {
      std::vector<std::uint32_t> copy = canonical;
      Corrupt(rng, copy, rng.Poisson(spec.edit_noise_rate), vocab);
      s.text = RenderTokens(copy);
    } else {
      s.text = RenderTokens(DrawText(rng, spec.background_length, vocab));
    }
    s.passed = rng.Bernoulli(memorized ? spec.pass_model.memorized_pass_prob
                                       : spec.pass_model.background_pass_prob);
    set.samples.push_back(std::move(s));
  }
  return set;
}

void ScenarioSweep::Validate() const {
  base.Validate();
  if (seeds_per_point == 0) {
    throw ValidationError("seeds_per_point must be > 0", 0, "seeds_per_point");
  }
  for (double v : values) ApplyAxis(base, axis, v).Validate();
}

json SweepToJson(const ScenarioSweep& sweep) {
  return json{{"base", ScenarioToJson(sweep.base)},
              {"axis", sweep.axis},
              {"values", sweep.values},
              {"seeds_per_point", sweep.seeds_per_point}};
}

ScenarioSweep SweepFromJson(const json& j) {
  if (!j.is_object()) throw ValidationError("sweep must be an object");
  ScenarioSweep sweep;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    try {
      if (key == "base") {
        sweep.base = ScenarioFromJson(it.value());
      } else if (key == "axis") {
        sweep.axis = it.value().get<std::string>();
      } else if (key == "values") {
        sweep.values = it.value().get<std::vector<double>>();
      } else if (key == "seeds_per_point") {
        sweep.seeds_per_point = it.value().get<std::uint32_t>();
      } else {
        throw ValidationError("unknown sweep field '" + key + "'", 0, key);
      }
    } catch (const json::exception& e) {
      throw ValidationError("sweep field '" + key + "': " + e.what(), 0, key);
    }
  }
  sweep.Validate();
  return sweep;
}

ScenarioSpec ApplyAxis(ScenarioSpec s, std::string_view axis, double v) {
  const std::string name = CanonicalAxis(axis);
  if (name == "memorization_strength") {
    s.memorization_strength = v;
  } else if (name == "edit_noise_rate") {
    s.edit_noise_rate = v;
  } else if (name == "canonical_answer_length") {
    s.canonical_answer_length = AsCount(name, v);
  } else if (name == "background_vocab") {
    s.background_vocab = AsCount(name, v);
  } else if (name == "background_length") {
    s.background_length = AsCount(name, v);
  } else if (name == "n_samples") {
    s.n_samples = AsCount(name, v);
  } else if (name == "variant_stride") {
    s.variant_stride = AsCount(name, v);
  } else if (name == "memorized_pass_prob") {
    s.pass_model.memorized_pass_prob = v;
  } else if (name == "background_pass_prob") {
    s.pass_model.background_pass_prob = v;
  } else {
    throw ValidationError("'" + std::string(axis) +
                              "' is not a numeric scenario field",
                          0, "axis");
  }
  return s;
}

std::vector<DatasetRecord> GenerateLabeledCorpus(const ScenarioSweep& sweep) {
  sweep.Validate();
  const std::string axis = CanonicalAxis(sweep.axis);
  std::vector<DatasetRecord> records;
  records.reserve(sweep.values.size() * sweep.seeds_per_point);
  for (std::size_t p = 0; p < sweep.values.size(); ++p) {
    ScenarioSpec point = ApplyAxis(sweep.base, axis, sweep.values[p]);
    for (std::uint32_t k = 0; k < sweep.seeds_per_point; ++k) {
      ScenarioSpec spec = point;
      spec.seed = SplitMix64(SplitMix64(sweep.base.seed) + p * 1000003ULL + k);
      spec.task_id = sweep.base.task_id + "-" + axis + "=" +
                     FormatValue(sweep.values[p]) + "-p" + std::to_string(p) +
                     "-s" + std::to_string(k);
      DatasetRecord r;
      r.set = Generate(spec);
      r.extra = json{{"scenario", ScenarioToJson(spec)}};
      r.label = spec.memorization_strength > 0.0 ? Label::kContaminated
                                                 : Label::kUncontaminated;
      r.sample_extra.assign(r.set.samples.size(), json::object());
      records.push_back(std::move(r));
    }
  }
  return records;
}

}  // namespace cddted
