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

#include "cddted/detector.hpp"

#include <optional>
#include <variant>

#include "cddted/errors.hpp"
#include "parallel.hpp"

namespace cddted {

std::string_view VerdictName(Verdict v) {
  return v == Verdict::kLeaked ? "Leaked" : "Unleaked";
}

CddConfig CddConfig::StrictRealWorld() {
  CddConfig c;
  c.alpha = 0.0;
  c.xi = 0.2;
  return c;
}

CddConfig CddConfig::FromPreset(std::string_view name) {
  if (name == "default") return CddConfig{};
  if (name == "strict-realworld") return StrictRealWorld();
  throw ValidationError("unknown preset '" + std::string(name) + "'", 0,
                        "preset");
}

void CddConfig::Validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ValidationError("alpha must lie in [0, 1]", 0, "alpha");
  }
  if (!(xi >= 0.0 && xi <= 1.0)) {
    throw ValidationError("xi must lie in [0, 1]", 0, "xi");
  }
  if (l_cap == 0) throw ValidationError("l_cap must be positive", 0, "l_cap");
  if (n_samples_expected == 0) {
    throw ValidationError("n_samples_expected must be positive", 0,
                          "n_samples");
  }
}

Verdict ClassifyPeak(double peak, double xi) {
  return peak > xi ? Verdict::kLeaked : Verdict::kUnleaked;
}

DetectionOutcome CddDetect(DistanceProfile& profile, const CddConfig& config) {
  config.Validate();
  const SampleSet& set = profile.set();
  if (!set.greedy_text) {
    throw MissingFieldError("task '" + set.task_id +
                            "' has no greedy completion");
  }
  if (set.samples.empty()) {
    throw InsufficientSamplesError("task '" + set.task_id +
                                   "' has no samples");
  }

  DetectionOutcome out;
  out.task_id = set.task_id;
  out.config_used = config;
  out.n_actual = set.samples.size();
  out.tokenizer_id = profile.tokenizer().id;
  out.distribution = DensityVsGreedy(profile);
  out.length_scale = LengthScale(profile, config.l_cap);
  out.peak = Peakedness(out.distribution, out.length_scale, config.alpha);
  out.verdict = ClassifyPeak(out.peak, config.xi);
  if (out.n_actual < config.n_samples_expected) {
    out.warnings.push_back("only " + std::to_string(out.n_actual) + " of " +
                           std::to_string(config.n_samples_expected) +
                           " expected samples");
  }
  for (const std::string& note : set.notes) out.warnings.push_back(note);
  return out;
}

DetectionOutcome CddDetect(const SampleSet& set, const CddConfig& config,
                           const Tokenizer& tok) {
  DistanceProfile profile(set, tok);
  return CddDetect(profile, config);
}

DetectionBatch CddScoreBatch(const std::vector<SampleSet>& sets,
                             const CddConfig& config, const Tokenizer& tok,
                             std::size_t workers) {
  config.Validate();
  std::vector<std::variant<DetectionOutcome, std::string>> slots(sets.size());
  internal::ParallelFor(sets.size(), workers, [&](std::size_t i) {
    try {
      slots[i] = CddDetect(sets[i], config, tok);
    } catch (const Error& e) {
      slots[i] = std::string(e.what());
    }
  });

  DetectionBatch batch;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (auto* outcome = std::get_if<DetectionOutcome>(&slots[i])) {
      batch.outcomes.push_back(std::move(*outcome));
    } else {
      batch.errors.push_back(
          {i, sets[i].task_id, std::get<std::string>(slots[i])});
    }
  }
  return batch;
}

}  // namespace cddted
