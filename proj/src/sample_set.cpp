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

#include "cddted/sample_set.hpp"

#include <cmath>

#include "cddted/errors.hpp"

namespace cddted {

void ValidateSampleSet(const SampleSet& set) {
  for (std::size_t i = 0; i < set.samples.size(); ++i) {
    const Sample& s = set.samples[i];
    const std::string where =
        "task '" + set.task_id + "' sample " + std::to_string(i);
    if (s.token_logprobs) {
      for (double lp : *s.token_logprobs) {
        if (!(lp <= 0.0)) {
          throw ValidationError(where + ": token log-probability " +
                                    std::to_string(lp) + " is not <= 0",
                                0, "token_logprobs");
        }
      }
    }
    if (s.embedding) {
      if (s.embedding->empty()) {
        throw ValidationError(where + ": empty embedding", 0, "embedding");
      }
      for (double v : *s.embedding) {
        if (!std::isfinite(v)) {
          throw ValidationError(where + ": non-finite embedding entry", 0,
                                "embedding");
        }
      }
    }
  }
}

}  // namespace cddted
