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

// Line-delimited dataset records: one JSON object per line.

#ifndef CDDTED_DATASET_HPP_
#define CDDTED_DATASET_HPP_

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "cddted/sample_set.hpp"

namespace cddted {

enum class Label { kUncontaminated, kContaminated };

std::string_view LabelName(Label l);

struct DatasetRecord {
  SampleSet set;
  std::optional<Label> label;
  // Fields this version does not know about, kept verbatim for output.
  nlohmann::json extra = nlohmann::json::object();
  // Parallel to set.samples; unknown per-sample fields.
  std::vector<nlohmann::json> sample_extra;
};

nlohmann::json RecordToJson(const DatasetRecord& record);
// `line` is used for error messages only.
DatasetRecord RecordFromJson(const nlohmann::json& j, std::size_t line = 0);

// Validates every record and rejects duplicate task ids. Blank lines are
// skipped. Errors name the line and the offending field.
std::vector<DatasetRecord> ReadDataset(std::istream& in);
std::vector<DatasetRecord> LoadDataset(const std::filesystem::path& path);

void WriteDataset(std::ostream& out, const std::vector<DatasetRecord>& records);
void SaveDataset(const std::filesystem::path& path,
                 const std::vector<DatasetRecord>& records);

}  // namespace cddted

#endif  // CDDTED_DATASET_HPP_
