// Copyright 2026 The bvsp Authors.
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

// Dataset files and corpus statistics.
//
// quad-lines: one sentence per line,
//
//   The room is clean .####[['room', 'room_overall', 'positive', 'clean']]
//
// with elements in (aspect, category, sentiment, opinion) order, sentiment as
// positive/neutral/negative, and the literal NULL for implicit terms. Labels
// are Python literals: single- or double-quoted strings with backslash
// escapes. Sentence ids are 1-based line numbers.
//
// jsonl: one object per line,
//
//   {"id": "s1", "text": "...", "quads": [{"at": "room", "ot": null,
//    "ac": "room_overall", "sp": "positive"}]}
//
// with null for implicit terms. A missing id is replaced by the line number.

#ifndef BVSP_DATASET_IO_H_
#define BVSP_DATASET_IO_H_

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bvsp/quad.h"

namespace bvsp {

enum class DataFormat { kQuadLines, kJsonl };

// "quad-lines" or "jsonl"; throws InvalidArgument otherwise.
DataFormat ParseDataFormat(std::string_view name);
const char *DataFormatName(DataFormat format);

struct LoadWarning {
  std::size_t line = 0;
  std::string message;
};

// Throws ParseError (with line and column) on malformed content and EmptyFile
// when there is no sentence. Explicit terms that do not occur in the
// sentence text are reported as warnings, not errors.
Dataset ParseDataset(std::string_view content, DataFormat format,
                     std::string name = {},
                     std::vector<LoadWarning> *warnings = nullptr);

// As ParseDataset; also throws IoError if the file cannot be read. The
// dataset is named after the file stem.
Dataset LoadDataset(const std::filesystem::path &path, DataFormat format,
                    std::vector<LoadWarning> *warnings = nullptr);

std::string SerializeDataset(const Dataset &dataset, DataFormat format);
void SaveDataset(const Dataset &dataset, const std::filesystem::path &path,
                 DataFormat format);

// Python-literal quoting used by quad-lines output.
std::string PythonQuote(std::string_view s);

struct DatasetStats {
  std::size_t num_sentences = 0;
  std::size_t num_words = 0;
  double words_per_sentence = 0.0;
  std::size_t num_quads = 0;
  double quads_per_sentence = 0.0;
  std::size_t num_categories = 0;
  // Quads per category.
  double mean_instances_per_category = 0.0;
  // Explicit/implicit aspect (EA/IA) by explicit/implicit opinion (EO/IO).
  std::size_t ea_eo = 0;
  std::size_t ia_eo = 0;
  std::size_t ea_io = 0;
  std::size_t ia_io = 0;
};

// Words are whitespace tokens of the raw sentence. Throws InvalidArgument on
// an empty dataset.
DatasetStats ComputeStats(const Dataset &dataset);

std::string StatsTsvHeader();
std::string StatsTsvRow(std::string_view name, const DatasetStats &stats);

// Number of quads per category.
std::map<std::string, std::size_t> CategoryCounts(const Dataset &dataset);

// Inclusive range of per-category instance counts.
struct Bucket {
  std::size_t lo = 0;
  std::size_t hi = 0;
};

// Parses "1-50,51-100" style bucket lists. Throws InvalidBuckets.
std::vector<Bucket> ParseBuckets(std::string_view spec);

// Number of categories whose instance count falls in each bucket, in the
// order given. Throws InvalidBuckets when buckets are empty, inverted,
// overlapping, leave a gap, or fail to cover some category's count.
std::vector<std::size_t> CategoryHistogram(const Dataset &dataset,
                                           std::span<const Bucket> buckets);

}  // namespace bvsp

#endif  // BVSP_DATASET_IO_H_
