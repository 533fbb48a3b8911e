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

// JSON forms of quads, predictions, reports and episodes, plus output
// manifests. Reals are rounded to 6 decimals before serialization.

#ifndef BVSP_JSON_IO_H_
#define BVSP_JSON_IO_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "bvsp/evaluation.h"
#include "bvsp/fewshot.h"
#include "bvsp/pipeline.h"
#include "bvsp/quad.h"
#include "json.hpp"

namespace bvsp {

using Json = nlohmann::ordered_json;

double Round6(double x);

// {"at": string|null, "ot": string|null, "ac": string, "sp": "positive"...}
Json QuadToJson(const SentimentQuad &q);
// Throws InvalidArgument on a malformed object.
SentimentQuad QuadFromJson(const Json &j);

Json QuadsToJson(std::span<const SentimentQuad> quads);
std::vector<SentimentQuad> QuadsFromJson(const Json &j);

Json MetricsToJson(const Metrics &m);
Json ReportToJson(const EvalReport &report);
Json ProtocolToJson(const ProtocolReport &report);

// One record per sentence: {"id", "quads", "malformed", "per_template":
// [{"template_id", "quads", "mean_nll"?}]}.
Json PredictionToJson(const SentencePrediction &p);
SentencePrediction PredictionFromJson(const Json &j);

// Line-delimited records. Throws ParseError with the line number.
std::vector<Json> ReadJsonLines(std::string_view content);
std::string WriteJsonLines(std::span<const Json> records);

Json EpisodeToJson(const Episode &e);
Episode EpisodeFromJson(const Json &j);

// Whole-file helpers; throw IoError.
std::string ReadFile(const std::filesystem::path &path);
void WriteFile(const std::filesystem::path &path, std::string_view content);

// Lowercase hex SHA-256.
std::string Sha256Hex(std::string_view data);
std::string FileSha256(const std::filesystem::path &path);

struct Manifest {
  std::string command;
  Json config = Json::object();
  std::vector<std::filesystem::path> inputs;
  std::vector<std::filesystem::path> outputs;
};

// Writes "<output>.manifest.json" next to every output: the tool version,
// command, configuration and SHA-256 digests of the inputs and outputs.
void WriteManifests(const Manifest &manifest);

inline constexpr std::string_view kVersion = "0.1.0";

}  // namespace bvsp

#endif  // BVSP_JSON_IO_H_
