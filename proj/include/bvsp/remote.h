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

// HTTP client for an external language-model server.
//
// Wire protocol (application/json):
//
//   POST /score     {input_text, target_text, template_id, prefix_id, top_m}
//                -> {tokens: [{text, start, end}],
//                    distributions: [{support: [[token, prob], ...],
//                                     other_mass}]}
//   POST /generate  {input_text, template_id, prefix_id, num_beams}
//                -> {output_text}
//   GET  /health -> {status, model_name, vocab_size}
//
// Token offsets are UTF-8 byte offsets into target_text. Responses are
// validated and relayed as-is; they are never renormalized.

#ifndef BVSP_REMOTE_H_
#define BVSP_REMOTE_H_

#include <cstddef>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "bvsp/scoring.h"

namespace bvsp {

struct RemoteConfig {
  // "http://host:port"; a trailing slash is ignored.
  std::string endpoint;
  int timeout_ms = 30000;
  std::size_t top_m = 50;
  // Allowed deviation of each distribution's total from 1.
  double tolerance = 1e-4;
  // Maximum number of idle connections kept for reuse.
  std::size_t pool_size = 8;
};

struct HealthInfo {
  std::string status;
  std::string model_name;
  std::size_t vocab_size = 0;
};

// Parses and validates a /score response body. Throws ProtocolViolation.
ScoredTarget DecodeScoreResponse(std::string_view body,
                                 std::string_view target_text,
                                 std::string_view template_id,
                                 std::string_view prefix_id, double tolerance);

// Score and Generate throw ScorerUnavailable when the server cannot be
// reached or answers 503, and ProtocolViolation for any other non-200 status
// or malformed body. Safe for concurrent use.
class RemoteClient : public Scorer, public Generator {
 public:
  explicit RemoteClient(RemoteConfig config);
  ~RemoteClient() override;

  ScoredTarget Score(std::string_view input_text, const TargetSequence &target,
                     std::string_view template_id) const override;

  // Sends only the sentence text; gold quads stay local.
  std::string Generate(const LabeledSentence &sentence,
                       const Template &t) const override;

  HealthInfo Health() const;

  std::string Describe() const override;

  const RemoteConfig &config() const { return config_; }

 private:
  class Connection;

  std::string Post(const std::string &path, const std::string &body) const;
  std::string Get(const std::string &path) const;

  std::unique_ptr<Connection> Acquire() const;
  void Release(std::unique_ptr<Connection> conn) const;

  RemoteConfig config_;
  mutable std::mutex mu_;
  mutable std::vector<std::unique_ptr<Connection>> idle_;
};

}  // namespace bvsp

#endif  // BVSP_REMOTE_H_
