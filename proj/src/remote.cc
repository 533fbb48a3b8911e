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

#include "bvsp/remote.h"

#include <chrono>

#include "bvsp/error.h"
#include "httplib.h"
#include "json.hpp"

namespace bvsp {

using nlohmann::json;

namespace {

[[noreturn]] void Violation(const std::string &message) {
  throw Error(ErrorCode::kProtocolViolation, message);
}

json ParseBody(std::string_view body) {
  try {
    return json::parse(body);
  } catch (const json::parse_error &e) {
    Violation(std::string("response is not JSON: ") + e.what());
  }
}

std::size_t ReadOffset(const json &v, const char *what) {
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    Violation(std::string("token ") + what + " must be a non-negative integer");
  }
  return static_cast<std::size_t>(v.get<long long>());
}

std::string TokenKey(const json &v) {
  if (v.is_string()) return v.get<std::string>();
  // Some servers send vocabulary ids instead of strings.
  if (v.is_number_integer()) return v.dump();
  Violation("support token must be a string or integer");
}

}  // namespace

ScoredTarget DecodeScoreResponse(std::string_view body,
                                 std::string_view target_text,
                                 std::string_view template_id,
                                 std::string_view prefix_id, double tolerance) {
  const json doc = ParseBody(body);
  if (!doc.is_object()) Violation("response must be an object");
  if (!doc.contains("tokens") || !doc["tokens"].is_array()) {
    Violation("response lacks a 'tokens' array");
  }
  if (!doc.contains("distributions") || !doc["distributions"].is_array()) {
    Violation("response lacks a 'distributions' array");
  }
  ScoredTarget st;
  st.target_text = std::string(target_text);
  st.template_id = std::string(template_id);
  st.prefix_id = std::string(prefix_id);
  for (const auto &t : doc["tokens"]) {
    if (!t.is_object() || !t.contains("text") || !t["text"].is_string() ||
        !t.contains("start") || !t.contains("end")) {
      Violation("token entries need text, start and end");
    }
    st.tokens.push_back({t["text"].get<std::string>(), ReadOffset(t["start"], "start"),
                         ReadOffset(t["end"], "end")});
  }
  for (const auto &d : doc["distributions"]) {
    if (!d.is_object() || !d.contains("support") || !d["support"].is_array() ||
        !d.contains("other_mass") || !d["other_mass"].is_number()) {
      Violation("distribution entries need support and other_mass");
    }
    TokenDistribution dist;
    for (const auto &entry : d["support"]) {
      if (!entry.is_array() || entry.size() != 2 || !entry[1].is_number()) {
        Violation("support entries must be [token, probability]");
      }
      dist.support.emplace_back(TokenKey(entry[0]), entry[1].get<double>());
    }
    dist.other_mass = d["other_mass"].get<double>();
    st.distributions.push_back(std::move(dist));
  }
  st.Validate(tolerance);
  return st;
}

class RemoteClient::Connection {
 public:
  explicit Connection(const RemoteConfig &config) : client_(config.endpoint) {
    const auto timeout = std::chrono::milliseconds(config.timeout_ms);
    client_.set_connection_timeout(timeout);
    client_.set_read_timeout(timeout);
    client_.set_write_timeout(timeout);
    client_.set_keep_alive(true);
  }

  httplib::Client &client() { return client_; }

 private:
  httplib::Client client_;
};

namespace {

std::string StripSlash(std::string endpoint) {
  while (!endpoint.empty() && endpoint.back() == '/') endpoint.pop_back();
  return endpoint;
}

}  // namespace

RemoteClient::RemoteClient(RemoteConfig config) : config_(std::move(config)) {
  config_.endpoint = StripSlash(config_.endpoint);
  if (config_.endpoint.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "remote scorer needs an endpoint");
  }
  if (config_.timeout_ms <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "timeout must be positive");
  }
}

RemoteClient::~RemoteClient() = default;

std::unique_ptr<RemoteClient::Connection> RemoteClient::Acquire() const {
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (!idle_.empty()) {
      auto conn = std::move(idle_.back());
      idle_.pop_back();
      return conn;
    }
  }
  return std::make_unique<Connection>(config_);
}

void RemoteClient::Release(std::unique_ptr<Connection> conn) const {
  std::lock_guard<std::mutex> lock(mu_);
  if (idle_.size() < config_.pool_size) idle_.push_back(std::move(conn));
}

namespace {

std::string CheckResult(const httplib::Result &res, const std::string &where) {
  if (!res) {
    throw Error(ErrorCode::kScorerUnavailable,
                where + ": " + httplib::to_string(res.error()));
  }
  if (res->status == 503) {
    throw Error(ErrorCode::kScorerUnavailable, where + ": server is loading (503)");
  }
  if (res->status != 200) {
    Violation(where + ": HTTP " + std::to_string(res->status) + " " + res->body);
  }
  return res->body;
}

}  // namespace

std::string RemoteClient::Post(const std::string &path,
                               const std::string &body) const {
  auto conn = Acquire();
  auto res = conn->client().Post(path, body, "application/json");
  std::string out = CheckResult(res, "POST " + config_.endpoint + path);
  Release(std::move(conn));
  return out;
}

std::string RemoteClient::Get(const std::string &path) const {
  auto conn = Acquire();
  auto res = conn->client().Get(path);
  std::string out = CheckResult(res, "GET " + config_.endpoint + path);
  Release(std::move(conn));
  return out;
}

ScoredTarget RemoteClient::Score(std::string_view input_text,
                                 const TargetSequence &target,
                                 std::string_view template_id) const {
  const json request = {{"input_text", input_text},
                        {"target_text", target.text},
                        {"template_id", template_id},
                        {"prefix_id", template_id},
                        {"top_m", config_.top_m}};
  const std::string body = Post("/score", request.dump());
  return DecodeScoreResponse(body, target.text, template_id, template_id,
                             config_.tolerance);
}

std::string RemoteClient::Generate(const LabeledSentence &sentence,
                                   const Template &t) const {
  const json request = {{"input_text", sentence.text},
                        {"template_id", t.id},
                        {"prefix_id", t.id},
                        {"num_beams", 1}};
  const json doc = ParseBody(Post("/generate", request.dump()));
  if (!doc.is_object() || !doc.contains("output_text") ||
      !doc["output_text"].is_string()) {
    Violation("generate response lacks 'output_text'");
  }
  return doc["output_text"].get<std::string>();
}

HealthInfo RemoteClient::Health() const {
  const json doc = ParseBody(Get("/health"));
  if (!doc.is_object() || !doc.contains("status") || !doc["status"].is_string()) {
    Violation("health response lacks 'status'");
  }
  HealthInfo info;
  info.status = doc["status"].get<std::string>();
  if (doc.contains("model_name") && doc["model_name"].is_string()) {
    info.model_name = doc["model_name"].get<std::string>();
  }
  if (doc.contains("vocab_size") && doc["vocab_size"].is_number_integer()) {
    info.vocab_size = doc["vocab_size"].get<std::size_t>();
  }
  return info;
}

std::string RemoteClient::Describe() const {
  return "remote(endpoint=" + config_.endpoint +
         ", timeout_ms=" + std::to_string(config_.timeout_ms) +
         ", top_m=" + std::to_string(config_.top_m) + ")";
}

}  // namespace bvsp
