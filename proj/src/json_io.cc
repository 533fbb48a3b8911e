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

#include "bvsp/json_io.h"

#include <openssl/evp.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "bvsp/error.h"
#include "bvsp/text.h"

namespace bvsp {

double Round6(double x) {
  const double r = std::round(x * 1e6) / 1e6;
  return r == 0.0 ? 0.0 : r;  // no "-0.0"
}

namespace {

[[noreturn]] void Bad(const std::string &message) {
  throw Error(ErrorCode::kInvalidArgument, message);
}

Json TermToJson(const Term &t) {
  return t.implicit() ? Json() : Json(t.text());
}

Term TermFromJson(const Json &j, const char *key) {
  if (j.is_null()) return Term::Implicit();
  if (!j.is_string() || j.get<std::string>().empty()) {
    Bad(std::string("'") + key + "' must be a non-empty string or null");
  }
  return Term::Explicit(j.get<std::string>());
}

const Json &Field(const Json &j, const char *key) {
  if (!j.is_object() || !j.contains(key)) Bad(std::string("missing '") + key + "'");
  return j.at(key);
}

}  // namespace

Json QuadToJson(const SentimentQuad &q) {
  Json j;
  j["at"] = TermToJson(q.aspect);
  j["ot"] = TermToJson(q.opinion);
  j["ac"] = q.category;
  j["sp"] = PolarityLabel(q.polarity);
  return j;
}

SentimentQuad QuadFromJson(const Json &j) {
  SentimentQuad q;
  q.aspect = TermFromJson(j.is_object() && j.contains("at") ? j["at"] : Json(), "at");
  q.opinion = TermFromJson(j.is_object() && j.contains("ot") ? j["ot"] : Json(), "ot");
  const Json &ac = Field(j, "ac");
  if (!ac.is_string() || ac.get<std::string>().empty()) Bad("'ac' must be a non-empty string");
  q.category = ac.get<std::string>();
  const Json &sp = Field(j, "sp");
  const auto polarity = sp.is_string() ? PolarityFromLabel(sp.get<std::string>())
                                       : std::nullopt;
  if (!polarity) Bad("'sp' must be a sentiment label");
  q.polarity = *polarity;
  return q;
}

Json QuadsToJson(std::span<const SentimentQuad> quads) {
  Json arr = Json::array();
  for (const auto &q : quads) arr.push_back(QuadToJson(q));
  return arr;
}

std::vector<SentimentQuad> QuadsFromJson(const Json &j) {
  if (!j.is_array()) Bad("quads must be an array");
  std::vector<SentimentQuad> out;
  for (const auto &q : j) out.push_back(QuadFromJson(q));
  return out;
}

Json MetricsToJson(const Metrics &m) {
  Json j;
  j["tp"] = m.tp;
  j["fp"] = m.fp;
  j["fn"] = m.fn;
  j["precision"] = Round6(m.precision);
  j["recall"] = Round6(m.recall);
  j["f1"] = Round6(m.f1);
  return j;
}

Json ReportToJson(const EvalReport &report) {
  Json j;
  j["num_sentences"] = report.num_sentences;
  j["quad"] = MetricsToJson(report.quad);
  Json elements;
  for (Role role : kAllRoles) {
    elements[RoleName(role)] =
        MetricsToJson(report.elements[static_cast<std::size_t>(role)]);
  }
  j["elements"] = elements;
  j["explicit"] = MetricsToJson(report.explicit_subset);
  j["explicit"]["num_sentences"] = report.num_explicit;
  j["implicit"] = MetricsToJson(report.implicit_subset);
  j["implicit"]["num_sentences"] = report.num_implicit;
  if (report.macro) {
    j["macro"] = {{"precision", Round6(report.macro->precision)},
                  {"recall", Round6(report.macro->recall)},
                  {"f1", Round6(report.macro->f1)}};
  }
  return j;
}

Json ProtocolToJson(const ProtocolReport &report) {
  Json j;
  Json runs = Json::array();
  for (std::size_t i = 0; i < report.runs.size(); ++i) {
    Json r;
    if (i < report.episodes.size()) {
      r["seed"] = report.episodes[i].seed;
      r["support_size"] = report.episodes[i].support_ids.size();
      r["query_size"] = report.episodes[i].query_ids.size();
    }
    r["report"] = ReportToJson(report.runs[i]);
    runs.push_back(std::move(r));
  }
  j["runs"] = std::move(runs);
  Json summary;
  for (const auto &[name, m] : report.summary) {
    summary[name] = {{"mean", Round6(m.mean)}, {"stddev", Round6(m.stddev)}};
  }
  j["summary"] = std::move(summary);
  return j;
}

Json PredictionToJson(const SentencePrediction &p) {
  Json j;
  j["id"] = p.id;
  j["quads"] = QuadsToJson(p.quads);
  j["malformed"] = p.malformed;
  Json per = Json::array();
  for (const auto &t : p.per_template) {
    Json tj;
    tj["template_id"] = t.template_id;
    tj["quads"] = QuadsToJson(t.quads);
    if (t.mean_nll) tj["mean_nll"] = Round6(*t.mean_nll);
    per.push_back(std::move(tj));
  }
  j["per_template"] = std::move(per);
  return j;
}

SentencePrediction PredictionFromJson(const Json &j) {
  SentencePrediction p;
  const Json &id = Field(j, "id");
  if (!id.is_string()) Bad("'id' must be a string");
  p.id = id.get<std::string>();
  if (j.contains("quads")) p.quads = QuadsFromJson(j["quads"]);
  if (j.contains("malformed") && j["malformed"].is_number_unsigned()) {
    p.malformed = j["malformed"].get<std::size_t>();
  }
  if (j.contains("per_template")) {
    if (!j["per_template"].is_array()) Bad("'per_template' must be an array");
    for (const auto &tj : j["per_template"]) {
      TemplatePrediction t;
      const Json &tid = Field(tj, "template_id");
      if (!tid.is_string()) Bad("'template_id' must be a string");
      t.template_id = tid.get<std::string>();
      t.quads = QuadsFromJson(Field(tj, "quads"));
      if (tj.contains("mean_nll") && tj["mean_nll"].is_number()) {
        t.mean_nll = tj["mean_nll"].get<double>();
      }
      p.per_template.push_back(std::move(t));
    }
  }
  return p;
}

std::vector<Json> ReadJsonLines(std::string_view content) {
  std::vector<Json> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    std::size_t end = content.find('\n', pos);
    if (end == std::string_view::npos) end = content.size();
    const std::string_view line = content.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (Trim(line).empty()) continue;
    try {
      out.push_back(Json::parse(line));
    } catch (const Json::parse_error &e) {
      throw ParseError(e.what(), line_no, std::max<std::size_t>(e.byte, 1));
    }
  }
  return out;
}

std::string WriteJsonLines(std::span<const Json> records) {
  std::string out;
  for (const auto &r : records) {
    out += r.dump();
    out += '\n';
  }
  return out;
}

Json EpisodeToJson(const Episode &e) {
  Json j;
  j["shots"] = e.shots;
  j["seed"] = e.seed;
  j["support"] = e.support_ids;
  j["query"] = e.query_ids;
  return j;
}

Episode EpisodeFromJson(const Json &j) {
  Episode e;
  try {
    e.shots = Field(j, "shots").get<std::size_t>();
    e.seed = Field(j, "seed").get<std::uint64_t>();
    e.support_ids = Field(j, "support").get<std::vector<std::string>>();
    e.query_ids = Field(j, "query").get<std::vector<std::string>>();
  } catch (const Json::exception &ex) {
    Bad(std::string("malformed episode: ") + ex.what());
  }
  return e;
}

std::string ReadFile(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void WriteFile(const std::filesystem::path &path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write '" + path.string() + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorCode::kIoError, "write failed for '" + path.string() + "'");
}

std::string Sha256Hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::kIoError, "SHA-256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xf]);
  }
  return out;
}

std::string FileSha256(const std::filesystem::path &path) {
  return Sha256Hex(ReadFile(path));
}

void WriteManifests(const Manifest &manifest) {
  auto digests = [](const std::vector<std::filesystem::path> &paths) {
    Json arr = Json::array();
    for (const auto &p : paths) {
      arr.push_back({{"path", p.string()}, {"sha256", FileSha256(p)}});
    }
    return arr;
  };
  Json j;
  j["tool"] = "bvsp";
  j["version"] = kVersion;
  j["command"] = manifest.command;
  j["config"] = manifest.config;
  j["inputs"] = digests(manifest.inputs);
  j["outputs"] = digests(manifest.outputs);
  const std::string body = j.dump(2) + "\n";
  for (const auto &out : manifest.outputs) {
    WriteFile(out.string() + ".manifest.json", body);
  }
}

}  // namespace bvsp
