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

#include "bvsp/dataset_io.h"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

#include "json.hpp"

#include "bvsp/error.h"
#include "bvsp/text.h"

namespace bvsp {

DataFormat ParseDataFormat(std::string_view name) {
  if (name == "quad-lines") return DataFormat::kQuadLines;
  if (name == "jsonl") return DataFormat::kJsonl;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown data format '" + std::string(name) + "'");
}

const char *DataFormatName(DataFormat format) {
  return format == DataFormat::kJsonl ? "jsonl" : "quad-lines";
}

namespace {

constexpr std::string_view kLabelSeparator = "####";
constexpr std::string_view kNullLiteral = "NULL";

// Recursive-descent reader for the Python list literal after "####".
class LabelReader {
 public:
  LabelReader(std::string_view line, std::size_t offset, std::size_t line_no)
      : line_(line), pos_(offset), line_no_(line_no) {}

  std::vector<SentimentQuad> ReadQuadList() {
    std::vector<SentimentQuad> quads;
    SkipSpace();
    Expect('[');
    SkipSpace();
    if (Peek() == ']') {
      ++pos_;
    } else {
      while (true) {
        quads.push_back(ReadQuad());
        SkipSpace();
        if (Peek() == ',') {
          ++pos_;
          SkipSpace();
          // Python allows a trailing comma.
          if (Peek() == ']') {
            ++pos_;
            break;
          }
          continue;
        }
        Expect(']');
        break;
      }
    }
    SkipSpace();
    if (pos_ != line_.size()) Fail("unexpected trailing characters");
    return quads;
  }

 private:
  SentimentQuad ReadQuad() {
    const char open = Peek();
    if (open != '[' && open != '(') Fail("expected '[' or '(' to open a quad");
    const char close = open == '[' ? ']' : ')';
    ++pos_;
    std::array<std::string, 4> fields;
    std::array<std::size_t, 4> columns{};
    for (std::size_t i = 0; i < 4; ++i) {
      SkipSpace();
      columns[i] = pos_ + 1;
      fields[i] = ReadString();
      SkipSpace();
      if (i < 3) Expect(',');
    }
    if (Peek() == ',') {
      ++pos_;
      SkipSpace();
    }
    Expect(close);

    // On-disk order: aspect, category, sentiment, opinion.
    SentimentQuad q;
    q.aspect = ReadTerm(fields[0], columns[0]);
    if (Trim(fields[1]).empty()) FailAt("empty aspect category", columns[1]);
    q.category = fields[1];
    const auto polarity = PolarityFromLabel(fields[2]);
    if (!polarity) {
      FailAt("unknown sentiment '" + fields[2] + "'", columns[2]);
    }
    q.polarity = *polarity;
    q.opinion = ReadTerm(fields[3], columns[3]);
    return q;
  }

  Term ReadTerm(const std::string &s, std::size_t column) {
    if (s == kNullLiteral) return Term::Implicit();
    if (s.empty()) FailAt("empty term (use NULL for implicit)", column);
    return Term::Explicit(s);
  }

  std::string ReadString() {
    const char quote = Peek();
    if (quote != '\'' && quote != '"') Fail("expected a quoted string");
    ++pos_;
    std::string out;
    while (true) {
      if (pos_ >= line_.size()) Fail("unterminated string");
      const char c = line_[pos_++];
      if (c == quote) break;
      if (c != '\\') {
        out.push_back(c);
        continue;
      }
      if (pos_ >= line_.size()) Fail("dangling escape");
      const char e = line_[pos_++];
      switch (e) {
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        case 'r': out.push_back('\r'); break;
        case '\\':
        case '\'':
        case '"': out.push_back(e); break;
        default:
          out.push_back('\\');
          out.push_back(e);
      }
    }
    return out;
  }

  char Peek() const { return pos_ < line_.size() ? line_[pos_] : '\0'; }

  void SkipSpace() {
    while (pos_ < line_.size() && IsSpace(line_[pos_])) ++pos_;
  }

  void Expect(char c) {
    if (Peek() != c) Fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  [[noreturn]] void Fail(const std::string &message) const {
    throw ParseError(message, line_no_, pos_ + 1);
  }
  [[noreturn]] void FailAt(const std::string &message, std::size_t column) const {
    throw ParseError(message, line_no_, column);
  }

  std::string_view line_;
  std::size_t pos_;
  std::size_t line_no_;
};

void CheckTermsInText(const LabeledSentence &s, std::size_t line_no,
                      std::vector<LoadWarning> *warnings) {
  if (warnings == nullptr) return;
  const std::string text = NormalizeWhitespace(s.text);
  for (const auto &q : s.quads) {
    for (const Term *t : {&q.aspect, &q.opinion}) {
      if (t->implicit()) continue;
      if (text.find(NormalizeWhitespace(t->text())) == std::string::npos) {
        warnings->push_back(
            {line_no, "term '" + t->text() + "' does not occur in the sentence"});
      }
    }
  }
}

LabeledSentence ParseQuadLine(std::string_view line, std::size_t line_no) {
  const std::size_t sep = line.find(kLabelSeparator);
  if (sep == std::string_view::npos) {
    throw ParseError("missing '####' label separator", line_no, line.size() + 1);
  }
  LabeledSentence s;
  s.id = std::to_string(line_no);
  s.text = std::string(line.substr(0, sep));
  LabelReader reader(line, sep + kLabelSeparator.size(), line_no);
  s.quads = reader.ReadQuadList();
  return s;
}

Term JsonTerm(const nlohmann::json &v, std::size_t line_no, const char *key) {
  if (v.is_null()) return Term::Implicit();
  if (!v.is_string() || v.get<std::string>().empty()) {
    throw ParseError(std::string("'") + key + "' must be a non-empty string or null",
                     line_no, 1);
  }
  return Term::Explicit(v.get<std::string>());
}

LabeledSentence ParseJsonLine(std::string_view line, std::size_t line_no) {
  nlohmann::json obj;
  try {
    obj = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error &e) {
    throw ParseError(e.what(), line_no, std::max<std::size_t>(e.byte, 1));
  }
  auto fail = [&](const std::string &message) -> void {
    throw ParseError(message, line_no, 1);
  };
  if (!obj.is_object()) fail("expected a JSON object");
  LabeledSentence s;
  if (obj.contains("id") && !obj["id"].is_null()) {
    const auto &id = obj["id"];
    if (id.is_string()) {
      s.id = id.get<std::string>();
    } else if (id.is_number_integer()) {
      s.id = std::to_string(id.get<long long>());
    } else {
      fail("'id' must be a string or integer");
    }
  } else {
    s.id = std::to_string(line_no);
  }
  if (!obj.contains("text") || !obj["text"].is_string()) {
    fail("'text' must be a string");
  }
  s.text = obj["text"].get<std::string>();
  if (!obj.contains("quads") || !obj["quads"].is_array()) {
    fail("'quads' must be an array");
  }
  for (const auto &jq : obj["quads"]) {
    if (!jq.is_object()) fail("each quad must be an object");
    SentimentQuad q;
    q.aspect = JsonTerm(jq.value("at", nlohmann::json()), line_no, "at");
    q.opinion = JsonTerm(jq.value("ot", nlohmann::json()), line_no, "ot");
    if (!jq.contains("ac") || !jq["ac"].is_string() ||
        jq["ac"].get<std::string>().empty()) {
      fail("'ac' must be a non-empty string");
    }
    q.category = jq["ac"].get<std::string>();
    if (!jq.contains("sp") || !jq["sp"].is_string()) fail("'sp' must be a string");
    const auto polarity = PolarityFromLabel(jq["sp"].get<std::string>());
    if (!polarity) fail("unknown sentiment '" + jq["sp"].get<std::string>() + "'");
    q.polarity = *polarity;
    s.quads.push_back(std::move(q));
  }
  return s;
}

}  // namespace

Dataset ParseDataset(std::string_view content, DataFormat format,
                     std::string name, std::vector<LoadWarning> *warnings) {
  Dataset dataset;
  dataset.name = std::move(name);
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    std::size_t end = content.find('\n', pos);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (Trim(line).empty()) continue;
    LabeledSentence s = format == DataFormat::kJsonl
                            ? ParseJsonLine(line, line_no)
                            : ParseQuadLine(line, line_no);
    CheckTermsInText(s, line_no, warnings);
    dataset.sentences.push_back(std::move(s));
  }
  if (dataset.sentences.empty()) {
    throw Error(ErrorCode::kEmptyFile, "no sentences in '" + dataset.name + "'");
  }
  return dataset;
}

Dataset LoadDataset(const std::filesystem::path &path, DataFormat format,
                    std::vector<LoadWarning> *warnings) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIoError, "cannot read '" + path.string() + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return ParseDataset(buf.str(), format, path.stem().string(), warnings);
}

std::string PythonQuote(std::string_view s) {
  const bool has_single = s.find('\'') != std::string_view::npos;
  const bool has_double = s.find('"') != std::string_view::npos;
  const char quote = has_single && !has_double ? '"' : '\'';
  std::string out(1, quote);
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (c == quote) out.push_back('\\');
        out.push_back(c);
    }
  }
  out.push_back(quote);
  return out;
}

std::string SerializeDataset(const Dataset &dataset, DataFormat format) {
  std::string out;
  for (const auto &s : dataset.sentences) {
    if (format == DataFormat::kQuadLines) {
      auto term = [](const Term &t) {
        return PythonQuote(t.implicit() ? kNullLiteral : std::string_view(t.text()));
      };
      out += s.text;
      out += kLabelSeparator;
      out += '[';
      for (std::size_t i = 0; i < s.quads.size(); ++i) {
        const auto &q = s.quads[i];
        if (i > 0) out += ", ";
        out += "[" + term(q.aspect) + ", " + PythonQuote(q.category) + ", " +
               PythonQuote(PolarityLabel(q.polarity)) + ", " + term(q.opinion) +
               "]";
      }
      out += "]\n";
    } else {
      nlohmann::ordered_json obj;
      obj["id"] = s.id;
      obj["text"] = s.text;
      obj["quads"] = nlohmann::ordered_json::array();
      for (const auto &q : s.quads) {
        nlohmann::ordered_json jq;
        jq["at"] = q.aspect.implicit() ? nlohmann::ordered_json()
                                       : nlohmann::ordered_json(q.aspect.text());
        jq["ot"] = q.opinion.implicit() ? nlohmann::ordered_json()
                                        : nlohmann::ordered_json(q.opinion.text());
        jq["ac"] = q.category;
        jq["sp"] = PolarityLabel(q.polarity);
        obj["quads"].push_back(std::move(jq));
      }
      out += obj.dump();
      out += '\n';
    }
  }
  return out;
}

void SaveDataset(const Dataset &dataset, const std::filesystem::path &path,
                 DataFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::kIoError, "cannot write '" + path.string() + "'");
  }
  out << SerializeDataset(dataset, format);
}

DatasetStats ComputeStats(const Dataset &dataset) {
  if (dataset.sentences.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "dataset is empty");
  }
  DatasetStats st;
  st.num_sentences = dataset.sentences.size();
  for (const auto &s : dataset.sentences) {
    st.num_words += SplitWhitespace(s.text).size();
    for (const auto &q : s.quads) {
      ++st.num_quads;
      const bool ia = q.aspect.implicit();
      const bool io = q.opinion.implicit();
      if (!ia && !io) ++st.ea_eo;
      if (ia && !io) ++st.ia_eo;
      if (!ia && io) ++st.ea_io;
      if (ia && io) ++st.ia_io;
    }
  }
  st.num_categories = dataset.Categories().size();
  const double n = static_cast<double>(st.num_sentences);
  st.words_per_sentence = static_cast<double>(st.num_words) / n;
  st.quads_per_sentence = static_cast<double>(st.num_quads) / n;
  if (st.num_categories > 0) {
    st.mean_instances_per_category = static_cast<double>(st.num_quads) /
                                     static_cast<double>(st.num_categories);
  }
  return st;
}

std::string StatsTsvHeader() {
  return "dataset\t#S\t#W\t#W/S\tEA&EO\tIA&EO\tEA&IO\tIA&IO\t#Q\t#Q/S\t#C\t#M(C)";
}

std::string StatsTsvRow(std::string_view name, const DatasetStats &st) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "%.*s\t%zu\t%zu\t%.6f\t%zu\t%zu\t%zu\t%zu\t%zu\t%.6f\t%zu\t%.6f",
                static_cast<int>(name.size()), name.data(), st.num_sentences,
                st.num_words, st.words_per_sentence, st.ea_eo, st.ia_eo,
                st.ea_io, st.ia_io, st.num_quads, st.quads_per_sentence,
                st.num_categories, st.mean_instances_per_category);
  return buf;
}

std::map<std::string, std::size_t> CategoryCounts(const Dataset &dataset) {
  std::map<std::string, std::size_t> counts;
  for (const auto &s : dataset.sentences) {
    for (const auto &q : s.quads) ++counts[q.category];
  }
  return counts;
}

std::vector<Bucket> ParseBuckets(std::string_view spec) {
  std::vector<Bucket> buckets;
  auto parse_num = [&](std::string_view s) {
    s = Trim(s);
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
      throw Error(ErrorCode::kInvalidBuckets,
                  "bad bucket bound '" + std::string(s) + "'");
    }
    return v;
  };
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    std::size_t end = spec.find(',', pos);
    if (end == std::string_view::npos) end = spec.size();
    const std::string_view item = spec.substr(pos, end - pos);
    const std::size_t dash = item.find('-');
    if (dash == std::string_view::npos) {
      const std::size_t v = parse_num(item);
      buckets.push_back({v, v});
    } else {
      buckets.push_back({parse_num(item.substr(0, dash)),
                         parse_num(item.substr(dash + 1))});
    }
    pos = end + 1;
  }
  return buckets;
}

std::vector<std::size_t> CategoryHistogram(const Dataset &dataset,
                                           std::span<const Bucket> buckets) {
  if (buckets.empty()) throw Error(ErrorCode::kInvalidBuckets, "no buckets");
  std::vector<Bucket> sorted(buckets.begin(), buckets.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const Bucket &a, const Bucket &b) { return a.lo < b.lo; });
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i].lo > sorted[i].hi) {
      throw Error(ErrorCode::kInvalidBuckets, "inverted bucket");
    }
    if (i > 0 && sorted[i].lo != sorted[i - 1].hi + 1) {
      throw Error(ErrorCode::kInvalidBuckets,
                  sorted[i].lo <= sorted[i - 1].hi ? "overlapping buckets"
                                                   : "gap between buckets");
    }
  }
  std::vector<std::size_t> counts(buckets.size(), 0);
  for (const auto &[category, n] : CategoryCounts(dataset)) {
    bool placed = false;
    for (std::size_t b = 0; b < buckets.size(); ++b) {
      if (n >= buckets[b].lo && n <= buckets[b].hi) {
        ++counts[b];
        placed = true;
        break;
      }
    }
    if (!placed) {
      throw Error(ErrorCode::kInvalidBuckets,
                  "category '" + category + "' with " + std::to_string(n) +
                      " instances falls outside every bucket");
    }
  }
  return counts;
}

}  // namespace bvsp
