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

// Acceptance checks, one PASS/FAIL line each. Exit status is the number of
// failures (capped at 1).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "bvsp/aggregation.h"
#include "bvsp/dataset_io.h"
#include "bvsp/evaluation.h"
#include "bvsp/fewshot.h"
#include "bvsp/json_io.h"
#include "bvsp/pipeline.h"
#include "bvsp/rng.h"
#include "bvsp/selection.h"
#include "bvsp/template.h"
#include "test_support.h"

namespace bvsp {
namespace {

namespace fs = std::filesystem;
namespace t = testing;

// Thrown by Require; carries the failure reason.
struct Failure {
  std::string reason;
};

void Require(bool ok, const std::string &reason) {
  if (!ok) throw Failure{reason};
}

std::string Num(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

const double kLn2 = std::log(2.0);

// 1. parse(render(quads)) is the identity for every template.
std::string TemplateRoundTrip() {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(1);
  std::size_t checked = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    std::vector<SentimentQuad> quads;
    const std::size_t n = 1 + rng.Below(4);
    for (std::size_t i = 0; i < n; ++i) quads.push_back(t::RandomQuad(rng));
    const auto surface = t::ProjectAll(quads);
    for (const auto &tpl : ListTemplates()) {
      const ParseResult r = Parse(Render(surface, tpl).text, tpl);
      Require(r.malformed == 0 && r.quads.size() == n,
              tpl.id + " lost clauses on list " + std::to_string(rep));
      for (std::size_t i = 0; i < n; ++i) {
        Require(r.quads[i] == surface[i] && Unproject(r.quads[i]) == quads[i],
                tpl.id + " changed " + ToString(quads[i]));
      }
      ++checked;
    }
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  Require(secs < 5.0, "took " + Num(secs) + " s");
  return std::to_string(checked) + " list/template pairs in " + Num(secs).substr(0, 5) + " s";
}

// 2. Library JS against the dense definition.
std::string JsOracle() {
  Rng rng(2);
  double max_diff = 0.0, max_asym = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const auto p = t::RandomDistribution(rng);
    const auto q = t::RandomDistribution(rng);
    const double pq = JsDivergence(p, q);
    const double qp = JsDivergence(q, p);
    max_diff = std::max(max_diff, std::abs(pq - t::OracleJs(p, q)));
    max_asym = std::max(max_asym, std::abs(pq - qp));
    Require(pq >= 0.0 && pq <= kLn2 + 1e-12, "out of range: " + Num(pq));
    Require(JsDivergence(p, p) == 0.0, "JS(p, p) != 0");
  }
  Require(max_diff < 1e-9, "max |diff| " + Num(max_diff));
  Require(max_asym < 1e-12, "asymmetry " + Num(max_asym));
  return "10000 pairs, max |diff| " + Num(max_diff);
}

// 3. Only element tokens survive filtering.
std::string Filtering() {
  const SurfaceQuad room{"room", "clean", "room_overall", "great"};
  const TargetSequence target = Render(std::span(&room, 1), FindTemplate("paraphrase"));
  Require(target.text == "room_overall is great because room is clean", target.text);
  const ReferenceScorer scorer;
  const ScoredTarget st = scorer.Score("The room is clean .", target, "paraphrase");
  const FilteredRepresentation h = Filter(st, target);
  std::vector<std::string> kept;
  for (const auto &slot : h.slots) {
    for (std::size_t i = 0; i < st.tokens.size(); ++i) {
      if (st.distributions[i].support == slot.distribution.support &&
          st.distributions[i].other_mass == slot.distribution.other_mass) {
        kept.push_back(st.tokens[i].text);
        break;
      }
    }
  }
  Require(kept == std::vector<std::string>{"room_overall", "great", "room", "clean"},
          "kept tokens differ");

  // Tag each token's distribution with its position so slots map back to
  // positions exactly, then check none of them lies on a linking literal.
  Rng rng(3);
  std::size_t slots = 0;
  for (int rep = 0; rep < 500; ++rep) {
    const auto surface = t::ProjectAll(t::RandomQuads(rng, 3));
    if (surface.empty()) continue;
    const Template &tpl = ListTemplates()[rng.Below(ListTemplates().size())];
    const TargetSequence ts = Render(surface, tpl);
    ScoredTarget tagged;
    tagged.target_text = ts.text;
    tagged.template_id = tpl.id;
    tagged.tokens = TokenizeTarget(ts.text);
    for (std::size_t i = 0; i < tagged.tokens.size(); ++i) {
      TokenDistribution d;
      d.support.emplace_back("pos" + std::to_string(i), 1.0);
      tagged.distributions.push_back(d);
    }
    const auto linking = LinkingSpans(ts);
    for (const auto &slot : Filter(tagged, ts).slots) {
      const std::size_t pos = std::stoul(slot.distribution.support[0].first.substr(3));
      const Token &tok = tagged.tokens[pos];
      for (const auto &span : linking) {
        Require(!(span.start <= tok.start && tok.end <= span.end),
                tpl.id + ": linking token '" + tok.text + "' kept in " + ts.text);
      }
      ++slots;
    }
  }
  return "4 element tokens kept; " + std::to_string(slots) + " random slots checked";
}

std::vector<LabeledSentence> RandomSupport(Rng &rng, std::size_t n) {
  std::vector<LabeledSentence> out;
  for (std::size_t i = 0; i < n; ++i) {
    LabeledSentence s;
    s.id = std::to_string(i);
    s.quads = t::RandomQuads(rng, 3);
    s.text = t::RandomPhrase(rng, 8) + " " + t::RandomPhrase(rng, 8);
    out.push_back(s);
  }
  return out;
}

// 4. Correlation matrix and pair-walk selection.
std::string Correlation() {
  Rng rng(4);
  double max_diff = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = 2 + rng.Below(5);
    std::vector<std::size_t> idx(ListTemplates().size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    rng.Shuffle(idx);
    std::vector<Template> templates;
    for (std::size_t i = 0; i < n; ++i) templates.push_back(ListTemplates()[idx[i]]);
    const auto support = RandomSupport(rng, 1 + rng.Below(5));
    const ReferenceScorer scorer({.seed = static_cast<std::uint64_t>(rep)});
    const auto result = ComputeCorrelationMatrix(support, templates, scorer, {2});
    const auto oracle = t::OracleMatrix(support, templates, scorer);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        max_diff = std::max(max_diff, std::abs(result.matrix.at(i, j) - oracle[i * n + j]));
      }
    }
  }
  Require(max_diff < 1e-12, "matrix max |diff| " + Num(max_diff));

  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 4 + rng.Below(5);
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i) ids.push_back("t" + std::to_string(i));
    CorrelationMatrix m(ids);
    std::vector<double> v(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        v[i * n + j] = v[j * n + i] = static_cast<double>(rng.Below(6)) / 10.0;
        m.set(i, j, v[i * n + j]);
        m.set(j, i, v[i * n + j]);
      }
    }
    for (std::size_t k : {2u, 3u, 4u}) {
      Require(SelectTopK(m, k) == t::OracleSelect(ids, v, k),
              "selection differs on matrix " + std::to_string(rep) + ", k=" + std::to_string(k));
    }
  }

  ReferenceScorerConfig echo;
  echo.mode = ReferenceScorerConfig::Mode::kEcho;
  const auto result =
      ComputeCorrelationMatrix(RandomSupport(rng, 5), ListTemplates(), ReferenceScorer(echo), {1});
  for (std::size_t i = 0; i < result.matrix.size(); ++i) {
    for (std::size_t j = 0; j < result.matrix.size(); ++j) {
      Require(result.matrix.at(i, j) == 0.0, "echo matrix entry " + Num(result.matrix.at(i, j)));
    }
  }
  return "matrix max |diff| " + Num(max_diff) + "; 300 selections; echo matrix all zero";
}

std::vector<std::string> KeysOf(const std::vector<SentimentQuad> &qs) {
  std::vector<std::string> out;
  for (const auto &q : qs) out.push_back(CanonicalKey(q));
  std::sort(out.begin(), out.end());
  return out;
}

// 5. Voting against plain counting.
std::string Voting() {
  std::vector<SentimentQuad> universe;
  for (const char *a : {"a", "b", "c"}) {
    universe.push_back({Term::Explicit(a), Term::Implicit(), "food_quality", Polarity::kPositive});
  }
  std::size_t cases = 0;
  for (std::size_t k = 1; k <= 4; ++k) {
    for (std::size_t u = 1; u <= universe.size(); ++u) {
      for (std::uint32_t mask = 0; mask < (1u << (k * u)); ++mask) {
        std::vector<TemplatePrediction> preds(k);
        std::set<std::string> uni, inter;
        for (std::size_t tpl = 0; tpl < k; ++tpl) {
          preds[tpl].template_id = "t" + std::to_string(tpl);
          std::set<std::string> mine;
          for (std::size_t q = 0; q < u; ++q) {
            if (mask >> (tpl * u + q) & 1u) {
              preds[tpl].quads.push_back(universe[q]);
              mine.insert(CanonicalKey(universe[q]));
            }
          }
          uni.insert(mine.begin(), mine.end());
          if (tpl == 0) {
            inter = mine;
          } else {
            std::set<std::string> keep;
            for (const auto &x : inter) {
              if (mine.count(x)) keep.insert(x);
            }
            inter = keep;
          }
        }
        std::vector<std::string> previous;
        for (std::size_t tau = 1; tau <= k; ++tau) {
          std::vector<SentimentQuad> expected;
          for (std::size_t q = 0; q < u; ++q) {
            std::size_t c = 0;
            for (std::size_t tpl = 0; tpl < k; ++tpl) c += mask >> (tpl * u + q) & 1u;
            if (c >= tau) expected.push_back(universe[q]);
          }
          const auto got = KeysOf(Vote(preds, tau));
          Require(got == KeysOf(expected), "count mismatch");
          if (tau > 1) {
            Require(std::includes(previous.begin(), previous.end(), got.begin(), got.end()),
                    "raising tau grew the set");
          }
          if (tau == 1) Require(got == std::vector<std::string>(uni.begin(), uni.end()), "tau=1");
          if (tau == k) Require(got == std::vector<std::string>(inter.begin(), inter.end()), "tau=k");
          previous = got;
          ++cases;
        }
      }
    }
  }
  return std::to_string(cases) + " (prediction set, tau) cases";
}

// 6. Evaluator against quadratic matching.
std::string Evaluator() {
  Rng rng(6);
  for (int rep = 0; rep < 5; ++rep) {
    std::vector<SentenceQuads> gold, pred;
    for (int i = 0; i < 200; ++i) {
      const std::string id = "s" + std::to_string(i);
      auto g = t::RandomQuads(rng, 3);
      std::vector<SentimentQuad> p;
      for (const auto &q : g) {
        if (rng.Uniform() < 0.6) p.push_back(q);
      }
      const auto extra = t::RandomQuads(rng, 2);
      p.insert(p.end(), extra.begin(), extra.end());
      gold.push_back({id, g});
      if (rng.Uniform() < 0.95) pred.push_back({id, p});
    }
    rng.Shuffle(pred);
    const EvalReport report = Evaluate(gold, pred);
    for (int role = -1; role < 4; ++role) {
      t::OracleCounts total;
      for (const auto &g : gold) {
        std::vector<SentimentQuad> p;
        for (const auto &x : pred) {
          if (x.id == g.id) p = x.quads;
        }
        const auto c = t::OracleSentence(g.quads, p, role);
        total.tp += c.tp;
        total.fp += c.fp;
        total.fn += c.fn;
      }
      const Metrics &m = role < 0 ? report.quad : report.elements[static_cast<std::size_t>(role)];
      Require(m.tp == total.tp && m.fp == total.fp && m.fn == total.fn,
              "counts differ for role " + std::to_string(role));
      const double pr = total.tp + total.fp == 0 ? 0.0 : double(total.tp) / double(total.tp + total.fp);
      const double rc = total.tp + total.fn == 0 ? 0.0 : double(total.tp) / double(total.tp + total.fn);
      const double f1 = pr + rc == 0.0 ? 0.0 : 2 * pr * rc / (pr + rc);
      Require(m.precision == pr && m.recall == rc && m.f1 == f1, "ratios differ");
    }
    Require(report.num_explicit + report.num_implicit == report.num_sentences, "partition size");
    Require(report.explicit_subset.tp + report.implicit_subset.tp == report.quad.tp &&
                report.explicit_subset.fp + report.implicit_subset.fp == report.quad.fp &&
                report.explicit_subset.fn + report.implicit_subset.fn == report.quad.fn,
            "partition counts");
  }
  return "5 corpora of 200 sentences, quad and 4 element reports exact";
}

void Shell(const std::string &cmd, const std::string &stdout_path = "/dev/null") {
  if (std::system((cmd + " >" + stdout_path + " 2>/dev/null").c_str()) != 0) {
    throw Failure{"command failed: " + cmd};
  }
}

// 7. Separate processes, different worker counts, identical bytes.
std::string EndToEnd() {
  const fs::path dir = fs::temp_directory_path() / "bvsp_acceptance_e2e";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string tool = BVSP_TOOL;
  const std::string fixture = BVSP_FIXTURE;
  std::vector<std::string> files;
  for (const char *jobs : {"1", "1", "4"}) {
    const std::string tag = (dir / ("j" + std::string(jobs) + "_" + std::to_string(files.size()))).string();
    Shell(tool + " select --k 3 --seed 42 --support " + fixture + " --jobs " + jobs +
          " --out " + tag + ".matrix.tsv", tag + ".selected");
    Shell(tool + " predict --data " + fixture + " --support " + fixture +
          " --k-templates 3 --tau 2 --seed 42 --jobs " + jobs + " --out " + tag + ".pred.jsonl");
    Shell(tool + " run --data " + fixture + " --shots 1 --runs 5 --seed 42 --k-templates 3" +
          " --tau 2 --jobs " + jobs + " --out " + tag + ".report.json --predictions " + tag +
          ".runs.jsonl");
    files.push_back(tag);
  }
  std::size_t compared = 0;
  for (const char *ext : {".selected", ".matrix.tsv", ".pred.jsonl", ".report.json", ".runs.jsonl"}) {
    const std::string first = ReadFile(files[0] + ext);
    Require(!first.empty(), std::string(ext) + " is empty");
    for (std::size_t i = 1; i < files.size(); ++i) {
      Require(ReadFile(files[i] + ext) == first, std::string(ext) + " differs");
      ++compared;
    }
  }
  const std::string selected = ReadFile(files[0] + ".selected");
  Require(std::count(selected.begin(), selected.end(), '\n') == 3, "expected 3 templates");
  fs::remove_all(dir);
  return std::to_string(compared) + " artifact comparisons identical (jobs 1, 1, 4)";
}

// 8. Episode reproducibility, nesting, and run averaging.
std::string FewShot() {
  const Dataset pool = LoadDataset(BVSP_FIXTURE, DataFormat::kQuadLines);
  Rng rng(8);
  for (int rep = 0; rep < 50; ++rep) {
    const std::uint64_t seed = rng.Below(1u << 30);
    Require(SampleEpisode(pool, 2, seed) == SampleEpisode(pool, 2, seed), "not reproducible");
    std::vector<std::string> previous;
    for (std::size_t k = 1; k <= 5; ++k) {
      const Episode e = SampleEpisode(pool, k, seed);
      std::vector<std::string> support = e.support_ids;
      std::sort(support.begin(), support.end());
      Require(std::includes(support.begin(), support.end(), previous.begin(), previous.end()),
              "support for k=" + std::to_string(k) + " does not contain k-1");
      Require(support.size() + e.query_ids.size() == pool.sentences.size(), "split size");
      previous = support;
    }
  }

  const ReferenceScorer scorer;
  const ReferenceGenerator generator({.seed = 42, .categories = pool.Categories()});
  PipelineConfig cfg;
  cfg.seed = 42;
  cfg.tau = 2;
  const auto episodes = SampleEpisodes(pool, 1, 5, 42);
  const ProtocolReport report =
      RunProtocol(pool, episodes, [&](const Episode &, const EpisodeSplit &split) {
        return RunEpisode(split.support, split.query, scorer, generator, cfg).report;
      });
  Require(report.runs.size() == 5, "expected 5 runs");
  double sum = 0.0;
  for (const auto &r : report.runs) {
    const double p = r.quad.tp + r.quad.fp == 0 ? 0.0 : double(r.quad.tp) / double(r.quad.tp + r.quad.fp);
    const double c = r.quad.tp + r.quad.fn == 0 ? 0.0 : double(r.quad.tp) / double(r.quad.tp + r.quad.fn);
    sum += p + c == 0.0 ? 0.0 : 2 * p * c / (p + c);
  }
  const double mean = sum / 5.0;
  const double diff = std::abs(report.summary.at("quad.f1").mean - mean);
  Require(diff < 1e-12, "mean differs by " + Num(diff));
  return "50 seeds reproducible and nested for k=1..5; 5-run mean quad F1 " + Num(mean).substr(0, 8);
}

// 9. Corpus statistics.
std::string Statistics() {
  const DatasetStats s = ComputeStats(LoadDataset(BVSP_FIXTURE, DataFormat::kQuadLines));
  Require(s.num_sentences == 12 && s.num_words == 113 && s.num_quads == 14 &&
              s.num_categories == 4 && s.ea_eo == 9 && s.ia_eo == 2 && s.ea_io == 2 &&
              s.ia_io == 1 && s.mean_instances_per_category == 3.5,
          "fixture stats differ: " + StatsTsvRow("fixture", s));
  const char *corpus = std::getenv("BVSP_CORPUS_DATA");
  if (corpus == nullptr || !fs::exists(corpus)) {
    return "fixture goldens match; corpus row not checked (set BVSP_CORPUS_DATA to a "
           "quad-lines file of the full corpus)";
  }
  const DatasetStats c = ComputeStats(LoadDataset(corpus, DataFormat::kQuadLines));
  Require(c.num_sentences == 12551 && c.num_words == 149016 && c.num_quads == 16383 &&
              c.num_categories == 80,
          "corpus stats differ: " + StatsTsvRow("corpus", c));
  return "fixture goldens match; corpus row matches";
}

}  // namespace
}  // namespace bvsp

int main() {
  using Check = std::pair<const char *, std::function<std::string()>>;
  const std::vector<Check> checks = {
      {"template-roundtrip", bvsp::TemplateRoundTrip},
      {"js-divergence-oracle", bvsp::JsOracle},
      {"filtering", bvsp::Filtering},
      {"correlation-and-selection", bvsp::Correlation},
      {"voting", bvsp::Voting},
      {"evaluator", bvsp::Evaluator},
      {"end-to-end-determinism", bvsp::EndToEnd},
      {"few-shot-protocol", bvsp::FewShot},
      {"statistics", bvsp::Statistics},
  };
  int failures = 0;
  for (const auto &[name, fn] : checks) {
    std::string detail;
    bool ok = false;
    try {
      detail = fn();
      ok = true;
    } catch (const bvsp::Failure &f) {
      detail = f.reason;
    } catch (const std::exception &e) {
      detail = std::string("exception: ") + e.what();
    }
    std::cout << (ok ? "PASS " : "FAIL ") << name << ": " << detail << std::endl;
    failures += ok ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
