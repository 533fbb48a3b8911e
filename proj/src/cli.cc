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

#include "bvsp/cli.h"

#include <algorithm>
#include <filesystem>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "bvsp/aggregation.h"
#include "bvsp/dataset_io.h"
#include "bvsp/error.h"
#include "bvsp/evaluation.h"
#include "bvsp/fewshot.h"
#include "bvsp/json_io.h"
#include "bvsp/pipeline.h"
#include "bvsp/remote.h"
#include "bvsp/scoring.h"
#include "bvsp/selection.h"
#include "bvsp/template.h"
#include "bvsp/text.h"

#ifndef BVSP_DEFAULT_DATA
#define BVSP_DEFAULT_DATA "data/fixture12.txt"
#endif

namespace bvsp {

namespace {

namespace fs = std::filesystem;

// Bad flag combinations found after CLI11 has parsed.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<std::string> SplitCommas(std::string_view s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t end = s.find(',', pos);
    if (end == std::string_view::npos) end = s.size();
    const auto item = Trim(s.substr(pos, end - pos));
    if (!item.empty()) out.emplace_back(item);
    pos = end + 1;
  }
  return out;
}

struct DataFlags {
  std::string path;
  std::string format = "quad-lines";
};

void AddFormat(CLI::App *cmd, DataFlags &f) {
  cmd->add_option("--format", f.format, "quad-lines or jsonl")
      ->check(CLI::IsMember({"quad-lines", "jsonl"}))
      ->capture_default_str();
}

Dataset Load(const std::string &path, const std::string &format, std::ostream &err) {
  std::vector<LoadWarning> warnings;
  Dataset d = LoadDataset(path, ParseDataFormat(format), &warnings);
  for (const auto &w : warnings) {
    err << "warning: " << path << ":" << w.line << ": " << w.message << "\n";
  }
  return d;
}

struct BackendFlags {
  std::string scorer = "reference";
  std::string endpoint;
  int timeout_ms = 30000;
  std::size_t top_m = 50;
  std::string mode = "trigram";
};

void AddBackend(CLI::App *cmd, BackendFlags &f) {
  cmd->add_option("--scorer", f.scorer, "reference (ref) or remote")
      ->check(CLI::IsMember({"reference", "ref", "remote"}))
      ->capture_default_str();
  cmd->add_option("--endpoint", f.endpoint, "remote server URL")
      ->envname("BVSP_ENDPOINT");
  cmd->add_option("--timeout-ms", f.timeout_ms, "remote request timeout")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--top-m", f.top_m, "distribution entries per token")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--reference-mode", f.mode, "trigram or echo")
      ->check(CLI::IsMember({"trigram", "echo"}))
      ->capture_default_str();
}

struct Backend {
  std::shared_ptr<const Scorer> scorer;
  std::shared_ptr<const Generator> generator;
};

Backend MakeBackend(const BackendFlags &f, std::uint64_t seed,
                    std::vector<std::string> categories) {
  Backend b;
  if (f.scorer == "remote") {
    if (f.endpoint.empty()) {
      throw UsageError("--scorer remote needs --endpoint or BVSP_ENDPOINT");
    }
    RemoteConfig config;
    config.endpoint = f.endpoint;
    config.timeout_ms = f.timeout_ms;
    config.top_m = f.top_m;
    auto client = std::make_shared<RemoteClient>(config);
    b.scorer = client;
    b.generator = client;
    return b;
  }
  ReferenceScorerConfig sc;
  sc.seed = seed;
  sc.top_m = f.top_m;
  sc.mode = f.mode == "echo" ? ReferenceScorerConfig::Mode::kEcho
                             : ReferenceScorerConfig::Mode::kTrigram;
  b.scorer = std::make_shared<ReferenceScorer>(sc);
  ReferenceGeneratorConfig gc;
  gc.seed = seed;
  gc.categories = std::move(categories);
  b.generator = std::make_shared<ReferenceGenerator>(gc);
  return b;
}

Json BackendJson(const BackendFlags &f) {
  Json j;
  j["scorer"] = f.scorer == "ref" ? "reference" : f.scorer;
  if (f.scorer == "remote") {
    j["endpoint"] = f.endpoint;
    j["timeout_ms"] = f.timeout_ms;
  } else {
    j["reference_mode"] = f.mode;
  }
  j["top_m"] = f.top_m;
  return j;
}

// Writes `content` to `path` with its manifest, or to `out` when no path.
void Emit(const std::string &path, const std::string &content, Manifest manifest,
          std::ostream &out) {
  if (path.empty()) {
    out << content;
    return;
  }
  WriteFile(path, content);
  manifest.outputs.push_back(path);
  WriteManifests(manifest);
}

std::vector<Template> ResolveTemplates(const std::string &csv) {
  if (csv.empty()) return ListTemplates();
  return TemplatesById(SplitCommas(csv));
}

std::vector<std::string> Ids(std::span<const Template> templates) {
  std::vector<std::string> out;
  for (const auto &t : templates) out.push_back(t.id);
  return out;
}

std::size_t ResolveTau(std::size_t tau_flag, std::size_t k) {
  return tau_flag == 0 ? DefaultTau(k) : tau_flag;
}

// ---------------------------------------------------------------------------

struct TemplatesCmd {
  std::string format = "tsv";
  std::string out_path;

  void Register(CLI::App &app, CLI::App *&cmd) {
    cmd = app.add_subcommand("templates", "List the template inventory");
    cmd->add_option("--format", format, "tsv or json")
        ->check(CLI::IsMember({"tsv", "json"}))
        ->capture_default_str();
    cmd->add_option("--out", out_path, "output file");
  }

  void Run(std::ostream &out) const {
    const SentimentQuad example{Term::Explicit("room"), Term::Explicit("clean"),
                                "room_overall", Polarity::kPositive};
    const SurfaceQuad surface = Project(example);
    std::string content;
    if (format == "tsv") {
      content = "id\tkind\telement_order\texample\n";
      for (const auto &t : ListTemplates()) {
        content += t.id + "\t" + TemplateKindName(t.kind) + "\t" +
                   t.ElementOrderString() + "\t" +
                   Render(std::span(&surface, 1), t).text + "\n";
      }
    } else {
      Json arr = Json::array();
      for (const auto &t : ListTemplates()) {
        Json j;
        j["id"] = t.id;
        j["kind"] = TemplateKindName(t.kind);
        j["element_order"] = t.ElementOrderString();
        j["linking_literals"] = t.linking_literals;
        j["example"] = Render(std::span(&surface, 1), t).text;
        arr.push_back(std::move(j));
      }
      content = arr.dump(2) + "\n";
    }
    Manifest m;
    m.command = "templates";
    m.config = {{"format", format}};
    Emit(out_path, content, m, out);
  }
};

struct RenderCmd {
  std::string template_id;
  DataFlags data;
  std::string out_path;

  void Register(CLI::App &app, CLI::App *&cmd) {
    cmd = app.add_subcommand("render", "Render gold quads as target sequences");
    cmd->add_option("--template", template_id, "template id")->required();
    cmd->add_option("--data", data.path, "dataset file")->required();
    AddFormat(cmd, data);
    cmd->add_option("--out", out_path, "output file (id<TAB>target lines)");
  }

  void Run(std::ostream &out, std::ostream &err) const {
    const Template &t = FindTemplate(template_id);
    const Dataset d = Load(data.path, data.format, err);
    std::string content;
    for (const auto &s : d.sentences) {
      if (s.quads.empty()) continue;
      std::vector<SurfaceQuad> surface;
      for (const auto &q : s.quads) surface.push_back(Project(q));
      try {
        content += s.id + "\t" + Render(surface, t).text + "\n";
      } catch (const Error &e) {
        err << "warning: sentence " << s.id << " skipped: " << e.what() << "\n";
      }
    }
    Manifest m;
    m.command = "render";
    m.config = {{"template", template_id}, {"format", data.format}};
    m.inputs = {data.path};
    Emit(out_path, content, m, out);
  }
};

struct ParseCmd {
  std::string template_id;
  std::string in_path;
  std::string text;
  std::string out_path;

  void Register(CLI::App &app, CLI::App *&cmd) {
    cmd = app.add_subcommand("parse", "Parse generated target sequences into quads");
    cmd->add_option("--template", template_id, "template id")->required();
    auto *in = cmd->add_option("--in", in_path, "file with one target sequence per line");
    auto *tx = cmd->add_option("--text", text, "a single target sequence");
    in->excludes(tx);
    cmd->add_option("--out", out_path, "output JSONL");
  }

  void Run(std::ostream &out) const {
    const Template &t = FindTemplate(template_id);
    std::vector<std::string> lines;
    if (!in_path.empty()) {
      std::istringstream in(ReadFile(in_path));
      for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
      }
    } else {
      lines.push_back(text);
    }
    std::vector<Json> records;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      const ParseResult r = Parse(lines[i], t);
      std::vector<SentimentQuad> quads;
      for (const auto &s : r.quads) quads.push_back(Unproject(s));
      Json j;
      j["line"] = i + 1;
      j["quads"] = QuadsToJson(quads);
      j["malformed"] = r.malformed;
      records.push_back(std::move(j));
    }
    Manifest m;
    m.command = "parse";
    m.config = {{"template", template_id}};
    if (!in_path.empty()) m.inputs = {in_path};
    Emit(out_path, WriteJsonLines(records), m, out);
  }
};

struct SelectCmd {
  std::size_t k = 3;
  DataFlags support;
  BackendFlags backend;
  std::uint64_t seed = 0;
  std::string strategy = "js-min";
  std::size_t jobs = 1;
  std::string templates;
  std::string out_path;

  void Register(CLI::App &app, CLI::App *&cmd) {
    cmd = app.add_subcommand("select", "Select the k most correlated templates");
    cmd->add_option("--k", k, "number of templates")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--support", support.path, "support set file")->required();
    AddFormat(cmd, support);
    AddBackend(cmd, backend);
    cmd->add_option("--seed", seed, "seed")->capture_default_str();
    cmd->add_option("--strategy", strategy,
                    "js-min, js-max, entropy-min, entropy-max or random")
        ->capture_default_str();
    cmd->add_option("--jobs", jobs, "worker threads")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--templates", templates, "comma-separated candidate ids (default: all)");
    cmd->add_option("--out", out_path, "correlation matrix TSV");
  }

  void Run(std::ostream &out, std::ostream &err) const {
    const SelectionStrategy strat = ParseSelectionStrategy(strategy);
    const Dataset d = Load(support.path, support.format, err);
    const auto candidates = ResolveTemplates(templates);
    const Backend b = MakeBackend(backend, seed, d.Categories());
    const SelectionOutcome sel =
        SelectForSupport(d.sentences, candidates, *b.scorer, k, strat, seed, jobs);
    if (sel.correlation.unrenderable > 0) {
      err << "warning: " << sel.correlation.unrenderable
          << " (instance, template) pairs could not be rendered\n";
    }
    std::string ids;
    for (const auto &id : sel.selected) ids += id + "\n";
    if (!out_path.empty()) {
      Manifest m;
      m.command = "select";
      m.config = BackendJson(backend);
      m.config["k"] = k;
      m.config["seed"] = seed;
      m.config["strategy"] = strategy;
      m.config["templates"] = Ids(candidates);
      m.config["selected"] = sel.selected;
      m.inputs = {support.path};
      Emit(out_path, sel.correlation.matrix.ToTsv(), m, out);
    }
    out << ids;
  }
};

struct PredictCmd {
  DataFlags data;
  DataFlags support;
  std::string templates;
  std::size_t k_templates = 3;
  std::size_t tau = 0;
  std::string aggregation = "vote";
  std::string selection = "js-min";
  BackendFlags backend;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  std::string out_path;
  CLI::Option *templates_opt = nullptr;

  void Register(CLI::App &app, CLI::App *&cmd) {
    cmd = app.add_subcommand("predict", "Predict quads with several templates and aggregate");
    cmd->add_option("--data", data.path, "sentences to predict")->required();
    AddFormat(cmd, data);
    templates_opt = cmd->add_option("--templates", templates, "comma-separated template ids");
    auto *sup = cmd->add_option("--support", support.path,
                                "support set used to select templates");
    templates_opt->excludes(sup);
    cmd->add_option("--support-format", support.format, "quad-lines or jsonl")
        ->check(CLI::IsMember({"quad-lines", "jsonl"}))
        ->capture_default_str();
    cmd->add_option("--k-templates", k_templates, "templates to select with --support")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--tau", tau, "vote threshold (default: ceil(k/2))")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--aggregation", aggregation, "vote, rank or rand")
        ->check(CLI::IsMember({"vote", "rank", "rand"}))
        ->capture_default_str();
    cmd->add_option("--selection-strategy", selection, "see select --strategy")
        ->capture_default_str();
    AddBackend(cmd, backend);
    cmd->add_option("--seed", seed, "seed")->capture_default_str();
    cmd->add_option("--jobs", jobs, "worker threads")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--out", out_path, "predictions JSONL");
  }

  void Run(std::ostream &out, std::ostream &err) const {
    if (templates.empty() && support.path.empty()) {
      throw UsageError("predict needs --templates or --support");
    }
    const Dataset d = Load(data.path, data.format, err);
    Manifest m;
    m.command = "predict";
    m.inputs = {data.path};
    std::vector<std::string> categories = d.Categories();
    std::optional<Dataset> sup;
    if (!support.path.empty()) {
      sup = Load(support.path, support.format, err);
      for (const auto &c : sup->Categories()) categories.push_back(c);
      std::sort(categories.begin(), categories.end());
      categories.erase(std::unique(categories.begin(), categories.end()),
                       categories.end());
      m.inputs.push_back(support.path);
    }
    const Backend b = MakeBackend(backend, seed, categories);
    std::vector<Template> chosen;
    if (sup) {
      const auto sel = SelectForSupport(sup->sentences, ListTemplates(), *b.scorer,
                                        k_templates, ParseSelectionStrategy(selection),
                                        seed, jobs);
      chosen = TemplatesById(sel.selected);
    } else {
      chosen = ResolveTemplates(templates);
    }
    const AggregationStrategy agg = ParseAggregationStrategy(aggregation);
    const std::size_t t = ResolveTau(tau, chosen.size());
    const auto preds =
        Predict(d.sentences, chosen, *b.generator, b.scorer.get(), agg, t, seed, jobs);
    std::vector<Json> records;
    for (const auto &p : preds) records.push_back(PredictionToJson(p));
    m.config = BackendJson(backend);
    m.config["templates"] = Ids(chosen);
    m.config["tau"] = t;
    m.config["aggregation"] = aggregation;
    m.config["seed"] = seed;
    Emit(out_path, WriteJsonLines(records), m, out);
  }
};

struct VoteCmd {
  std::string in_path;
  std::size_t tau = 0;
  std::string strategy = "vote";
  std::uint64_t seed = 0;
  std::string out_path;

  void Register(CLI::App &app, CLI::App *&cmd) {
    cmd = app.add_subcommand("vote", "Re-aggregate per-template predictions");
    cmd->add_option("--in", in_path, "predictions JSONL from predict")->required();
    cmd->add_option("--tau", tau, "vote threshold (default: ceil(k/2))")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--strategy", strategy, "vote, rank or rand")
        ->check(CLI::IsMember({"vote", "rank", "rand"}))
        ->capture_default_str();
    cmd->add_option("--seed", seed, "seed for rand")->capture_default_str();
    cmd->add_option("--out", out_path, "predictions JSONL");
  }

  void Run(std::ostream &out) const {
    const AggregationStrategy agg = ParseAggregationStrategy(strategy);
    std::vector<Json> records;
    for (const auto &j : ReadJsonLines(ReadFile(in_path))) {
      SentencePrediction p = PredictionFromJson(j);
      const std::size_t t =
          ResolveTau(tau, std::max<std::size_t>(p.per_template.size(), 1));
      p.quads = Aggregate(p.per_template, agg, t, Mix64(seed ^ Fnv1a64(p.id)));
      records.push_back(PredictionToJson(p));
    }
    Manifest m;
    m.command = "vote";
    m.config = {{"tau", tau}, {"strategy", strategy}, {"seed", seed}};
    m.inputs = {in_path};
    Emit(out_path, WriteJsonLines(records), m, out);
  }
};

struct EvalCmd {
  DataFlags gold;
  std::string pred_path;
  std::string report_path;
  bool macro = false;

  void Register(CLI::App &app, CLI::App *&cmd) {
    cmd = app.add_subcommand("eval", "Exact-match precision, recall and F1");
    cmd->add_option("--gold", gold.path, "gold dataset")->required();
    AddFormat(cmd, gold);
    cmd->add_option("--pred", pred_path, "predictions JSONL")->required();
    cmd->add_option("--report", report_path, "report JSON");
    cmd->add_flag("--macro", macro, "also report per-sentence averages");
  }

  void Run(std::ostream &out, std::ostream &err) const {
    const Dataset d = Load(gold.path, gold.format, err);
    std::vector<SentenceQuads> pred;
    for (const auto &j : ReadJsonLines(ReadFile(pred_path))) {
      SentencePrediction p = PredictionFromJson(j);
      pred.push_back({p.id, std::move(p.quads)});
    }
    const auto report = Evaluate(ToSentenceQuads(d.sentences), pred, {macro});
    Manifest m;
    m.command = "eval";
    m.config = {{"format", gold.format}, {"macro", macro}};
    m.inputs = {gold.path, pred_path};
    Emit(report_path, ReportToJson(report).dump(2) + "\n", m, out);
  }
};

Json EpisodesFile(const std::string &data_path, const std::string &format,
                  std::size_t shots, std::size_t runs, std::uint64_t seed,
                  std::span<const Episode> episodes) {
  Json j;
  j["data"] = fs::absolute(data_path).lexically_normal().string();
  j["data_sha256"] = FileSha256(data_path);
  j["format"] = format;
  j["shots"] = shots;
  j["runs"] = runs;
  j["seed"] = seed;
  Json arr = Json::array();
  for (const auto &e : episodes) arr.push_back(EpisodeToJson(e));
  j["episodes"] = std::move(arr);
  return j;
}

struct EpisodesCmd {
  DataFlags data;
  std::size_t shots = 1;
  std::size_t runs = 5;
  std::uint64_t seed = 42;
  std::string out_path;

  void Register(CLI::App &app, CLI::App *&cmd) {
    cmd = app.add_subcommand("episodes", "Sample k-shot support/query episodes");
    cmd->add_option("--data", data.path, "pool dataset")->required();
    AddFormat(cmd, data);
    cmd->add_option("--shots", shots, "instances per category")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--runs", runs, "episodes")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--seed", seed, "seed of the first run")->capture_default_str();
    cmd->add_option("--out", out_path, "episodes JSON");
  }

  void Run(std::ostream &out, std::ostream &err) const {
    const Dataset d = Load(data.path, data.format, err);
    const auto episodes = SampleEpisodes(d, shots, runs, seed);
    Manifest m;
    m.command = "episodes";
    m.config = {{"format", data.format}, {"shots", shots}, {"runs", runs}, {"seed", seed}};
    m.inputs = {data.path};
    Emit(out_path,
         EpisodesFile(data.path, data.format, shots, runs, seed, episodes).dump(2) + "\n",
         m, out);
  }
};

struct RunCmd {
  std::string episodes_path;
  DataFlags data;
  std::size_t shots = 1;
  std::size_t runs = 5;
  std::uint64_t seed = 42;
  std::size_t k_templates = 3;
  std::size_t tau = 0;
  std::string selection = "js-min";
  std::string aggregation = "vote";
  BackendFlags backend;
  std::size_t jobs = 1;
  std::string out_path;
  std::string predictions_path;
  CLI::Option *data_opt = nullptr;

  void Register(CLI::App &app, CLI::App *&cmd) {
    cmd = app.add_subcommand("run", "Few-shot protocol: select, predict, vote, evaluate");
    auto *ep = cmd->add_option("--episodes", episodes_path, "episodes JSON from 'episodes'");
    data_opt = cmd->add_option("--data", data.path,
                               "pool dataset (default: the bundled fixture)");
    AddFormat(cmd, data);
    auto *sh = cmd->add_option("--shots", shots, "instances per category")
                   ->check(CLI::PositiveNumber)
                   ->capture_default_str();
    auto *ru = cmd->add_option("--runs", runs, "episodes")
                   ->check(CLI::PositiveNumber)
                   ->capture_default_str();
    ep->excludes(data_opt)->excludes(sh)->excludes(ru);
    cmd->add_option("--seed", seed, "seed of the first run")->capture_default_str();
    cmd->add_option("--k-templates", k_templates, "templates per episode")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--tau", tau, "vote threshold (default: ceil(k/2))")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--selection-strategy", selection, "see select --strategy")
        ->capture_default_str();
    cmd->add_option("--aggregation", aggregation, "vote, rank or rand")
        ->check(CLI::IsMember({"vote", "rank", "rand"}))
        ->capture_default_str();
    AddBackend(cmd, backend);
    cmd->add_option("--jobs", jobs, "worker threads")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--out", out_path, "report JSON");
    cmd->add_option("--predictions", predictions_path, "per-run predictions JSONL");
  }

  void Run(std::ostream &out, std::ostream &err) const {
    std::string pool_path = data.path;
    std::string pool_format = data.format;
    std::vector<Episode> episodes;
    Manifest m;
    m.command = "run";
    if (!episodes_path.empty()) {
      Json ej;
      try {
        ej = Json::parse(ReadFile(episodes_path));
        pool_path = ej.at("data").get<std::string>();
        pool_format = ej.at("format").get<std::string>();
        for (const auto &e : ej.at("episodes")) episodes.push_back(EpisodeFromJson(e));
      } catch (const Json::exception &e) {
        throw Error(ErrorCode::kInvalidArgument,
                    "malformed episodes file: " + std::string(e.what()));
      }
      if (ej.contains("data_sha256") && FileSha256(pool_path) != ej["data_sha256"]) {
        throw Error(ErrorCode::kInvalidArgument,
                    "pool file '" + pool_path + "' changed since the episodes were sampled");
      }
      m.inputs = {episodes_path, pool_path};
    } else {
      if (pool_path.empty()) pool_path = BVSP_DEFAULT_DATA;
      m.inputs = {pool_path};
    }
    const Dataset pool = Load(pool_path, pool_format, err);
    if (episodes.empty()) episodes = SampleEpisodes(pool, shots, runs, seed);

    PipelineConfig config;
    config.k_templates = k_templates;
    if (tau != 0) config.tau = tau;
    config.selection = ParseSelectionStrategy(selection);
    config.aggregation = ParseAggregationStrategy(aggregation);
    config.jobs = jobs;
    config.EffectiveTau();

    std::vector<std::vector<std::string>> selected;
    std::vector<Json> prediction_records;
    const auto protocol = RunProtocol(
        pool, episodes, [&](const Episode &e, const EpisodeSplit &split) {
          PipelineConfig c = config;
          c.seed = e.seed;
          const Backend b = MakeBackend(backend, e.seed, pool.Categories());
          EpisodeResult r = RunEpisode(split.support, split.query, *b.scorer,
                                       *b.generator, c);
          selected.push_back(r.selection.selected);
          for (const auto &p : r.predictions) {
            Json j;
            j["run_seed"] = e.seed;
            j["id"] = p.id;
            j["quads"] = QuadsToJson(p.quads);
            prediction_records.push_back(std::move(j));
          }
          return r.report;
        });

    Json report;
    Json cfg = BackendJson(backend);
    cfg["k_templates"] = k_templates;
    cfg["tau"] = config.EffectiveTau();
    cfg["selection_strategy"] = selection;
    cfg["aggregation"] = aggregation;
    cfg["shots"] = episodes.front().shots;
    cfg["runs"] = episodes.size();
    report["config"] = cfg;
    Json body = ProtocolToJson(protocol);
    for (std::size_t i = 0; i < selected.size(); ++i) {
      body["runs"][i]["selected"] = selected[i];
    }
    report["runs"] = body["runs"];
    report["summary"] = body["summary"];
    m.config = cfg;
    m.config["seed"] = seed;
    if (!predictions_path.empty()) {
      Manifest pm = m;
      WriteFile(predictions_path, WriteJsonLines(prediction_records));
      pm.outputs = {predictions_path};
      WriteManifests(pm);
    }
    Emit(out_path, report.dump(2) + "\n", m, out);
  }
};

struct StatsCmd {
  DataFlags data;
  std::string buckets;
  std::string out_path;

  void Register(CLI::App &app, CLI::App *&cmd) {
    cmd = app.add_subcommand("stats", "Corpus statistics");
    cmd->add_option("--data", data.path, "dataset file")->required();
    AddFormat(cmd, data);
    cmd->add_option("--buckets", buckets,
                    "category histogram buckets, e.g. 1-50,51-100,101-1000");
    cmd->add_option("--out", out_path, "output TSV");
  }

  void Run(std::ostream &out, std::ostream &err) const {
    const Dataset d = Load(data.path, data.format, err);
    std::string content = StatsTsvHeader() + "\n" +
                          StatsTsvRow(d.name, ComputeStats(d)) + "\n";
    if (!buckets.empty()) {
      const auto bs = ParseBuckets(buckets);
      const auto counts = CategoryHistogram(d, bs);
      content += "\nbucket\tcategories\n";
      for (std::size_t i = 0; i < bs.size(); ++i) {
        content += std::to_string(bs[i].lo) + "-" + std::to_string(bs[i].hi) + "\t" +
                   std::to_string(counts[i]) + "\n";
      }
    }
    Manifest m;
    m.command = "stats";
    m.config = {{"format", data.format}, {"buckets", buckets}};
    m.inputs = {data.path};
    Emit(out_path, content, m, out);
  }
};

}  // namespace

int RunCli(const std::vector<std::string> &args, std::ostream &out,
           std::ostream &err) {
  CLI::App app{"Template selection, multi-template prediction and evaluation "
               "for aspect sentiment quad prediction",
               "bvsp"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  TemplatesCmd templates;
  RenderCmd render;
  ParseCmd parse;
  SelectCmd select;
  PredictCmd predict;
  VoteCmd vote;
  EvalCmd eval;
  EpisodesCmd episodes;
  RunCmd run;
  StatsCmd stats;
  CLI::App *c_templates, *c_render, *c_parse, *c_select, *c_predict, *c_vote,
      *c_eval, *c_episodes, *c_run, *c_stats;
  templates.Register(app, c_templates);
  render.Register(app, c_render);
  parse.Register(app, c_parse);
  select.Register(app, c_select);
  predict.Register(app, c_predict);
  vote.Register(app, c_vote);
  eval.Register(app, c_eval);
  episodes.Register(app, c_episodes);
  run.Register(app, c_run);
  stats.Register(app, c_stats);

  std::vector<const char *> argv{"bvsp"};
  for (const auto &a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp &) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion &) {
    out << kVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError &e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*c_templates) templates.Run(out);
    if (*c_render) render.Run(out, err);
    if (*c_parse) parse.Run(out);
    if (*c_select) select.Run(out, err);
    if (*c_predict) predict.Run(out, err);
    if (*c_vote) vote.Run(out);
    if (*c_eval) eval.Run(out, err);
    if (*c_episodes) episodes.Run(out, err);
    if (*c_run) run.Run(out, err);
    if (*c_stats) stats.Run(out, err);
  } catch (const UsageError &e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace bvsp
