// Copyright 2026 The g2t Authors.
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


// Command-line front end: preprocess, train, generate, evaluate, gradcheck,
// reward and lexicon-bootstrap.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "g2t/checkpoint.h"
#include "g2t/config.h"
#include "g2t/encoders.h"
#include "g2t/eval.h"
#include "g2t/gradcheck.h"
#include "g2t/graph.h"
#include "g2t/ie_reward.h"
#include "g2t/training.h"
#include "g2t/triple_model.h"
#include "json.hpp"

namespace g2t {
namespace {

// Outputs are written to "<path>.partial" and renamed together on Commit, so a
// failed command leaves none of them behind.
class StagedOutputs {
 public:
  StagedOutputs() = default;
  StagedOutputs(const StagedOutputs&) = delete;
  StagedOutputs& operator=(const StagedOutputs&) = delete;
  ~StagedOutputs() {
    if (!committed_) {
      for (const auto& [tmp, path] : files_) std::remove(tmp.c_str());
    }
  }

  std::string Stage(const std::string& path) {
    files_.emplace_back(path + ".partial", path);
    return files_.back().first;
  }

  void Commit() {
    for (const auto& [tmp, path] : files_) {
      std::error_code ec;
      std::filesystem::rename(tmp, path, ec);
      if (ec) throw std::runtime_error("cannot write " + path + ": " + ec.message());
    }
    committed_ = true;
  }

 private:
  std::vector<std::pair<std::string, std::string>> files_;
  bool committed_ = false;
};

std::ofstream OpenOut(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << std::setprecision(17);
  return out;
}

void CloseOut(std::ofstream& out, const std::string& path) {
  out.close();
  if (!out) throw std::runtime_error("error writing " + path);
}

struct ConfigFlags {
  std::string file;
  std::vector<std::string> sets;
  std::map<std::string, std::string> values;
};

std::string FlagName(const std::string& key) {
  std::string f = "--" + key;
  for (auto& c : f) {
    if (c == '_') c = '-';
  }
  return f;
}

void AddConfigFlags(CLI::App* app, ConfigFlags& flags, const std::vector<std::string>& keys) {
  app->add_option("--config", flags.file, "key=value configuration file")
      ->check(CLI::ExistingFile);
  app->add_option("--set", flags.sets, "configuration override key=value (repeatable)");
  for (const auto& key : keys) {
    app->add_option(FlagName(key), flags.values[key], "overrides config key " + key);
  }
}

// Flag over file over `base`.
TrainConfig ResolveConfig(const ConfigFlags& flags, TrainConfig base = {}) {
  if (!flags.file.empty()) ApplyConfigFile(flags.file, base);
  for (const auto& kv : flags.sets) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value, got " + kv);
    base.Set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  for (const auto& [key, value] : flags.values) {
    if (!value.empty()) base.Set(key, value);
  }
  base.Validate();
  return base;
}

const std::vector<std::string> kModelKeys = {
    "lr",         "hybrid_lr", "batch_size", "gamma",     "epochs",   "ce_pretrain_epochs",
    "hidden",     "embed",     "gcn_layers", "max_len",   "seed",     "masking",
    "clip_norm",  "min_freq",  "freeze_embeddings"};

std::vector<MaskedExample> MaskAll(const std::vector<Example>& data, bool masking,
                                   const std::string& types_path) {
  TypeDict types;
  if (!types_path.empty()) types = LoadTypeDict(types_path);
  std::vector<MaskedExample> out;
  out.reserve(data.size());
  for (const auto& ex : data) out.push_back(masking ? MaskEntities(ex, types) : WrapUnmasked(ex));
  return out;
}

void DumpGraphs(const std::vector<MaskedExample>& data, std::ostream& out) {
  for (size_t i = 0; i < data.size(); ++i) {
    const auto& triples = data[i].example.triples;
    out << "## example " << i + 1 << "\n# entity graph\n";
    DumpEntityGraph(BuildEntityGraph(triples), out);
    out << "# meta-paths\n";
    DumpMetaPaths(ComputeMetaPaths(BuildEntityGraph(triples)), out);
    out << "# levi graph\n";
    DumpLeviGraph(BuildLeviGraph(triples), out);
  }
}

nlohmann::json TriplesJson(const std::vector<Triple>& triples) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& t : triples) j.push_back({t.subject, t.relation, t.object});
  return j;
}

std::unique_ptr<Extractor> MakeExtractor(const std::string& lexicon_path,
                                         const std::string& command,
                                         const std::vector<MaskedExample>& bootstrap_from,
                                         int top_k) {
  if (!command.empty()) return std::make_unique<ProcessExtractor>(command);
  if (!lexicon_path.empty()) {
    return std::make_unique<PatternExtractor>(RelationLexicon::Load(lexicon_path));
  }
  std::vector<Example> plain;
  for (const auto& m : bootstrap_from) plain.push_back(m.example);
  return std::make_unique<PatternExtractor>(BootstrapLexicon(plain, top_k));
}

std::vector<SizeBucket> ParseBuckets(const std::string& text) {
  std::vector<SizeBucket> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto dash = item.find('-');
    if (dash == std::string::npos) throw std::invalid_argument("bucket must look like 1-3: " + item);
    SizeBucket b{std::stoi(item.substr(0, dash)), std::stoi(item.substr(dash + 1))};
    if (b.min_size < 1 || b.max_size < b.min_size) {
      throw std::invalid_argument("bad bucket " + item);
    }
    out.push_back(b);
  }
  return out;
}

// ---------------------------------------------------------------------------

struct PreprocessArgs {
  std::string data, types, out_dir;
  bool dump_graphs = false;
  ConfigFlags config;
};

void RunPreprocess(const PreprocessArgs& a) {
  TrainConfig config = ResolveConfig(a.config);
  auto masked = MaskAll(LoadDataset(a.data), config.masking, a.types);
  Vocab vocab = BuildVocab(masked, config.min_freq);
  std::filesystem::create_directories(a.out_dir);
  const std::string header = "g2t preprocess " + config.ToString();

  StagedOutputs staged;
  const std::string data_path = a.out_dir + "/masked.jsonl";
  std::string tmp = staged.Stage(data_path);
  auto out = OpenOut(tmp);
  out << "# " << header << "\n";
  for (const auto& m : masked) {
    nlohmann::json refs = nlohmann::json::array();
    for (const auto& r : m.example.references) refs.push_back(Join(r));
    nlohmann::json entities = nlohmann::json::object();
    for (const auto& [eid, info] : m.entity_map) {
      entities[std::to_string(eid)] = {info.surface, info.type};
    }
    out << nlohmann::json{{"triples", TriplesJson(m.example.triples)},
                          {"references", refs},
                          {"entity_map", entities}}
               .dump()
        << "\n";
  }
  CloseOut(out, data_path);
  vocab.Save(staged.Stage(a.out_dir + "/vocab.txt"), header);
  if (a.dump_graphs) {
    const std::string graphs_path = a.out_dir + "/graphs.txt";
    tmp = staged.Stage(graphs_path);
    auto g = OpenOut(tmp);
    g << "# " << header << "\n";
    DumpGraphs(masked, g);
    CloseOut(g, graphs_path);
  }
  staged.Commit();
  std::cerr << masked.size() << " examples, vocabulary " << vocab.size() << " -> " << a.out_dir
            << "\n";
}

struct TrainArgs {
  std::string train, valid, types, vocab, out, report, lexicon, extractor_cmd, word_vectors;
  int top_k = 5;
  ConfigFlags config;
};

void RunTrain(const TrainArgs& a) {
  TrainConfig config = ResolveConfig(a.config);
  auto train = MaskAll(LoadDataset(a.train), config.masking, a.types);
  std::vector<MaskedExample> valid;
  if (!a.valid.empty()) valid = MaskAll(LoadDataset(a.valid), config.masking, a.types);
  Vocab vocab = a.vocab.empty() ? BuildVocab(train, config.min_freq) : Vocab::Load(a.vocab);
  auto extractor = MakeExtractor(a.lexicon, a.extractor_cmd, train, a.top_k);

  StagedOutputs staged;
  const std::string report_path = a.report.empty() ? a.out + ".report.jsonl" : a.report;
  std::string report_tmp = staged.Stage(report_path);
  auto report = OpenOut(report_tmp);
  report << nlohmann::json{{"header", "g2t train"}, {"config", config.ToString()}}.dump() << "\n";
  TrainHooks hooks;
  if (!a.word_vectors.empty()) {
    hooks.init = [&](ModelParams& params) {
      int rows = LoadWordVectors(a.word_vectors, vocab, params);
      std::cerr << "initialised " << rows << " of " << vocab.size() << " embeddings from "
                << a.word_vectors << "\n";
    };
  }
  hooks.on_epoch = [&](const EpochRecord& r) {
    report << r.ToJson() << "\n";
    report.flush();
    std::cerr << "epoch " << r.epoch << (r.hybrid ? " hybrid" : " ce") << " ce_loss " << r.ce_loss
              << " rl_loss " << r.rl_loss << " reward " << r.mean_reward;
    if (r.valid_bleu) std::cerr << " valid_bleu " << *r.valid_bleu;
    std::cerr << "\n";
  };
  TrainResult result = Train(config, train, valid, vocab, extractor.get(), hooks);
  CloseOut(report, report_path);
  SaveCheckpoint(MakeCheckpoint(config, vocab, result.best, &result.adam), staged.Stage(a.out));
  staged.Commit();
}

struct GenerateArgs {
  std::string checkpoint, data, types, out;
  bool dump_graphs = false;
  ConfigFlags config;
};

void RunGenerate(const GenerateArgs& a) {
  Checkpoint ckpt = LoadCheckpoint(a.checkpoint);
  TrainConfig config = ResolveConfig(a.config, ckpt.config);
  ModelParams params = RestoreModel(ckpt);
  auto data = MaskAll(LoadDataset(a.data), config.masking, a.types);

  StagedOutputs staged;
  std::string tmp = staged.Stage(a.out);
  auto out = OpenOut(tmp);
  for (const auto& m : data) {
    Tokens text = Generate(params, PrepareGraphs(m.example.triples, ckpt.vocab), ckpt.vocab,
                           config.max_len);
    out << Join(config.masking ? UnmaskText(text, m.entity_map) : text) << "\n";
  }
  CloseOut(out, a.out);
  // The text file stays line-aligned with the data; provenance goes alongside.
  const std::string meta_path = a.out + ".provenance";
  tmp = staged.Stage(meta_path);
  auto meta = OpenOut(tmp);
  meta << "# g2t generate checkpoint=" << a.checkpoint << " data=" << a.data << " "
       << config.ToString() << "\n";
  CloseOut(meta, meta_path);
  if (a.dump_graphs) {
    const std::string graphs_path = a.out + ".graphs.txt";
    tmp = staged.Stage(graphs_path);
    auto g = OpenOut(tmp);
    g << "# g2t generate " << config.ToString() << "\n";
    DumpGraphs(data, g);
    CloseOut(g, graphs_path);
  }
  staged.Commit();
}

struct EvaluateArgs {
  std::string data, candidates, json, buckets = "1-3,4-7";
};

void RunEvaluate(const EvaluateArgs& a) {
  auto data = LoadDataset(a.data);
  EvalReport report = EvaluateSplit(ReadLines(a.candidates), data, ParseBuckets(a.buckets));
  StagedOutputs staged;
  if (!a.json.empty()) {
    std::string tmp = staged.Stage(a.json);
    auto out = OpenOut(tmp);
    auto j = nlohmann::json::parse(report.ToJson());
    j["header"] = "g2t evaluate";
    j["config"] = {{"data", a.data}, {"candidates", a.candidates}, {"buckets", a.buckets}};
    out << j.dump() << "\n";
    CloseOut(out, a.json);
  }
  staged.Commit();
  report.PrintTable(std::cout);
}

struct GradcheckArgs {
  uint64_t seed = 1;
  double eps = ad::kGradCheckStep;
  double gamma = 0.3;
};

int RunGradcheck(const GradcheckArgs& a) {
  std::vector<GradCheckRow> rows = CheckPrimitives(a.seed, a.eps);
  rows.push_back(CheckComposedLoss(a.seed, a.gamma, a.eps));
  bool ok = true;
  std::printf("%-20s %14s  %s\n", "check", "max rel error", "result");
  for (const auto& r : rows) {
    bool pass = r.max_rel_error < kGradCheckTolerance;
    ok &= pass;
    std::printf("%-20s %14.3e  %s\n", r.name.c_str(), r.max_rel_error, pass ? "PASS" : "FAIL");
  }
  return ok ? 0 : 1;
}

struct RewardArgs {
  std::string data, texts, lexicon, extractor_cmd, out;
  int top_k = 5;
};

void RunReward(const RewardArgs& a) {
  auto data = LoadDataset(a.data);
  std::vector<Tokens> texts;
  if (a.texts.empty()) {
    for (const auto& ex : data) texts.push_back(ex.references.front());
  } else {
    texts = ReadLines(a.texts);
    if (texts.size() != data.size()) {
      throw std::invalid_argument("reward: " + std::to_string(texts.size()) + " texts for " +
                                  std::to_string(data.size()) + " examples");
    }
  }
  std::vector<MaskedExample> wrapped;
  for (const auto& ex : data) wrapped.push_back(WrapUnmasked(ex));
  auto extractor = MakeExtractor(a.lexicon, a.extractor_cmd, wrapped, a.top_k);

  StagedOutputs staged;
  std::ofstream out;
  std::string tmp;
  if (!a.out.empty()) {
    tmp = staged.Stage(a.out);
    out = OpenOut(tmp);
    out << nlohmann::json{{"header", "g2t reward"},
                          {"config", {{"data", a.data}, {"texts", a.texts}, {"lexicon", a.lexicon},
                                      {"extractor_cmd", a.extractor_cmd}}}}
               .dump()
        << "\n";
  }
  double total = 0.0;
  for (size_t i = 0; i < data.size(); ++i) {
    std::set<Triple> found = extractor->Extract(texts[i], data[i].triples);
    int r = Reward(found, data[i].triples);
    total += r;
    std::vector<Triple> list(found.begin(), found.end());
    std::cout << "example " << i + 1 << " reward " << r << " extracted " << TriplesJson(list).dump()
              << "\n";
    if (out.is_open()) {
      out << nlohmann::json{{"example", i + 1}, {"reward", r}, {"extracted", TriplesJson(list)}}
                 .dump()
          << "\n";
    }
  }
  if (out.is_open()) CloseOut(out, a.out);
  staged.Commit();
  std::cout << "mean reward " << (data.empty() ? 0.0 : total / data.size()) << "\n";
}

struct LexiconArgs {
  std::string data, out;
  int top_k = 5;
};

void RunLexicon(const LexiconArgs& a) {
  RelationLexicon lex = BootstrapLexicon(LoadDataset(a.data), a.top_k);
  StagedOutputs staged;
  std::string tmp = staged.Stage(a.out);
  auto out = OpenOut(tmp);
  out << "# g2t lexicon-bootstrap data=" << a.data << " top_k=" << a.top_k << "\n";
  lex.Write(out);
  CloseOut(out, a.out);
  staged.Commit();
  std::cerr << lex.entries().size() << " relations -> " << a.out << "\n";
}

}  // namespace
}  // namespace g2t

int main(int argc, char** argv) {
  using namespace g2t;
  CLI::App app{"Graph-to-text generation with meta-path and GCN encoders"};
  app.require_subcommand(1, 1);

  PreprocessArgs pre;
  auto* p = app.add_subcommand("preprocess", "mask entities, build the vocabulary, dump graphs");
  p->add_option("--data", pre.data, "dataset (JSON lines)")->required()->check(CLI::ExistingFile);
  p->add_option("--types", pre.types, "entity type dictionary (surface TAB type)")
      ->check(CLI::ExistingFile);
  p->add_option("--out-dir", pre.out_dir, "output directory")->required();
  p->add_flag("--dump-graphs", pre.dump_graphs, "also write graphs.txt edge lists");
  AddConfigFlags(p, pre.config, {"masking", "min_freq"});

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "train a model and write a checkpoint");
  t->add_option("--train", tr.train, "training set")->required()->check(CLI::ExistingFile);
  t->add_option("--valid", tr.valid, "validation set")->check(CLI::ExistingFile);
  t->add_option("--types", tr.types, "entity type dictionary")->check(CLI::ExistingFile);
  t->add_option("--vocab", tr.vocab, "vocabulary file (default: built from --train)")
      ->check(CLI::ExistingFile);
  t->add_option("--out", tr.out, "checkpoint path")->required();
  t->add_option("--report", tr.report, "per-epoch report (default: <out>.report.jsonl)");
  t->add_option("--lexicon", tr.lexicon, "trigger lexicon for the reward extractor")
      ->check(CLI::ExistingFile);
  t->add_option("--extractor-cmd", tr.extractor_cmd, "external extractor command");
  t->add_option("--top-k", tr.top_k, "triggers per relation when bootstrapping the lexicon");
  t->add_option("--word-vectors", tr.word_vectors, "pretrained vectors, \"token v1 ... vd\" lines")
      ->check(CLI::ExistingFile);
  AddConfigFlags(t, tr.config, kModelKeys);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "greedy-decode one text per example");
  g->add_option("--checkpoint", gen.checkpoint, "checkpoint")->required()->check(CLI::ExistingFile);
  g->add_option("--data", gen.data, "dataset")->required()->check(CLI::ExistingFile);
  g->add_option("--types", gen.types, "entity type dictionary")->check(CLI::ExistingFile);
  g->add_option("--out", gen.out, "output text file, one line per example")->required();
  g->add_flag("--dump-graphs", gen.dump_graphs, "also write <out>.graphs.txt");
  AddConfigFlags(g, gen.config, {"max_len", "masking"});

  EvaluateArgs ev;
  auto* e = app.add_subcommand("evaluate", "corpus BLEU and TER, overall and per size bucket");
  e->add_option("--data", ev.data, "dataset with references")->required()->check(CLI::ExistingFile);
  e->add_option("--candidates", ev.candidates, "generated texts, line-aligned")
      ->required()
      ->check(CLI::ExistingFile);
  e->add_option("--json", ev.json, "also write the report as JSON");
  e->add_option("--buckets", ev.buckets, "triple-count buckets, e.g. 1-3,4-7");

  GradcheckArgs gc;
  auto* c = app.add_subcommand("gradcheck", "finite-difference checks of every primitive and the loss");
  c->add_option("--seed", gc.seed, "random seed");
  c->add_option("--eps", gc.eps, "finite-difference step");
  c->add_option("--gamma", gc.gamma, "hybrid loss weight");

  RewardArgs rw;
  auto* r = app.add_subcommand("reward", "extract triples from texts and count correct ones");
  r->add_option("--data", rw.data, "dataset with gold triples")->required()->check(CLI::ExistingFile);
  r->add_option("--texts", rw.texts, "texts, line-aligned (default: first references)")
      ->check(CLI::ExistingFile);
  r->add_option("--lexicon", rw.lexicon, "trigger lexicon")->check(CLI::ExistingFile);
  r->add_option("--extractor-cmd", rw.extractor_cmd, "external extractor command");
  r->add_option("--top-k", rw.top_k, "triggers per relation when bootstrapping");
  r->add_option("--out", rw.out, "per-example results (JSON lines)");

  LexiconArgs lx;
  auto* l = app.add_subcommand("lexicon-bootstrap", "derive relation triggers from references");
  l->add_option("--data", lx.data, "dataset")->required()->check(CLI::ExistingFile);
  l->add_option("--out", lx.out, "lexicon path")->required();
  l->add_option("--top-k", lx.top_k, "triggers kept per relation")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*p) RunPreprocess(pre);
    if (*t) RunTrain(tr);
    if (*g) RunGenerate(gen);
    if (*e) RunEvaluate(ev);
    if (*c) return RunGradcheck(gc);
    if (*r) RunReward(rw);
    if (*l) RunLexicon(lx);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
