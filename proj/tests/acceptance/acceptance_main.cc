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


// Acceptance checks 1-9. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <functional>
#include <string>

#include "g2t/eval.h"
#include "g2t/gradcheck.h"
#include "g2t/graph.h"
#include "g2t/training.h"
#include "meta_path_oracle.h"
#include "synthetic.h"

namespace g2t {
namespace {

using ad::Matrix;
using ad::Tensor;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* fmt, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, fmt, a, b, c);
  return buf;
}

std::vector<MaskedExample> Wrapped(const std::vector<Example>& exs) {
  std::vector<MaskedExample> out;
  for (const auto& e : exs) out.push_back(WrapUnmasked(e));
  return out;
}

double MaxAbs(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

Outcome MetaPathOracle() {
  Rng rng(2026);
  int total = 0, agree = 0;
  for (int i = 0; i < 1000; ++i) {
    EntityGraph g = BuildEntityGraph(testing::RandomDagTriples(rng, 5, 6));
    ++total;
    agree += testing::SameSequence(ComputeMetaPaths(g), testing::OracleMetaPaths(g));
  }
  for (const auto& triples : testing::AllThreeNodeDags()) {
    EntityGraph g = BuildEntityGraph(triples);
    ++total;
    agree += testing::SameSequence(ComputeMetaPaths(g), testing::OracleMetaPaths(g));
  }
  return {agree == total, Fmt("%.0f/%.0f graphs agree", agree, total)};
}

Outcome WorkedExample() {
  std::vector<Triple> triples = {{"FOOD-1", "region", "PLACE"},
                                 {"PLACE", "leaderName", "PERSON"},
                                 {"PLACE", "county", "COUNTY"},
                                 {"FOOD-1", "dishVariation", "FOOD-2"},
                                 {"FOOD-2", "ingredient", "INGREDIENT"}};
  MetaPathSequence seq = ComputeMetaPaths(BuildEntityGraph(triples));
  std::vector<std::string> got;
  for (const auto& p : seq.paths) got.push_back(Join(p.tokens));
  const std::vector<std::string> want = {"FOOD-1 region PLACE leaderName PERSON",
                                         "FOOD-1 region PLACE county COUNTY",
                                         "FOOD-1 dishVariation FOOD-2 ingredient INGREDIENT"};
  LeviGraph levi = BuildLeviGraph(triples);
  auto edge = [&](const std::string& a, const std::string& b) {
    for (int i = 0; i < levi.size(); ++i) {
      for (int j = 0; j < levi.size(); ++j) {
        if (levi.nodes[i] == a && levi.nodes[j] == b && levi.out_adj(i, j) == 1.0) return true;
      }
    }
    return false;
  };
  bool edges = edge("region", "FOOD-1") && edge("region", "PLACE");
  return {got == want && edges,
          std::to_string(got.size()) + " meta-paths" + (got == want ? " match" : " differ") +
              ", Levi edges " + (edges ? "present" : "missing")};
}

Outcome GradientChecks() {
  double worst = 0.0;
  std::string worst_name;
  for (const auto& row : CheckPrimitives(1)) {
    if (row.max_rel_error > worst) {
      worst = row.max_rel_error;
      worst_name = row.name;
    }
  }
  GradCheckRow composed = CheckComposedLoss(1, 0.3);
  bool pass = worst < kGradCheckTolerance && composed.max_rel_error < kGradCheckTolerance;
  return {pass, Fmt("worst primitive %.2e, composed loss %.2e", worst, composed.max_rel_error) +
                    " (" + worst_name + ")"};
}

struct Fit {
  double bleu = 0.0;
  double token_accuracy = 0.0;
};

Fit Evaluate(const ModelParams& params, const std::vector<PreparedExample>& prepared,
             const Vocab& vocab, int max_len) {
  ad::NoGradGuard no_grad;
  std::vector<Tokens> cands;
  std::vector<std::vector<Tokens>> refs;
  long hits = 0, total = 0;
  for (const auto& ex : prepared) {
    DecodeResult r = GreedyDecode(Encode(ex.graphs, params), params, max_len);
    for (size_t i = 0; i < ex.target.size(); ++i) {
      hits += i < r.tokens.size() && r.tokens[i] == ex.target[i];
    }
    total += static_cast<long>(ex.target.size());
    cands.push_back(vocab.Decode(r.tokens));
    refs.push_back(ex.references);
  }
  return {CorpusBleu(cands, refs).bleu, static_cast<double>(hits) / static_cast<double>(total)};
}

Outcome Memorization() {
  auto data = Wrapped(testing::SyntheticExamples(10, 3, 4));
  Vocab vocab = BuildVocab(data, 1);
  TrainConfig c;
  c.hidden = 64;
  c.embed = 32;
  c.gcn_layers = 2;
  c.epochs = 300;
  c.gamma = 0.0;
  c.batch_size = 1;
  c.lr = 0.005;
  c.max_len = 40;
  c.seed = 7;
  auto prepared = PrepareExamples(data, vocab);
  Fit fit;
  int epochs = 0;
  TrainHooks hooks;
  hooks.stop = [&](const EpochRecord& rec, const ModelParams& params) {
    epochs = rec.epoch;
    if (rec.epoch % 10 != 0 && rec.epoch != c.epochs) return false;
    fit = Evaluate(params, prepared, vocab, c.max_len);
    return fit.bleu >= 0.95 && fit.token_accuracy >= 0.99;
  };
  Train(c, data, {}, vocab, nullptr, hooks);
  return {fit.bleu >= 0.95 && fit.token_accuracy >= 0.99,
          Fmt("BLEU %.4f, token accuracy %.4f after %.0f epochs", fit.bleu, fit.token_accuracy,
              epochs)};
}

Outcome ScstAlgebra() {
  auto raw = testing::SyntheticExamples(6, 2, 9);
  auto data = Wrapped(raw);
  Vocab vocab = BuildVocab(data, 1);
  PatternExtractor extractor(BootstrapLexicon(raw));
  auto prepared = PrepareExamples(data, vocab);
  Rng init(3);
  ModelParams params = InitModel({vocab.size(), 8, 8, 1}, init);

  // Zero advantage.
  double zero_norm = 0.0;
  {
    params.ZeroGrad();
    EncoderOutput enc = Encode(prepared[0].graphs, params);
    Rng rng(1);
    DecodeResult sampled;
    {
      ad::NoGradGuard no_grad;
      sampled = SampleDecode(enc, params, 15, rng);
    }
    ad::Backward(ScstLoss(SequenceLogProbs(enc, params, sampled.tokens), 2.0, 2.0));
    for (const auto& [name, t] : params.Named()) zero_norm += t.grad().squaredNorm();
    zero_norm = std::sqrt(zero_norm);
    params.ZeroGrad();
  }

  // Gamma zero against CE-only.
  TrainConfig c;
  c.hidden = 8;
  c.embed = 8;
  c.gcn_layers = 1;
  c.batch_size = 2;
  c.lr = 0.01;
  c.max_len = 20;
  c.epochs = 3;
  c.gamma = 0.0;
  c.ce_pretrain_epochs = 0;
  TrainResult hybrid = Train(c, data, {}, vocab, &extractor);
  c.ce_pretrain_epochs = c.epochs;
  TrainResult ce = Train(c, data, {}, vocab, &extractor);
  bool identical = true;
  auto a = hybrid.last.Named(), b = ce.last.Named();
  for (size_t i = 0; i < a.size(); ++i) identical &= a[i].second.value() == b[i].second.value();
  for (size_t i = 0; i < hybrid.report.epochs.size(); ++i) {
    identical &= hybrid.report.epochs[i].ce_loss == ce.report.epochs[i].ce_loss;
  }

  // Linearity in gamma with fixed sampled sequences.
  double worst_linear = 0.0;
  for (const auto& ex : prepared) {
    double l[3];
    const double gammas[3] = {0.1, 0.4, 0.7};
    for (int k = 0; k < 3; ++k) {
      Rng rng(11);
      l[k] = ComputeExampleLoss(ex, params, gammas[k], 15, vocab, &extractor, &rng).loss.item();
    }
    worst_linear = std::max(worst_linear, std::abs((l[1] - l[0]) - (l[2] - l[1])));
  }
  bool pass = zero_norm < 1e-12 && identical && worst_linear < 1e-12;
  return {pass, Fmt("zero-advantage grad norm %.1e, collinearity gap %.1e, ", zero_norm,
                    worst_linear) +
                    (identical ? "gamma 0 bit-identical" : "gamma 0 differs")};
}

Outcome RewardExample() {
  Example ex = MakeExample({{"Alan Shepard", "timeInSpace", "130170 minutes"},
                            {"Alan Shepard", "birthPlace", "New Hampshire"},
                            {"New Hampshire", "bird", "Purple finch"}},
                           {"Alan Shepard was born in New Hampshire , where the purple finch is "
                            "the bird ."});
  Tokens text = ex.references[0];
  RelationLexicon lexicon;
  lexicon.Add("birth place", {Tokenize("was born in"), TriggerOrder::kSubjectFirst});
  lexicon.Add("bird", {Tokenize("bird"), TriggerOrder::kAny});
  PatternExtractor extractor(lexicon);
  int reward = Reward(extractor.Extract(text, ex.triples), ex.triples);
  return {reward == 2, "reward " + std::to_string(reward)};
}

Outcome Metrics() {
  Tokens s = Tokenize("the quick brown fox jumps over the lazy dog");
  double bleu_same = CorpusBleu({s}, {{s}}).bleu;
  double ter_same = Ter(s, {s});
  double p1 = CorpusBleu({Tokenize("the the the the the the the")},
                         {{Tokenize("the cat is on the mat"), Tokenize("there is a cat on the mat")}})
                  .precisions[0];
  std::vector<Tokens> cands = {Tokenize("the cat sat on the mat"), Tokenize("a dog runs"),
                               Tokenize("he went home")};
  std::vector<Example> examples = {{{{"s", "r", "o"}}, {Tokenize("the cat sat on the mat")}},
                                   {{{"s", "r", "o"}}, {Tokenize("a dog runs fast")}},
                                   {{{"s", "r", "o"}}, {Tokenize("he went to home")}}};
  EvalReport report = EvaluateSplit(cands, examples);
  const double want_bleu = std::exp(1.0 - 14.0 / 12.0) * std::pow(40.0 / 54.0, 0.25);
  const double want_ter = 2.0 / 14.0;
  double bleu_err = std::abs(report.bleu.bleu - want_bleu);
  double ter_err = std::abs(report.ter - want_ter);
  bool pass = std::abs(bleu_same - 1.0) < 1e-12 && ter_same == 0.0 && p1 == 2.0 / 7.0 &&
              bleu_err < 1e-9 && ter_err < 1e-9;
  return {pass, Fmt("identical BLEU %.6f, clipped p1 %.6f, hand corpus BLEU error %.1e", bleu_same,
                    p1, bleu_err) +
                    Fmt(", TER error %.1e", ter_err)};
}

// Undirected hop distances in the Levi graph.
std::vector<int> Distances(const LeviGraph& g, int from) {
  std::vector<int> dist(g.size(), -1);
  std::deque<int> queue{from};
  dist[from] = 0;
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    for (int v = 0; v < g.size(); ++v) {
      if ((g.out_adj(u, v) != 0.0 || g.out_adj(v, u) != 0.0) && dist[v] < 0) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

Outcome EncoderInvariants() {
  Rng rng(31);
  const std::vector<std::string> words = {"a", "b", "c", "d", "e", "r", "s", "t"};
  Vocab vocab(words);
  ModelParams params = InitModel({vocab.size(), 6, 8, 3}, rng);
  double path_drift = 0.0, locality = 0.0, perm = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    // Path independence: changing other paths leaves a path's rows unchanged.
    auto random_path = [&] {
      std::vector<int> ids(1 + rng.Below(6));
      for (auto& id : ids) id = vocab.Index(words[rng.Below(words.size())]);
      return ids;
    };
    std::vector<int> p = random_path(), q1 = random_path(), q2 = random_path();
    auto run = [&](const std::vector<int>& before, const std::vector<int>& after) {
      std::vector<int> ids = before;
      ids.insert(ids.end(), p.begin(), p.end());
      ids.insert(ids.end(), after.begin(), after.end());
      const std::vector<int> offsets{0, static_cast<int>(before.size()),
                                     static_cast<int>(before.size() + p.size())};
      return EncodeMetaPaths(ids, offsets, params.embedding, params.gmp)
          .first.value()
          .middleRows(before.size(), p.size())
          .eval();
    };
    path_drift = std::max(path_drift, MaxAbs(run(q1, q2), run(q2, q1)));

    // Locality and permutation invariance on a random Levi graph.
    std::vector<Triple> triples;
    int n_triples = 1 + static_cast<int>(rng.Below(4));
    for (int k = 0; k < n_triples; ++k) {
      triples.push_back({words[rng.Below(5)], words[5 + rng.Below(3)], words[rng.Below(5)]});
    }
    LeviGraph g = BuildLeviGraph(triples);
    NormalizedAdjacency adj = NormalizeAdjacency(g);
    const int n = g.size();
    Matrix feats = GlorotUniform(n, 6, rng);
    int target = static_cast<int>(rng.Below(n));
    Matrix moved = feats;
    moved.row(target) += GlorotUniform(1, 6, rng);
    std::vector<int> dist = Distances(g, target);
    for (int layers = 1; layers <= 3; ++layers) {
      GcnParams gp;
      gp.layers.assign(params.gcn.layers.begin(), params.gcn.layers.begin() + 1);
      for (int l = 1; l < layers; ++l) gp.layers.push_back(params.gcn.layers[l]);
      Matrix a = EncodeGcnFeatures(Tensor::Constant(feats), adj, gp).first.value();
      Matrix b = EncodeGcnFeatures(Tensor::Constant(moved), adj, gp).first.value();
      for (int i = 0; i < n; ++i) {
        if (dist[i] < 0 || dist[i] > layers) locality = std::max(locality, MaxAbs(a.row(i), b.row(i)));
      }
    }
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    rng.Shuffle(order);
    Eigen::PermutationMatrix<Eigen::Dynamic> P(n);
    for (int i = 0; i < n; ++i) P.indices()[i] = order[i];
    LeviGraph h = g;
    h.out_adj = P * g.out_adj * P.transpose();
    h.in_adj = h.out_adj.transpose();
    Matrix z = EncodeGcnFeatures(Tensor::Constant(feats), adj, params.gcn).second.value();
    Matrix pz =
        EncodeGcnFeatures(Tensor::Constant(P * feats), NormalizeAdjacency(h), params.gcn).second.value();
    perm = std::max(perm, MaxAbs(z, pz));
  }
  bool pass = path_drift <= 1e-12 && locality <= 1e-12 && perm <= 1e-12;
  return {pass, Fmt("path drift %.1e, out-of-range change %.1e, permutation drift %.1e", path_drift,
                    locality, perm)};
}

Outcome RlSmoke() {
  auto raw = testing::SyntheticExamples(50, 3, 21);
  auto data = Wrapped(raw);
  Vocab vocab = BuildVocab(data, 1);
  PatternExtractor extractor(BootstrapLexicon(raw));
  TrainConfig c;
  c.hidden = 32;
  c.embed = 16;
  c.gcn_layers = 2;
  c.batch_size = 5;
  c.lr = 0.005;
  c.hybrid_lr = 3e-5;
  c.max_len = 40;
  c.gamma = 0.3;
  c.ce_pretrain_epochs = 40;
  c.epochs = c.ce_pretrain_epochs + 50;
  c.seed = 5;
  TrainResult r = Train(c, data, {}, vocab, &extractor);
  auto prepared = PrepareExamples(data, vocab, false);
  double ce = MeanGreedyReward(*r.ce_only, prepared, vocab, extractor, c.max_len);
  double rl = MeanGreedyReward(r.last, prepared, vocab, extractor, c.max_len);
  return {rl >= ce, Fmt("mean reward CE-only %.3f, after hybrid %.3f", ce, rl)};
}

}  // namespace
}  // namespace g2t

int main() {
  struct Criterion {
    const char* name;
    std::function<g2t::Outcome()> run;
    double budget_seconds;
  };
  const std::vector<Criterion> criteria = {
      {"meta-path oracle equivalence", g2t::MetaPathOracle, 60},
      {"worked graph example", g2t::WorkedExample, 0},
      {"gradient checks", g2t::GradientChecks, 60},
      {"overfit memorization", g2t::Memorization, 300},
      {"SCST algebra", g2t::ScstAlgebra, 0},
      {"reward reproduction", g2t::RewardExample, 0},
      {"metric correctness", g2t::Metrics, 0},
      {"encoder invariants", g2t::EncoderInvariants, 0},
      {"RL smoke run", g2t::RlSmoke, 600},
  };
  int failures = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    g2t::Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool in_time = criteria[i].budget_seconds == 0 || seconds < criteria[i].budget_seconds;
    if (!in_time) o.detail += "; over the time budget";
    bool pass = o.pass && in_time;
    failures += !pass;
    std::printf("criterion %zu %s: %s (%s; %.1f s)\n", i + 1, criteria[i].name,
                pass ? "PASS" : "FAIL", o.detail.c_str(), seconds);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
