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

#include "g2t/training.h"

#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "g2t/checkpoint.h"
#include "g2t/eval.h"
#include "json.hpp"

namespace g2t {

using ad::Matrix;
using ad::Tensor;

Tensor CrossEntropyLoss(std::span<const Tensor> dists, std::span<const int> targets,
                        std::span<const uint8_t> mask) {
  if (dists.size() != targets.size()) {
    throw std::invalid_argument("cross_entropy_loss: " + std::to_string(dists.size()) +
                                " distributions for " + std::to_string(targets.size()) +
                                " targets");
  }
  if (!mask.empty() && mask.size() != targets.size()) {
    throw std::invalid_argument("cross_entropy_loss: mask length mismatch");
  }
  std::vector<Tensor> terms;
  for (size_t t = 0; t < targets.size(); ++t) {
    if (!mask.empty() && !mask[t]) continue;
    if (targets[t] < 0 || targets[t] >= dists[t].cols()) {
      throw std::invalid_argument("cross_entropy_loss: target " + std::to_string(targets[t]) +
                                  " outside vocabulary of size " + std::to_string(dists[t].cols()));
    }
    terms.push_back(Log(Slice(dists[t], 1, targets[t], 1)));
  }
  if (terms.empty()) throw std::invalid_argument("cross_entropy_loss: every step is masked");
  return ScalarMul(Sum(Concat(terms, 1)), -1.0 / static_cast<double>(terms.size()));
}

Tensor ScstLoss(std::span<const Tensor> log_probs, double r_sampled, double r_baseline) {
  if (log_probs.empty()) return Tensor::Scalar(0.0);
  return ScalarMul(Sum(Concat(log_probs, 1)), -(r_sampled - r_baseline));
}

Tensor HybridLoss(const Tensor& l_rl, const Tensor& l_g, double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw std::invalid_argument("hybrid_loss: gamma must lie in [0, 1]");
  }
  return Add(ScalarMul(l_rl, gamma), ScalarMul(l_g, 1.0 - gamma));
}

std::vector<Tensor> SequenceLogProbs(const EncoderOutput& enc, const ModelParams& params,
                                     std::span<const int> tokens) {
  std::vector<Tensor> dists = TeacherForcedDistributions(enc, params, tokens);
  std::vector<Tensor> out;
  out.reserve(tokens.size());
  for (size_t t = 0; t < tokens.size(); ++t) out.push_back(Log(Slice(dists[t], 1, tokens[t], 1)));
  return out;
}

std::vector<PreparedExample> PrepareExamples(const std::vector<MaskedExample>& examples,
                                             const Vocab& vocab, bool every_reference) {
  std::vector<PreparedExample> out;
  for (size_t i = 0; i < examples.size(); ++i) {
    const Example& ex = examples[i].example;
    if (ex.references.empty()) throw std::invalid_argument("example without references");
    GraphInputs graphs = PrepareGraphs(ex.triples, vocab);
    size_t n = every_reference ? ex.references.size() : 1;
    for (size_t r = 0; r < n; ++r) {
      PreparedExample p;
      p.triples = ex.triples;
      p.graphs = graphs;
      p.target = vocab.Encode(ex.references[r]);
      p.target.push_back(Vocab::kEos);
      p.references = ex.references;
      p.source = static_cast<int>(i);
      out.push_back(std::move(p));
    }
  }
  return out;
}

Tokens Generate(const ModelParams& params, const GraphInputs& graphs, const Vocab& vocab,
                int max_len) {
  ad::NoGradGuard no_grad;
  EncoderOutput enc = Encode(graphs, params);
  return vocab.Decode(GreedyDecode(enc, params, max_len).tokens);
}

int SequenceReward(const std::vector<int>& tokens, const PreparedExample& ex, const Vocab& vocab,
                   Extractor& extractor) {
  return Reward(extractor.Extract(vocab.Decode(tokens), ex.triples), ex.triples);
}

double MeanGreedyReward(const ModelParams& params, std::span<const PreparedExample> examples,
                        const Vocab& vocab, Extractor& extractor, int max_len) {
  if (examples.empty()) return 0.0;
  ad::NoGradGuard no_grad;
  double total = 0.0;
  for (const auto& ex : examples) {
    EncoderOutput enc = Encode(ex.graphs, params);
    total += SequenceReward(GreedyDecode(enc, params, max_len).tokens, ex, vocab, extractor);
  }
  return total / static_cast<double>(examples.size());
}

ExampleLoss ComputeExampleLoss(const PreparedExample& ex, const ModelParams& params, double gamma,
                               int max_len, const Vocab& vocab, Extractor* extractor,
                               Rng* sample_rng) {
  ExampleLoss out;
  EncoderOutput enc = Encode(ex.graphs, params);
  Tensor l_g = CrossEntropyLoss(TeacherForcedDistributions(enc, params, ex.target), ex.target);
  out.ce = l_g.item();
  if (gamma == 0.0) {
    out.loss = l_g;
    return out;
  }
  if (!extractor || !sample_rng) {
    throw std::invalid_argument("hybrid loss needs an extractor and a sampling generator");
  }
  DecodeResult greedy, sampled;
  {
    ad::NoGradGuard no_grad;
    greedy = GreedyDecode(enc, params, max_len);
    sampled = SampleDecode(enc, params, max_len, *sample_rng);
  }
  out.reward_greedy = SequenceReward(greedy.tokens, ex, vocab, *extractor);
  out.reward_sampled = SequenceReward(sampled.tokens, ex, vocab, *extractor);
  Tensor l_rl = Tensor::Scalar(0.0);
  if (out.reward_sampled != out.reward_greedy) {
    l_rl = ScstLoss(SequenceLogProbs(enc, params, sampled.tokens), out.reward_sampled,
                    out.reward_greedy);
  }
  out.rl = l_rl.item();
  out.loss = HybridLoss(l_rl, l_g, gamma);
  return out;
}

std::string EpochRecord::ToJson() const {
  nlohmann::json j = {{"epoch", epoch},
                      {"phase", hybrid ? "hybrid" : "ce"},
                      {"ce_loss", ce_loss},
                      {"rl_loss", rl_loss},
                      {"mean_reward", mean_reward},
                      {"mean_greedy_reward", mean_greedy_reward},
                      {"grad_norm", grad_norm},
                      {"seconds", seconds}};
  j["valid_bleu"] = valid_bleu ? nlohmann::json(*valid_bleu) : nlohmann::json(nullptr);
  return j.dump();
}

TrainResult Train(const TrainConfig& config, const std::vector<MaskedExample>& train,
                  const std::vector<MaskedExample>& valid, const Vocab& vocab,
                  Extractor* extractor, const TrainHooks& hooks) {
  config.Validate();
  if (train.empty()) throw std::invalid_argument("train: empty training set");
  const int ce_epochs = std::min(config.EffectiveCePretrainEpochs(), config.epochs);
  if (ce_epochs < config.epochs && config.gamma > 0.0 && !extractor) {
    throw std::invalid_argument("train: hybrid epochs need a reward extractor");
  }
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();

  Rng master(config.seed);
  Rng init_rng(master.Next());
  Rng shuffle_rng(master.Next());
  Rng sample_rng(master.Next());

  ModelParams params = InitModel(DimsFor(config, vocab), init_rng);
  if (hooks.init) hooks.init(params);
  std::vector<Tensor> trainable = params.Trainable(config.freeze_embeddings);
  AdamState adam;
  adam.lr = config.lr;
  adam.beta1 = config.beta1;
  adam.beta2 = config.beta2;
  adam.eps = config.adam_eps;

  std::vector<PreparedExample> examples = PrepareExamples(train, vocab);
  std::vector<PreparedExample> valid_examples = PrepareExamples(valid, vocab, false);
  std::vector<size_t> order(examples.size());

  TrainResult result;
  std::optional<double> best_bleu;
  if (ce_epochs == 0 && config.epochs > 0) result.ce_only = params.Clone();

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto epoch_start = Clock::now();
    EpochRecord rec;
    rec.epoch = epoch;
    rec.hybrid = epoch > ce_epochs;
    const double gamma = rec.hybrid ? config.gamma : 0.0;
    adam.lr = rec.hybrid ? config.EffectiveHybridLr() : config.lr;

    std::iota(order.begin(), order.end(), size_t{0});
    shuffle_rng.Shuffle(order);
    int batches = 0;
    for (size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const size_t end = std::min(order.size(), begin + config.batch_size);
      const double scale = 1.0 / static_cast<double>(end - begin);
      params.ZeroGrad();
      for (size_t k = begin; k < end; ++k) {
        const PreparedExample& ex = examples[order[k]];
        ExampleLoss l =
            ComputeExampleLoss(ex, params, gamma, config.max_len, vocab, extractor, &sample_rng);
        if (!std::isfinite(l.loss.item())) {
          throw std::runtime_error("training diverged: non-finite loss at epoch " +
                                   std::to_string(epoch) + ", example " +
                                   std::to_string(ex.source) + " (ce " + std::to_string(l.ce) +
                                   ", rl " + std::to_string(l.rl) + ")");
        }
        ad::Backward(ScalarMul(l.loss, scale));
        rec.ce_loss += l.ce;
        rec.rl_loss += l.rl;
        rec.mean_reward += l.reward_sampled;
        rec.mean_greedy_reward += l.reward_greedy;
      }
      std::vector<Matrix> grads;
      grads.reserve(trainable.size());
      for (const auto& t : trainable) grads.push_back(t.grad());
      rec.grad_norm += ClipGlobalNorm(grads, config.clip_norm);
      AdamStep(trainable, grads, adam);
      ++batches;
    }
    params.ZeroGrad();
    const double n = static_cast<double>(examples.size());
    rec.ce_loss /= n;
    rec.rl_loss /= n;
    rec.mean_reward /= n;
    rec.mean_greedy_reward /= n;
    rec.grad_norm /= std::max(batches, 1);

    if (!valid_examples.empty()) {
      std::vector<Tokens> cands;
      std::vector<std::vector<Tokens>> refs;
      for (const auto& ex : valid_examples) {
        cands.push_back(Generate(params, ex.graphs, vocab, config.max_len));
        refs.push_back(ex.references);
      }
      rec.valid_bleu = CorpusBleu(cands, refs).bleu;
      if (!best_bleu || *rec.valid_bleu > *best_bleu) {
        best_bleu = rec.valid_bleu;
        result.best = params.Clone();
      }
    }
    if (epoch == ce_epochs && ce_epochs < config.epochs) result.ce_only = params.Clone();
    rec.seconds = std::chrono::duration<double>(Clock::now() - epoch_start).count();
    result.report.epochs.push_back(rec);
    if (hooks.on_epoch) hooks.on_epoch(rec);
    if (hooks.stop && hooks.stop(rec, params)) break;
  }

  result.last = params;
  if (!best_bleu) result.best = params.Clone();
  result.adam = std::move(adam);
  result.report.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return result;
}

}  // namespace g2t
