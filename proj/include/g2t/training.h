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

// Cross-entropy and self-critical training.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "g2t/config.h"
#include "g2t/decoder.h"
#include "g2t/encoders.h"
#include "g2t/ie_reward.h"
#include "g2t/model.h"
#include "g2t/optim.h"
#include "g2t/triple_model.h"

namespace g2t {

// Mean of -log dists[t](targets[t]) over steps with mask[t] != 0. An empty
// mask counts every step.
ad::Tensor CrossEntropyLoss(std::span<const ad::Tensor> dists, std::span<const int> targets,
                            std::span<const uint8_t> mask = {});

// -(r_sampled - r_baseline) * sum of the sampled tokens' log-probabilities.
ad::Tensor ScstLoss(std::span<const ad::Tensor> log_probs, double r_sampled, double r_baseline);

// gamma * l_rl + (1 - gamma) * l_g; gamma must lie in [0, 1].
ad::Tensor HybridLoss(const ad::Tensor& l_rl, const ad::Tensor& l_g, double gamma);

// Graph-connected log-probability of each token when `tokens` is fed back
// from BOS.
std::vector<ad::Tensor> SequenceLogProbs(const EncoderOutput& enc, const ModelParams& params,
                                         std::span<const int> tokens);

struct PreparedExample {
  std::vector<Triple> triples;      // as seen by the model (masked if masking)
  GraphInputs graphs;
  std::vector<int> target;          // reference ids followed by EOS
  std::vector<Tokens> references;   // every reference of the source example
  int source = 0;                   // index of the source example
};

// One instance per (example, reference) pair when `every_reference`, else one
// per example using its first reference.
std::vector<PreparedExample> PrepareExamples(const std::vector<MaskedExample>& examples,
                                             const Vocab& vocab, bool every_reference = true);

// Greedy generation in the model's token space.
Tokens Generate(const ModelParams& params, const GraphInputs& graphs, const Vocab& vocab,
                int max_len);

// Reward of a token sequence against the example's triples.
int SequenceReward(const std::vector<int>& tokens, const PreparedExample& ex, const Vocab& vocab,
                   Extractor& extractor);

// Mean greedy-decoding reward over examples.
double MeanGreedyReward(const ModelParams& params, std::span<const PreparedExample> examples,
                        const Vocab& vocab, Extractor& extractor, int max_len);

struct ExampleLoss {
  ad::Tensor loss;
  double ce = 0.0;
  double rl = 0.0;
  int reward_sampled = 0;
  int reward_greedy = 0;
};

// CE loss alone when gamma == 0 (no random draws); otherwise one sampled and
// one greedy decode are rewarded and combined with the CE loss.
ExampleLoss ComputeExampleLoss(const PreparedExample& ex, const ModelParams& params, double gamma,
                               int max_len, const Vocab& vocab, Extractor* extractor,
                               Rng* sample_rng);

struct EpochRecord {
  int epoch = 0;
  bool hybrid = false;
  double ce_loss = 0.0;
  double rl_loss = 0.0;
  double mean_reward = 0.0;         // sampled sequences
  double mean_greedy_reward = 0.0;  // baselines
  std::optional<double> valid_bleu;
  double grad_norm = 0.0;           // mean pre-clip norm over batches
  double seconds = 0.0;

  std::string ToJson() const;
};

struct TrainReport {
  std::vector<EpochRecord> epochs;
  double wall_seconds = 0.0;
};

struct TrainResult {
  ModelParams best;  // best validation BLEU; the last epoch without validation data
  ModelParams last;
  std::optional<ModelParams> ce_only;  // after the final CE-only epoch
  AdamState adam;
  TrainReport report;
};

struct TrainHooks {
  // Called once on the freshly initialised parameters.
  std::function<void(ModelParams&)> init;
  std::function<void(const EpochRecord&)> on_epoch;
  // Called after each epoch with the current parameters; true ends training.
  std::function<bool(const EpochRecord&, const ModelParams&)> stop;
};

// Trains from a fresh initialisation drawn from config.seed. `extractor` may
// be null only when the run has no hybrid epochs or gamma == 0. Throws
// std::runtime_error on a non-finite loss.
TrainResult Train(const TrainConfig& config, const std::vector<MaskedExample>& train,
                  const std::vector<MaskedExample>& valid, const Vocab& vocab,
                  Extractor* extractor, const TrainHooks& hooks = {});

}  // namespace g2t
