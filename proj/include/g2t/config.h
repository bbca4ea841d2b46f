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

#pragma once

#include <cstdint>
#include <istream>
#include <string>

namespace g2t {

struct TrainConfig {
  double lr = 0.001;
  int batch_size = 50;
  double gamma = 0.3;
  int epochs = 20;
  // Negative means 80% of `epochs`, rounded down.
  int ce_pretrain_epochs = -1;
  // Learning rate of the hybrid epochs; negative means `lr`.
  double hybrid_lr = -1.0;
  int hidden = 512;
  int embed = 300;
  int gcn_layers = 2;
  int max_len = 60;
  uint64_t seed = 1;
  bool masking = true;
  double clip_norm = 5.0;
  int min_freq = 1;
  bool freeze_embeddings = false;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;

  int EffectiveCePretrainEpochs() const;
  double EffectiveHybridLr() const { return hybrid_lr < 0.0 ? lr : hybrid_lr; }
  // Throws std::invalid_argument on out-of-range values.
  void Validate() const;

  // Sets one key from its text form; throws on unknown keys or bad values.
  void Set(const std::string& key, const std::string& value);
  // Space-separated key=value pairs in a fixed key order.
  std::string ToString() const;
};

// key=value lines; '#' starts a comment.
void ApplyConfigStream(std::istream& in, TrainConfig& config);
void ApplyConfigFile(const std::string& path, TrainConfig& config);
// Parses the output of TrainConfig::ToString.
TrainConfig ParseConfigLine(const std::string& line);

}  // namespace g2t
