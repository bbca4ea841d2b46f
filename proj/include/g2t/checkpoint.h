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

// Text checkpoint format, one record per line:
//
//   G2T-CKPT v1
//   config <key=value ...>
//   vocab <n>
//   <token>                          (n lines, line order = index)
//   param <name> <rows> <cols> <hex>
//   ...
//   adam <step> <lr> <beta1> <beta2> <eps>     (optional)
//   adam_m <name> <rows> <cols> <hex>
//   adam_v <name> <rows> <cols> <hex>
//   end
//
// <hex> holds rows * cols doubles in row-major order, each as the 16 hex
// digits of its IEEE-754 little-endian byte sequence. Doubles in the adam
// header are hex-encoded the same way.

#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "g2t/config.h"
#include "g2t/model.h"
#include "g2t/optim.h"
#include "g2t/triple_model.h"

namespace g2t {

inline constexpr std::string_view kCheckpointMagic = "G2T-CKPT v1";

struct Checkpoint {
  TrainConfig config;
  Vocab vocab;
  std::vector<std::pair<std::string, ad::Matrix>> params;
  std::optional<AdamState> adam;
};

std::string EncodeDoubles(const ad::Matrix& m);
ad::Matrix DecodeDoubles(const std::string& hex, Eigen::Index rows, Eigen::Index cols);

void WriteCheckpoint(const Checkpoint& ckpt, std::ostream& out);
Checkpoint ReadCheckpoint(std::istream& in);
// Writes to a temporary sibling and renames, so a failed save leaves no file.
void SaveCheckpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint LoadCheckpoint(const std::string& path);

Checkpoint MakeCheckpoint(const TrainConfig& config, const Vocab& vocab,
                          const ModelParams& params, const AdamState* adam);
// Rebuilds parameters with the checkpoint's dimensions and values.
ModelParams RestoreModel(const Checkpoint& ckpt);
ModelDims DimsFor(const TrainConfig& config, const Vocab& vocab);

}  // namespace g2t
