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

// Graph encoders.
//
// The meta-path encoder runs a bidirectional LSTM over the concatenated
// meta-paths, restarting both directions from a zero state at every path
// boundary so each path is encoded independently. The GCN encoder convolves
// the Levi graph separately along incoming and outgoing edges and fuses the
// two views per layer. Each encoder is summarised by a column-wise max over
// its node states; the two summaries are added.

#pragma once

#include <span>

#include "g2t/graph.h"
#include "g2t/model.h"
#include "g2t/tensor.h"
#include "g2t/triple_model.h"

namespace g2t {

struct EncoderOutput {
  ad::Tensor paths;         // R1, L1 x D
  ad::Tensor graph;         // R2, L2 x D
  ad::Tensor paths_summary; // Z_G1, 1 x D
  ad::Tensor graph_summary; // Z_G2, 1 x D
  ad::Tensor summary;       // Z_G = Z_G1 + Z_G2
};

// Both graph inputs of one triple set, in vocabulary ids.
struct GraphInputs {
  MetaPathSequence meta_paths;
  std::vector<int> path_ids;  // concatenated meta-path tokens
  LeviGraph levi;
  NormalizedAdjacency adjacency;
  std::vector<int> node_ids;  // one per Levi node
};

GraphInputs PrepareGraphs(const std::vector<Triple>& triples, const Vocab& vocab);

// Returns (R1, Z_G1). `offsets` are path starts within `ids`, strictly
// increasing from 0.
std::pair<ad::Tensor, ad::Tensor> EncodeMetaPaths(std::span<const int> ids,
                                                  std::span<const int> offsets,
                                                  const ad::Tensor& embedding,
                                                  const GmpParams& params);

// Returns (R2, Z_G2) from initial node features H0 (L2 x d_e).
std::pair<ad::Tensor, ad::Tensor> EncodeGcnFeatures(const ad::Tensor& features,
                                                    const NormalizedAdjacency& adj,
                                                    const GcnParams& params);
std::pair<ad::Tensor, ad::Tensor> EncodeGcn(std::span<const int> node_ids,
                                            const NormalizedAdjacency& adj,
                                            const ad::Tensor& embedding,
                                            const GcnParams& params);

ad::Tensor CombineGraphEmbeddings(const ad::Tensor& a, const ad::Tensor& b);

EncoderOutput Encode(const GraphInputs& in, const ModelParams& params);

}  // namespace g2t
