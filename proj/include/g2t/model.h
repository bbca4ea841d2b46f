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

// Trainable parameters of the dual-encoder / gated-attention decoder model.

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "g2t/optim.h"
#include "g2t/tensor.h"
#include "g2t/triple_model.h"

namespace g2t {

struct ModelDims {
  int vocab_size = 0;
  int embed = 300;   // d_e
  int hidden = 512;  // D; each meta-path LSTM direction gets D / 2
  int gcn_layers = 2;
};

// Gates packed as [input, forget, cell, output]; `weight` maps the row
// concatenation [x, h] to 4 * hidden pre-activations.
struct LstmParams {
  ad::Tensor weight;  // (input + hidden) x 4 hidden
  ad::Tensor bias;    // 1 x 4 hidden, forget block initialised to 1
  int hidden = 0;
};

struct LstmState {
  ad::Tensor h;
  ad::Tensor c;
};

LstmState LstmCell(const LstmParams& p, const ad::Tensor& x, const LstmState& prev);
LstmState ZeroLstmState(int hidden);

struct GmpParams {
  LstmParams forward;
  LstmParams backward;
};

struct GcnLayer {
  ad::Tensor w_in;   // in x D
  ad::Tensor w_out;  // in x D
  ad::Tensor w_fuse; // 2D x D
};

struct GcnParams {
  std::vector<GcnLayer> layers;
};

struct AttentionParams {
  ad::Tensor w_x;  // D x D
  ad::Tensor w_s;  // D x D
  ad::Tensor v;    // D x 1
};

struct DecoderParams {
  LstmParams lstm;            // input d_e, hidden D
  AttentionParams attn_paths; // over meta-path states
  AttentionParams attn_graph; // over Levi-graph node states
  ad::Tensor w_p, b_p;        // (D + d_e) x 1, 1 x 1
  ad::Tensor w_c, b_c;        // 2D x D, 1 x D
  ad::Tensor w_v, b_v;        // D x V, 1 x V
  ad::Tensor w_h, w_q;        // D x D initial hidden / cell maps
};

struct ModelParams {
  ModelDims dims;
  ad::Tensor embedding;  // V x d_e, shared by both encoders and the decoder
  GmpParams gmp;
  GcnParams gcn;
  DecoderParams dec;

  // Fixed-order (name, tensor) list covering every parameter.
  std::vector<std::pair<std::string, ad::Tensor>> Named() const;
  // Parameters the optimizer updates.
  std::vector<ad::Tensor> Trainable(bool freeze_embeddings) const;
  void ZeroGrad() const;
  // Deep copy with fresh leaf tensors.
  ModelParams Clone() const;
};

// Glorot-uniform weights drawn in Named() order, zero biases, LSTM forget
// biases 1.
ModelParams InitModel(const ModelDims& dims, Rng& rng);

// Overwrites embedding rows of tokens found in a "token v1 ... vd" text file.
// Returns the number of rows replaced.
int LoadWordVectors(const std::string& path, const Vocab& vocab, ModelParams& params);

}  // namespace g2t
