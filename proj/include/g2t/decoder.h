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

// LSTM decoder with one additive attention per encoder stream. A sigmoid gate
// computed from the decoder state and input mixes the two context vectors
// before the output projection.

#pragma once

#include <span>
#include <vector>

#include "g2t/encoders.h"
#include "g2t/model.h"
#include "g2t/optim.h"

namespace g2t {

inline constexpr int kDefaultMaxLen = 60;

struct DecoderState {
  LstmState lstm;          // s_t and its cell
  ad::Tensor context;      // fused c_t, 1 x D
  ad::Tensor gate;         // p_gcn, 1 x 1
};

struct StepOutput {
  DecoderState state;
  ad::Tensor probs;          // 1 x V
  ad::Tensor paths_context;  // c_u
  ad::Tensor graph_context;  // c_v
};

struct DecodeResult {
  std::vector<int> tokens;       // ends with EOS unless max_len was hit
  std::vector<double> log_probs; // of each emitted token
  std::vector<double> gates;     // p_gcn per step
};

// Softmax over rows of `states` of v . tanh(W_x x_i + W_s s_t); N x 1.
ad::Tensor AttentionWeights(const ad::Tensor& states, const ad::Tensor& s_t,
                            const AttentionParams& p);

// Encoder memories with attention keys projected once per decode.
class DecoderMemory {
 public:
  DecoderMemory(const EncoderOutput& enc, const DecoderParams& params);

  const EncoderOutput& encoder() const { return *enc_; }
  const ad::Tensor& path_keys() const { return path_keys_; }
  const ad::Tensor& graph_keys() const { return graph_keys_; }

 private:
  const EncoderOutput* enc_;
  ad::Tensor path_keys_;   // R1 W_x
  ad::Tensor graph_keys_;  // R2 W_x
};

// hidden = tanh(Z_G W_h), cell = tanh(Z_G W_q).
DecoderState InitialState(const EncoderOutput& enc, const DecoderParams& params);

StepOutput DecodeStep(const ad::Tensor& input_embedding, const DecoderState& prev,
                      const DecoderMemory& memory, const DecoderParams& params);

// Step distributions when feeding BOS followed by targets[0..T-2]. One row
// per target.
std::vector<ad::Tensor> TeacherForcedDistributions(const EncoderOutput& enc,
                                                   const ModelParams& params,
                                                   std::span<const int> targets);

// Argmax decoding from BOS; ties go to the lowest index.
DecodeResult GreedyDecode(const EncoderOutput& enc, const ModelParams& params, int max_len);

// Multinomial sampling. When `log_prob_terms` is given, the graph-connected
// log-probability of every drawn token is appended to it.
DecodeResult SampleDecode(const EncoderOutput& enc, const ModelParams& params, int max_len,
                          Rng& rng, std::vector<ad::Tensor>* log_prob_terms = nullptr);

int ArgMax(const ad::Matrix& row);

}  // namespace g2t
