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

#include "g2t/decoder.h"

#include <cmath>
#include <functional>
#include <stdexcept>

namespace g2t {

using ad::Matrix;
using ad::Concat;
using ad::Tensor;

namespace {

Tensor Ones(Eigen::Index rows) { return Tensor::Constant(Matrix::Ones(rows, 1)); }

// Attention from precomputed keys (states W_x).
std::pair<Tensor, Tensor> Attend(const Tensor& states, const Tensor& keys, const Tensor& s_t,
                                 const AttentionParams& p) {
  Tensor query = MatMul(Ones(keys.rows()), MatMul(s_t, p.w_s));
  Tensor scores = MatMul(Tanh(Add(keys, query)), p.v);
  Tensor weights = Softmax(scores, 0);
  return {weights, MatMul(Transpose(weights), states)};
}

using Chooser = std::function<int(const Matrix& probs)>;

DecodeResult Run(const EncoderOutput& enc, const ModelParams& params, int max_len,
                 const Chooser& choose, std::vector<Tensor>* log_prob_terms) {
  if (max_len < 1) throw std::invalid_argument("decode: max_len must be >= 1");
  DecoderMemory memory(enc, params.dec);
  DecoderState state = InitialState(enc, params.dec);
  DecodeResult out;
  int input = Vocab::kBos;
  for (int t = 0; t < max_len; ++t) {
    const int id[] = {input};
    StepOutput step = DecodeStep(EmbeddingLookup(params.embedding, id), state, memory, params.dec);
    int token = choose(step.probs.value());
    double p = step.probs.value()(0, token);
    out.tokens.push_back(token);
    out.log_probs.push_back(std::log(p));
    out.gates.push_back(step.state.gate.item());
    if (log_prob_terms) log_prob_terms->push_back(Log(Slice(step.probs, 1, token, 1)));
    state = std::move(step.state);
    if (token == Vocab::kEos) break;
    input = token;
  }
  return out;
}

}  // namespace

int ArgMax(const Matrix& row) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < row.size(); ++i) {
    if (row(i) > row(best)) best = i;
  }
  return static_cast<int>(best);
}

Tensor AttentionWeights(const Tensor& states, const Tensor& s_t, const AttentionParams& p) {
  if (states.rows() == 0) throw std::invalid_argument("attention over zero states");
  if (states.cols() != p.w_x.rows() || s_t.cols() != p.w_s.rows()) {
    throw std::invalid_argument("attention: dimension mismatch");
  }
  return Attend(states, MatMul(states, p.w_x), s_t, p).first;
}

DecoderMemory::DecoderMemory(const EncoderOutput& enc, const DecoderParams& params)
    : enc_(&enc),
      path_keys_(MatMul(enc.paths, params.attn_paths.w_x)),
      graph_keys_(MatMul(enc.graph, params.attn_graph.w_x)) {}

DecoderState InitialState(const EncoderOutput& enc, const DecoderParams& params) {
  DecoderState s;
  s.lstm.h = Tanh(MatMul(enc.summary, params.w_h));
  s.lstm.c = Tanh(MatMul(enc.summary, params.w_q));
  return s;
}

StepOutput DecodeStep(const Tensor& input_embedding, const DecoderState& prev,
                      const DecoderMemory& memory, const DecoderParams& params) {
  const EncoderOutput& enc = memory.encoder();
  if (enc.paths.rows() == 0 || enc.graph.rows() == 0) {
    throw std::invalid_argument("decode_step: empty encoder memory");
  }
  StepOutput out;
  LstmState s = LstmCell(params.lstm, input_embedding, prev.lstm);
  auto [alpha, c_u] = Attend(enc.paths, memory.path_keys(), s.h, params.attn_paths);
  auto [beta, c_v] = Attend(enc.graph, memory.graph_keys(), s.h, params.attn_graph);
  Tensor gate = Sigmoid(Add(MatMul(Concat({s.h, input_embedding}, 1), params.w_p), params.b_p));
  Tensor keep = Sub(Tensor::Scalar(1.0), gate);
  Tensor context = Add(MatMul(keep, c_u), MatMul(gate, c_v));
  Tensor attentional = Tanh(Add(MatMul(Concat({context, s.h}, 1), params.w_c), params.b_c));
  out.probs = Softmax(Add(MatMul(attentional, params.w_v), params.b_v), 1);
  out.state = {s, context, gate};
  out.paths_context = c_u;
  out.graph_context = c_v;
  return out;
}

std::vector<Tensor> TeacherForcedDistributions(const EncoderOutput& enc, const ModelParams& params,
                                               std::span<const int> targets) {
  DecoderMemory memory(enc, params.dec);
  DecoderState state = InitialState(enc, params.dec);
  std::vector<int> inputs{Vocab::kBos};
  inputs.insert(inputs.end(), targets.begin(), targets.end());
  inputs.pop_back();
  Tensor embedded = EmbeddingLookup(params.embedding, inputs);
  std::vector<Tensor> dists;
  dists.reserve(targets.size());
  for (size_t t = 0; t < targets.size(); ++t) {
    StepOutput step = DecodeStep(Slice(embedded, 0, t, 1), state, memory, params.dec);
    dists.push_back(step.probs);
    state = std::move(step.state);
  }
  return dists;
}

DecodeResult GreedyDecode(const EncoderOutput& enc, const ModelParams& params, int max_len) {
  return Run(enc, params, max_len, [](const Matrix& p) { return ArgMax(p); }, nullptr);
}

DecodeResult SampleDecode(const EncoderOutput& enc, const ModelParams& params, int max_len,
                          Rng& rng, std::vector<Tensor>* log_prob_terms) {
  return Run(
      enc, params, max_len,
      [&rng](const Matrix& p) {
        return rng.Categorical(std::span<const double>(p.data(), static_cast<size_t>(p.size())));
      },
      log_prob_terms);
}

}  // namespace g2t
