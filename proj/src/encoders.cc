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

#include "g2t/encoders.h"

#include <stdexcept>

namespace g2t {

using ad::Concat;
using ad::Tensor;

GraphInputs PrepareGraphs(const std::vector<Triple>& triples, const Vocab& vocab) {
  GraphInputs in;
  in.meta_paths = ComputeMetaPaths(BuildEntityGraph(triples));
  in.path_ids = vocab.Encode(in.meta_paths.Concatenated());
  in.levi = BuildLeviGraph(triples);
  in.adjacency = NormalizeAdjacency(in.levi);
  in.node_ids = vocab.Encode(in.levi.nodes);
  return in;
}

std::pair<Tensor, Tensor> EncodeMetaPaths(std::span<const int> ids, std::span<const int> offsets,
                                          const Tensor& embedding, const GmpParams& params) {
  if (ids.empty()) throw std::invalid_argument("meta-path encoder: empty sequence");
  if (offsets.empty() || offsets.front() != 0) {
    throw std::invalid_argument("meta-path encoder: first path must start at 0");
  }
  for (size_t k = 1; k < offsets.size(); ++k) {
    if (offsets[k] <= offsets[k - 1] || offsets[k] >= static_cast<int>(ids.size())) {
      throw std::invalid_argument("meta-path encoder: bad path offsets");
    }
  }
  const int n = static_cast<int>(ids.size());
  Tensor words = EmbeddingLookup(embedding, ids);
  std::vector<Tensor> fwd(n), bwd(n);
  for (size_t k = 0; k < offsets.size(); ++k) {
    const int begin = offsets[k];
    const int end = k + 1 < offsets.size() ? offsets[k + 1] : n;
    LstmState s = ZeroLstmState(params.forward.hidden);
    for (int i = begin; i < end; ++i) {
      s = LstmCell(params.forward, Slice(words, 0, i, 1), s);
      fwd[i] = s.h;
    }
    s = ZeroLstmState(params.backward.hidden);
    for (int i = end - 1; i >= begin; --i) {
      s = LstmCell(params.backward, Slice(words, 0, i, 1), s);
      bwd[i] = s.h;
    }
  }
  Tensor states = Concat({Concat(fwd, 0), Concat(bwd, 0)}, 1);
  return {states, RowMaxPool(states)};
}

std::pair<Tensor, Tensor> EncodeGcnFeatures(const Tensor& features, const NormalizedAdjacency& adj,
                                            const GcnParams& params) {
  if (params.layers.empty()) throw std::invalid_argument("GCN encoder: needs at least one layer");
  if (adj.in_norm.rows() != features.rows() || adj.out_norm.rows() != features.rows()) {
    throw std::invalid_argument("GCN encoder: adjacency is " + std::to_string(adj.in_norm.rows()) +
                                " nodes but features have " + std::to_string(features.rows()) +
                                " rows");
  }
  Tensor a_in = Tensor::Constant(adj.in_norm);
  Tensor a_out = Tensor::Constant(adj.out_norm);
  Tensor h = features;
  for (const auto& layer : params.layers) {
    Tensor h_in = MatMul(MatMul(a_in, h), layer.w_in);
    Tensor h_out = MatMul(MatMul(a_out, h), layer.w_out);
    h = Relu(MatMul(Concat({h_in, h_out}, 1), layer.w_fuse));
  }
  return {h, RowMaxPool(h)};
}

std::pair<Tensor, Tensor> EncodeGcn(std::span<const int> node_ids, const NormalizedAdjacency& adj,
                                    const Tensor& embedding, const GcnParams& params) {
  return EncodeGcnFeatures(EmbeddingLookup(embedding, node_ids), adj, params);
}

Tensor CombineGraphEmbeddings(const Tensor& a, const Tensor& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("combine_graph_embeddings: dimension mismatch");
  }
  return Add(a, b);
}

EncoderOutput Encode(const GraphInputs& in, const ModelParams& params) {
  EncoderOutput out;
  std::tie(out.paths, out.paths_summary) =
      EncodeMetaPaths(in.path_ids, in.meta_paths.boundary_offsets, params.embedding, params.gmp);
  std::tie(out.graph, out.graph_summary) =
      EncodeGcn(in.node_ids, in.adjacency, params.embedding, params.gcn);
  out.summary = CombineGraphEmbeddings(out.paths_summary, out.graph_summary);
  return out;
}

}  // namespace g2t
