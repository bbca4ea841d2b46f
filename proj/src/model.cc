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

#include "g2t/model.h"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace g2t {

using ad::Matrix;
using ad::Concat;
using ad::Tensor;

namespace {

Tensor Zeros(Eigen::Index r, Eigen::Index c) { return Tensor::Parameter(Matrix::Zero(r, c)); }

LstmParams MakeLstm(int input, int hidden) {
  return {Zeros(input + hidden, 4 * hidden), Zeros(1, 4 * hidden), hidden};
}

AttentionParams MakeAttention(int d) { return {Zeros(d, d), Zeros(d, d), Zeros(d, 1)}; }

bool IsBias(const std::string& name) {
  return name.ends_with(".bias") || name.ends_with(".b_p") || name.ends_with(".b_c") ||
         name.ends_with(".b_v");
}

}  // namespace

LstmState ZeroLstmState(int hidden) {
  return {Tensor::Constant(Matrix::Zero(1, hidden)), Tensor::Constant(Matrix::Zero(1, hidden))};
}

LstmState LstmCell(const LstmParams& p, const Tensor& x, const LstmState& prev) {
  const int h = p.hidden;
  Tensor z = Add(MatMul(Concat({x, prev.h}, 1), p.weight), p.bias);
  Tensor i = Sigmoid(Slice(z, 1, 0, h));
  Tensor f = Sigmoid(Slice(z, 1, h, h));
  Tensor g = Tanh(Slice(z, 1, 2 * h, h));
  Tensor o = Sigmoid(Slice(z, 1, 3 * h, h));
  Tensor c = Add(Mul(f, prev.c), Mul(i, g));
  return {Mul(o, Tanh(c)), c};
}

std::vector<std::pair<std::string, Tensor>> ModelParams::Named() const {
  std::vector<std::pair<std::string, Tensor>> out;
  out.emplace_back("embedding", embedding);
  out.emplace_back("gmp.fwd.weight", gmp.forward.weight);
  out.emplace_back("gmp.fwd.bias", gmp.forward.bias);
  out.emplace_back("gmp.bwd.weight", gmp.backward.weight);
  out.emplace_back("gmp.bwd.bias", gmp.backward.bias);
  for (size_t l = 0; l < gcn.layers.size(); ++l) {
    std::string p = "gcn." + std::to_string(l);
    out.emplace_back(p + ".w_in", gcn.layers[l].w_in);
    out.emplace_back(p + ".w_out", gcn.layers[l].w_out);
    out.emplace_back(p + ".w_fuse", gcn.layers[l].w_fuse);
  }
  out.emplace_back("dec.lstm.weight", dec.lstm.weight);
  out.emplace_back("dec.lstm.bias", dec.lstm.bias);
  for (auto [name, a] : {std::pair{"dec.attn_paths", &dec.attn_paths},
                         std::pair{"dec.attn_graph", &dec.attn_graph}}) {
    out.emplace_back(std::string(name) + ".w_x", a->w_x);
    out.emplace_back(std::string(name) + ".w_s", a->w_s);
    out.emplace_back(std::string(name) + ".v", a->v);
  }
  out.emplace_back("dec.w_p", dec.w_p);
  out.emplace_back("dec.b_p", dec.b_p);
  out.emplace_back("dec.w_c", dec.w_c);
  out.emplace_back("dec.b_c", dec.b_c);
  out.emplace_back("dec.w_v", dec.w_v);
  out.emplace_back("dec.b_v", dec.b_v);
  out.emplace_back("dec.w_h", dec.w_h);
  out.emplace_back("dec.w_q", dec.w_q);
  return out;
}

std::vector<Tensor> ModelParams::Trainable(bool freeze_embeddings) const {
  std::vector<Tensor> out;
  for (auto& [name, t] : Named()) {
    if (freeze_embeddings && name == "embedding") continue;
    out.push_back(t);
  }
  return out;
}

void ModelParams::ZeroGrad() const {
  for (auto& [name, t] : Named()) {
    Tensor copy = t;
    copy.ZeroGrad();
  }
}

ModelParams ModelParams::Clone() const {
  Rng scratch(0);
  ModelParams out = InitModel(dims, scratch);
  auto src = Named();
  auto dst = out.Named();
  for (size_t i = 0; i < src.size(); ++i) dst[i].second.mutable_value() = src[i].second.value();
  return out;
}

ModelParams InitModel(const ModelDims& d, Rng& rng) {
  if (d.vocab_size < Vocab::kNumReserved) throw std::invalid_argument("model: vocabulary too small");
  if (d.hidden < 2 || d.hidden % 2 != 0) throw std::invalid_argument("model: hidden must be even");
  if (d.gcn_layers < 1) throw std::invalid_argument("model: need at least one GCN layer");
  if (d.embed < 1) throw std::invalid_argument("model: embed must be positive");
  const int D = d.hidden;
  ModelParams m;
  m.dims = d;
  m.embedding = Zeros(d.vocab_size, d.embed);
  m.gmp.forward = MakeLstm(d.embed, D / 2);
  m.gmp.backward = MakeLstm(d.embed, D / 2);
  for (int l = 0; l < d.gcn_layers; ++l) {
    int in = l == 0 ? d.embed : D;
    m.gcn.layers.push_back({Zeros(in, D), Zeros(in, D), Zeros(2 * D, D)});
  }
  m.dec.lstm = MakeLstm(d.embed, D);
  m.dec.attn_paths = MakeAttention(D);
  m.dec.attn_graph = MakeAttention(D);
  m.dec.w_p = Zeros(D + d.embed, 1);
  m.dec.b_p = Zeros(1, 1);
  m.dec.w_c = Zeros(2 * D, D);
  m.dec.b_c = Zeros(1, D);
  m.dec.w_v = Zeros(D, d.vocab_size);
  m.dec.b_v = Zeros(1, d.vocab_size);
  m.dec.w_h = Zeros(D, D);
  m.dec.w_q = Zeros(D, D);

  for (auto& [name, t] : m.Named()) {
    Tensor p = t;
    if (IsBias(name)) {
      if (name.find("lstm") != std::string::npos || name.starts_with("gmp.")) {
        int h = static_cast<int>(p.cols() / 4);
        p.mutable_value().middleCols(h, h).setOnes();
      }
      continue;
    }
    p.mutable_value() = GlorotUniform(p.rows(), p.cols(), rng);
  }
  return m;
}

int LoadWordVectors(const std::string& path, const Vocab& vocab, ModelParams& params) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open word vectors " + path);
  const int dim = params.dims.embed;
  int replaced = 0;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream is(line);
    std::string token;
    if (!(is >> token) || !vocab.Contains(token)) continue;
    Eigen::RowVectorXd row(dim);
    for (int k = 0; k < dim; ++k) {
      if (!(is >> row(k))) {
        throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected " +
                                 std::to_string(dim) + " values");
      }
    }
    params.embedding.mutable_value().row(vocab.Index(token)) = row;
    ++replaced;
  }
  return replaced;
}

}  // namespace g2t
