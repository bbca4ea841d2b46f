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


#include "g2t/gradcheck.h"

#include "g2t/encoders.h"
#include "g2t/model.h"
#include "g2t/optim.h"
#include "g2t/tensor.h"
#include "g2t/training.h"

namespace g2t {
namespace {

using ad::Matrix;
using ad::PrimitiveAttrs;
using ad::Tensor;

Matrix RandomMatrix(Eigen::Index rows, Eigen::Index cols, Rng& rng, double lo = -1.0,
                    double hi = 1.0) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.Uniform(lo, hi);
  return m;
}

// Entries bounded away from zero, for the relu kink.
Matrix AwayFromZero(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    double mag = rng.Uniform(0.1, 1.0);
    m.data()[i] = rng.Uniform() < 0.5 ? -mag : mag;
  }
  return m;
}

Eigen::Index Dim(Rng& rng) { return 1 + static_cast<Eigen::Index>(rng.Below(8)); }

double CheckOne(const std::string& op, Rng& rng, double eps) {
  std::vector<Tensor> inputs;
  PrimitiveAttrs attrs;
  const Eigen::Index r = Dim(rng), c = Dim(rng);
  if (op == "matmul") {
    const Eigen::Index k = Dim(rng);
    inputs = {Tensor::Parameter(RandomMatrix(r, k, rng)), Tensor::Parameter(RandomMatrix(k, c, rng))};
  } else if (op == "add" || op == "sub" || op == "mul_elementwise") {
    inputs = {Tensor::Parameter(RandomMatrix(r, c, rng)), Tensor::Parameter(RandomMatrix(r, c, rng))};
  } else if (op == "concat") {
    attrs.axis = static_cast<int>(rng.Below(2));
    const Eigen::Index other = Dim(rng);
    for (int k = 0; k < 3; ++k) {
      inputs.push_back(Tensor::Parameter(attrs.axis == 0 ? RandomMatrix(Dim(rng), other, rng)
                                                         : RandomMatrix(other, Dim(rng), rng)));
    }
  } else if (op == "relu") {
    inputs = {Tensor::Parameter(AwayFromZero(r, c, rng))};
  } else if (op == "log") {
    inputs = {Tensor::Parameter(RandomMatrix(r, c, rng, 0.5, 2.0))};
  } else if (op == "softmax") {
    attrs.axis = static_cast<int>(rng.Below(2));
    inputs = {Tensor::Parameter(RandomMatrix(r, c, rng, -2.0, 2.0))};
  } else if (op == "embedding_lookup") {
    for (int k = 0; k < 6; ++k) attrs.indices.push_back(static_cast<int>(rng.Below(r)));
    inputs = {Tensor::Parameter(RandomMatrix(r, c, rng))};
  } else if (op == "slice") {
    attrs.axis = static_cast<int>(rng.Below(2));
    const Eigen::Index n = attrs.axis == 0 ? r : c;
    attrs.begin = static_cast<Eigen::Index>(rng.Below(n));
    attrs.length = 1 + static_cast<Eigen::Index>(rng.Below(n - attrs.begin));
    inputs = {Tensor::Parameter(RandomMatrix(r, c, rng))};
  } else if (op == "scalar_mul") {
    attrs.scalar = rng.Uniform(-2.0, 2.0);
    inputs = {Tensor::Parameter(RandomMatrix(r, c, rng))};
  } else {
    inputs = {Tensor::Parameter(RandomMatrix(r, c, rng))};
  }

  const Tensor probe = ad::ApplyPrimitive(op, inputs, attrs);
  const Tensor weights = Tensor::Constant(RandomMatrix(probe.rows(), probe.cols(), rng));
  return ad::GradCheck(
      [&] { return ad::Sum(ad::Mul(ad::ApplyPrimitive(op, inputs, attrs), weights)); }, inputs,
      eps);
}

}  // namespace

std::vector<GradCheckRow> CheckPrimitives(uint64_t seed, double eps) {
  Rng rng(seed);
  std::vector<GradCheckRow> rows;
  for (const auto& op : ad::PrimitiveNames()) rows.push_back({op, CheckOne(op, rng, eps)});
  return rows;
}

GradCheckRow CheckComposedLoss(uint64_t seed, double gamma, double eps) {
  Vocab vocab({"alpha", "beta", "gamma", "likes", "knows", "and", "the", "."});
  Rng rng(seed);
  ModelParams params = InitModel({vocab.size(), 8, 8, 2}, rng);

  MaskedExample ex;
  ex.example.triples = {{"alpha", "likes", "beta"}, {"beta", "knows", "gamma"}};
  ex.example.references = {Tokenize("alpha likes beta and beta knows gamma .")};
  const PreparedExample prepared = PrepareExamples({ex}, vocab).front();
  const std::vector<int> sampled = vocab.Encode(Tokenize("beta likes the gamma . </s>"));

  auto loss = [&] {
    EncoderOutput enc = Encode(prepared.graphs, params);
    Tensor l_g = CrossEntropyLoss(TeacherForcedDistributions(enc, params, prepared.target),
                                  prepared.target);
    Tensor l_rl = ScstLoss(SequenceLogProbs(enc, params, sampled), 2.0, 1.0);
    return HybridLoss(l_rl, l_g, gamma);
  };
  std::vector<Tensor> all;
  for (const auto& [name, t] : params.Named()) all.push_back(t);
  return {"hybrid_loss", ad::GradCheck(loss, all, eps)};
}

}  // namespace g2t
