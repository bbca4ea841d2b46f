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


#include <cmath>
#include <sstream>

#include "doctest.h"
#include "g2t/checkpoint.h"
#include "g2t/config.h"
#include "g2t/gradcheck.h"
#include "g2t/optim.h"
#include "g2t/tensor.h"

namespace g2t {
namespace {

using ad::Matrix;
using ad::Tensor;

Matrix M(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(rows.size(), rows.begin()->size());
  int i = 0;
  for (const auto& r : rows) {
    int j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

TEST_CASE("softmax of equal logits is uniform") {
  Tensor y = ad::Softmax(Tensor::Constant(M({{0, 0, 0}})), 1);
  for (int j = 0; j < 3; ++j) CHECK(y.value()(0, j) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("softmax is stable for large logits") {
  Tensor y = ad::Softmax(Tensor::Constant(M({{1000, 1000}})), 1);
  CHECK(y.value()(0, 0) == doctest::Approx(0.5));
}

TEST_CASE("identity matmul returns its operand") {
  Matrix x = M({{1, 2}, {3, 4}});
  Tensor y = ad::MatMul(Tensor::Constant(Matrix::Identity(2, 2)), Tensor::Constant(x));
  CHECK(y.value() == x);
}

TEST_CASE("row max-pool takes column maxima") {
  Tensor y = ad::RowMaxPool(Tensor::Constant(M({{1, 5}, {3, 2}})));
  CHECK(y.value() == M({{3, 5}}));
}

TEST_CASE("gradient of a sum is all ones") {
  Tensor x = Tensor::Parameter(M({{1, -2, 3}, {4, 5, -6}}));
  ad::Backward(ad::Sum(x));
  CHECK(x.grad() == Matrix::Ones(2, 3));
}

TEST_CASE("tanh derivative at zero is one") {
  Tensor x = Tensor::Parameter(M({{0}}));
  ad::Backward(ad::Tanh(x));
  CHECK(x.grad()(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("gradients accumulate until cleared") {
  Tensor x = Tensor::Parameter(M({{2}}));
  ad::Backward(ad::Mul(x, x));
  ad::Backward(ad::Mul(x, x));
  CHECK(x.grad()(0, 0) == doctest::Approx(8.0));
  x.ZeroGrad();
  CHECK(x.grad()(0, 0) == 0.0);
}

TEST_CASE("a shared input receives both paths' gradients") {
  Tensor x = Tensor::Parameter(M({{3}}));
  ad::Backward(ad::Add(ad::ScalarMul(x, 2.0), ad::Mul(x, x)));
  CHECK(x.grad()(0, 0) == doctest::Approx(8.0));
}

TEST_CASE("backward rejects non-scalar losses") {
  Tensor x = Tensor::Parameter(M({{1, 2}}));
  CHECK_THROWS_AS(ad::Backward(x), std::invalid_argument);
}

TEST_CASE("shape mismatches name the operation") {
  Tensor a = Tensor::Constant(Matrix::Zero(2, 3));
  Tensor b = Tensor::Constant(Matrix::Zero(2, 3));
  CHECK_THROWS_WITH_AS(ad::MatMul(a, b), doctest::Contains("matmul"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(ad::Add(a, Tensor::Constant(Matrix::Zero(3, 2))), doctest::Contains("add"),
                       std::invalid_argument);
  CHECK_THROWS_AS(ad::ApplyPrimitive("no_such_op", {}), std::invalid_argument);
}

TEST_CASE("no-grad guard records no graph") {
  Tensor x = Tensor::Parameter(M({{1}}));
  Tensor y;
  {
    ad::NoGradGuard guard;
    y = ad::Mul(x, x);
  }
  CHECK_FALSE(y.requires_grad());
  CHECK(ad::GradEnabled());
}

TEST_CASE("finite differences agree on sum of squares") {
  Rng rng(3);
  Tensor x = Tensor::Parameter(GlorotUniform(3, 4, rng));
  double err = ad::GradCheck([](const Tensor& v) { return ad::Sum(ad::Mul(v, v)); }, x);
  CHECK(err < 1e-7);
}

TEST_CASE("every primitive passes the finite-difference check") {
  for (uint64_t seed : {1, 2, 3}) {
    auto rows = CheckPrimitives(seed);
    CHECK(rows.size() == ad::PrimitiveNames().size());
    for (const auto& row : rows) {
      INFO(row.name << " seed " << seed);
      CHECK(row.max_rel_error < kGradCheckTolerance);
    }
  }
}

TEST_CASE("composed loss passes the finite-difference check") {
  GradCheckRow row = CheckComposedLoss(1);
  CHECK(row.max_rel_error < kGradCheckTolerance);
}

TEST_CASE("adam first step matches the hand computation") {
  std::vector<Tensor> params{Tensor::Parameter(M({{1.0}}))};
  std::vector<Matrix> grads{M({{1.0}})};
  AdamState state;
  AdamStep(params, grads, state);
  // m_hat = 1, v_hat = 1.
  CHECK(params[0].value()(0, 0) == doctest::Approx(1.0 - 0.001 / (1.0 + 1e-8)).epsilon(1e-15));
  CHECK(state.step == 1);
}

TEST_CASE("adam leaves parameters with zero gradient in place") {
  std::vector<Tensor> params{Tensor::Parameter(M({{0.5, -2.0}}))};
  std::vector<Matrix> grads{Matrix::Zero(1, 2)};
  AdamState state;
  for (int i = 0; i < 3; ++i) AdamStep(params, grads, state);
  CHECK(params[0].value() == M({{0.5, -2.0}}));
}

TEST_CASE("adam is deterministic") {
  auto run = [] {
    Rng rng(9);
    std::vector<Tensor> params{Tensor::Parameter(GlorotUniform(3, 3, rng))};
    AdamState state;
    for (int i = 0; i < 5; ++i) {
      std::vector<Matrix> grads{GlorotUniform(3, 3, rng)};
      AdamStep(params, grads, state);
    }
    return params[0].value();
  };
  CHECK(run() == run());
}

TEST_CASE("global norm clipping") {
  std::vector<Matrix> grads{M({{3.0}}), M({{4.0}})};
  CHECK(ClipGlobalNorm(grads, 1.0) == doctest::Approx(5.0));
  CHECK(grads[0](0, 0) == doctest::Approx(0.6));
  CHECK(grads[1](0, 0) == doctest::Approx(0.8));
  std::vector<Matrix> small{M({{0.3}})};
  ClipGlobalNorm(small, 1.0);
  CHECK(small[0](0, 0) == 0.3);
}

TEST_CASE("rng streams are reproducible") {
  Rng a(42), b(42);
  for (int i = 0; i < 10; ++i) CHECK(a.Next() == b.Next());
  Rng c(1);
  for (int i = 0; i < 1000; ++i) {
    double u = c.Uniform();
    CHECK((u >= 0.0 && u < 1.0));
    CHECK(c.Below(7) < 7);
  }
}

TEST_CASE("checkpoint round trip is bit exact") {
  TrainConfig config;
  config.hidden = 4;
  config.embed = 3;
  config.gcn_layers = 1;
  config.seed = 77;
  Vocab vocab({"alpha", "beta"});
  Rng rng(5);
  ModelParams params = InitModel(DimsFor(config, vocab), rng);
  AdamState adam;
  adam.lr = 0.01;
  auto trainable = params.Trainable(false);
  std::vector<Matrix> grads;
  for (const auto& t : trainable) grads.push_back(Matrix::Constant(t.rows(), t.cols(), 0.1));
  AdamStep(trainable, grads, adam);

  std::stringstream ss;
  WriteCheckpoint(MakeCheckpoint(config, vocab, params, &adam), ss);
  Checkpoint back = ReadCheckpoint(ss);
  CHECK(back.config.ToString() == config.ToString());
  CHECK(back.vocab == vocab);
  ModelParams restored = RestoreModel(back);
  auto a = params.Named(), b = restored.Named();
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].first == b[i].first);
    CHECK(a[i].second.value() == b[i].second.value());
  }
  REQUIRE(back.adam.has_value());
  CHECK(back.adam->step == 1);
  CHECK(back.adam->lr == 0.01);
  REQUIRE(back.adam->m.size() == adam.m.size());
  for (size_t i = 0; i < adam.m.size(); ++i) {
    CHECK(back.adam->m[i] == adam.m[i]);
    CHECK(back.adam->v[i] == adam.v[i]);
  }
}

TEST_CASE("hex double encoding round trips awkward values") {
  Matrix m = M({{0.1, -0.0, 1e-310}, {std::nextafter(1.0, 2.0), -3.5e300, 42.0}});
  CHECK(DecodeDoubles(EncodeDoubles(m), 2, 3) == m);
}

TEST_CASE("truncated checkpoints are rejected") {
  std::stringstream ss;
  ss << kCheckpointMagic << "\nconfig lr=0.001\n";
  CHECK_THROWS(ReadCheckpoint(ss));
  std::stringstream bad("not a checkpoint\n");
  CHECK_THROWS(ReadCheckpoint(bad));
}

TEST_CASE("config file values apply and later sets win") {
  TrainConfig c;
  std::istringstream file("# comment\nlr = 0.01\nbatch_size=8\n\nmasking=false\n");
  ApplyConfigStream(file, c);
  CHECK(c.lr == 0.01);
  CHECK(c.batch_size == 8);
  CHECK_FALSE(c.masking);
  c.Set("batch_size", "16");
  CHECK(c.batch_size == 16);
  CHECK_THROWS_AS(c.Set("no_such_key", "1"), std::invalid_argument);
  CHECK_THROWS_AS(c.Set("epochs", "many"), std::invalid_argument);
}

TEST_CASE("config string form round trips") {
  TrainConfig c;
  c.lr = 0.0123;
  c.gamma = 0.25;
  c.seed = 123456789012345ULL;
  c.freeze_embeddings = true;
  TrainConfig back = ParseConfigLine(c.ToString());
  CHECK(back.ToString() == c.ToString());
  CHECK(back.lr == c.lr);
}

TEST_CASE("config validation and derived pretraining epochs") {
  TrainConfig c;
  c.epochs = 10;
  CHECK(c.EffectiveCePretrainEpochs() == 8);
  c.ce_pretrain_epochs = 3;
  CHECK(c.EffectiveCePretrainEpochs() == 3);
  CHECK(c.EffectiveHybridLr() == c.lr);
  c.Set("hybrid_lr", "1e-4");
  CHECK(c.EffectiveHybridLr() == 1e-4);
  c.hybrid_lr = 0.0;
  CHECK_THROWS_AS(c.Validate(), std::invalid_argument);
  c.hybrid_lr = -1.0;
  c.gamma = 1.5;
  CHECK_THROWS_AS(c.Validate(), std::invalid_argument);
  c.gamma = 0.3;
  c.hidden = 7;
  CHECK_THROWS_AS(c.Validate(), std::invalid_argument);
}

}  // namespace
}  // namespace g2t
