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

#include "g2t/optim.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace g2t {

uint64_t Rng::Below(uint64_t n) {
  if (n == 0) throw std::invalid_argument("Rng::Below(0)");
  const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

int Rng::Categorical(std::span<const double> probs) {
  if (probs.empty()) throw std::invalid_argument("Categorical over no outcomes");
  double u = Uniform();
  double acc = 0.0;
  for (size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return static_cast<int>(i);
  }
  // Rounding left u above the total; fall back to the last positive entry.
  for (size_t i = probs.size(); i-- > 0;) {
    if (probs[i] > 0.0) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size()) - 1;
}

ad::Matrix GlorotUniform(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  ad::Matrix m(rows, cols);
  // Row-major fill so the stream maps to entries the same way everywhere.
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = rng.Uniform(-bound, bound);
  }
  return m;
}

void AdamStep(std::span<ad::Tensor> params, std::span<const ad::Matrix> grads,
              AdamState& state) {
  if (params.size() != grads.size()) {
    throw std::invalid_argument("adam_step: " + std::to_string(params.size()) +
                                " params but " + std::to_string(grads.size()) + " grads");
  }
  if (state.m.empty()) {
    for (const auto& p : params) {
      state.m.push_back(ad::Matrix::Zero(p.rows(), p.cols()));
      state.v.push_back(ad::Matrix::Zero(p.rows(), p.cols()));
    }
  }
  if (state.m.size() != params.size()) {
    throw std::invalid_argument("adam_step: optimizer state tracks a different parameter count");
  }
  for (size_t i = 0; i < params.size(); ++i) {
    if (grads[i].rows() != params[i].rows() || grads[i].cols() != params[i].cols() ||
        state.m[i].rows() != params[i].rows() || state.m[i].cols() != params[i].cols()) {
      throw std::invalid_argument("adam_step: shape mismatch at parameter " + std::to_string(i));
    }
  }

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  for (size_t i = 0; i < params.size(); ++i) {
    auto& m = state.m[i];
    auto& v = state.v[i];
    m = state.beta1 * m + (1.0 - state.beta1) * grads[i];
    v = state.beta2 * v + (1.0 - state.beta2) * grads[i].cwiseAbs2();
    auto m_hat = m.array() / c1;
    auto v_hat = v.array() / c2;
    params[i].mutable_value().array() -= state.lr * m_hat / (v_hat.sqrt() + state.eps);
  }
}

double ClipGlobalNorm(std::span<ad::Matrix> grads, double max_norm) {
  double sq = 0.0;
  for (const auto& g : grads) sq += g.squaredNorm();
  double norm = std::sqrt(sq);
  if (norm > max_norm && norm > 0.0) {
    double scale = max_norm / norm;
    for (auto& g : grads) g *= scale;
  }
  return norm;
}

}  // namespace g2t
