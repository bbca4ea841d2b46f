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

#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "g2t/tensor.h"

namespace g2t {

// Seedable generator with a portable output stream: 64-bit Mersenne Twister
// (std::mt19937_64, whose output sequence the C++ standard fixes) plus
// conversions written here rather than the implementation-defined
// std::*_distribution.
class Rng {
 public:
  explicit Rng(uint64_t seed = 0) : engine_(seed) {}

  uint64_t Next() { return engine_(); }
  // Uniform in [0, 1) with 53 random bits.
  double Uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  // Uniform in [0, n) by rejection, n >= 1.
  uint64_t Below(uint64_t n);
  // Draws an index from a probability row; the last index absorbs rounding.
  int Categorical(std::span<const double> probs);

  template <typename T>
  void Shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[Below(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

// Glorot-uniform matrix, bound sqrt(6 / (rows + cols)).
ad::Matrix GlorotUniform(Eigen::Index rows, Eigen::Index cols, Rng& rng);

struct AdamState {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  int64_t step = 0;
  std::vector<ad::Matrix> m;
  std::vector<ad::Matrix> v;
};

// One bias-corrected Adam update. Moments are created on the first call.
void AdamStep(std::span<ad::Tensor> params, std::span<const ad::Matrix> grads,
              AdamState& state);

// Scales grads in place so their joint L2 norm is at most max_norm. Returns
// the norm before clipping.
double ClipGlobalNorm(std::span<ad::Matrix> grads, double max_norm);

}  // namespace g2t
