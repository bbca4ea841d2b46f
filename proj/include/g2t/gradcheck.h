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


// Finite-difference checks over every autodiff primitive and over the
// composed training loss of a micro-model.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "g2t/tensor.h"

namespace g2t {

struct GradCheckRow {
  std::string name;
  double max_rel_error = 0.0;
};

inline constexpr double kGradCheckTolerance = 1e-4;

// One row per primitive, on random inputs no larger than 8 x 8. Each output
// is reduced with a random weighting so no gradient is identically zero.
std::vector<GradCheckRow> CheckPrimitives(uint64_t seed, double eps = ad::kGradCheckStep);

// Hybrid loss (fixed sampled sequence and rewards) of a model with a
// 12-token vocabulary, hidden size 8 and two triples, checked with respect to
// every parameter.
GradCheckRow CheckComposedLoss(uint64_t seed, double gamma = 0.3, double eps = ad::kGradCheckStep);

}  // namespace g2t
