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

// Corpus BLEU (multi-bleu style) and word-level TER.

#pragma once

#include <array>
#include <ostream>
#include <string>
#include <vector>

#include "g2t/triple_model.h"

namespace g2t {

struct BleuScore {
  double bleu = 0.0;
  std::array<double, 4> precisions{};  // clipped n-gram precisions, n = 1..4
  double brevity_penalty = 0.0;
  long candidate_length = 0;
  long reference_length = 0;
};

// No smoothing: any zero precision gives BLEU 0. The effective reference
// length is the closest reference length per sentence (shorter on ties).
BleuScore CorpusBleu(const std::vector<Tokens>& candidates,
                     const std::vector<std::vector<Tokens>>& references);

// Sentence BLEU with add-1e-9 smoothing on 2..4-gram precisions; diagnostic
// only.
double SentenceBleu(const Tokens& candidate, const std::vector<Tokens>& references);

// Edits (insertions, deletions, substitutions, block shifts) over reference
// length, minimised over references.
double Ter(const Tokens& candidate, const std::vector<Tokens>& references);
// Edit count against one reference, with greedy block shifts.
int TerEdits(const Tokens& candidate, const Tokens& reference);

struct SizeBucket {
  int min_size;
  int max_size;
};

struct BucketReport {
  SizeBucket bucket;
  int count = 0;
  BleuScore bleu;
  double ter = 0.0;
};

struct EvalReport {
  BleuScore bleu;
  double ter = 0.0;
  int count = 0;
  std::vector<BucketReport> buckets;
  std::vector<std::string> notes;

  void PrintTable(std::ostream& out) const;
  std::string ToJson() const;
};

std::vector<SizeBucket> DefaultBuckets();

// candidates[i] is the generation for examples[i]; bucketed by triple count.
EvalReport EvaluateSplit(const std::vector<Tokens>& candidates, const std::vector<Example>& examples,
                         const std::vector<SizeBucket>& buckets = DefaultBuckets());

// One tokenized text per line.
std::vector<Tokens> ReadLines(const std::string& path);

}  // namespace g2t
