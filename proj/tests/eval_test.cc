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


#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "g2t/eval.h"

namespace g2t {
namespace {

std::vector<Tokens> T(std::initializer_list<const char*> texts) {
  std::vector<Tokens> out;
  for (const char* t : texts) out.push_back(Tokenize(t));
  return out;
}

TEST_CASE("identical texts score BLEU 1 and TER 0") {
  Tokens s = Tokenize("the quick brown fox jumps over the lazy dog");
  CHECK(CorpusBleu({s}, {{s}}).bleu == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(Ter(s, {s}) == 0.0);
  CHECK(SentenceBleu(s, {s}) == doctest::Approx(1.0));
}

TEST_CASE("n-gram counts are clipped by the reference maximum") {
  BleuScore b = CorpusBleu(T({"the the the the the the the"}),
                           {T({"the cat is on the mat", "there is a cat on the mat"})});
  CHECK(b.precisions[0] == 2.0 / 7.0);
  CHECK(b.bleu == 0.0);
}

TEST_CASE("three-example corpus by hand") {
  std::vector<Tokens> cands = T({"the cat sat on the mat", "a dog runs", "he went home"});
  std::vector<std::vector<Tokens>> refs = {T({"the cat sat on the mat"}), T({"a dog runs fast"}),
                                           T({"he went to home"})};
  BleuScore b = CorpusBleu(cands, refs);
  // 1-grams 12/12, 2-grams 8/9, 3-grams 5/6, 4-grams 3/3; c = 12, r = 14.
  CHECK(b.precisions[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(b.precisions[1] == doctest::Approx(8.0 / 9.0).epsilon(1e-15));
  CHECK(b.precisions[2] == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
  CHECK(b.precisions[3] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(b.candidate_length == 12);
  CHECK(b.reference_length == 14);
  const double expected = std::exp(1.0 - 14.0 / 12.0) * std::pow(40.0 / 54.0, 0.25);
  CHECK(std::abs(b.bleu - expected) < 1e-9);

  std::vector<Example> examples;
  for (size_t i = 0; i < refs.size(); ++i) examples.push_back({{{"s", "r", "o"}}, refs[i]});
  EvalReport report = EvaluateSplit(cands, examples);
  // One insertion in each of the last two; 2 edits over 14 reference words.
  CHECK(std::abs(report.ter - 2.0 / 14.0) < 1e-9);
  CHECK(std::abs(report.bleu.bleu - expected) < 1e-9);
}

TEST_CASE("a block shift costs one edit") {
  CHECK(TerEdits(Tokenize("b c a"), Tokenize("a b c")) == 1);
  CHECK(Ter(Tokenize("b c a"), {Tokenize("a b c")}) == doctest::Approx(1.0 / 3.0));
  CHECK(TerEdits(Tokenize("x y"), Tokenize("a b c")) == 3);
  CHECK(TerEdits(Tokenize("c d a b"), Tokenize("a b c d")) == 1);
}

TEST_CASE("TER takes the best reference") {
  CHECK(Ter(Tokenize("a b c"), {Tokenize("x y z w"), Tokenize("a b c d")}) ==
        doctest::Approx(0.25));
}

TEST_CASE("brevity penalty uses the closest reference length") {
  // Candidate of 4 words, references of 3 and 5: ties go to the shorter.
  BleuScore b = CorpusBleu(T({"a b c d"}), {T({"a b c", "a b c d e"})});
  CHECK(b.reference_length == 3);
  CHECK(b.brevity_penalty == 1.0);
}

TEST_CASE("empty buckets are omitted with a note") {
  std::vector<Example> examples = {{{{"s", "r", "o"}}, T({"a b"})}};
  EvalReport r = EvaluateSplit(T({"a b"}), examples);
  REQUIRE(r.buckets.size() == 1);
  CHECK(r.buckets[0].count == 1);
  REQUIRE(r.notes.size() == 1);
  CHECK(r.notes[0].find("4-7") != std::string::npos);
  CHECK(r.ToJson().find("\"buckets\"") != std::string::npos);
}

TEST_CASE("misaligned inputs are rejected") {
  std::vector<Example> examples = {{{{"s", "r", "o"}}, T({"a b"})}};
  CHECK_THROWS_AS(EvaluateSplit(T({"a", "b"}), examples), std::invalid_argument);
  CHECK_THROWS_AS(CorpusBleu(T({"a"}), {}), std::invalid_argument);
}

TEST_CASE("corpus scores do not depend on example order") {
  std::vector<Tokens> cands = T({"the cat sat", "a dog ran home", "it rained all day", "yes"});
  std::vector<std::vector<Tokens>> refs = {T({"the cat sat down"}), T({"a dog ran home"}),
                                           T({"it rained the whole day"}), T({"yes indeed"})};
  BleuScore b = CorpusBleu(cands, refs);
  std::vector<size_t> perm = {2, 0, 3, 1};
  std::vector<Tokens> pc;
  std::vector<std::vector<Tokens>> pr;
  for (size_t i : perm) {
    pc.push_back(cands[i]);
    pr.push_back(refs[i]);
  }
  CHECK(CorpusBleu(pc, pr).bleu == b.bleu);
}

TEST_CASE("sentence BLEU is smoothed") {
  double s = SentenceBleu(Tokenize("a b"), {Tokenize("a b")});
  CHECK(s > 0.0);
  CHECK(SentenceBleu(Tokenize("a x"), {Tokenize("a b")}) < s);
}

}  // namespace
}  // namespace g2t
