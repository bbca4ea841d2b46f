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

// Information-extraction reward: how many of an example's triples can be
// recovered from a generated text.

#pragma once

#include <istream>
#include <map>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "g2t/triple_model.h"

namespace g2t {

enum class TriggerOrder { kSubjectFirst, kObjectFirst, kAny };

struct Trigger {
  Tokens tokens;
  TriggerOrder order = TriggerOrder::kSubjectFirst;
  friend bool operator==(const Trigger&, const Trigger&) = default;
};

// relation (normalized, e.g. "birth place") -> trigger phrases
class RelationLexicon {
 public:
  void Add(const std::string& relation, Trigger trigger);
  const std::vector<Trigger>* Find(const std::string& relation) const;
  bool empty() const { return entries_.empty(); }
  const std::map<std::string, std::vector<Trigger>>& entries() const { return entries_; }

  // Lines "relation TAB order TAB trigger tokens", order one of SO, OS, ANY.
  // Empty lines and lines starting with "#" are skipped.
  static RelationLexicon Parse(std::istream& in);
  static RelationLexicon Load(const std::string& path);
  void Write(std::ostream& out) const;

 private:
  std::map<std::string, std::vector<Trigger>> entries_;
};

// Trigger candidates from references: for each triple whose subject and
// object both occur contiguously in a reference, the tokens strictly between
// the two mentions. Keeps the top_k most frequent per relation.
RelationLexicon BootstrapLexicon(const std::vector<Example>& examples, int top_k = 5);

class Extractor {
 public:
  virtual ~Extractor() = default;
  virtual std::set<Triple> Extract(const Tokens& text, const std::vector<Triple>& candidates) = 0;
};

// A candidate (s, r, o) is extracted when one sentence contains every token of
// s, every token of o, and a trigger phrase of r, with s before o (or o
// before s) as the trigger's order demands. Mention position is the first
// occurrence of the entity's first token.
class PatternExtractor : public Extractor {
 public:
  explicit PatternExtractor(RelationLexicon lexicon);
  std::set<Triple> Extract(const Tokens& text, const std::vector<Triple>& candidates) override;
  const RelationLexicon& lexicon() const { return lexicon_; }

 private:
  RelationLexicon lexicon_;
};

// Runs `command` through the shell with one text per stdin line; expects one
// JSON list of [s, r, o] arrays per stdout line. Failures yield empty sets and
// a warning. Calls on one instance are serialized.
class ProcessExtractor : public Extractor {
 public:
  explicit ProcessExtractor(std::string command) : command_(std::move(command)) {}
  std::set<Triple> Extract(const Tokens& text, const std::vector<Triple>& candidates) override;
  std::vector<std::set<Triple>> ExtractBatch(const std::vector<Tokens>& texts);

 private:
  std::string command_;
  std::mutex mu_;
};

// Extracted triples matching a gold triple after case and whitespace
// normalization of all three fields.
int Reward(const std::set<Triple>& extracted, const std::vector<Triple>& gold);

// Sentences split after ".", "!" and "?" tokens.
std::vector<Tokens> SplitSentences(const Tokens& text);

}  // namespace g2t
