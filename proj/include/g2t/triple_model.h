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

// Triples, examples, entity masking and the shared vocabulary.

#pragma once

#include <array>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace g2t {

using Tokens = std::vector<std::string>;

// A (subject, relation, object) record. Each field holds normalized tokens
// joined by single spaces.
struct Triple {
  std::string subject;
  std::string relation;
  std::string object;

  friend bool operator==(const Triple&, const Triple&) = default;
  friend auto operator<=>(const Triple&, const Triple&) = default;
};

struct Example {
  std::vector<Triple> triples;
  std::vector<Tokens> references;
};

struct EntityInfo {
  std::string surface;
  std::string type;
};

struct MaskedExample {
  Example example;
  std::map<int, EntityInfo> entity_map;  // eid -> (surface, type)
};

// Lower-cases and splits on whitespace.
Tokens Tokenize(std::string_view text);
std::string Join(const Tokens& tokens, std::string_view sep = " ");
// Collapses whitespace and lower-cases; the normal form of triple fields.
std::string NormalizeField(std::string_view text);
// "dishVariation" -> "dish variation", "leader_name" -> "leader name".
std::string SplitRelationLabel(std::string_view label);

// Builds a validated example: normalizes fields, drops duplicate triples,
// throws std::invalid_argument on empty fields or missing references.
Example MakeExample(const std::vector<std::array<std::string, 3>>& triples,
                    const std::vector<std::string>& references);

// One JSON object per line with "triples" and "references" keys. Blank lines
// and lines starting with "#" are skipped. Errors carry the 1-based line
// number.
std::vector<Example> ParseDataset(std::istream& in);
std::vector<Example> LoadDataset(const std::string& path);

// Two-column TSV, surface TAB type. Surfaces are normalized on load.
using TypeDict = std::unordered_map<std::string, std::string>;
TypeDict ParseTypeDict(std::istream& in);
TypeDict LoadTypeDict(const std::string& path);

inline constexpr std::string_view kFallbackType = "THING";

MaskedExample MaskEntities(const Example& ex, const TypeDict& types);
// Identity wrap used when masking is disabled.
MaskedExample WrapUnmasked(const Example& ex);
// Restores "ENTITY_<eid> <TYPE>" spans. Unknown eids are left unchanged and
// reported on stderr.
Tokens UnmaskText(const Tokens& tokens,
                  const std::map<int, EntityInfo>& entity_map);

// Parses "ENTITY_<n>" and returns n.
std::optional<int> ParseEntityToken(std::string_view token);

class Vocab {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr int kBos = 2;
  static constexpr int kEos = 3;
  static constexpr int kNumReserved = 4;

  Vocab();
  explicit Vocab(std::vector<std::string> tokens);

  int size() const { return static_cast<int>(tokens_.size()); }
  int Index(const std::string& token) const;
  const std::string& Token(int index) const;
  bool Contains(const std::string& token) const {
    return index_.count(token) != 0;
  }
  const std::vector<std::string>& tokens() const { return tokens_; }

  std::vector<int> Encode(const Tokens& tokens) const;
  // Stops at EOS; drops PAD and BOS.
  Tokens Decode(const std::vector<int>& ids) const;

  // Writes an optional "#" header line, then one token per line.
  void Save(const std::string& path, const std::string& header = "") const;
  // A first line starting with "#" is a comment.
  static Vocab Load(const std::string& path);

  friend bool operator==(const Vocab& a, const Vocab& b) {
    return a.tokens_ == b.tokens_;
  }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

Vocab BuildVocab(const std::vector<MaskedExample>& corpus, int min_freq);

// All tokens an example contributes to the encoders.
Tokens TripleTokens(const Triple& t);

}  // namespace g2t
