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

#include "g2t/triple_model.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace g2t {
namespace {

bool IsSpace(char c) { return std::isspace(static_cast<unsigned char>(c)); }
char Lower(char c) {
  return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
}
bool IsUpper(char c) { return std::isupper(static_cast<unsigned char>(c)); }
bool IsLowerOrDigit(char c) {
  return std::islower(static_cast<unsigned char>(c)) ||
         std::isdigit(static_cast<unsigned char>(c));
}

// Entity fields in WebNLG-style dumps use underscores for spaces.
std::string NormalizeEntity(std::string_view text) {
  std::string s(text);
  std::replace(s.begin(), s.end(), '_', ' ');
  return NormalizeField(s);
}

std::string MaskedSurface(int eid, const std::string& type) {
  return "ENTITY_" + std::to_string(eid) + " " + type;
}

// A field already of the form "ENTITY_<n> <TYPE>".
std::optional<int> AlreadyMasked(const std::string& field) {
  Tokens toks = Tokenize(field);
  if (toks.size() != 2) return std::nullopt;
  // Tokenize lower-cases, so look at the raw prefix instead.
  auto space = field.find(' ');
  return ParseEntityToken(std::string_view(field).substr(0, space));
}

Tokens SplitRaw(std::string_view text) {
  Tokens out;
  std::string cur;
  for (char c : text) {
    if (IsSpace(c)) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

}  // namespace

Tokens Tokenize(std::string_view text) {
  Tokens out = SplitRaw(text);
  for (auto& t : out) {
    for (auto& c : t) c = Lower(c);
  }
  return out;
}

std::string Join(const Tokens& tokens, std::string_view sep) {
  std::string out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.append(sep);
    out.append(tokens[i]);
  }
  return out;
}

std::string NormalizeField(std::string_view text) {
  return Join(Tokenize(text));
}

std::string SplitRelationLabel(std::string_view label) {
  std::string spaced;
  for (size_t i = 0; i < label.size(); ++i) {
    char c = label[i];
    if (c == '_') {
      spaced.push_back(' ');
      continue;
    }
    if (i > 0 && IsUpper(c)) {
      char prev = label[i - 1];
      bool next_lower = i + 1 < label.size() &&
                        std::islower(static_cast<unsigned char>(label[i + 1]));
      if (IsLowerOrDigit(prev) || (IsUpper(prev) && next_lower)) {
        spaced.push_back(' ');
      }
    }
    spaced.push_back(c);
  }
  return NormalizeField(spaced);
}

Example MakeExample(const std::vector<std::array<std::string, 3>>& triples,
                    const std::vector<std::string>& references) {
  Example ex;
  std::set<Triple> seen;
  for (const auto& raw : triples) {
    Triple t{NormalizeEntity(raw[0]), SplitRelationLabel(raw[1]),
             NormalizeEntity(raw[2])};
    if (t.subject.empty() || t.relation.empty() || t.object.empty()) {
      throw std::invalid_argument("empty triple field");
    }
    if (seen.insert(t).second) ex.triples.push_back(std::move(t));
  }
  if (ex.triples.empty()) throw std::invalid_argument("no triples");
  for (const auto& r : references) ex.references.push_back(Tokenize(r));
  if (ex.references.empty()) throw std::invalid_argument("no references");
  return ex;
}

std::vector<Example> ParseDataset(std::istream& in) {
  std::vector<Example> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (std::all_of(line.begin(), line.end(), IsSpace)) continue;
    if (line[0] == '#') continue;
    try {
      auto j = nlohmann::json::parse(line);
      if (!j.is_object() || !j.contains("triples") ||
          !j.contains("references")) {
        throw std::invalid_argument("missing \"triples\" or \"references\"");
      }
      auto triples =
          j.at("triples").get<std::vector<std::array<std::string, 3>>>();
      auto refs = j.at("references").get<std::vector<std::string>>();
      out.push_back(MakeExample(triples, refs));
    } catch (const std::exception& e) {
      throw std::runtime_error("dataset line " + std::to_string(lineno) +
                               ": " + e.what());
    }
  }
  return out;
}

std::vector<Example> LoadDataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset " + path);
  return ParseDataset(in);
}

TypeDict ParseTypeDict(std::istream& in) {
  TypeDict dict;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw std::runtime_error("type dictionary line " +
                               std::to_string(lineno) + ": expected a TAB");
    }
    std::string type = Join(SplitRaw(line.substr(tab + 1)), "_");
    if (type.empty()) {
      throw std::runtime_error("type dictionary line " +
                               std::to_string(lineno) + ": empty type");
    }
    dict[NormalizeEntity(line.substr(0, tab))] = type;
  }
  return dict;
}

TypeDict LoadTypeDict(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open type dictionary " + path);
  return ParseTypeDict(in);
}

std::optional<int> ParseEntityToken(std::string_view token) {
  constexpr std::string_view kPrefix = "ENTITY_";
  if (token.size() <= kPrefix.size() || token.substr(0, kPrefix.size()) != kPrefix) {
    return std::nullopt;
  }
  int eid = 0;
  auto digits = token.substr(kPrefix.size());
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), eid);
  if (ec != std::errc() || ptr != digits.data() + digits.size() || eid < 1) {
    return std::nullopt;
  }
  return eid;
}

MaskedExample MaskEntities(const Example& ex, const TypeDict& types) {
  // Surfaces in first-occurrence order over (subject, object) of each triple.
  std::vector<std::string> surfaces;
  for (const auto& t : ex.triples) {
    for (const auto* s : {&t.subject, &t.object}) {
      if (std::find(surfaces.begin(), surfaces.end(), *s) == surfaces.end()) {
        surfaces.push_back(*s);
      }
    }
  }

  MaskedExample out;
  std::unordered_map<std::string, std::string> replacement;
  int max_existing = 0;
  for (const auto& s : surfaces) {
    if (auto eid = AlreadyMasked(s)) max_existing = std::max(max_existing, *eid);
  }
  int next_eid = max_existing + 1;
  for (const auto& s : surfaces) {
    if (auto eid = AlreadyMasked(s)) {
      replacement[s] = s;
      out.entity_map[*eid] = {s, s.substr(s.find(' ') + 1)};
      continue;
    }
    auto it = types.find(s);
    std::string type = it != types.end() ? it->second : std::string(kFallbackType);
    int eid = next_eid++;
    replacement[s] = MaskedSurface(eid, type);
    out.entity_map[eid] = {s, type};
  }

  for (const auto& t : ex.triples) {
    out.example.triples.push_back(
        {replacement.at(t.subject), t.relation, replacement.at(t.object)});
  }

  // Longest surface first so overlapping mentions resolve to the longer one.
  std::vector<std::pair<Tokens, Tokens>> patterns;
  for (const auto& s : surfaces) {
    if (replacement[s] == s) continue;
    patterns.emplace_back(SplitRaw(s), SplitRaw(replacement[s]));
  }
  std::stable_sort(patterns.begin(), patterns.end(),
                   [](const auto& a, const auto& b) {
                     return a.first.size() > b.first.size();
                   });
  for (const auto& ref : ex.references) {
    Tokens masked;
    size_t i = 0;
    while (i < ref.size()) {
      bool hit = false;
      for (const auto& [pat, rep] : patterns) {
        if (i + pat.size() <= ref.size() &&
            std::equal(pat.begin(), pat.end(), ref.begin() + i)) {
          masked.insert(masked.end(), rep.begin(), rep.end());
          i += pat.size();
          hit = true;
          break;
        }
      }
      if (!hit) masked.push_back(ref[i++]);
    }
    out.example.references.push_back(std::move(masked));
  }
  return out;
}

MaskedExample WrapUnmasked(const Example& ex) { return MaskedExample{ex, {}}; }

Tokens UnmaskText(const Tokens& tokens,
                  const std::map<int, EntityInfo>& entity_map) {
  Tokens out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    auto eid = ParseEntityToken(tokens[i]);
    if (!eid) {
      out.push_back(tokens[i]);
      continue;
    }
    auto it = entity_map.find(*eid);
    if (it == entity_map.end()) {
      std::cerr << "warning: no entity for " << tokens[i] << "\n";
      out.push_back(tokens[i]);
      continue;
    }
    Tokens surface = SplitRaw(it->second.surface);
    out.insert(out.end(), surface.begin(), surface.end());
    if (i + 1 < tokens.size() && tokens[i + 1] == it->second.type) ++i;
  }
  return out;
}

Vocab::Vocab() : Vocab(std::vector<std::string>{}) {}

Vocab::Vocab(std::vector<std::string> tokens) {
  tokens_ = {"<pad>", "<unk>", "<s>", "</s>"};
  for (auto& t : tokens) {
    if (std::find(tokens_.begin(), tokens_.begin() + kNumReserved, t) !=
        tokens_.begin() + kNumReserved) {
      continue;
    }
    tokens_.push_back(std::move(t));
  }
  for (int i = 0; i < size(); ++i) {
    if (!index_.emplace(tokens_[i], i).second) {
      throw std::invalid_argument("duplicate vocabulary token: " + tokens_[i]);
    }
  }
}

int Vocab::Index(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? kUnk : it->second;
}

const std::string& Vocab::Token(int index) const {
  if (index < 0 || index >= size()) {
    throw std::out_of_range("vocabulary index " + std::to_string(index));
  }
  return tokens_[index];
}

std::vector<int> Vocab::Encode(const Tokens& tokens) const {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(Index(t));
  return ids;
}

Tokens Vocab::Decode(const std::vector<int>& ids) const {
  Tokens out;
  for (int id : ids) {
    if (id == kEos) break;
    if (id == kPad || id == kBos) continue;
    out.push_back(Token(id));
  }
  return out;
}

void Vocab::Save(const std::string& path, const std::string& header) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write vocabulary " + path);
  if (!header.empty()) out << "# " << header << "\n";
  for (const auto& t : tokens_) out << t << "\n";
}

Vocab Vocab::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open vocabulary " + path);
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) tokens.push_back(line);
  if (!tokens.empty() && !tokens.front().empty() && tokens.front()[0] == '#') {
    tokens.erase(tokens.begin());
  }
  if (tokens.size() < kNumReserved || tokens[kPad] != "<pad>" ||
      tokens[kUnk] != "<unk>" || tokens[kBos] != "<s>" ||
      tokens[kEos] != "</s>") {
    throw std::runtime_error("vocabulary " + path +
                             ": reserved tokens missing from lines 1-4");
  }
  return Vocab(std::vector<std::string>(tokens.begin() + kNumReserved,
                                        tokens.end()));
}

Tokens TripleTokens(const Triple& t) {
  Tokens out = SplitRaw(t.subject);
  for (const auto* f : {&t.relation, &t.object}) {
    Tokens part = SplitRaw(*f);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

Vocab BuildVocab(const std::vector<MaskedExample>& corpus, int min_freq) {
  if (min_freq < 1) throw std::invalid_argument("min_freq must be >= 1");
  std::unordered_map<std::string, int> freq;
  for (const auto& m : corpus) {
    for (const auto& t : m.example.triples) {
      for (const auto& tok : TripleTokens(t)) ++freq[tok];
    }
    for (const auto& ref : m.example.references) {
      for (const auto& tok : ref) ++freq[tok];
    }
  }
  std::vector<std::pair<std::string, int>> entries(freq.begin(), freq.end());
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::vector<std::string> tokens;
  for (auto& [tok, n] : entries) {
    if (n >= min_freq) tokens.push_back(tok);
  }
  return Vocab(std::move(tokens));
}

}  // namespace g2t
