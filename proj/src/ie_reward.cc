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

#include "g2t/ie_reward.h"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include "json.hpp"

namespace g2t {
namespace {

Tokens LowerTokens(const std::string& field) { return Tokenize(field); }

Tokens Lowered(const Tokens& toks) {
  Tokens out;
  out.reserve(toks.size());
  for (const auto& t : toks) {
    auto low = Tokenize(t);
    out.insert(out.end(), low.begin(), low.end());
  }
  return out;
}

// Start of the first contiguous occurrence of `needle`, or -1.
long Find(const Tokens& hay, const Tokens& needle, size_t from = 0) {
  if (needle.empty()) return static_cast<long>(from);
  if (hay.size() < needle.size()) return -1;
  for (size_t i = from; i + needle.size() <= hay.size(); ++i) {
    if (std::equal(needle.begin(), needle.end(), hay.begin() + i)) return static_cast<long>(i);
  }
  return -1;
}

bool ContainsAll(const Tokens& sentence, const Tokens& tokens) {
  return std::all_of(tokens.begin(), tokens.end(), [&](const std::string& t) {
    return std::find(sentence.begin(), sentence.end(), t) != sentence.end();
  });
}

long FirstIndex(const Tokens& sentence, const std::string& token) {
  auto it = std::find(sentence.begin(), sentence.end(), token);
  return it == sentence.end() ? -1 : static_cast<long>(it - sentence.begin());
}

std::string OrderName(TriggerOrder o) {
  switch (o) {
    case TriggerOrder::kSubjectFirst: return "SO";
    case TriggerOrder::kObjectFirst: return "OS";
    case TriggerOrder::kAny: return "ANY";
  }
  return "ANY";
}

TriggerOrder ParseOrder(const std::string& s) {
  if (s == "SO") return TriggerOrder::kSubjectFirst;
  if (s == "OS") return TriggerOrder::kObjectFirst;
  if (s == "ANY") return TriggerOrder::kAny;
  throw std::invalid_argument("lexicon order flag must be SO, OS or ANY, got '" + s + "'");
}

Triple Normalized(const Triple& t) {
  return {NormalizeField(t.subject), NormalizeField(t.relation), NormalizeField(t.object)};
}

}  // namespace

std::vector<Tokens> SplitSentences(const Tokens& text) {
  std::vector<Tokens> out;
  Tokens cur;
  for (const auto& t : text) {
    cur.push_back(t);
    if (t == "." || t == "!" || t == "?") {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

void RelationLexicon::Add(const std::string& relation, Trigger trigger) {
  trigger.tokens = Lowered(trigger.tokens);
  auto& list = entries_[SplitRelationLabel(relation)];
  if (std::find(list.begin(), list.end(), trigger) == list.end()) list.push_back(std::move(trigger));
}

const std::vector<Trigger>* RelationLexicon::Find(const std::string& relation) const {
  auto it = entries_.find(SplitRelationLabel(relation));
  return it == entries_.end() ? nullptr : &it->second;
}

RelationLexicon RelationLexicon::Parse(std::istream& in) {
  RelationLexicon lex;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    auto t1 = line.find('\t');
    auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) {
      throw std::runtime_error("lexicon line " + std::to_string(lineno) +
                               ": expected relation TAB order TAB trigger");
    }
    try {
      lex.Add(line.substr(0, t1),
              {Tokenize(line.substr(t2 + 1)), ParseOrder(line.substr(t1 + 1, t2 - t1 - 1))});
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error("lexicon line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return lex;
}

RelationLexicon RelationLexicon::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open lexicon " + path);
  return Parse(in);
}

void RelationLexicon::Write(std::ostream& out) const {
  for (const auto& [rel, triggers] : entries_) {
    for (const auto& t : triggers) out << rel << "\t" << OrderName(t.order) << "\t" << Join(t.tokens) << "\n";
  }
}

RelationLexicon BootstrapLexicon(const std::vector<Example>& examples, int top_k) {
  std::map<std::string, std::map<std::pair<Tokens, TriggerOrder>, int>> counts;
  for (const auto& ex : examples) {
    for (const auto& t : ex.triples) {
      Tokens s = LowerTokens(t.subject), o = LowerTokens(t.object);
      for (const auto& raw : ex.references) {
        Tokens ref = Lowered(raw);
        long si = Find(ref, s), oi = Find(ref, o);
        if (si < 0 || oi < 0) continue;
        long s_end = si + static_cast<long>(s.size());
        long o_end = oi + static_cast<long>(o.size());
        if (s_end <= oi) {
          ++counts[t.relation][{Tokens(ref.begin() + s_end, ref.begin() + oi), TriggerOrder::kSubjectFirst}];
        } else if (o_end <= si) {
          ++counts[t.relation][{Tokens(ref.begin() + o_end, ref.begin() + si), TriggerOrder::kObjectFirst}];
        }
      }
    }
  }
  RelationLexicon lex;
  for (auto& [rel, spans] : counts) {
    std::vector<std::pair<std::pair<Tokens, TriggerOrder>, int>> ranked(spans.begin(), spans.end());
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    for (int k = 0; k < top_k && k < static_cast<int>(ranked.size()); ++k) {
      lex.Add(rel, {ranked[k].first.first, ranked[k].first.second});
    }
  }
  return lex;
}

PatternExtractor::PatternExtractor(RelationLexicon lexicon) : lexicon_(std::move(lexicon)) {
  for (const auto& [rel, triggers] : lexicon_.entries()) {
    if (triggers.empty()) throw std::invalid_argument("lexicon entry without triggers: " + rel);
  }
}

std::set<Triple> PatternExtractor::Extract(const Tokens& text, const std::vector<Triple>& candidates) {
  std::set<Triple> out;
  auto sentences = SplitSentences(Lowered(text));
  for (const auto& cand : candidates) {
    const auto* triggers = lexicon_.Find(cand.relation);
    if (!triggers) continue;
    Tokens s = LowerTokens(cand.subject), o = LowerTokens(cand.object);
    if (s.empty() || o.empty()) continue;
    bool found = false;
    for (const auto& sent : sentences) {
      if (!ContainsAll(sent, s) || !ContainsAll(sent, o)) continue;
      long sp = FirstIndex(sent, s.front()), op = FirstIndex(sent, o.front());
      for (const auto& trig : *triggers) {
        if (Find(sent, trig.tokens) < 0) continue;
        if (trig.order == TriggerOrder::kSubjectFirst && !(sp < op)) continue;
        if (trig.order == TriggerOrder::kObjectFirst && !(op < sp)) continue;
        found = true;
        break;
      }
      if (found) break;
    }
    if (found) out.insert(cand);
  }
  return out;
}

std::vector<std::set<Triple>> ProcessExtractor::ExtractBatch(const std::vector<Tokens>& texts) {
  std::lock_guard<std::mutex> lock(mu_);
  std::vector<std::set<Triple>> out(texts.size());
  char path[] = "/tmp/g2t-extract-XXXXXX";
  int fd = mkstemp(path);
  if (fd < 0) {
    std::cerr << "warning: external extractor: cannot create input file\n";
    return out;
  }
  close(fd);
  {
    std::ofstream f(path);
    for (const auto& t : texts) f << Join(t) << "\n";
  }
  std::string cmd = command_ + " < " + path;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) {
    std::remove(path);
    std::cerr << "warning: external extractor failed to start\n";
    return out;
  }
  std::vector<std::string> lines;
  std::string cur;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) cur.append(buf, n);
  int status = pclose(pipe);
  std::remove(path);
  if (status != 0) {
    std::cerr << "warning: external extractor exited with status "
              << (WIFEXITED(status) ? WEXITSTATUS(status) : status) << "\n";
    return std::vector<std::set<Triple>>(texts.size());
  }
  size_t start = 0;
  for (size_t i = 0; i < texts.size(); ++i) {
    auto nl = cur.find('\n', start);
    if (nl == std::string::npos && start >= cur.size()) {
      std::cerr << "warning: external extractor returned " << i << " of " << texts.size()
                << " lines\n";
      return std::vector<std::set<Triple>>(texts.size());
    }
    std::string line = cur.substr(start, nl == std::string::npos ? std::string::npos : nl - start);
    start = nl == std::string::npos ? cur.size() : nl + 1;
    try {
      auto triples = nlohmann::json::parse(line).get<std::vector<std::array<std::string, 3>>>();
      for (const auto& t : triples) out[i].insert({NormalizeField(t[0]), SplitRelationLabel(t[1]), NormalizeField(t[2])});
    } catch (const std::exception& e) {
      std::cerr << "warning: external extractor line " << i + 1 << ": " << e.what() << "\n";
      out[i].clear();
    }
  }
  return out;
}

std::set<Triple> ProcessExtractor::Extract(const Tokens& text, const std::vector<Triple>&) {
  return ExtractBatch({text}).front();
}

int Reward(const std::set<Triple>& extracted, const std::vector<Triple>& gold) {
  std::set<Triple> gold_norm;
  for (const auto& g : gold) gold_norm.insert(Normalized(g));
  std::set<Triple> hits;
  for (const auto& e : extracted) {
    Triple n = Normalized(e);
    if (gold_norm.count(n)) hits.insert(n);
  }
  return static_cast<int>(hits.size());
}

}  // namespace g2t
